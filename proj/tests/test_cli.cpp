// End-to-end CLI checks: exit-code discipline, CSV schema goldens, SVG and
// summary determinism. Heavy figure generation lives in the acceptance
// suite; here the solves are kept tiny via --set overrides.

#include <catch2/catch_amalgamated.hpp>

#include <cstdlib>
#include <fstream>
#include <sstream>

namespace {

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run(const std::string& args, const std::string& out_dir) {
    const std::string cmd = std::string(BSA_CLI_PATH) + " --output-dir " + out_dir + " " +
                            args + " > " + out_dir + "/stdout.txt 2> " + out_dir +
                            "/stderr.txt";
    std::system(("mkdir -p " + out_dir).c_str());
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("fidelity subcommand evaluates the paper splits", "[cli]") {
    const std::string dir = "/tmp/bsa_cli_fid";
    const int code = run("fidelity --splits 49.7 48.9 50.7 48.3", dir);
    REQUIRE(code == 0);
    const std::string out = slurp(dir + "/stdout.txt");
    REQUIRE(out.find("fidelity,0.999738") != std::string::npos);
    REQUIRE(out.find("error,0.000261") != std::string::npos);
    REQUIRE(out.find("rho_ud") != std::string::npos);
}

TEST_CASE("fidelity requires input", "[cli]") {
    REQUIRE(run("fidelity", "/tmp/bsa_cli_fid2") == 2);
}

TEST_CASE("unknown figure label is a usage error", "[cli]") {
    REQUIRE(run("reproduce fig9z", "/tmp/bsa_cli_fig9z") == 2);
}

TEST_CASE("malformed config file exits 2 with a diagnostic", "[cli]") {
    const std::string dir = "/tmp/bsa_cli_badcfg";
    std::system(("mkdir -p " + dir).c_str());
    std::ofstream(dir + "/bad.yaml") << "stack:\n  n_core: [oops\n";
    const int code = run("--config " + dir + "/bad.yaml modes", dir);
    REQUIRE(code == 2);
    REQUIRE(slurp(dir + "/stderr.txt").find("configuration error") != std::string::npos);
}

TEST_CASE("cladding-only config reports no guided modes with exit 0", "[cli]") {
    const std::string dir = "/tmp/bsa_cli_clad";
    const int code = run("--set geometry=cladding_only modes", dir);
    REQUIRE(code == 0);
    REQUIRE(slurp(dir + "/stdout.txt").find("no guided modes") != std::string::npos);
}

TEST_CASE("modes subcommand lists the rib fundamentals", "[cli][solver]") {
    const std::string dir = "/tmp/bsa_cli_modes";
    const int code = run("--set geometry=rib --set solver.dx=\"25 nm\" "
                         "--set solver.dy=\"25 nm\" modes --count 2",
                         dir);
    REQUIRE(code == 0);
    const std::string out = slurp(dir + "/stdout.txt");
    REQUIRE(out.find("n_eff") != std::string::npos);
    REQUIRE(out.find("TE") != std::string::npos);
    REQUIRE(out.find("TM") != std::string::npos);
    REQUIRE(slurp(dir + "/mode_0.csv").rfind("x_um,y_um,E_x,E_y", 0) == 0);
}

TEST_CASE("reproduce emits schema-stable CSV and identical reruns", "[cli][solver][slow]") {
    // Tiny sweep so the two runs stay cheap; determinism must hold at any size.
    const std::string overrides =
        "--set solver.dx=\"25 nm\" --set solver.dy=\"25 nm\" "
        "--set sweeps.fig4b.gap.samples=4 --set sweeps.fig4.coupling_length.samples=25 ";
    const int c1 = run(overrides + "reproduce fig4b", "/tmp/bsa_cli_rep1");
    const int c2 = run(overrides + "reproduce fig4b", "/tmp/bsa_cli_rep2");
    REQUIRE(c1 == 0);
    REQUIRE(c2 == 0);
    const std::string csv1 = slurp("/tmp/bsa_cli_rep1/fig4b.csv");
    REQUIRE(csv1.rfind("g_nm,delta", 0) == 0);
    REQUIRE(csv1 == slurp("/tmp/bsa_cli_rep2/fig4b.csv"));
    REQUIRE(slurp("/tmp/bsa_cli_rep1/fig4b.svg") == slurp("/tmp/bsa_cli_rep2/fig4b.svg"));
    REQUIRE(slurp("/tmp/bsa_cli_rep1/summary.txt") == slurp("/tmp/bsa_cli_rep2/summary.txt"));
    REQUIRE(slurp("/tmp/bsa_cli_rep1/fig4b.svg").rfind("<svg", 0) == 0);
}
