// bsa: design-and-analysis CLI for the polarization-independent
// directional-coupler Bell-state analyzer toolkit.
//
// Exit codes: 0 success, 2 configuration/usage error, 3 numerical failure.

#include <CLI11.hpp>

#include <filesystem>
#include <future>
#include <iostream>

#include "bsa/bellstate.hpp"
#include "bsa/config.hpp"
#include "bsa/csv.hpp"
#include "bsa/figures.hpp"
#include "bsa/fiber.hpp"
#include "bsa/modesolver.hpp"
#include "bsa/sweep.hpp"

namespace {

using namespace bsa;

struct GlobalArgs {
    std::string config_path;
    std::vector<std::string> overrides;
    std::string output_dir;
};

config::RunConfig load(const GlobalArgs& args) {
    return config::load_config(args.config_path, args.overrides, args.output_dir);
}

geometry::IndexMap make_map(const config::RunConfig& cfg) {
    switch (cfg.geometry) {
        case config::GeometryKind::pair:
            return rasterize(cfg.device.pair, cfg.device.stack, cfg.solver.grid);
        case config::GeometryKind::rib:
            return rasterize(cfg.device.pair.rib, cfg.device.stack, cfg.solver.grid);
        case config::GeometryKind::cladding_only: {
            geometry::LayerStack layers;
            layers.stack = cfg.device.stack;
            layers.stack.n_core = layers.stack.n_clad + 1e-12;
            return rasterize(layers, cfg.solver.grid, 16);
        }
    }
    throw config_error("unreachable geometry kind");
}

int cmd_modes(const GlobalArgs& args, int count) {
    const config::RunConfig cfg = load(args);
    const geometry::IndexMap map = make_map(cfg);
    const auto modes = modes::solve_modes(map, cfg.device.stack.wavelength, count, {},
                                          cfg.solver.options);
    if (modes.empty()) {
        std::cout << "no guided modes\n";
        return 0;
    }
    std::cout << "mode,n_eff,polarization,polarization_fraction,symmetry,residual\n";
    namespace fs = std::filesystem;
    fs::create_directories(cfg.output_dir);
    for (size_t k = 0; k < modes.size(); ++k) {
        const auto& m = modes[k];
        std::cout << k << ',' << fmt_g(m.n_eff) << ',' << to_string(m.polarization) << ','
                  << fmt_g(m.polarization_fraction, 6) << ',' << to_string(m.symmetry) << ','
                  << fmt_g(m.residual, 3) << '\n';
        // field CSV at cell centers
        Eigen::ArrayXXd ex, ey;
        modes::cell_centered_fields(m, ex, ey);
        io::CsvWriter csv({"x_um", "y_um", "E_x", "E_y"});
        for (int j = 0; j < map.grid.ny; ++j)
            for (int i = 0; i < map.grid.nx; ++i)
                csv.row({map.grid.x_center(i), map.grid.y_center(j), ex(j, i), ey(j, i)});
        csv.write((fs::path(cfg.output_dir) / ("mode_" + std::to_string(k) + ".csv")).string());
    }
    return 0;
}

int cmd_coupling_strength(const GlobalArgs& args) {
    const config::RunConfig cfg = load(args);
    const auto cs = modes::coupling_strength(cfg.device.pair, cfg.device.stack,
                                             cfg.solver.grid, cfg.solver.options);
    std::cout << "gap_nm,delta_n_TE,delta_n_TM,xi\n";
    std::cout << fmt_g(cs.gap * 1e3) << ',' << fmt_g(cs.delta_n_te) << ','
              << fmt_g(cs.delta_n_tm) << ',' << fmt_g(cs.xi) << '\n';
    return 0;
}

int cmd_transfer(const GlobalArgs& args) {
    const config::RunConfig cfg = load(args);
    figures::Context ctx(cfg);
    const auto tc = coupler::device_transfer(cfg.device, ctx.table());
    const auto sp = coupler::split_result(tc);
    std::cout << "quantity,TE,TM\n";
    std::cout << "t," << fmt_g(tc.t_h) << ',' << fmt_g(tc.t_v) << '\n';
    std::cout << "r," << fmt_g(tc.r_h) << ',' << fmt_g(tc.r_v) << '\n';
    std::cout << "P3," << fmt_g(sp.p3_te) << ',' << fmt_g(sp.p3_tm) << '\n';
    std::cout << "P4," << fmt_g(sp.p4_te) << ',' << fmt_g(sp.p4_tm) << '\n';
    std::cout << "bend_amplitude_factor," << fmt_g(tc.transmission_factor_te) << ','
              << fmt_g(tc.transmission_factor_tm) << '\n';
    std::cout << "zeta," << fmt_g(coupler::zeta(sp)) << ",\n";
    return 0;
}

int cmd_fidelity(const std::vector<double>& splits, const std::vector<double>& coeffs,
                 const std::string& detection, double eta_te, double eta_tm) {
    coupler::TransferCoefficients tc;
    if (!splits.empty()) {
        if (splits.size() != 4)
            throw config_error("--splits needs P3_TE P4_TE P3_TM P4_TM (percent)");
        tc = bell::transfer_from_splits(splits[0] / 100.0, splits[1] / 100.0,
                                        splits[2] / 100.0, splits[3] / 100.0);
    } else if (!coeffs.empty()) {
        if (coeffs.size() != 4) throw config_error("--coeffs needs t_h r_h t_v r_v");
        tc = {coeffs[0], coeffs[1], coeffs[2], coeffs[3], 1.0, 1.0};
    } else {
        throw config_error("fidelity: provide --splits or --coeffs");
    }
    bell::DetectionModel model;
    if (detection == "resolving")
        model = bell::DetectionModel::opposite_polarization_resolving;
    else if (detection == "bucket")
        model = bell::DetectionModel::bucket_coincidence;
    else
        throw config_error("--detection must be resolving|bucket");

    bell::InputWeights w;
    w.a_h = w.b_h = std::sqrt(eta_te);
    w.a_v = w.b_v = std::sqrt(eta_tm);
    const auto rep = bell::oracle_coincidence(tc, w, model);
    std::cout << "fidelity," << fmt_g(rep.fidelity) << '\n';
    std::cout << "error," << fmt_g(rep.error) << '\n';
    std::cout << "coincidence_probability," << fmt_g(rep.coincidence_probability) << '\n';
    std::cout << "heralded_state_basis,uu,ud,du,dd\n";
    const char* rows[4] = {"uu", "ud", "du", "dd"};
    for (int r = 0; r < 4; ++r) {
        std::cout << "rho_" << rows[r];
        for (int c = 0; c < 4; ++c) std::cout << ',' << fmt_g(rep.heralded_state(r, c), 9);
        std::cout << '\n';
    }
    return 0;
}

int cmd_fiber(const GlobalArgs& args) {
    const config::RunConfig cfg = load(args);
    const auto rows =
        fiber::na_sweep(cfg.device.pair.rib, cfg.device.stack, cfg.solver.fiber_grid,
                        cfg.sweeps.fig6c_na.min, cfg.sweeps.fig6c_na.max,
                        cfg.sweeps.fig6c_na.samples, cfg.solver.options);
    std::cout << "NA,eta_TE,eta_TM\n";
    for (const auto& r : rows)
        std::cout << fmt_g(r.na, 6) << ',' << fmt_g(r.eta_te) << ',' << fmt_g(r.eta_tm) << '\n';
    return 0;
}

int run_figures(const GlobalArgs& args, std::vector<std::string> labels, bool parallel) {
    const config::RunConfig cfg = load(args);
    if (labels.size() == 1 && labels[0] == "all") labels = figures::figure_labels();
    for (const auto& l : labels)
        if (std::find(figures::figure_labels().begin(), figures::figure_labels().end(), l) ==
            figures::figure_labels().end())
            throw config_error("unknown figure label '" + l + "'");
    figures::Context ctx(cfg);
    std::vector<figures::FigureArtifact> artifacts;
    if (parallel && labels.size() > 1) {
        // The splitting table is shared state; build it up front, then let
        // the remaining per-figure work fan out.
        ctx.table();
        std::vector<std::future<figures::FigureArtifact>> futures;
        for (const auto& label : labels)
            futures.push_back(std::async(std::launch::async, [&ctx, label] {
                return figures::reproduce(ctx, {label})[0];
            }));
        for (auto& f : futures) artifacts.push_back(f.get());
    } else {
        artifacts = figures::reproduce(ctx, labels);
    }
    figures::write_summary(artifacts, cfg.output_dir);
    std::cout << figures::summary_text(artifacts);
    for (const auto& art : artifacts)
        if (!art.computed) return 3;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Bell-state analyzer design toolkit"};
    app.require_subcommand(1);
    GlobalArgs gargs;
    app.add_option("--config", gargs.config_path, "YAML configuration file");
    app.add_option("--set", gargs.overrides,
                   "dotted-path override, e.g. --set pair.gap=\"40 nm\"");
    app.add_option("--output-dir", gargs.output_dir,
                   "output directory (overrides config and BSA_OUTPUT_DIR)");

    int mode_count = 4;
    auto* modes_cmd = app.add_subcommand("modes", "solve cross-section eigenmodes");
    modes_cmd->add_option("--count", mode_count, "number of modes to report");

    app.add_subcommand("coupling-strength", "per-polarization supermode splitting and xi");
    app.add_subcommand("transfer", "whole-device transfer coefficients and splitting");

    std::vector<double> splits, coeffs;
    std::string detection = "resolving";
    double eta_te = 1.0, eta_tm = 1.0;
    auto* fid_cmd = app.add_subcommand("fidelity", "heralded-entanglement fidelity report");
    fid_cmd->add_option("--splits", splits,
                        "P3_TE P4_TE P3_TM P4_TM splitting percentages")
        ->expected(4);
    fid_cmd->add_option("--coeffs", coeffs, "t_h r_h t_v r_v amplitude coefficients")
        ->expected(4);
    fid_cmd->add_option("--detection", detection, "resolving|bucket");
    fid_cmd->add_option("--eta-te", eta_te, "TE coupling efficiency weight");
    fid_cmd->add_option("--eta-tm", eta_tm, "TM coupling efficiency weight");

    app.add_subcommand("fiber", "fiber-to-chip coupling efficiency versus NA");

    std::string sweep_kind = "xi-map";
    auto* sweep_cmd = app.add_subcommand("sweep", "run one configured sweep, CSV only");
    sweep_cmd->add_option("--kind", sweep_kind, "xi-map|xi-vs-gap|delta-vs-gap|error-vs-lc");

    std::vector<std::string> figure_labels{"all"};
    bool parallel = false;
    auto* rep_cmd = app.add_subcommand("reproduce", "regenerate figure data (CSV + SVG)");
    rep_cmd->add_option("figures", figure_labels, "figure labels or 'all'");
    rep_cmd->add_flag("--parallel", parallel, "generate figures in parallel");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help/--version
        app.exit(e);
        return 2;
    }

    try {
        if (modes_cmd->parsed()) return cmd_modes(gargs, mode_count);
        if (app.get_subcommand("coupling-strength")->parsed())
            return cmd_coupling_strength(gargs);
        if (app.get_subcommand("transfer")->parsed()) return cmd_transfer(gargs);
        if (fid_cmd->parsed()) return cmd_fidelity(splits, coeffs, detection, eta_te, eta_tm);
        if (app.get_subcommand("fiber")->parsed()) return cmd_fiber(gargs);
        if (sweep_cmd->parsed()) {
            static const std::map<std::string, std::string> kinds{
                {"xi-map", "fig3a"}, {"xi-vs-gap", "fig3b"}, {"delta-vs-gap", "fig4b"},
                {"error-vs-lc", "fig5a"}};
            auto it = kinds.find(sweep_kind);
            if (it == kinds.end()) throw bsa::config_error("unknown sweep kind " + sweep_kind);
            return run_figures(gargs, {it->second}, false);
        }
        if (rep_cmd->parsed()) return run_figures(gargs, figure_labels, parallel);
        throw bsa::config_error("no subcommand selected");
    } catch (const bsa::config_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const bsa::numerical_error& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return 3;
    }
}
