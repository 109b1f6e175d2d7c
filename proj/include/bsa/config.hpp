#pragma once

// Run configuration: YAML key/value file with nested sections and explicit
// units on every dimensioned quantity ("475 nm", "30 um", "75 deg"). Missing
// fields fall back to the built-in paper defaults; dotted-path CLI overrides
// are applied onto the parsed tree before binding.

#include <yaml-cpp/yaml.h>

#include <cstdlib>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "bsa/core.hpp"
#include "bsa/geometry.hpp"
#include "bsa/modesolver.hpp"
#include "bsa/raster.hpp"

namespace bsa::config {

struct Range {
    double min = 0, max = 0;
    int samples = 2;
};

/// Per-figure sweep settings (defaults reproduce the paper's plots at a
/// desk-scale sampling density).
struct SweepSettings {
    Range fig3a_width{0.400, 0.550, 7};       // um
    Range fig3a_etch{0.080, 0.140, 5};        // um
    double fig3_gap = 0.065;                  // um
    Range fig3b_gap{0.040, 0.120, 5};         // um
    Range fig4_lc{1.0, 25.0, 97};             // um
    double fig4a_gap = 0.065;                 // um
    Range fig4b_gap{0.025, 0.080, 12};        // um
    Range fig5a_lc{12.5, 15.0, 26};           // um
    Range fig6c_na{0.25, 0.60, 8};
    std::vector<double> table_gaps;           // um; default filled in loader
    double optimizer_tol_gap = 0.001;         // um
    double optimizer_tol_lc = 0.005;          // um
};

/// Acceptance bands for the summary pass/fail report of `reproduce`.
struct AcceptanceBands {
    double xi_min = 0.9, xi_max = 1.1;
    double argmin_gap_min = 0.025, argmin_gap_max = 0.055;  // um
    double zeta_ratio_min = 5.0;
    double min_error_max = 1e-3;
    double eta_min = 0.5, eta_max = 0.8;
    double eta_imbalance_max = 0.03;
};

struct SolverSettings {
    geometry::RasterParams grid;          // production solves (10 nm default)
    geometry::RasterParams fiber_grid;    // facet solves need a wider window
    modes::SolverOptions options;
    int table_retry_count = 0;  // reserved
    SolverSettings() {
        fiber_grid.dx = fiber_grid.dy = 0.020;
        fiber_grid.margin = 2.5;
    }
};

enum class GeometryKind { pair, rib, cladding_only };

struct RunConfig {
    geometry::DeviceSpec device;
    GeometryKind geometry = GeometryKind::pair;
    SolverSettings solver;
    SweepSettings sweeps;
    AcceptanceBands bands;
    double eta_te = 0.6616, eta_tm = 0.6552;  // paper fiber efficiencies
    std::string output_dir = "out";
};

namespace detail {

inline config_error field_error(const std::string& path, const std::string& what) {
    return config_error("config field '" + path + "': " + what);
}

// "475 nm" / "2 um" / "0.3mm" -> micrometers.
inline double parse_length(const std::string& text, const std::string& path) {
    std::istringstream in(text);
    double value = 0;
    std::string unit;
    if (!(in >> value)) throw field_error(path, "expected '<number> <unit>', got '" + text + "'");
    in >> unit;
    if (unit == "nm") return value * 1e-3;
    if (unit == "um" || unit == "µm") return value;
    if (unit == "mm") return value * 1e3;
    throw field_error(path, "length needs an explicit unit (nm|um|mm), got '" + text + "'");
}

inline double parse_angle(const std::string& text, const std::string& path) {
    std::istringstream in(text);
    double value = 0;
    std::string unit;
    if (!(in >> value)) throw field_error(path, "expected '<number> deg', got '" + text + "'");
    in >> unit;
    if (unit == "deg" || unit.empty()) return value;
    if (unit == "rad") return value * 180.0 / kPi;
    throw field_error(path, "angle unit must be deg or rad, got '" + text + "'");
}

class Reader {
public:
    explicit Reader(const YAML::Node& root) : root_(root) {}

    std::optional<YAML::Node> find(const std::string& dotted) const {
        YAML::Node node = YAML::Clone(root_);
        std::string part;
        std::istringstream in(dotted);
        while (std::getline(in, part, '.')) {
            if (!node || !node.IsMap()) return std::nullopt;
            YAML::Node next = node[part];
            if (!next) return std::nullopt;
            node = next;
        }
        return node;
    }

    void length(const std::string& path, double& out) const {
        if (auto n = find(path)) out = parse_length(scalar(*n, path), path);
    }
    void angle(const std::string& path, double& out) const {
        if (auto n = find(path)) out = parse_angle(scalar(*n, path), path);
    }
    void number(const std::string& path, double& out) const {
        if (auto n = find(path)) {
            try {
                out = n->as<double>();
            } catch (const YAML::Exception&) {
                throw field_error(path, "expected a plain number");
            }
        }
    }
    void integer(const std::string& path, int& out) const {
        if (auto n = find(path)) {
            try {
                out = n->as<int>();
            } catch (const YAML::Exception&) {
                throw field_error(path, "expected an integer");
            }
        }
    }
    void text(const std::string& path, std::string& out) const {
        if (auto n = find(path)) out = scalar(*n, path);
    }
    void length_range(const std::string& path, Range& out) const {
        if (auto n = find(path)) {
            Reader sub(*n);
            sub.length("min", out.min);
            sub.length("max", out.max);
            sub.integer("samples", out.samples);
        }
    }
    void number_range(const std::string& path, Range& out) const {
        if (auto n = find(path)) {
            Reader sub(*n);
            sub.number("min", out.min);
            sub.number("max", out.max);
            sub.integer("samples", out.samples);
        }
    }
    void length_list(const std::string& path, std::vector<double>& out) const {
        if (auto n = find(path)) {
            if (!n->IsSequence()) throw field_error(path, "expected a list of lengths");
            out.clear();
            for (const auto& item : *n)
                out.push_back(parse_length(scalar(item, path), path));
        }
    }

private:
    YAML::Node root_;

    static std::string scalar(const YAML::Node& n, const std::string& path) {
        if (!n.IsScalar()) throw field_error(path, "expected a scalar value");
        return n.as<std::string>();
    }
};

// Apply "a.b.c=value" overrides onto the YAML tree.
inline void apply_override(YAML::Node root, const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw config_error("override '" + assignment + "' is not of the form key.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);
    std::vector<std::string> parts;
    std::string part;
    std::istringstream in(path);
    while (std::getline(in, part, '.')) parts.push_back(part);
    if (parts.empty()) throw config_error("override '" + assignment + "' has an empty path");
    // yaml-cpp nodes share storage, so indexing walks/creates the tree in place
    YAML::Node node = root;
    for (size_t k = 0; k + 1 < parts.size(); ++k) {
        YAML::Node next = node[parts[k]];
        node = next;
    }
    node[parts.back()] = value;
}

}  // namespace detail

/// Parse a configuration tree (already loaded YAML) into a RunConfig.
inline RunConfig bind_config(const YAML::Node& root) {
    RunConfig cfg;
    detail::Reader r(root);

    r.number("stack.n_core", cfg.device.stack.n_core);
    r.number("stack.n_clad", cfg.device.stack.n_clad);
    r.length("stack.film_thickness", cfg.device.stack.film_thickness);
    r.length("stack.box_thickness", cfg.device.stack.box_thickness);
    r.length("stack.clad_thickness", cfg.device.stack.clad_thickness);
    r.length("stack.wavelength", cfg.device.stack.wavelength);

    r.length("rib.width", cfg.device.pair.rib.width);
    r.length("rib.etch_depth", cfg.device.pair.rib.etch_depth);
    r.angle("rib.sidewall_angle", cfg.device.pair.rib.sidewall_angle);
    r.length("pair.gap", cfg.device.pair.gap);

    r.length("sbend.start_separation", cfg.device.sbend.start_separation);
    r.length("sbend.length", cfg.device.sbend.bend_length);
    r.integer("sbend.samples", cfg.device.sbend.samples);
    cfg.device.sbend.end_gap = cfg.device.pair.gap;

    r.length("device.coupling_length", cfg.device.coupling_length);
    r.number("device.bend_transmission_te", cfg.device.bend_transmission_te);
    r.number("device.bend_transmission_tm", cfg.device.bend_transmission_tm);

    std::string kind = "pair";
    r.text("geometry", kind);
    if (kind == "pair") cfg.geometry = GeometryKind::pair;
    else if (kind == "rib") cfg.geometry = GeometryKind::rib;
    else if (kind == "cladding_only") cfg.geometry = GeometryKind::cladding_only;
    else throw detail::field_error("geometry", "must be pair|rib|cladding_only");

    r.length("solver.dx", cfg.solver.grid.dx);
    r.length("solver.dy", cfg.solver.grid.dy);
    r.length("solver.margin", cfg.solver.grid.margin);
    if (auto n = r.find("solver.window_width"))
        cfg.solver.grid.window_width = detail::parse_length(n->as<std::string>(), "solver.window_width");
    if (auto n = r.find("solver.window_height"))
        cfg.solver.grid.window_height =
            detail::parse_length(n->as<std::string>(), "solver.window_height");
    double n_guess = -1;
    r.number("solver.n_guess", n_guess);
    if (n_guess > 0) cfg.solver.options.n_guess = n_guess;
    r.number("solver.residual_tol", cfg.solver.options.residual_tol);
    r.integer("solver.max_krylov", cfg.solver.options.max_krylov);
    r.number("solver.edge_power_tol", cfg.solver.options.edge_power_tol);
    r.length("fiber.dx", cfg.solver.fiber_grid.dx);
    cfg.solver.fiber_grid.dy = cfg.solver.fiber_grid.dx;
    r.length("fiber.margin", cfg.solver.fiber_grid.margin);

    r.length_range("sweeps.fig3a.width", cfg.sweeps.fig3a_width);
    r.length_range("sweeps.fig3a.etch_depth", cfg.sweeps.fig3a_etch);
    r.length("sweeps.fig3.gap", cfg.sweeps.fig3_gap);
    r.length_range("sweeps.fig3b.gap", cfg.sweeps.fig3b_gap);
    r.length_range("sweeps.fig4.coupling_length", cfg.sweeps.fig4_lc);
    r.length("sweeps.fig4a.gap", cfg.sweeps.fig4a_gap);
    r.length_range("sweeps.fig4b.gap", cfg.sweeps.fig4b_gap);
    r.length_range("sweeps.fig5a.coupling_length", cfg.sweeps.fig5a_lc);
    r.number_range("sweeps.fig6c.na", cfg.sweeps.fig6c_na);
    r.length_list("sweeps.table_gaps", cfg.sweeps.table_gaps);
    r.length("sweeps.optimizer_tol_gap", cfg.sweeps.optimizer_tol_gap);
    r.length("sweeps.optimizer_tol_lc", cfg.sweeps.optimizer_tol_lc);

    r.number("acceptance.xi_min", cfg.bands.xi_min);
    r.number("acceptance.xi_max", cfg.bands.xi_max);
    r.length("acceptance.argmin_gap_min", cfg.bands.argmin_gap_min);
    r.length("acceptance.argmin_gap_max", cfg.bands.argmin_gap_max);
    r.number("acceptance.zeta_ratio_min", cfg.bands.zeta_ratio_min);
    r.number("acceptance.min_error_max", cfg.bands.min_error_max);
    r.number("acceptance.eta_min", cfg.bands.eta_min);
    r.number("acceptance.eta_max", cfg.bands.eta_max);
    r.number("acceptance.eta_imbalance_max", cfg.bands.eta_imbalance_max);

    r.number("fiber.eta_te", cfg.eta_te);
    r.number("fiber.eta_tm", cfg.eta_tm);
    r.text("output.directory", cfg.output_dir);

    if (cfg.sweeps.table_gaps.empty()) {
        // log-spaced gaps from just below the smallest swept gap out to where
        // the splitting has decayed away, shared by every device-level sweep
        const double lo = 0.020, hi = 0.700;
        const int n = 12;
        for (int k = 0; k < n; ++k)
            cfg.sweeps.table_gaps.push_back(lo * std::pow(hi / lo, double(k) / (n - 1)));
    }

    try {
        cfg.device.validate();
    } catch (const std::invalid_argument& e) {
        throw config_error(std::string("invalid device configuration: ") + e.what());
    }
    return cfg;
}

/// Load a configuration file, apply dotted-path overrides, honor the
/// BSA_OUTPUT_DIR environment variable, and bind.
inline RunConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides = {},
                             const std::string& output_dir_flag = "") {
    YAML::Node root;
    if (!path.empty()) {
        try {
            root = YAML::LoadFile(path);
        } catch (const YAML::BadFile&) {
            throw config_error("cannot open config file '" + path + "'");
        } catch (const YAML::ParserException& e) {
            throw config_error("config parse error in '" + path + "' at line " +
                               std::to_string(e.mark.line + 1) + ": " + e.msg);
        }
    }
    for (const std::string& ov : overrides) detail::apply_override(root, ov);
    RunConfig cfg = bind_config(root);
    if (const char* env = std::getenv("BSA_OUTPUT_DIR"); env && *env) cfg.output_dir = env;
    if (!output_dir_flag.empty()) cfg.output_dir = output_dir_flag;
    return cfg;
}

}  // namespace bsa::config
