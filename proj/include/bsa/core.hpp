#pragma once

#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsa {

inline constexpr double kPi = 3.14159265358979323846;

/// Raised for malformed or inconsistent configuration input (CLI exit code 2).
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a numerical procedure fails to converge or produces
/// out-of-contract values (CLI exit code 3).
class numerical_error : public std::runtime_error {
public:
    explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

// Deterministic locale-independent float formatting shared by CSV/SVG output.
inline std::string fmt_g(double v, int digits = 12) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*g", digits, v);
    return buf;
}

inline std::vector<double> linspace(double a, double b, int n) {
    if (n < 1) throw std::invalid_argument("linspace: n must be >= 1");
    std::vector<double> out(static_cast<size_t>(n));
    if (n == 1) {
        out[0] = a;
        return out;
    }
    const double step = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) out[static_cast<size_t>(i)] = a + step * i;
    out.back() = b;
    return out;
}

inline double square(double x) { return x * x; }

/// Photon/waveguide polarization. TE has the dominant transverse E-field
/// horizontal (E_x), TM vertical (E_y); they carry the H/V qubit basis.
enum class Polarization { TE, TM };

inline const char* to_string(Polarization p) { return p == Polarization::TE ? "TE" : "TM"; }

}  // namespace bsa
