#include "groove/specfun.hpp"

#include <cmath>
#include <stdexcept>

namespace groove::specfun {

namespace {

// Lanczos, g = 7, 9 terms.
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7};

double gamma_pos(double z) {
    if (z < 0.5) return M_PI / (std::sin(M_PI * z) * gamma_pos(1.0 - z));
    z -= 1.0;
    double x = kLanczos[0];
    for (int i = 1; i < 9; ++i) x += kLanczos[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * x;
}

}  // namespace

double gamma_fn(double p) {
    if (!(p > 0.0)) throw std::domain_error("gamma_fn: argument must be positive");
    return gamma_pos(p);
}

double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0)) throw std::domain_error("beta_fn: arguments must be positive");
    return gamma_fn(a) * gamma_fn(b) / gamma_fn(a + b);
}

double quartic_moment(double p, double sigma) {
    if (!(p > -1.0)) throw std::domain_error("quartic_moment: p must exceed -1");
    if (!(sigma > 0.0)) throw std::domain_error("quartic_moment: sigma must be positive");
    const double q = 0.25 * (p + 1.0);
    return 0.25 * gamma_fn(q) * std::pow(sigma, -q);
}

}  // namespace groove::specfun
