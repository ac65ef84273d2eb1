#pragma once

#include <array>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "groove/linear.hpp"
#include "groove/norms.hpp"

namespace groove::fixed_point {

// Self-similar iterate: the profile and its first three derivatives on a
// uniform half-line grid, plus the boundary flux amplitude B = (W''(0))^2.
// Derivatives are carried explicitly; the iteration never differentiates W
// numerically.
struct Profile {
    std::vector<double> y_nodes;
    std::vector<double> W, W1, W2, W3;
    double B = 0.0;

    double spacing() const { return y_nodes.size() > 1 ? y_nodes[1] - y_nodes[0] : 0.0; }
    double length() const { return y_nodes.empty() ? 0.0 : y_nodes.back(); }
    const std::vector<double>& deriv(int k) const;
};

// Pointwise nonlinearity F = Phi1(W') W''' - Phi2(W') (W'')^2 on the grid.
struct SourceProfile {
    std::vector<double> y_nodes;
    std::vector<double> F;
    double F0 = 0.0;
};

enum class Mode { profile, spacetime };

struct SolveConfig {
    double beta = 0.0;        // contact angle, radians
    double gamma = 0.5;       // Hoelder exponent of the solution class
    double L = 12.0;          // half-line truncation in the scaled variable
    int n_y = 400;            // grid intervals on [0, L]
    double tol = 1e-8;        // weighted-norm stopping threshold for updates
    int max_iter = 50;
    Mode mode = Mode::profile;
    double T = 1.0;           // horizon (spacetime mode)
    int n_t = 20;             // time levels (spacetime mode)
    double M_cap = 1.0;       // norm ball radius (diagnostic)
    double max_tan_beta = 0.25;  // smallness threshold accepted by the solver
    bool linear_only = false; // drop the nonlinearity and the flux datum
    int quad_level = 1;       // 1 = fine, 0 = coarse convolution quadrature

    double tan_beta() const;
    double slope_cap() const { return 4.0 * tan_beta(); }
    void validate() const;
};

struct ProfileResult {
    Profile profile;
    int iterations = 0;
    bool converged = false;
    std::vector<double> contraction_history;  // ratios of successive update norms
    double residual_bc_angle = 0.0;           // |W'(0) - tan(beta)|
    double residual_noflux = 0.0;             // |W'''(0) - c_beta W''(0)^2|
    double depth_coefficient = 0.0;           // -W(0)
    double collapse_error = 0.0;              // spacetime mode only
    std::vector<double> weak_residuals;       // one defect per built-in test function
    norms::NormReport norm_report;
};

// Thrown when an iterate leaves the small-slope ball |W'| <= 4 tan(beta).
struct BallExit : std::runtime_error {
    explicit BallExit(const std::string& what) : std::runtime_error(what) {}
};

// Slope nonlinearity factors:
//   phi1(p) = 1/(1+p^2)^2 - 1,   phi2(p) = 3p/(1+p^2)^3.
inline double phi1(double p) {
    const double d = 1.0 + p * p;
    return 1.0 / (d * d) - 1.0;
}
inline double phi2(double p) {
    const double d = 1.0 + p * p;
    return 3.0 * p / (d * d * d);
}

// F = phi1(W1) W3 - phi2(W1) W2^2. Throws BallExit past the slope cap.
SourceProfile source(const Profile& profile, double slope_cap);

// Scaled convolution of the odd-extended source against the kernel gradient:
// returns I_k on the source grid, where the space-time smoothing term
// D(x,t) = -int_0^t int_R (d/dx G)(x-z, t-tau) (P F)(z, tau) dz dtau for the
// self-similar source tau^{-1/2} F(z tau^{-1/4}) satisfies
// (d/dx)^k D = t^{(1-k)/4} I_k(x t^{-1/4}).
std::array<std::vector<double>, 4> duhamel_all(const SourceProfile& source, int quad_level);
std::vector<double> duhamel(const SourceProfile& source, int k, int quad_level = 1);

// One application of the solution map: linear part driven by the slope datum
// and the iterate's boundary flux amplitude, plus the smoothing term.
Profile picard_step(const Profile& profile, const SolveConfig& cfg,
                    const linear::LinearProfiles& lin);

ProfileResult solve_profile(const SolveConfig& cfg);
ProfileResult solve_spacetime(const SolveConfig& cfg);

// Weighted norm of a profile update, via the self-similar space-time
// embedding (T = 1, 12 time levels).
double profile_z_norm(const Profile& p, double gamma);

// Measured map Lipschitz ratios |F w1 - F w2|_Z / |w1 - w2|_Z over random
// profile pairs inside the small-slope ball. Pair shapes are drawn from a
// fixed seed so runs at different beta see matched geometry.
std::vector<double> contraction_probe(const SolveConfig& cfg, int n_pairs,
                                      unsigned seed = 20240901u);

// Ratio for an explicit pair; empty when the pair coincides.
std::optional<double> probe_pair(const Profile& w1, const Profile& w2, const SolveConfig& cfg,
                                 const linear::LinearProfiles& lin);

// Defect of the weak form of the evolution over [0, T] against built-in test
// function test_fn_id in {0, 1, 2} (smooth, rapidly decaying, vanishing at
// the horizon), evaluated on the self-similar solution:
//   | int <w, phi_t> dt + int <flux(w), phi_x> dt |
// where flux(w) = (1+w_x^2)^{-1/2} d/dx ( w_xx (1+w_x^2)^{-3/2} ).
double weak_residual(const ProfileResult& result, int test_fn_id);
// Magnitude scale of the flux integral for the same test function, used to
// normalize the defect.
double weak_flux_scale(const ProfileResult& result, int test_fn_id);

}  // namespace groove::fixed_point
