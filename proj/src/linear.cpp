#include "groove/linear.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "groove/kernel.hpp"
#include "groove/parallel.hpp"
#include "groove/quadrature.hpp"

namespace groove::linear {

namespace {

constexpr double kEtaMax = 3.0;
constexpr double kQuadTol = 1e-12;

double osc_width(double y) { return std::min(M_PI / (4.0 * std::max(y, 1.0)), 0.25); }

// Si(y) = int_0^y sin(u)/u du; the integrand is entire.
double sine_integral(double y) {
    return quad::panels([](double u) { return u == 0.0 ? 1.0 : std::sin(u) / u; }, 0.0, y, 1.0,
                        12);
}

double u1_value(double y) {
    // int_0^1 of the full integrand; the dormant tail of (1 - e^{-eta^4})/eta^2
    // beyond eta = 1 integrates in closed form against cos through Si.
    const double j1 = quad::panels(
        [&](double eta) {
            const double e4 = eta * eta * eta * eta;
            const double f = eta < 1e-4 ? eta * eta * (1.0 - 0.5 * e4)
                                        : -std::expm1(-e4) / (eta * eta);
            return f * std::cos(y * eta);
        },
        0.0, 1.0, osc_width(y), 12);
    const double j2 = std::cos(y) - y * (0.5 * M_PI - sine_integral(y));
    const double j3 = -quad::panels(
        [&](double eta) {
            return std::exp(-eta * eta * eta * eta) / (eta * eta) * std::cos(y * eta);
        },
        1.0, kEtaMax, osc_width(y), 12);
    return -(2.0 / M_PI) * (j1 + j2 + j3);
}

double u1_slope(double y) {
    const double i = quad::panels(
        [&](double eta) {
            const double s = eta < 1e-8 ? y : std::sin(y * eta) / eta;
            return std::exp(-eta * eta * eta * eta) * s;
        },
        0.0, kEtaMax, osc_width(y), 12);
    return 1.0 - (2.0 / M_PI) * i;
}

double u1_curv(double y) {
    return -(2.0 / M_PI) * quad::panels(
                               [&](double eta) {
                                   return std::exp(-eta * eta * eta * eta) * std::cos(y * eta);
                               },
                               0.0, kEtaMax, osc_width(y), 12);
}

double u1_third(double y) {
    return (2.0 / M_PI) * quad::panels(
                              [&](double eta) {
                                  return eta * std::exp(-eta * eta * eta * eta) *
                                         std::sin(y * eta);
                              },
                              0.0, kEtaMax, osc_width(y), 12);
}

}  // namespace

double c_beta(double beta) {
    if (!(beta > 0.0) || !(beta < 0.5 * M_PI))
        throw std::domain_error("c_beta: beta must lie in (0, pi/2)");
    const double tb = std::tan(beta);
    return 3.0 * tb / (1.0 + tb * tb);
}

double u1_profile(int k, double y) {
    if (k < 0 || k > 3) throw std::domain_error("u1_profile: k in 0..3");
    if (!(y >= 0.0)) throw std::domain_error("u1_profile: y must be nonnegative");
    switch (k) {
        case 0: return u1_value(y);
        case 1: return u1_slope(y);
        case 2: return u1_curv(y);
        default: return u1_third(y);
    }
}

double u2_profile(int k, double y) {
    if (k < 0 || k > 3) throw std::domain_error("u2_profile: k in 0..3");
    if (!(y >= 0.0)) throw std::domain_error("u2_profile: y must be nonnegative");
    const auto& tab = kernel::TableSet::instance();
    const double s_half = 1.0 / std::sqrt(2.0);   // sigma = s^2 up to 1/2
    const double q_half = std::pow(0.5, 0.25);    // 1 - sigma = q^4 down from 1/2
    if (k <= 2) {
        const double a = 4.0 * quad::adaptive(
                                   [&](double s) {
                                       const double om = 1.0 - s * s;
                                       return std::pow(om, -0.25 * (k + 1)) *
                                              tab.eval(k, y * std::pow(om, -0.25));
                                   },
                                   0.0, s_half, kQuadTol);
        const double b = 8.0 * quad::adaptive(
                                   [&](double q) {
                                       return std::pow(1.0 - q * q * q * q, -0.5) *
                                              std::pow(q, 2 - k) * tab.eval(k, y / q);
                                   },
                                   0.0, q_half, kQuadTol);
        return a + b;
    }
    // third derivative: boundary-flux split plus tempered remainder
    const double a = 4.0 * quad::adaptive(
                               [&](double s) {
                                   const double om = 1.0 - s * s;
                                   return tab.eval(3, y * std::pow(om, -0.25)) / (1.0 + s);
                               },
                               0.0, s_half, kQuadTol);
    const double b = 8.0 * quad::adaptive(
                               [&](double q) {
                                   const double q4 = q * q * q * q;
                                   const double w = std::expm1(-0.5 * std::log1p(-q4));
                                   return w / q * tab.eval(3, y / q);
                               },
                               0.0, q_half, kQuadTol);
    return u1_slope(y) + a + b;
}

double u_linear(int k, double y, double beta, double B) {
    if (!(B >= 0.0)) throw std::domain_error("u_linear: B must be nonnegative");
    const double tb = std::tan(beta);
    if (beta == 0.0) return 0.0;
    return tb * u1_profile(k, y) + c_beta(beta) * B * u2_profile(k, y);
}

BoundaryTrace::BoundaryTrace(std::vector<double> t, std::vector<double> h)
    : t_nodes(std::move(t)), h_values(std::move(h)) {
    if (t_nodes.size() != h_values.size() || t_nodes.empty())
        throw std::invalid_argument("BoundaryTrace: node/value size mismatch");
    for (std::size_t i = 0; i < t_nodes.size(); ++i) {
        if (!(t_nodes[i] > 0.0) || (i && t_nodes[i] <= t_nodes[i - 1]))
            throw std::invalid_argument("BoundaryTrace: nodes must be ascending and positive");
        if (!(h_values[i] >= 0.0) || !std::isfinite(h_values[i]))
            throw std::invalid_argument("BoundaryTrace: h must be finite and nonnegative");
    }
}

double BoundaryTrace::h_at(double t) const {
    if (t <= t_nodes.front()) return h_values.front();
    if (t >= t_nodes.back()) return h_values.back();
    auto it = std::upper_bound(t_nodes.begin(), t_nodes.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - t_nodes.begin());
    const double w = (t - t_nodes[i - 1]) / (t_nodes[i] - t_nodes[i - 1]);
    return (1.0 - w) * h_values[i - 1] + w * h_values[i];
}

namespace {

// Quadrature of 2 * int_a^b f(tau) dtau where f carries a tau^{-1/2} factor at
// tau = 0 (removed by tau = s^2) and a (t - tau)^{-m/4} kernel factor at
// tau = t (removed by t - tau = q^4).
template <typename F>
double segment_integral(const F& f, double a, double b, double t, bool first, bool last,
                        int pts) {
    if (b <= a) return 0.0;
    if (first && last) {
        const double mid = 0.5 * (a + b);
        return segment_integral(f, a, mid, t, true, false, pts) +
               segment_integral(f, mid, b, t, false, true, pts);
    }
    if (first) {
        const double sb = std::sqrt(b);
        return quad::panels([&](double s) { return 2.0 * s * f(s * s); }, std::sqrt(a), sb,
                            std::max(sb / 8.0, 1e-14), pts);
    }
    if (last) {
        const double qb = std::pow(t - a, 0.25);
        return quad::panels([&](double q) { return 4.0 * q * q * q * f(t - q * q * q * q); },
                            0.0, qb, std::max(qb / 10.0, 1e-14), pts);
    }
    return quad::panels(f, a, b, std::max((b - a) / 6.0, 1e-14), pts);
}

}  // namespace

double u2_general(const BoundaryTrace& trace, int k, double x, double t) {
    if (k < 0 || k > 3) throw std::domain_error("u2_general: k in 0..3");
    if (!(x >= 0.0)) throw std::domain_error("u2_general: x must be nonnegative");
    if (!(t > 0.0)) throw std::domain_error("u2_general: t must be positive");
    if (t > trace.t_max() * (1.0 + 1e-12))
        throw std::domain_error("u2_general: t exceeds trace support");
    const auto& tab = kernel::TableSet::instance();

    std::vector<double> cuts{0.0};
    for (double tn : trace.t_nodes)
        if (tn < t * (1.0 - 1e-14)) cuts.push_back(tn);
    cuts.push_back(t);

    double acc = 0.0;
    if (k <= 2) {
        auto f = [&](double tau) {
            const double u = t - tau;
            return trace.h_at(tau) / std::sqrt(tau) * std::pow(u, -0.25 * (k + 1)) *
                   tab.eval_fast(k, x * std::pow(u, -0.25));
        };
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            acc += segment_integral(f, cuts[i], cuts[i + 1], t, i == 0, i + 2 == cuts.size(), 10);
        return 2.0 * acc;
    }
    const double bt = trace.b_at(t);
    auto f = [&](double tau) {
        const double u = t - tau;
        return (trace.h_at(tau) / std::sqrt(tau) - bt) / u *
               tab.eval_fast(3, x * std::pow(u, -0.25));
    };
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
        acc += segment_integral(f, cuts[i], cuts[i + 1], t, i == 0, i + 2 == cuts.size(), 10);
    return bt * u1_profile(1, x * std::pow(t, -0.25)) + 2.0 * acc;
}

LinearProfiles LinearProfiles::build(double h, double length_min) {
    if (!(h > 0.0)) throw std::invalid_argument("LinearProfiles: bad spacing");
    const double length = std::max(length_min, 34.0);  // decay below 1e-10 needs y ~ 32
    const std::size_t n = static_cast<std::size_t>(std::ceil(length / h));
    LinearProfiles lp;
    lp.y_nodes.resize(n + 1);
    for (std::size_t i = 0; i <= n; ++i) lp.y_nodes[i] = static_cast<double>(i) * h;
    for (int k = 0; k < 4; ++k) {
        lp.u1[k].assign(n + 1, 0.0);
        lp.u2[k].assign(n + 1, 0.0);
    }
    kernel::TableSet::instance();  // build tables before fanning out
    parallel_for(n + 1, [&](std::size_t i) {
        const double y = lp.y_nodes[i];
        for (int k = 0; k < 4; ++k) {
            lp.u1[k][i] = u1_profile(k, y);
            lp.u2[k][i] = u2_profile(k, y);
        }
    });
    return lp;
}

}  // namespace groove::linear
