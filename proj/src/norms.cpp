#include "groove/norms.hpp"

#include <cmath>
#include <stdexcept>

#include "groove/interp.hpp"

namespace groove::norms {

namespace {

double sup_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double sup_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

// Pair list policy for time seminorms.
template <typename Fn>
void for_time_pairs(std::size_t n, Fn&& fn) {
    if (n <= 64) {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = j + 1; l < n; ++l) fn(j, l);
    } else {
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t l = j + 1; l < std::min(n, j + 9); ++l) fn(j, l);
    }
}

}  // namespace

double holder_seminorm(const std::vector<double>& values, const std::vector<double>& nodes,
                       double gamma) {
    if (values.size() != nodes.size() || values.size() < 2)
        throw std::invalid_argument("holder_seminorm: need matching arrays with >= 2 nodes");
    double m = 0.0;
    for (std::size_t i = 0; i < nodes.size(); ++i)
        for (std::size_t j = i + 1; j < nodes.size(); ++j) {
            const double dx = std::abs(nodes[j] - nodes[i]);
            if (dx == 0.0) continue;
            m = std::max(m, std::abs(values[j] - values[i]) / std::pow(dx, gamma));
        }
    return m;
}

double weighted_b_norm(const SpaceTimeField& f, double gamma, double T) {
    double best = 0.0;
    for (std::size_t j = 0; j < f.t_nodes.size(); ++j) {
        const double t = f.t_nodes[j];
        double payload = 0.0;
        for (int k = 0; k <= 3; ++k)
            payload += std::pow(T, -0.25 * (3 - k + gamma)) * sup_abs(f.d[k][j]);
        payload += holder_seminorm(f.d[3][j], f.x_nodes, gamma);
        best = std::max(best, std::pow(t, 0.25 * (2.0 + gamma)) * payload);
    }
    return best;
}

double weighted_c_norm(const SpaceTimeField& f, double gamma, double T) {
    const std::size_t n = f.t_nodes.size();
    double total = 0.0;
    for (int k = 0; k <= 2; ++k) {
        double sup_part = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            sup_part = std::max(sup_part, std::pow(f.t_nodes[j], 0.25) * sup_abs(f.d[k][j]));
        double semi = 0.0;
        for_time_pairs(n, [&](std::size_t j, std::size_t l) {
            const double s = f.t_nodes[j], t = f.t_nodes[l];
            const double num = sup_abs_diff(f.d[k][l], f.d[k][j]);
            semi = std::max(semi, std::pow(s, 0.25 * (2.0 + gamma)) * num /
                                      std::pow(t - s, 0.25 * (1.0 + gamma)));
        });
        total += std::pow(T, -0.25 * (2 - k)) * (sup_part + semi);
    }
    return total;
}

NormReport report(const SpaceTimeField& f, double gamma, double T) {
    NormReport r;
    r.gamma = gamma;
    r.T = T;
    r.b_norm = weighted_b_norm(f, gamma, T);
    r.c_norm = weighted_c_norm(f, gamma, T);
    r.z_norm = r.b_norm + r.c_norm;
    return r;
}

double trace_norm(const linear::BoundaryTrace& trace, double gamma, double T) {
    (void)T;
    const std::size_t n = trace.t_nodes.size();
    if (n < 2) throw std::invalid_argument("trace_norm: need >= 2 nodes");
    double sup_part = 0.0;
    for (double h : trace.h_values) sup_part = std::max(sup_part, std::abs(h));
    double semi = 0.0;
    for_time_pairs(n, [&](std::size_t j, std::size_t l) {
        const double s = trace.t_nodes[j], t = trace.t_nodes[l];
        const double bs = trace.h_values[j] / std::sqrt(s);
        const double bt = trace.h_values[l] / std::sqrt(t);
        semi = std::max(semi, std::pow(s, 0.25 * (3.0 + gamma)) * std::abs(bt - bs) /
                                  std::pow(t - s, 0.25 * (1.0 + gamma)));
    });
    return sup_part + semi;
}

SpaceTimeField embed_self_similar(const std::vector<double>& y_nodes,
                                  const std::array<const std::vector<double>*, 4>& w, int n_t,
                                  double T) {
    if (y_nodes.size() < 2) throw std::invalid_argument("embed_self_similar: bad grid");
    SpaceTimeField f;
    f.x_nodes = y_nodes;
    f.t_nodes.resize(n_t);
    for (int j = 1; j <= n_t; ++j)
        f.t_nodes[j - 1] = T * std::pow(static_cast<double>(j) / n_t, 4.0);
    const double h = y_nodes[1] - y_nodes[0];
    const double L = y_nodes.back();
    for (int k = 0; k < 4; ++k) {
        f.d[k].assign(n_t, std::vector<double>(y_nodes.size(), 0.0));
        for (int j = 0; j < n_t; ++j) {
            const double t = f.t_nodes[j];
            const double scale = std::pow(t, 0.25 * (1 - k));
            const double tq = std::pow(t, 0.25);
            for (std::size_t i = 0; i < y_nodes.size(); ++i) {
                const double y = y_nodes[i] / tq;
                f.d[k][j][i] = y > L ? 0.0 : scale * interp_uniform6(*w[k], 0.0, h, y);
            }
        }
    }
    return f;
}

}  // namespace groove::norms
