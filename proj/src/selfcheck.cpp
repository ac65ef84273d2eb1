#include "groove/selfcheck.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "groove/cli_io.hpp"
#include "groove/fixed_point.hpp"
#include "groove/kernel.hpp"
#include "groove/linear.hpp"
#include "groove/parallel.hpp"
#include "groove/quadrature.hpp"
#include "groove/specfun.hpp"

namespace groove::selfcheck {

namespace fp = groove::fixed_point;
namespace fs = std::filesystem;

namespace {

double now_between(const std::chrono::steady_clock::time_point& a,
                   const std::chrono::steady_clock::time_point& b) {
    return std::chrono::duration<double>(b - a).count();
}

std::string num(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

// Shared canonical runs, produced once.
struct Context {
    fp::SolveConfig cfg6;
    fp::ProfileResult run05;  // tan(beta) = 0.05 profile solve
    double run05_seconds = 0.0;
};

}  // namespace

double gamma_quad(double p) {
    // series on [0, 1/2] (endpoint handled exactly), panels beyond
    const double delta = 0.5;
    double series = 0.0, term_pow = std::pow(delta, p);
    double factorial = 1.0;
    for (int m = 0; m <= 24; ++m) {
        if (m > 0) factorial *= m;
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        series += sgn * term_pow * std::pow(delta, m) / (factorial * (p + m));
    }
    const double upper = std::max(60.0, 8.0 * p);
    const double tail = quad::adaptive(
        [&](double eta) { return std::pow(eta, p - 1.0) * std::exp(-eta); }, delta, upper,
        1e-14 * (1.0 + std::abs(series)));
    return series + tail;
}

double quartic_moment_quad(double p, double sigma) {
    const double scale = std::pow(sigma, -0.25);
    const double delta = 0.5 * scale;
    double series = 0.0, factorial = 1.0;
    for (int m = 0; m <= 24; ++m) {
        if (m > 0) factorial *= m;
        const double sgn = (m % 2 == 0) ? 1.0 : -1.0;
        series += sgn * std::pow(sigma, m) * std::pow(delta, p + 4.0 * m + 1.0) /
                  (factorial * (p + 4.0 * m + 1.0));
    }
    const double upper = std::pow(60.0 + 4.0 * std::abs(p), 0.25) * scale;
    const double tail = quad::adaptive(
        [&](double xi) {
            return std::pow(xi, p) * std::exp(-xi * xi * xi * xi * sigma);
        },
        delta, upper, 1e-14 * (1.0 + std::abs(series)));
    return series + tail;
}

double duhamel_oracle_2d(const std::function<double(double)>& F, double x, double t,
                         double tol) {
    const double F0 = F(0.0);
    auto pf = [&](double z, double tau) {
        const double a = z * std::pow(tau, -0.25);
        const double v = a >= 0.0 ? F(a) - F0 : -(F(-a) - F0);
        return v / std::sqrt(tau);
    };
    auto inner = [&](double tau) {
        const double lam = std::pow(t - tau, 0.25);
        const double zlo = x - kernel::kRMax * lam;
        const double zhi = x + kernel::kRMax * lam;
        return quad::adaptive(
            [&](double z) { return kernel::g_eval(1, x - z, t - tau) * pf(z, tau); }, zlo, zhi,
            0.02 * tol);
    };
    // tau = s^2 on the lower half, t - tau = q^4 on the upper half
    const double lower = quad::adaptive(
        [&](double s) { return 2.0 * s * inner(s * s); }, 0.0, std::sqrt(0.5 * t), 0.25 * tol);
    const double upper = quad::adaptive(
        [&](double q) { return 4.0 * q * q * q * inner(t - q * q * q * q); }, 0.0,
        std::pow(0.5 * t, 0.25), 0.25 * tol);
    return -(lower + upper);
}

namespace {

// ---- individual checks ----------------------------------------------------

CheckResult check_moment_identities() {
    CheckResult r{1, "closed-form quartic moments vs quadrature", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (double p : {0.0, 1.0, 2.0, 3.5})
        for (double sigma : {0.1, 1.0, 10.0}) {
            const double cf = specfun::quartic_moment(p, sigma);
            const double qd = quartic_moment_quad(p, sigma);
            worst = std::max(worst, std::abs(cf - qd) / std::abs(qd));
        }
    const auto t1 = std::chrono::steady_clock::now();
    r.seconds = now_between(t0, t1);
    r.pass = worst <= 1e-10 && r.seconds < 1.0;
    r.detail = "max rel err " + num(worst) + ", " + num(r.seconds) + " s";
    return r;
}

CheckResult check_pde_identity() {
    CheckResult r{2, "kernel evolution identity", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(12345);
    std::uniform_real_distribution<double> ux(0.0, 10.0), ut(0.1, 4.0);
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double x = ux(rng), t = ut(rng);
        const double rel = std::abs(kernel::pde_residual(x, t)) / std::pow(t, -1.25);
        worst = std::max(worst, rel);
    }
    const auto t1 = std::chrono::steady_clock::now();
    r.seconds = now_between(t0, t1);
    r.pass = worst <= 1e-8 && r.seconds < 10.0;
    r.detail = "max scaled residual " + num(worst) + ", " + num(r.seconds) + " s";
    return r;
}

CheckResult check_envelopes() {
    CheckResult r{3, "kernel decay envelopes", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    double min_nu = 1.0;
    try {
        for (int ell = 0; ell <= 1; ++ell)
            for (int k = 0; k <= 4; ++k) {
                const auto env = kernel::fit_envelope(k, ell, 10.0);
                min_nu = std::min(min_nu, env.nu);
            }
        r.pass = min_nu >= 0.05;
    } catch (const std::exception& e) {
        r.pass = false;
        r.detail = e.what();
    }
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    if (r.detail.empty()) r.detail = "min fitted nu " + num(min_nu);
    return r;
}

CheckResult check_boundary_limits() {
    CheckResult r{4, "linear-profile boundary limits", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    const double g34 = specfun::gamma_fn(0.75);
    const double g14 = specfun::gamma_fn(0.25);
    const double u2_0 = g14 / (2.0 * M_PI) * specfun::beta_fn(0.5, 0.75);
    struct Item {
        double err, tol;
        const char* what;
    };
    const Item items[] = {
        {std::abs(linear::u1_profile(0, 0.0) + 2.0 / M_PI * g34), 1e-8, "U1(0)"},
        {std::abs(linear::u1_profile(1, 0.0) - 1.0), 1e-6, "U1'(0)"},
        {std::abs(linear::u1_profile(3, 0.0)), 1e-6, "U1'''(0)"},
        {std::abs(linear::u2_profile(1, 0.0)), 1e-6, "U2'(0)"},
        {std::abs(linear::u2_profile(3, 0.0) - 1.0), 1e-5, "U2'''(0)"},
        {std::abs(linear::u2_profile(0, 0.0) - u2_0), 1e-6, "U2(0)"},
    };
    std::string bad;
    for (const auto& it : items)
        if (!(it.err <= it.tol)) bad += std::string(it.what) + " err " + num(it.err) + "; ";
    r.pass = bad.empty();
    r.detail = bad.empty() ? "all six limits within tolerance" : bad;
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

CheckResult check_curvature_identity() {
    CheckResult r{5, "slope-profile curvature vs kernel profile", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    for (int i = 0; i <= 200; ++i) {
        const double y = 10.0 * i / 200.0;
        worst = std::max(worst,
                         std::abs(linear::u1_profile(2, y) + 2.0 * kernel::scaled_kernel(0, y)));
    }
    r.pass = worst <= 1e-10;
    r.detail = "max abs defect " + num(worst);
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

CheckResult check_convergence(const Context& ctx) {
    CheckResult r{6, "fixed-point convergence at tan(beta) = 0.05", true, "", 0.0};
    const auto& res = ctx.run05;
    bool ratios_ok = true;
    for (double q : res.contraction_history) ratios_ok = ratios_ok && q <= 0.5;
    r.pass = res.converged && res.iterations <= 20 && ratios_ok && ctx.run05_seconds <= 300.0;
    r.detail = "iterations " + std::to_string(res.iterations) + ", max ratio " +
               num(res.contraction_history.empty()
                       ? 0.0
                       : *std::max_element(res.contraction_history.begin(),
                                           res.contraction_history.end())) +
               ", " + num(ctx.run05_seconds) + " s";
    r.seconds = ctx.run05_seconds;
    return r;
}

CheckResult check_residuals(const Context& ctx) {
    CheckResult r{7, "converged boundary residuals", true, "", 0.0};
    const auto& res = ctx.run05;
    const double w2 = res.profile.W2[0];
    const double tol_noflux = 1e-4 * std::max(1.0, w2 * w2);
    r.pass = res.residual_bc_angle <= 1e-6 && res.residual_noflux <= tol_noflux;
    r.detail = "angle " + num(res.residual_bc_angle) + ", no-flux " + num(res.residual_noflux);
    return r;
}

CheckResult check_depth_bound(const Context& ctx) {
    CheckResult r{8, "groove-depth sign bound", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    const double g34 = specfun::gamma_fn(0.75);
    std::string detail;
    bool ok = true;
    for (double tb : {0.01, 0.02, 0.05}) {
        fp::ProfileResult res;
        if (tb == 0.05) {
            res = ctx.run05;
        } else {
            fp::SolveConfig cfg = ctx.cfg6;
            cfg.beta = std::atan(tb);
            res = fp::solve_profile(cfg);
        }
        const double bound = -(tb / M_PI) * g34;
        const double w0 = res.profile.W[0];
        ok = ok && res.converged && w0 <= bound;
        detail += "W(0)[" + num(tb) + "]=" + num(w0) + " vs " + num(bound) + "; ";
    }
    r.pass = ok;
    r.detail = detail;
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

CheckResult check_linearization(const Context& ctx) {
    CheckResult r{9, "small-angle linearization", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    fp::SolveConfig cfg = ctx.cfg6;
    cfg.beta = std::atan(1e-3);
    fp::ProfileResult res = fp::solve_profile(cfg);
    const double tb = cfg.tan_beta();
    double sup_diff = 0.0, sup_lin = 0.0;
    auto lin = linear::LinearProfiles::build(cfg.L / cfg.n_y, cfg.L);
    for (std::size_t i = 0; i < res.profile.y_nodes.size(); ++i) {
        sup_diff = std::max(sup_diff, std::abs(res.profile.W[i] / tb - lin.u1[0][i]));
        sup_lin = std::max(sup_lin, std::abs(lin.u1[0][i]));
    }
    const double rel = sup_diff / sup_lin;
    r.pass = res.converged && rel <= 1e-2;
    r.detail = "relative deviation " + num(rel);
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

double median(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n == 0 ? 0.0 : (n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]));
}

CheckResult check_contraction_scaling() {
    CheckResult r{10, "map Lipschitz ratio scales with tan(beta)", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    fp::SolveConfig cfg;
    cfg.gamma = 0.5;
    cfg.L = 12.0;
    cfg.n_y = 240;
    const int pairs = 20;
    cfg.beta = std::atan(0.04);
    const double m4 = median(fp::contraction_probe(cfg, pairs));
    cfg.beta = std::atan(0.02);
    const double m2 = median(fp::contraction_probe(cfg, pairs));
    const double ratio = m4 / m2;
    r.pass = ratio >= 1.5 && ratio <= 2.5;
    r.detail = "median(0.04)/median(0.02) = " + num(ratio) + " (" + num(m4) + "/" + num(m2) +
               ")";
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

CheckResult check_collapse() {
    CheckResult r{11, "space-time run collapses onto the profile", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    fp::SolveConfig cfg;
    cfg.beta = std::atan(0.05);
    cfg.gamma = 0.5;
    cfg.L = 12.0;
    cfg.n_y = 240;
    cfg.n_t = 16;
    cfg.T = 1.0;
    cfg.tol = 1e-6;
    cfg.mode = fp::Mode::spacetime;
    fp::ProfileResult res = fp::solve_spacetime(cfg);
    r.pass = res.converged && res.collapse_error <= 1e-3;
    r.detail = "collapse error " + num(res.collapse_error) + " after " +
               std::to_string(res.iterations) + " iterations";
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

CheckResult check_duhamel_oracle() {
    CheckResult r{12, "scaled smoothing term vs direct 2-D quadrature", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    auto F = [](double u) { return std::exp(-u * u) - 1.0; };
    fp::SourceProfile src;
    const int n = 400;
    const double L = 12.0;
    src.y_nodes.resize(n + 1);
    src.F.resize(n + 1);
    for (int i = 0; i <= n; ++i) {
        src.y_nodes[i] = L * i / n;
        src.F[i] = F(src.y_nodes[i]);
    }
    src.F0 = src.F[0];
    const double mine = fp::duhamel(src, 0, 1)[0];
    const double oracle = duhamel_oracle_2d(F, 0.0, 1.0, 1e-8);
    const double err = std::abs(mine - oracle);
    r.pass = err <= 1e-6;
    r.detail = "value " + num(mine) + ", oracle " + num(oracle) + ", |diff| " + num(err);
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

CheckResult check_slope_factor_bounds() {
    CheckResult r{13, "slope-factor bounds and Lipschitz constants", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    std::mt19937_64 rng(777);
    long violations = 0;
    for (double m : {0.1, 0.5, 1.0}) {
        std::uniform_real_distribution<double> u(-m, m);
        for (int i = 0; i < 10000; ++i) {
            const double p = u(rng), q = u(rng);
            if (std::abs(fp::phi1(p)) > 4.0 * m * m + 1e-15) ++violations;
            if (std::abs(fp::phi2(p)) > 3.0 * (1.0 + 5.0 * m * m) * m + 1e-15) ++violations;
            if (std::abs(fp::phi1(p) - fp::phi1(q)) > 4.0 * m * std::abs(p - q) + 1e-15)
                ++violations;
            if (std::abs(fp::phi2(p) - fp::phi2(q)) >
                3.0 * (1.0 + 5.0 * m * m) * std::abs(p - q) + 1e-15)
                ++violations;
        }
    }
    r.pass = violations == 0;
    r.detail = std::to_string(violations) + " violations over 3x10000 samples";
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

CheckResult check_weak_form(const Context& ctx) {
    CheckResult r{14, "weak-form defect of the converged solution", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    std::string detail;
    bool ok = true;
    for (int id = 0; id < 3; ++id) {
        const double defect = fp::weak_residual(ctx.run05, id);
        const double scale = fp::weak_flux_scale(ctx.run05, id);
        const double rel = defect / scale;
        ok = ok && rel <= 1e-4;
        detail += "phi" + std::to_string(id) + ": " + num(rel) + "; ";
    }
    r.pass = ok;
    r.detail = detail;
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

CheckResult check_determinism() {
    CheckResult r{15, "thread-count independence of outputs", true, "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    fp::SolveConfig cfg;
    cfg.beta = std::atan(0.05);
    cfg.n_y = 256;
    cfg.tol = 1e-6;
    const fs::path base = fs::temp_directory_path() / "groovesolve_selftest";
    fs::create_directories(base);
    auto read_bytes = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(in), {});
    };
    set_max_threads(1);
    cli::run_solve(cfg, (base / "t1").string());
    set_max_threads(2);
    cli::run_solve(cfg, (base / "t2").string());
    set_max_threads(-1);
    const std::string a = read_bytes(base / "t1" / "profile.csv");
    const std::string b = read_bytes(base / "t2" / "profile.csv");
    r.pass = !a.empty() && a == b;
    r.detail = r.pass ? "profile.csv bit-identical across thread counts"
                      : "outputs differ between thread counts";
    fs::remove_all(base);
    r.seconds = now_between(t0, std::chrono::steady_clock::now());
    return r;
}

}  // namespace

std::vector<CheckResult> run_all_collect() {
    Context ctx;
    ctx.cfg6.beta = std::atan(0.05);
    ctx.cfg6.gamma = 0.5;
    ctx.cfg6.L = 12.0;
    ctx.cfg6.n_y = 400;
    ctx.cfg6.tol = 1e-8;
    const auto t0 = std::chrono::steady_clock::now();
    ctx.run05 = fp::solve_profile(ctx.cfg6);
    ctx.run05_seconds = now_between(t0, std::chrono::steady_clock::now());

    std::vector<CheckResult> out;
    out.push_back(check_moment_identities());
    out.push_back(check_pde_identity());
    out.push_back(check_envelopes());
    out.push_back(check_boundary_limits());
    out.push_back(check_curvature_identity());
    out.push_back(check_convergence(ctx));
    out.push_back(check_residuals(ctx));
    out.push_back(check_depth_bound(ctx));
    out.push_back(check_linearization(ctx));
    out.push_back(check_contraction_scaling());
    out.push_back(check_collapse());
    out.push_back(check_duhamel_oracle());
    out.push_back(check_slope_factor_bounds());
    out.push_back(check_weak_form(ctx));
    out.push_back(check_determinism());
    return out;
}

bool run_all(std::ostream& os) {
    bool all = true;
    for (const auto& c : run_all_collect()) {
        os << (c.pass ? "PASS" : "FAIL") << "  [" << c.id << "] " << c.name << ": " << c.detail
           << '\n';
        all = all && c.pass;
    }
    os << (all ? "all checks passed" : "some checks FAILED") << '\n';
    return all;
}

}  // namespace groove::selfcheck
