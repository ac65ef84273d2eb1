#include "groove/cli_io.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "groove/kernel.hpp"
#include "groove/selfcheck.hpp"
#include "json.hpp"

namespace groove::cli {

namespace fs = std::filesystem;
using fixed_point::Mode;
using fixed_point::Profile;
using fixed_point::ProfileResult;
using fixed_point::SolveConfig;
using nlohmann::json;

std::string version() { return "groovesolve-1.0.0"; }

namespace {

std::string fmt17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string normalize_key(std::string k) {
    std::replace(k.begin(), k.end(), '-', '_');
    return k;
}

void set_key(SolveConfig& cfg, const std::string& key, const std::string& value) {
    const std::string k = normalize_key(key);
    if (k == "beta") cfg.beta = std::stod(value);
    else if (k == "tan_beta") cfg.beta = std::atan(std::stod(value));
    else if (k == "gamma") cfg.gamma = std::stod(value);
    else if (k == "L" || k == "l") cfg.L = std::stod(value);
    else if (k == "ny") cfg.n_y = std::stoi(value);
    else if (k == "T" || k == "t") cfg.T = std::stod(value);
    else if (k == "nt") cfg.n_t = std::stoi(value);
    else if (k == "tol") cfg.tol = std::stod(value);
    else if (k == "max_iter") cfg.max_iter = std::stoi(value);
    else if (k == "m_cap") cfg.M_cap = std::stod(value);
    else if (k == "max_tan_beta") cfg.max_tan_beta = std::stod(value);
    else if (k == "quad_level") cfg.quad_level = std::stoi(value);
    else if (k == "linear_only") cfg.linear_only = (value == "1" || value == "true");
    else if (k == "mode") {
        if (value == "profile") cfg.mode = Mode::profile;
        else if (value == "spacetime") cfg.mode = Mode::spacetime;
        else throw std::invalid_argument("unknown mode: " + value);
    } else {
        throw std::invalid_argument("unknown config key: " + key);
    }
}

}  // namespace

void apply_config_file(const std::string& path, SolveConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            if (line.find_first_not_of(" \t\r") != std::string::npos)
                throw std::invalid_argument(path + ":" + std::to_string(lineno) +
                                            ": expected key = value");
            continue;
        }
        auto trim = [](std::string s) {
            const auto b = s.find_first_not_of(" \t\r");
            const auto e = s.find_last_not_of(" \t\r");
            return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
        };
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw std::invalid_argument(path + ":" + std::to_string(lineno) + ": bad entry");
        set_key(cfg, key, value);
    }
}

void write_profile_csv(const std::string& path, const Profile& p) {
    std::ofstream out(path, std::ios::binary);  // binary: no newline translation
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "y,W,W1,W2,W3,F\n";
    for (std::size_t i = 0; i < p.y_nodes.size(); ++i) {
        const double w1 = p.W1[i];
        const double f = fixed_point::phi1(w1) * p.W3[i] -
                         fixed_point::phi2(w1) * p.W2[i] * p.W2[i];
        out << fmt17(p.y_nodes[i]) << ',' << fmt17(p.W[i]) << ',' << fmt17(p.W1[i]) << ','
            << fmt17(p.W2[i]) << ',' << fmt17(p.W3[i]) << ',' << fmt17(f) << '\n';
    }
}

Profile read_profile_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line) || line.rfind("y,W,W1,W2,W3,F", 0) != 0)
        throw std::runtime_error(path + ": missing profile header");
    Profile p;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string cell;
        double vals[6];
        for (int c = 0; c < 6; ++c) {
            if (!std::getline(ss, cell, ',')) throw std::runtime_error(path + ": short row");
            vals[c] = std::stod(cell);
        }
        p.y_nodes.push_back(vals[0]);
        p.W.push_back(vals[1]);
        p.W1.push_back(vals[2]);
        p.W2.push_back(vals[3]);
        p.W3.push_back(vals[4]);
    }
    if (p.y_nodes.size() < 2) throw std::runtime_error(path + ": empty profile");
    p.B = p.W2[0] * p.W2[0];
    return p;
}

void write_manifest(const std::string& path, const SolveConfig& cfg, const ProfileResult& res,
                    double wall_seconds) {
    json m;
    m["version"] = version();
    m["mode"] = cfg.mode == Mode::profile ? "profile" : "spacetime";
    m["beta"] = cfg.beta;
    m["tan_beta"] = cfg.tan_beta();
    m["gamma"] = cfg.gamma;
    m["L"] = cfg.L;
    m["ny"] = cfg.n_y;
    m["T"] = cfg.T;
    m["nt"] = cfg.n_t;
    m["tol"] = cfg.tol;
    m["max_iter"] = cfg.max_iter;
    m["m_cap"] = cfg.M_cap;
    m["max_tan_beta"] = cfg.max_tan_beta;
    m["quad_level"] = cfg.quad_level;
    m["linear_only"] = cfg.linear_only;
    m["iterations"] = res.iterations;
    m["converged"] = res.converged;
    m["contraction_history"] = res.contraction_history;
    m["residual_bc_angle"] = res.residual_bc_angle;
    m["residual_noflux"] = res.residual_noflux;
    m["depth_coefficient"] = res.depth_coefficient;
    if (cfg.mode == Mode::spacetime) m["collapse_error"] = res.collapse_error;
    m["weak_residuals"] = res.weak_residuals;
    m["b_norm"] = res.norm_report.b_norm;
    m["c_norm"] = res.norm_report.c_norm;
    m["z_norm"] = res.norm_report.z_norm;
    m["norm_gamma"] = res.norm_report.gamma;
    m["norm_T"] = res.norm_report.T;
    m["wall_clock_seconds"] = wall_seconds;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << m.dump(2) << '\n';
}

SolveConfig config_from_manifest(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    json m = json::parse(in);
    SolveConfig cfg;
    cfg.beta = m.at("beta").get<double>();
    cfg.gamma = m.at("gamma").get<double>();
    cfg.L = m.at("L").get<double>();
    cfg.n_y = m.at("ny").get<int>();
    cfg.T = m.at("T").get<double>();
    cfg.n_t = m.at("nt").get<int>();
    cfg.tol = m.at("tol").get<double>();
    cfg.max_iter = m.at("max_iter").get<int>();
    cfg.M_cap = m.at("m_cap").get<double>();
    cfg.max_tan_beta = m.at("max_tan_beta").get<double>();
    cfg.quad_level = m.at("quad_level").get<int>();
    cfg.linear_only = m.at("linear_only").get<bool>();
    cfg.mode = m.at("mode").get<std::string>() == "spacetime" ? Mode::spacetime : Mode::profile;
    return cfg;
}

int run_solve(const SolveConfig& cfg, const std::string& out_dir, ProfileResult* out_result) {
    fs::create_directories(out_dir);
    const auto t0 = std::chrono::steady_clock::now();
    ProfileResult res = cfg.mode == Mode::spacetime ? fixed_point::solve_spacetime(cfg)
                                                    : fixed_point::solve_profile(cfg);
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_profile_csv((fs::path(out_dir) / "profile.csv").string(), res.profile);
    write_manifest((fs::path(out_dir) / "manifest.json").string(), cfg, res, secs);
    if (res.norm_report.z_norm > cfg.M_cap)
        std::cerr << "note: solution norm " << res.norm_report.z_norm
                  << " exceeds the configured ball radius " << cfg.M_cap << '\n';
    if (out_result) *out_result = res;
    return res.converged ? 0 : 2;
}

namespace {

struct CommonFlags {
    double beta = -1.0, tan_beta = -1.0;
    std::string config, cache, mode, out;
    SolveConfig cfg;

    void attach(CLI::App& app) {
        auto* b = app.add_option("--beta", beta, "contact angle in radians");
        auto* tb = app.add_option("--tan-beta", tan_beta, "tangent of the contact angle");
        b->excludes(tb);
        tb->excludes(b);
        app.add_option("--gamma", cfg.gamma, "Hoelder exponent in (0,1)");
        app.add_option("--L", cfg.L, "half-line truncation length");
        app.add_option("--ny", cfg.n_y, "grid intervals");
        app.add_option("--T", cfg.T, "horizon (spacetime mode)");
        app.add_option("--nt", cfg.n_t, "time levels (spacetime mode)");
        app.add_option("--tol", cfg.tol, "update-norm stopping threshold");
        app.add_option("--max-iter", cfg.max_iter, "iteration cap");
        app.add_option("--max-tan-beta", cfg.max_tan_beta, "solver smallness threshold");
        app.add_option("--quad-level", cfg.quad_level, "0 coarse / 1 fine quadrature");
        app.add_option("--mode", mode, "profile|spacetime");
        app.add_option("--config", config, "key = value configuration file");
        app.add_option("--kernel-cache", cache, "kernel table cache file");
    }

    void resolve(const CLI::App& app) {
        if (!config.empty()) {
            SolveConfig file_cfg;
            apply_config_file(config, file_cfg);
            // file first, explicit flags win
            SolveConfig merged = file_cfg;
            if (app.count("--gamma")) merged.gamma = cfg.gamma;
            if (app.count("--L")) merged.L = cfg.L;
            if (app.count("--ny")) merged.n_y = cfg.n_y;
            if (app.count("--T")) merged.T = cfg.T;
            if (app.count("--nt")) merged.n_t = cfg.n_t;
            if (app.count("--tol")) merged.tol = cfg.tol;
            if (app.count("--max-iter")) merged.max_iter = cfg.max_iter;
            if (app.count("--max-tan-beta")) merged.max_tan_beta = cfg.max_tan_beta;
            if (app.count("--quad-level")) merged.quad_level = cfg.quad_level;
            cfg = merged;
        }
        if (beta >= 0.0) cfg.beta = beta;
        else if (tan_beta >= 0.0) cfg.beta = std::atan(tan_beta);
        if (!mode.empty()) set_key(cfg, "mode", mode);
        if (!cache.empty()) kernel::TableSet::set_cache_path(cache);
    }
};

std::vector<std::string> reversed(const std::vector<std::string>& args) {
    return {args.rbegin(), args.rend()};  // CLI11 parses right to left
}

}  // namespace

int cmd_solve(const std::vector<std::string>& args) {
    CLI::App app{"solve the groove profile"};
    CommonFlags flags;
    flags.attach(app);
    app.add_option("--out", flags.out, "output directory")->required();
    try {
        auto rev = reversed(args);
        app.parse(rev);
        flags.resolve(app);
        flags.cfg.validate();
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }
    try {
        ProfileResult res;
        const int rc = run_solve(flags.cfg, flags.out, &res);
        std::cout << (res.converged ? "converged" : "did not converge") << " in "
                  << res.iterations << " iterations; depth coefficient "
                  << fmt17(res.depth_coefficient) << '\n';
        return rc;
    } catch (const std::exception& e) {
        std::cerr << "solve failed: " << e.what() << '\n';
        return 2;
    }
}

int cmd_sweep(const std::vector<std::string>& args) {
    CLI::App app{"solve across a list of contact angles"};
    CommonFlags flags;
    flags.attach(app);
    std::string tan_betas;
    app.add_option("--tan-betas", tan_betas, "comma-separated tan(beta) list");
    app.add_option("--out", flags.out, "output directory")->required();
    std::vector<double> values;
    try {
        auto rev = reversed(args);
        app.parse(rev);
        flags.resolve(app);
        std::stringstream ss(tan_betas);
        std::string cell;
        while (std::getline(ss, cell, ','))
            if (!cell.empty()) values.push_back(std::stod(cell));
        if (values.empty()) throw std::invalid_argument("empty --tan-betas list");
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }
    fs::create_directories(flags.out);
    std::ofstream csv(fs::path(flags.out) / "sweep.csv", std::ios::binary);
    csv << "tan_beta,converged,iterations,final_ratio,depth_coefficient,"
           "residual_bc_angle,residual_noflux\n";
    bool any = false;
    for (double tb : values) {
        SolveConfig cfg = flags.cfg;
        cfg.beta = std::atan(tb);
        std::string row_err;
        ProfileResult res;
        try {
            run_solve(cfg, (fs::path(flags.out) / ("tb_" + fmt17(tb))).string(), &res);
        } catch (const std::exception& e) {
            row_err = e.what();
        }
        const double final_ratio =
            res.contraction_history.empty() ? 0.0 : res.contraction_history.back();
        csv << fmt17(tb) << ',' << (res.converged ? 1 : 0) << ',' << res.iterations << ','
            << fmt17(final_ratio) << ',' << fmt17(res.depth_coefficient) << ','
            << fmt17(res.residual_bc_angle) << ',' << fmt17(res.residual_noflux);
        if (!row_err.empty()) csv << ",# " << row_err;
        csv << '\n';
        any = any || res.converged;
    }
    return any ? 0 : 2;
}

int cmd_compare(const std::vector<std::string>& args) {
    CLI::App app{"compare a run against the slope-datum linear profile"};
    std::string run_dir;
    app.add_option("--run", run_dir, "completed run directory")->required();
    try {
        auto rev = reversed(args);
        app.parse(rev);
        if (!fs::exists(fs::path(run_dir) / "profile.csv")) throw std::runtime_error("no run");
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }
    try {
        SolveConfig cfg = config_from_manifest((fs::path(run_dir) / "manifest.json").string());
        Profile p = read_profile_csv((fs::path(run_dir) / "profile.csv").string());
        const double tb = cfg.tan_beta();
        std::ofstream out(fs::path(run_dir) / "compare.csv", std::ios::binary);
        out << "y,W,linear,diff\n";
        double sup_diff = 0.0, sup_lin = 0.0;
        for (std::size_t i = 0; i < p.y_nodes.size(); ++i) {
            const double linv = tb == 0.0 ? 0.0 : tb * linear::u1_profile(0, p.y_nodes[i]);
            const double d = p.W[i] - linv;
            sup_diff = std::max(sup_diff, std::abs(d));
            sup_lin = std::max(sup_lin, std::abs(linv));
            out << fmt17(p.y_nodes[i]) << ',' << fmt17(p.W[i]) << ',' << fmt17(linv) << ','
                << fmt17(d) << '\n';
        }
        const double rel = sup_lin > 0.0 ? sup_diff / sup_lin : sup_diff;
        std::cout << "sup-relative deviation from the linear profile: " << fmt17(rel) << '\n';
        return 0;
    } catch (const std::exception& e) {
        std::cerr << "compare failed: " << e.what() << '\n';
        return 2;
    }
}

int cmd_selftest(const std::vector<std::string>& args) {
    CLI::App app{"run the acceptance checks"};
    std::string cache;
    app.add_option("--kernel-cache", cache, "kernel table cache file");
    try {
        auto rev = reversed(args);
        app.parse(rev);
    } catch (const std::exception& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    }
    if (!cache.empty()) kernel::TableSet::set_cache_path(cache);
    return selfcheck::run_all(std::cout) ? 0 : 2;
}

}  // namespace groove::cli
