#include "hess2/app.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "hess2/errors.hpp"

namespace hess2 {
namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double sup(const GridField& f) {
    double s = 0.0;
    for (std::size_t idx : f.grid().interior()) s = std::max(s, std::abs(f[idx]));
    return s;
}

double f_at_origin(const DifferentiatedF& f) {
    return eval(f.f, FPoint{{0, 0, 0}, 0.0, {0, 0, 0}});
}

void write_file(const fs::path& path, const std::string& text) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ConfigError("cannot write " + path.string());
    os << text;
    if (!os) throw ConfigError("write failed for " + path.string());
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_samples_csv(const PhysicalSolution& sol, const DifferentiatedF& f, int sample_n,
                       std::ostream& os) {
    os << "y1,y2,y3,u,du1,du2,du3,s1,s2,s3,f\n";
    for (const SamplePoint& s : sample_solution(sol, f, sample_n)) {
        os << fmt(s.y[0]) << ',' << fmt(s.y[1]) << ',' << fmt(s.y[2]) << ',' << fmt(s.u) << ','
           << fmt(s.du[0]) << ',' << fmt(s.du[1]) << ',' << fmt(s.du[2]) << ','
           << fmt(s.sigmas[0]) << ',' << fmt(s.sigmas[1]) << ',' << fmt(s.sigmas[2]) << ','
           << fmt(s.f) << '\n';
    }
}

// Number of shrink steps separating `eps` from `eps0`.
int shrink_steps(double eps0, double eps, double shrink) {
    return static_cast<int>(std::lround(std::log(eps / eps0) / std::log(shrink)));
}

}  // namespace

int exit_code_for(Outcome outcome, bool verification_pass) {
    switch (outcome) {
        case Outcome::Converged: return verification_pass ? kExitOk : kExitVerify;
        case Outcome::EpsilonExhausted: return kExitEpsilon;
        case Outcome::MaxIterations:
        case Outcome::SolveFailure: return kExitSolve;
    }
    return kExitSolve;
}

nlohmann::ordered_json tau_json(const Tau& tau) {
    nlohmann::ordered_json j;
    const Lambda3& v = tau.values;
    j["values"] = {v[0], v[1], v[2]};
    j["sigma"] = {sigma(1, v), sigma(2, v), sigma(3, v)};
    j["cone"] = std::string(to_string(tau.cone));
    j["sigma_reduced"] = {sigma_reduced(1, 1, v), sigma_reduced(1, 2, v), sigma_reduced(1, 3, v)};
    j["sigma2_target"] = tau.sigma2_target;
    return j;
}

nlohmann::ordered_json report_json(const VerificationReport& rep) {
    nlohmann::ordered_json j;
    j["residual_sup"] = rep.residual_sup;
    j["residual_budget"] = rep.residual_budget;
    j["residual_pass"] = rep.residual_pass;
    j["ellipticity_margin_min"] = rep.ellipticity_margin_min;
    j["ellipticity_bound"] = rep.ellipticity_bound;
    j["ellipticity_pass"] = rep.ellipticity_pass;
    j["convexity"] = std::string(to_string(rep.convexity));
    nlohmann::ordered_json signs = nlohmann::ordered_json::object();
    for (const auto& [k, c] : rep.sign_samples) signs[k] = c;
    j["sign_samples"] = signs;
    return j;
}

int cmd_tau(double f0, TauMode mode, std::ostream& out, std::ostream& err) {
    try {
        out << tau_json(select_tau(f0, mode)).dump(2) << '\n';
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int cmd_solve(const RunConfig& cfg, std::ostream& err, SolveResult* result) {
    SolveResult local;
    SolveResult& res = result ? *result : local;
    res = SolveResult{};

    std::optional<DifferentiatedF> f;
    GridPtr grid;
    try {
        cfg.validate();
        f.emplace(parse(cfg.f));
        res.tau = select_tau(f_at_origin(*f), cfg.mode);
        grid = make_grid(cfg.n, cfg.bandwidth);
        fs::create_directories(cfg.output_dir);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return res.exit_code = kExitConfig;
    }

    const fs::path dir(cfg.output_dir);
    try {
        IterationConfig icfg = cfg.iteration();
        const double eps = choose_epsilon(*res.tau, *f, grid, icfg);
        icfg.max_eps_halvings -= shrink_steps(icfg.eps_initial, eps, icfg.eps_shrink);
        icfg.eps_initial = eps;
        res.state = run(*res.tau, *f, grid, icfg);
        const IterationState& st = *res.state;
        res.g_final_sup = st.history.empty() ? 0.0 : st.history.back().g_sup;

        std::ostringstream hist;
        write_history_csv(st.history, hist);
        write_file(dir / "convergence.csv", hist.str());

        nlohmann::ordered_json j;
        bool verified = false;
        if (st.outcome == Outcome::Converged) {
            const PhysicalSolution sol(*res.tau, st.eps, st.w);
            res.report = verify(sol, *f, cfg.sample_n, res.g_final_sup, cfg.stop_tol);
            verified = res.report->pass();
            j = report_json(*res.report);
            if (cfg.emit_fields) {
                std::ostringstream w_csv, u_csv;
                write_csv(st.w, w_csv);
                write_samples_csv(sol, *f, cfg.sample_n, u_csv);
                write_file(dir / "w.csv", w_csv.str());
                write_file(dir / "u-samples.csv", u_csv.str());
            }
        }
        j["pass"] = verified;
        j["tau"] = tau_json(*res.tau);
        j["eps"] = st.eps;
        j["n"] = cfg.n;
        j["h"] = grid->h();
        j["outcome"] = std::string(to_string(st.outcome));
        j["iterations"] = st.m;
        j["restarts"] = st.restarts;
        j["g0_sup"] = st.g0_sup;
        j["g_final_sup"] = res.g_final_sup;
        j["config"] = cfg.to_json();
        write_file(dir / "report.json", j.dump(2) + "\n");
        write_file(dir / "config.txt", cfg.to_text());

        res.exit_code = exit_code_for(st.outcome, verified);
        if (st.outcome != Outcome::Converged) {
            err << "error: " << to_string(st.outcome) << (st.message.empty() ? "" : ": " + st.message)
                << '\n';
        } else if (!verified) {
            err << "error: verification failed (residual " << fmt(res.report->residual_sup)
                << " vs budget " << fmt(res.report->residual_budget) << ", margin "
                << fmt(res.report->ellipticity_margin_min) << " vs bound "
                << fmt(res.report->ellipticity_bound) << ")\n";
        }
        return res.exit_code;
    } catch (const EpsilonExhausted& e) {
        err << "error: " << e.what() << '\n';
        return res.exit_code = kExitEpsilon;
    } catch (const LinearSolveDiverged& e) {
        err << "error: " << e.what() << '\n';
        return res.exit_code = kExitSolve;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return res.exit_code = kExitConfig;
    }
}

int cmd_sweep(const RunConfig& cfg, const std::vector<double>& eps_list, std::ostream& out,
              std::ostream& err) {
    try {
        cfg.validate();
        if (eps_list.empty()) throw ConfigError("sweep needs at least one eps");
        for (double e : eps_list)
            if (!(e > 0.0)) throw ConfigError("sweep eps values must be positive");
        const DifferentiatedF f(parse(cfg.f));
        const Tau tau = select_tau(f_at_origin(f), cfg.mode);
        const GridPtr grid = make_grid(cfg.n, cfg.bandwidth);
        const IterationConfig icfg = cfg.iteration();
        std::ostringstream os;
        os << "eps,g0_sup,margin\n";
        for (double e : eps_list) {
            const EpsilonProbe p = probe_epsilon(tau, f, grid, icfg, e);
            os << fmt(e) << ',' << fmt(p.g0_sup) << ',' << fmt(p.margin_w1) << '\n';
        }
        out << os.str();
        return kExitOk;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

int cmd_verify(const std::string& dir_name, std::ostream& out, std::ostream& err) {
    try {
        const fs::path dir(dir_name);
        const nlohmann::json j = nlohmann::json::parse(read_file(dir / "report.json"));
        if (!j.contains("config") || !j.contains("eps"))
            throw ConfigError("report.json lacks config or eps");
        const RunConfig cfg = RunConfig::from_json(j["config"]);
        cfg.validate();
        const DifferentiatedF f(parse(cfg.f));
        const Tau tau = select_tau(f_at_origin(f), cfg.mode);
        const auto stored = j.at("tau").at("values");
        for (int i = 0; i < 3; ++i)
            if (stored.at(i).get<double>() != tau.values[i])
                throw ConfigError("report.json tau does not match the configured f and mode");
        const double eps = j["eps"].get<double>();
        const GridPtr grid = make_grid(cfg.n, cfg.bandwidth);
        std::ifstream w_in(dir / "w.csv", std::ios::binary);
        if (!w_in) throw ConfigError("cannot read " + (dir / "w.csv").string() + " (solve with emit_fields)");
        const GridField w = read_csv(grid, w_in);
        const double nodal = sup(residual_G(w, tau, eps, f, cfg.threads));
        const PhysicalSolution sol(tau, eps, w);
        const VerificationReport rep = verify(sol, f, cfg.sample_n, nodal, cfg.stop_tol);
        nlohmann::ordered_json o = report_json(rep);
        o["pass"] = rep.pass();
        o["nodal_residual"] = nodal;
        out << o.dump(2) << '\n';
        if (!rep.pass()) {
            err << "error: verification failed\n";
            return kExitVerify;
        }
        return kExitOk;
    } catch (const nlohmann::json::exception& e) {
        err << "error: report.json: " << e.what() << '\n';
        return kExitConfig;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }
}

}  // namespace hess2
