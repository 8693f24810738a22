// hess2: local solutions of sigma_2(D^2 u) = f(y, u, Du) in R^3.
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "hess2/app.hpp"
#include "hess2/errors.hpp"

namespace {

struct Flags {
    std::string config;
    std::string f;
    std::string mode;
    int n = 0;
    double bandwidth = 0;
    double eps_initial = 0;
    double eps_shrink = 0;
    int max_eps_halvings = 0;
    int max_outer = 0;
    double stop_tol = 0;
    std::string out;
    int threads = 0;
    int sample_n = 0;
    bool emit_fields = false;
};

// Registers the RunConfig flags on `cmd`; values land in `fl`.
void add_run_flags(CLI::App* cmd, Flags& fl) {
    cmd->add_option("--config", fl.config, "key=value (or report.json) config file");
    cmd->add_option("--f", fl.f, "right-hand side f(y1,y2,y3,u,p1,p2,p3)");
    cmd->add_option("--mode", fl.mode, "tau mode: auto, convex, nonconvex");
    cmd->add_option("--n", fl.n, "grid points per axis (odd, >= 9)");
    cmd->add_option("--bandwidth", fl.bandwidth, "boundary band width in units of h");
    cmd->add_option("--eps-initial", fl.eps_initial, "first eps tried");
    cmd->add_option("--eps-shrink", fl.eps_shrink, "eps reduction factor");
    cmd->add_option("--max-eps-halvings", fl.max_eps_halvings, "eps reductions allowed");
    cmd->add_option("--max-outer", fl.max_outer, "Newton steps allowed");
    cmd->add_option("--stop-tol", fl.stop_tol, "stopping tolerance on ||g||_inf");
    cmd->add_option("--out", fl.out, "output directory");
    cmd->add_option("--threads", fl.threads, "worker threads");
    cmd->add_option("--sample-n", fl.sample_n, "verifier lattice points per axis");
    cmd->add_flag("--emit-fields", fl.emit_fields, "also write w.csv and u-samples.csv");
}

// Config file first, then every flag given on the command line.
hess2::RunConfig resolve(const CLI::App* cmd, const Flags& fl) {
    hess2::RunConfig cfg;
    if (!fl.config.empty()) cfg.apply_file(fl.config);
    auto given = [&](const char* name) { return cmd->count(name) > 0; };
    if (given("--f")) cfg.f = fl.f;
    if (given("--mode")) cfg.mode = hess2::parse_tau_mode(fl.mode);
    if (given("--n")) cfg.n = fl.n;
    if (given("--bandwidth")) cfg.bandwidth = fl.bandwidth;
    if (given("--eps-initial")) cfg.eps_initial = fl.eps_initial;
    if (given("--eps-shrink")) cfg.eps_shrink = fl.eps_shrink;
    if (given("--max-eps-halvings")) cfg.max_eps_halvings = fl.max_eps_halvings;
    if (given("--max-outer")) cfg.max_outer = fl.max_outer;
    if (given("--stop-tol")) cfg.stop_tol = fl.stop_tol;
    if (given("--out")) cfg.output_dir = fl.out;
    if (given("--threads")) cfg.threads = fl.threads;
    if (given("--sample-n")) cfg.sample_n = fl.sample_n;
    if (given("--emit-fields")) cfg.emit_fields = fl.emit_fields;
    return cfg;
}

std::vector<double> parse_eps_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw hess2::ConfigError("--eps: not a number: " + item);
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Local solutions of the 2-Hessian equation in R^3"};
    app.require_subcommand(1);

    double f0 = 0.0;
    std::string tau_mode = "auto";
    auto* tau = app.add_subcommand("tau", "print the tau triple selected for f(0)");
    tau->add_option("--f0", f0, "value of f at the origin")->required();
    tau->add_option("--mode", tau_mode, "auto, convex, nonconvex");

    Flags solve_flags;
    auto* solve = app.add_subcommand("solve", "run the iteration and verify the result");
    add_run_flags(solve, solve_flags);

    Flags sweep_flags;
    std::string eps_text;
    auto* sweep = app.add_subcommand("sweep", "probe a list of eps values");
    add_run_flags(sweep, sweep_flags);
    sweep->add_option("--eps", eps_text, "comma-separated eps values")->required();

    std::string verify_dir;
    auto* verify = app.add_subcommand("verify", "re-verify a solve directory written with --emit-fields");
    verify->add_option("--out,dir", verify_dir, "solve output directory")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : hess2::kExitConfig;
    }

    try {
        if (*tau) return hess2::cmd_tau(f0, hess2::parse_tau_mode(tau_mode), std::cout, std::cerr);
        if (*solve) return hess2::cmd_solve(resolve(solve, solve_flags), std::cerr);
        if (*sweep)
            return hess2::cmd_sweep(resolve(sweep, sweep_flags), parse_eps_list(eps_text), std::cout,
                                    std::cerr);
        if (*verify) return hess2::cmd_verify(verify_dir, std::cout, std::cerr);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return hess2::kExitConfig;
    }
    return hess2::kExitConfig;
}
