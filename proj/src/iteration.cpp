#include "hess2/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <ostream>

#include "hess2/errors.hpp"
#include "hess2/parallel.hpp"

namespace hess2 {
namespace {

double sup(const GridField& f) {
    double s = 0.0;
    for (std::size_t idx : f.grid().interior()) s = std::max(s, std::abs(f[idx]));
    return s;
}

SolveOptions linear_options(const IterationConfig& cfg, double g_sup) {
    // Keep the linear error well below the next Newton residual (~ g^2) and
    // below the stopping threshold.
    SolveOptions o;
    o.tol = std::min(cfg.linear_tol, std::max(1e-3 * g_sup * g_sup, 0.05 * cfg.stop_tol));
    o.maxiter = cfg.linear_maxiter;
    return o;
}

}  // namespace

void IterationConfig::validate() const {
    if (!(eps_initial > 0.0)) throw ConfigError("eps_initial must be positive");
    if (!(eps_shrink > 0.0 && eps_shrink < 1.0)) throw ConfigError("eps_shrink must lie in (0,1)");
    if (max_eps_halvings < 0) throw ConfigError("max_eps_halvings must be non-negative");
    if (max_outer < 1) throw ConfigError("max_outer must be positive");
    if (!(stop_tol > 0.0)) throw ConfigError("stop_tol must be positive");
    if (!(w_cap > 0.0)) throw ConfigError("w_cap must be positive");
    if (!(damping > 0.0 && damping <= 1.0)) throw ConfigError("damping must lie in (0,1]");
    if (!(linear_tol > 0.0)) throw ConfigError("linear_tol must be positive");
    if (threads < 1) throw ConfigError("threads must be at least 1");
}

std::string_view to_string(Outcome o) {
    switch (o) {
        case Outcome::Converged: return "Converged";
        case Outcome::EpsilonExhausted: return "EpsilonExhausted";
        case Outcome::MaxIterations: return "MaxIterations";
        case Outcome::SolveFailure: return "SolveFailure";
    }
    return "MaxIterations";
}

double min_ellipticity_margin(const GridField& w, const Tau& tau, double eps, int threads) {
    const auto interior = w.grid().interior();
    std::vector<double> margins(interior.size());
    parallel_for(interior.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            margins[t] = ellipticity_margin(SymMat3::diag(tau.values) + eps * hessian_at(w, interior[t]));
        }
    });
    return *std::min_element(margins.begin(), margins.end());
}

EpsilonProbe probe_epsilon(const Tau& tau, const DifferentiatedF& f, const GridPtr& grid,
                           const IterationConfig& cfg, double eps) {
    EpsilonProbe p;
    p.eps = eps;
    const GridField w0(grid);
    const GridField g0 = -residual_G(w0, tau, eps, f, cfg.threads);
    p.g0_sup = sup(g0);
    p.margin_w0 = min_ellipticity_margin(w0, tau, eps, cfg.threads);
    p.margin_w1 = p.margin_w0;
    try {
        const OperatorAssembly op = assemble(w0, tau, eps, f, cfg.threads);
        p.elliptic = op.min_ellipticity_margin() >= 0.5 * tau.min_pair_sum();
        if (p.g0_sup == 0.0) {
            p.solved = true;
            return p;
        }
        const GridField w1 = solve_dirichlet(op, g0, linear_options(cfg, p.g0_sup));
        p.solved = true;
        p.g1_sup = sup(residual_G(w1, tau, eps, f, cfg.threads));
        p.margin_w1 = min_ellipticity_margin(w1, tau, eps, cfg.threads);
    } catch (const EllipticityLost&) {
        p.elliptic = false;
    } catch (const LinearSolveDiverged&) {
        p.solved = false;
    }
    return p;
}

double choose_epsilon(const Tau& tau, const DifferentiatedF& f, const GridPtr& grid,
                      const IterationConfig& cfg) {
    cfg.validate();
    double eps = cfg.eps_initial;
    for (int j = 0; j <= cfg.max_eps_halvings; ++j, eps *= cfg.eps_shrink) {
        const EpsilonProbe p = probe_epsilon(tau, f, grid, cfg, eps);
        if (!p.elliptic) continue;
        if (p.g0_sup <= cfg.stop_tol) return eps;
        if (p.solved && p.g1_sup <= 0.25 * p.g0_sup) return eps;
    }
    throw EpsilonExhausted("no eps in the halving sequence passes the contraction probe");
}

IterationState run(const Tau& tau, const DifferentiatedF& f, const GridPtr& grid,
                   const IterationConfig& cfg) {
    cfg.validate();
    IterationState st(grid);
    st.eps = cfg.eps_initial;

    for (int attempt = 0;; ++attempt) {
        st.restarts = attempt;
        st.w = GridField(grid);
        st.history.clear();
        bool restart = false;

        for (int m = 0;; ++m) {
            st.m = m;
            st.g = -residual_G(st.w, tau, st.eps, f, cfg.threads);
            const double g_sup = sup(st.g);
            if (m == 0) st.g0_sup = g_sup;

            HistoryEntry e;
            e.m = m;
            e.g_sup = g_sup;
            e.w_proxy = w_proxy(st.w);
            e.eps = st.eps;

            if (g_sup <= cfg.stop_tol * (1.0 + st.g0_sup)) {
                e.ellipticity_margin = min_ellipticity_margin(st.w, tau, st.eps, cfg.threads);
                st.history.push_back(e);
                st.outcome = Outcome::Converged;
                return st;
            }
            if (m >= cfg.max_outer) {
                e.ellipticity_margin = min_ellipticity_margin(st.w, tau, st.eps, cfg.threads);
                st.history.push_back(e);
                st.outcome = Outcome::MaxIterations;
                st.message = "no convergence after " + std::to_string(cfg.max_outer) + " outer steps";
                return st;
            }

            std::optional<OperatorAssembly> op;
            try {
                op.emplace(assemble(st.w, tau, st.eps, f, cfg.threads));
            } catch (const EllipticityLost& err) {
                st.message = err.what();
                restart = true;
                break;
            }
            e.ellipticity_margin = op->min_ellipticity_margin();

            GridField rho(grid);
            try {
                rho = solve_dirichlet(*op, st.g, linear_options(cfg, g_sup));
            } catch (const LinearSolveDiverged& err) {
                st.history.push_back(e);
                st.outcome = Outcome::SolveFailure;
                st.message = err.what();
                return st;
            }
            if (cfg.damping != 1.0) rho *= cfg.damping;
            e.rho_sup = sup(rho);
            st.history.push_back(e);

            st.w += rho;
            if (w_proxy(st.w) > cfg.w_cap) {
                st.message = "iterate left the ||w|| <= w_cap regime";
                restart = true;
                break;
            }
        }

        if (restart) {
            if (attempt >= cfg.max_eps_halvings) {
                st.outcome = Outcome::EpsilonExhausted;
                return st;
            }
            st.eps *= cfg.eps_shrink;
        }
    }
}

void write_history_csv(const std::vector<HistoryEntry>& history, std::ostream& os) {
    os << "m,g_sup,rho_sup,w_proxy,ellipticity_margin,eps\n";
    char buf[256];
    for (const HistoryEntry& e : history) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.m, e.g_sup, e.rho_sup,
                      e.w_proxy, e.ellipticity_margin, e.eps);
        os << buf;
    }
}

double contraction_order(const std::vector<HistoryEntry>& history, double floor) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i + 1 < history.size(); ++i) {
        if (history[i].g_sup > floor && history[i + 1].g_sup > floor) {
            xs.push_back(std::log(history[i].g_sup));
            ys.push_back(std::log(history[i + 1].g_sup));
        }
    }
    if (xs.size() < 2) return std::nan("");
    const double n = static_cast<double>(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

// ---------------------------------------------------------------- PhysicalSolution

PhysicalSolution::PhysicalSolution(Tau tau, double eps, GridField w)
    : tau_(std::move(tau)), eps_(eps), w_(std::move(w)) {
    if (!(eps_ > 0.0)) throw DomainError("PhysicalSolution: eps must be positive");
    const BallGrid& g = w_.grid();
    grad_.assign(g.size(), {0, 0, 0});
    hess_.assign(g.size(), {0, 0, 0, 0, 0, 0});
    const int n = g.n();
    // Nodal derivatives wherever the 27-point stencil fits in the lattice; w is
    // zero off the interior.
    for (int i = 1; i < n - 1; ++i)
        for (int j = 1; j < n - 1; ++j)
            for (int k = 1; k < n - 1; ++k) {
                const std::size_t idx = g.index(i, j, k);
                if (g.tag(idx) == NodeTag::Exterior) continue;
                for (int a = 0; a < 3; ++a) grad_[idx][a] = stencil_d1(w_, idx, a);
                hess_[idx] = {stencil_d2(w_, idx, 0, 0), stencil_d2(w_, idx, 1, 1),
                              stencil_d2(w_, idx, 2, 2), stencil_d2(w_, idx, 0, 1),
                              stencil_d2(w_, idx, 0, 2), stencil_d2(w_, idx, 1, 2)};
            }

    // Distance from the origin to the nearest lattice cell with a non-interior
    // corner; cells closer than that interpolate interior data only.
    safe_radius_ = std::numeric_limits<double>::infinity();
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j)
            for (int k = 0; k + 1 < n; ++k) {
                bool all_interior = true;
                for (int c = 0; c < 8 && all_interior; ++c)
                    all_interior = g.is_interior(g.index(i + (c >> 2 & 1), j + (c >> 1 & 1), k + (c & 1)));
                if (all_interior) continue;
                double d2 = 0.0;
                for (int lo : {i, j, k}) {
                    const double a = g.coord(lo), b = g.coord(lo + 1);
                    const double nearest = a > 0 ? a : (b < 0 ? b : 0.0);
                    d2 += nearest * nearest;
                }
                safe_radius_ = std::min(safe_radius_, std::sqrt(d2));
            }
}

double PhysicalSolution::radius() const { return eps_ * eps_ * safe_radius_; }

void PhysicalSolution::check(const Vec3& y) const {
    const double r = std::sqrt(y[0] * y[0] + y[1] * y[1] + y[2] * y[2]);
    if (!(r < radius())) {
        throw DomainError("PhysicalSolution: point lies outside the solution neighbourhood");
    }
}

template <class Fn>
void PhysicalSolution::interpolate(const Vec3& x, Fn&& fn) const {
    const BallGrid& g = w_.grid();
    int base[3];
    double frac[3];
    for (int a = 0; a < 3; ++a) {
        const double s = (x[a] + 1.0) / g.h();
        base[a] = std::clamp(static_cast<int>(std::floor(s)), 0, g.n() - 2);
        frac[a] = s - base[a];
    }
    for (int c = 0; c < 8; ++c) {
        const int di = (c >> 2) & 1, dj = (c >> 1) & 1, dk = c & 1;
        const double wgt = (di ? frac[0] : 1.0 - frac[0]) * (dj ? frac[1] : 1.0 - frac[1]) *
                           (dk ? frac[2] : 1.0 - frac[2]);
        fn(g.index(base[0] + di, base[1] + dj, base[2] + dk), wgt);
    }
}

double PhysicalSolution::value(const Vec3& y) const {
    check(y);
    const double e2 = eps_ * eps_;
    const Vec3 x{y[0] / e2, y[1] / e2, y[2] / e2};
    double wv = 0.0;
    interpolate(x, [&](std::size_t idx, double c) { wv += c * w_[idx]; });
    double psi = 0.0;
    for (int i = 0; i < 3; ++i) psi += 0.5 * tau_.values[i] * y[i] * y[i];
    return psi + e2 * e2 * eps_ * wv;
}

Vec3 PhysicalSolution::gradient(const Vec3& y) const {
    check(y);
    const double e2 = eps_ * eps_;
    const Vec3 x{y[0] / e2, y[1] / e2, y[2] / e2};
    Vec3 dw{0, 0, 0};
    interpolate(x, [&](std::size_t idx, double c) {
        for (int a = 0; a < 3; ++a) dw[a] += c * grad_[idx][a];
    });
    Vec3 out;
    for (int a = 0; a < 3; ++a) out[a] = tau_.values[a] * y[a] + e2 * eps_ * dw[a];
    return out;
}

SymMat3 PhysicalSolution::transformed_hessian(const Vec3& y) const {
    check(y);
    const double e2 = eps_ * eps_;
    const Vec3 x{y[0] / e2, y[1] / e2, y[2] / e2};
    std::array<double, 6> h{};
    interpolate(x, [&](std::size_t idx, double c) {
        for (int a = 0; a < 6; ++a) h[a] += c * hess_[idx][a];
    });
    const SymMat3 d2w{h[0], h[1], h[2], h[3], h[4], h[5]};
    return SymMat3::diag(tau_.values) + eps_ * d2w;
}

SymMat3 PhysicalSolution::hessian(const Vec3& y) const { return transformed_hessian(y); }

PhysicalSolution assemble_solution(const Tau& tau, double eps, const GridField& w) {
    return PhysicalSolution(tau, eps, w);
}

}  // namespace hess2
