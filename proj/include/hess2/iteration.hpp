#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "hess2/cone_select.hpp"
#include "hess2/expr.hpp"
#include "hess2/grid.hpp"
#include "hess2/linear.hpp"

namespace hess2 {

struct IterationConfig {
    double eps_initial = 0.1;
    double eps_shrink = 0.5;
    int max_eps_halvings = 20;
    int max_outer = 30;
    double stop_tol = 1e-11;
    double w_cap = 1.0;
    // Optional Newton damping; 1 is the plain scheme.
    double damping = 1.0;
    double linear_tol = 1e-10;
    int linear_maxiter = 0;
    int threads = 1;

    // Throws ConfigError on out-of-range values.
    void validate() const;
};

struct HistoryEntry {
    int m = 0;
    double g_sup = 0.0;
    double rho_sup = 0.0;
    double w_proxy = 0.0;
    double ellipticity_margin = 0.0;
    double eps = 0.0;
};

enum class Outcome { Converged, EpsilonExhausted, MaxIterations, SolveFailure };
std::string_view to_string(Outcome o);

struct IterationState {
    explicit IterationState(GridPtr grid) : w(grid), g(grid) {}

    double eps = 0.0;
    int m = 0;
    GridField w;
    GridField g;
    std::vector<HistoryEntry> history;  // final attempt only
    Outcome outcome = Outcome::MaxIterations;
    double g0_sup = 0.0;
    int restarts = 0;  // epsilon reductions inside run()
    std::string message;
};

// One linearized step from w = 0 at a fixed eps.
struct EpsilonProbe {
    double eps = 0.0;
    double g0_sup = 0.0;
    double g1_sup = 0.0;
    double margin_w0 = 0.0;  // min ellipticity margin of r(0)
    double margin_w1 = 0.0;  // min ellipticity margin after the probe step
    bool elliptic = false;   // assembly at w = 0 succeeded with margin >= half the tau bound
    bool solved = false;
};

EpsilonProbe probe_epsilon(const Tau& tau, const DifferentiatedF& f, const GridPtr& grid,
                           const IterationConfig& cfg, double eps);

// Largest eps_initial * eps_shrink^j passing the probe (||g1|| <= ||g0|| / 4 or
// ||g0|| <= stop_tol). Throws EpsilonExhausted.
double choose_epsilon(const Tau& tau, const DifferentiatedF& f, const GridPtr& grid,
                      const IterationConfig& cfg);

// Newton scheme w0 = 0, L(w_m) rho_m = -G(w_m), w_{m+1} = w_m + rho_m, starting
// from cfg.eps_initial. A loss of ellipticity or ||w||_proxy > w_cap shrinks
// eps and restarts from w = 0.
IterationState run(const Tau& tau, const DifferentiatedF& f, const GridPtr& grid,
                   const IterationConfig& cfg);

// max of sup-norms of w and its FD derivatives up to order 2.
inline double w_proxy(const GridField& w) { return norms(w, 2); }

// min over interior nodes of ellipticity_margin(diag(tau) + eps D^2 w).
double min_ellipticity_margin(const GridField& w, const Tau& tau, double eps, int threads = 1);

// Columns m,g_sup,rho_sup,w_proxy,ellipticity_margin,eps; 17 significant digits.
void write_history_csv(const std::vector<HistoryEntry>& history, std::ostream& os);

// Least-squares slope of log g_{m+1} against log g_m over entries with
// g_sup > floor.
double contraction_order(const std::vector<HistoryEntry>& history, double floor);

// u(y) = 1/2 sum tau_i y_i^2 + eps^5 w(y / eps^2) near the origin. Point values
// use trilinear interpolation of w and of its nodal FD derivatives.
class PhysicalSolution {
public:
    PhysicalSolution(Tau tau, double eps, GridField w);

    const Tau& tau() const { return tau_; }
    double eps() const { return eps_; }
    const GridField& w() const { return w_; }
    // Evaluations require |y| < radius(): eps^2 times the distance to the
    // nearest lattice cell that has a non-interior corner.
    double radius() const;

    double value(const Vec3& y) const;
    Vec3 gradient(const Vec3& y) const;
    SymMat3 hessian(const Vec3& y) const;
    // diag(tau) + eps D^2 w at x = y / eps^2.
    SymMat3 transformed_hessian(const Vec3& y) const;

private:
    Tau tau_;
    double eps_;
    GridField w_;
    double safe_radius_ = 0.0;
    std::vector<std::array<double, 3>> grad_;   // nodal FD gradient
    std::vector<std::array<double, 6>> hess_;   // nodal FD Hessian (11,22,33,12,13,23)

    void check(const Vec3& y) const;
    template <class Fn>
    void interpolate(const Vec3& x, Fn&& fn) const;
};

PhysicalSolution assemble_solution(const Tau& tau, double eps, const GridField& w);

}  // namespace hess2
