#pragma once

#include <vector>

#include "hess2/cone_select.hpp"
#include "hess2/expr.hpp"
#include "hess2/grid.hpp"
#include "hess2/kernels.hpp"

namespace hess2 {

// Node data of the rescaled problem at iterate w:
//   r   = diag(tau) + eps * D^2 w
//   y   = eps^2 x
//   z   = eps^4 psi(x) + eps^5 w,     psi(x) = 1/2 sum tau_i x_i^2
//   p_i = tau_i eps^2 x_i + eps^3 d_i w
struct TransformedNode {
    SymMat3 r;
    FPoint point;
};

TransformedNode transform_node(const GridField& w, const Tau& tau, double eps, std::size_t idx);

// G(w) = (1/eps) [S_2(r(w)) - f(y, z, p)] at interior nodes, 0 elsewhere.
// EvalError from f carries the node location.
GridField residual_G(const GridField& w, const Tau& tau, double eps, const DifferentiatedF& f,
                     int threads = 1);

// Frozen-coefficient linearization of G at w:
//   L rho = sum_ij S_2^{ij}(r) d_ij rho + sum_i a_i d_i rho + a rho
// with S_2^{ij} = trace(r) I - r, a_i = -eps^2 df/dp_i, a = -eps^4 df/dz,
// discretized with the 19-point central stencil over interior nodes.
class OperatorAssembly {
public:
    OperatorAssembly(GridPtr grid, int threads);

    const BallGrid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    std::size_t unknowns() const { return grid_->interior().size(); }

    // Per interior node (in interior order).
    const std::vector<SymMat3>& second_order() const { return second_; }
    const std::vector<Vec3>& first_order() const { return first_; }
    const std::vector<double>& zeroth_order() const { return zeroth_; }
    double min_ellipticity_margin() const { return min_margin_; }

    // Stencil coefficient of point p at interior position t.
    double coefficient(int p, std::size_t t) const { return coef_[p * unknowns() + t]; }
    const std::array<std::ptrdiff_t, kernels::kStencilPoints>& offsets() const { return offsets_; }
    kernels::StencilView view() const;

    // y = L x on interior nodes, 0 elsewhere.
    GridField apply(const GridField& x) const;
    void apply_raw(const double* x, double* y) const;

    // Scales every coefficient (used to check solve homogeneity).
    void scale(double s);

    // Fills coefficients for one interior node from its operator data.
    void set_node(std::size_t t, const SymMat3& second, const Vec3& first, double zeroth);
    void finalize_margin(double m) { min_margin_ = m; }
    int threads() const { return threads_; }

private:
    GridPtr grid_;
    int threads_;
    std::array<std::ptrdiff_t, kernels::kStencilPoints> offsets_{};
    std::vector<double> coef_;
    std::vector<SymMat3> second_;
    std::vector<Vec3> first_;
    std::vector<double> zeroth_;
    double min_margin_ = 0.0;
};

// Throws EllipticityLost if some node has ellipticity_margin(r) <= 0.
OperatorAssembly assemble(const GridField& w, const Tau& tau, double eps, const DifferentiatedF& f,
                          int threads = 1);

struct SolveOptions {
    double tol = 1e-10;
    int maxiter = 0;  // 0: 10 * (unknowns)^(1/3) * 100
    // Fall back to a dense LU when the Krylov solve fails on small grids.
    int dense_fallback_max_n = 17;
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;  // ||L rho - g||_inf
    bool dense = false;
};

// Jacobi-preconditioned BiCGSTAB for L rho = g, rho = 0 off the interior.
// Post: ||L rho - g||_inf <= tol (1 + ||g||_inf); throws LinearSolveDiverged.
GridField solve_dirichlet(const OperatorAssembly& op, const GridField& g,
                          const SolveOptions& opts = {}, SolveStats* stats = nullptr);

// Dense LU on the interior unknowns; the oracle for small grids.
GridField solve_dense(const OperatorAssembly& op, const GridField& g);

}  // namespace hess2
