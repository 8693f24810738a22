#include "hess2/linear.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hess2/errors.hpp"
#include "hess2/parallel.hpp"

namespace hess2 {
namespace {

// Stencil point order: center, +-e1, +-e2, +-e3, then for (a,b) in
// (1,2),(1,3),(2,3): (+,+), (+,-), (-,+), (-,-).
constexpr std::array<std::array<int, 3>, kernels::kStencilPoints> kStencil{{
    {0, 0, 0},
    {1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1},
    {1, 1, 0}, {1, -1, 0}, {-1, 1, 0}, {-1, -1, 0},
    {1, 0, 1}, {1, 0, -1}, {-1, 0, 1}, {-1, 0, -1},
    {0, 1, 1}, {0, 1, -1}, {0, -1, 1}, {0, -1, -1},
}};

std::string node_context(const BallGrid& g, std::size_t idx) {
    const auto [i, j, k] = g.ijk(idx);
    const Vec3 x = g.position(idx);
    std::ostringstream os;
    os << "at node (" << i << "," << j << "," << k << "), x = (" << x[0] << ", " << x[1] << ", "
       << x[2] << ")";
    return os.str();
}

double eval_at_node(const Expr& e, const FPoint& pt, const BallGrid& g, std::size_t idx) {
    try {
        return eval(e, pt);
    } catch (const EvalError& err) {
        throw EvalError(err.reason(), err.subexpr(), node_context(g, idx));
    }
}

int default_maxiter(std::size_t unknowns) {
    return static_cast<int>(10.0 * std::cbrt(static_cast<double>(unknowns)) * 100.0);
}

}  // namespace

TransformedNode transform_node(const GridField& w, const Tau& tau, double eps, std::size_t idx) {
    const BallGrid& g = w.grid();
    const Vec3 x = g.position(idx);
    const double eps2 = eps * eps;
    const double eps3 = eps2 * eps;
    const double eps4 = eps2 * eps2;

    TransformedNode out;
    out.r = SymMat3::diag(tau.values) + eps * hessian_at(w, idx);
    double psi = 0.0;
    for (int i = 0; i < 3; ++i) {
        psi += 0.5 * tau.values[i] * x[i] * x[i];
        out.point.y[i] = eps2 * x[i];
        out.point.p[i] = tau.values[i] * eps2 * x[i] + eps3 * stencil_d1(w, idx, i);
    }
    out.point.z = eps4 * psi + eps4 * eps * w[idx];
    return out;
}

GridField residual_G(const GridField& w, const Tau& tau, double eps, const DifferentiatedF& f,
                     int threads) {
    if (!(eps > 0.0)) throw DomainError("residual_G: eps must be positive");
    const BallGrid& g = w.grid();
    GridField out(w.grid_ptr());
    auto interior = g.interior();
    std::span<double> buf = out.interior_buffer();
    parallel_for(interior.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t idx = interior[t];
            const TransformedNode node = transform_node(w, tau, eps, idx);
            const double rhs = eval_at_node(f.f, node.point, g, idx);
            buf[idx] = (s2_value(node.r) - rhs) / eps;
        }
    });
    return out;
}

OperatorAssembly::OperatorAssembly(GridPtr grid, int threads)
    : grid_(std::move(grid)), threads_(std::max(threads, 1)) {
    const std::size_t m = grid_->interior().size();
    coef_.assign(kernels::kStencilPoints * m, 0.0);
    second_.resize(m);
    first_.resize(m);
    zeroth_.resize(m);
    for (int p = 0; p < kernels::kStencilPoints; ++p) {
        offsets_[p] = grid_->stride(kStencil[p][0], kStencil[p][1], kStencil[p][2]);
    }
}

void OperatorAssembly::set_node(std::size_t t, const SymMat3& s, const Vec3& a, double a0) {
    const std::size_t m = unknowns();
    const double h = grid_->h();
    const double ih2 = 1.0 / (h * h);
    const double i2h = 1.0 / (2.0 * h);
    auto c = [&](int p) -> double& { return coef_[p * m + t]; };

    c(0) = -2.0 * (s.m11 + s.m22 + s.m33) * ih2 + a0;
    const double diag[3] = {s.m11, s.m22, s.m33};
    for (int i = 0; i < 3; ++i) {
        c(1 + 2 * i) = diag[i] * ih2 + a[i] * i2h;
        c(2 + 2 * i) = diag[i] * ih2 - a[i] * i2h;
    }
    // S^{ab} d_ab + S^{ba} d_ba = 2 S^{ab} d_ab, with d_ab over a 4h^2 cross.
    const double off[3] = {s.m12, s.m13, s.m23};
    for (int q = 0; q < 3; ++q) {
        const double v = 2.0 * off[q] * 0.25 * ih2;
        c(7 + 4 * q) = v;
        c(8 + 4 * q) = -v;
        c(9 + 4 * q) = -v;
        c(10 + 4 * q) = v;
    }
    second_[t] = s;
    first_[t] = a;
    zeroth_[t] = a0;
}

kernels::StencilView OperatorAssembly::view() const {
    return {coef_, offsets_, grid_->runs(), unknowns()};
}

void OperatorAssembly::apply_raw(const double* x, double* y) const {
    const kernels::StencilView v = view();
    const auto runs = grid_->runs();
    const kernels::KernelTable& k = kernels::active();
    parallel_for(runs.size(), threads_, [&](std::size_t begin, std::size_t end) {
        k.apply_stencil(v, runs.subspan(begin, end - begin), x, y);
    });
}

GridField OperatorAssembly::apply(const GridField& x) const {
    if (&x.grid() != grid_.get()) throw DomainError("OperatorAssembly::apply: grid mismatch");
    GridField y(grid_);
    apply_raw(x.data().data(), y.interior_buffer().data());
    return y;
}

void OperatorAssembly::scale(double s) {
    for (double& c : coef_) c *= s;
    for (auto& m : second_) m = s * m;
    for (auto& a : first_)
        for (double& v : a) v *= s;
    for (double& v : zeroth_) v *= s;
}

OperatorAssembly assemble(const GridField& w, const Tau& tau, double eps, const DifferentiatedF& f,
                          int threads) {
    if (!(eps > 0.0)) throw DomainError("assemble: eps must be positive");
    OperatorAssembly op(w.grid_ptr(), threads);
    const BallGrid& g = w.grid();
    const auto interior = g.interior();
    const double eps2 = eps * eps;
    const double eps4 = eps2 * eps2;

    std::vector<double> margins(interior.size());
    parallel_for(interior.size(), threads, [&](std::size_t begin, std::size_t end) {
        for (std::size_t t = begin; t < end; ++t) {
            const std::size_t idx = interior[t];
            const TransformedNode node = transform_node(w, tau, eps, idx);
            const double margin = ellipticity_margin(node.r);
            if (!(margin > 0.0)) throw EllipticityLost(g.ijk(idx), margin);
            margins[t] = margin;
            const Vec3 a{-eps2 * eval_at_node(f.partial(Var::P1), node.point, g, idx),
                         -eps2 * eval_at_node(f.partial(Var::P2), node.point, g, idx),
                         -eps2 * eval_at_node(f.partial(Var::P3), node.point, g, idx)};
            const double a0 = -eps4 * eval_at_node(f.partial(Var::U), node.point, g, idx);
            op.set_node(t, s2_gradient(node.r), a, a0);
        }
    });
    op.finalize_margin(*std::min_element(margins.begin(), margins.end()));
    return op;
}

GridField solve_dirichlet(const OperatorAssembly& op, const GridField& g, const SolveOptions& opts,
                          SolveStats* stats) {
    const BallGrid& grid = op.grid();
    const kernels::KernelTable& k = kernels::active();
    const std::size_t n = grid.size();
    if (&g.grid() != &grid) throw DomainError("solve_dirichlet: grid mismatch");
    // Right-hand side restricted to interior nodes.
    std::vector<double> bv(n, 0.0);
    for (std::size_t i : grid.interior()) bv[i] = g[i];
    const double* b = bv.data();

    GridField x(op.grid_ptr());
    SolveStats local;
    SolveStats& st = stats ? *stats : local;
    st = {};

    const double g_sup = k.sup(b, n);
    const double target = opts.tol * (1.0 + g_sup);
    if (g_sup == 0.0) return x;

    const auto interior = grid.interior();
    const int maxiter = opts.maxiter > 0 ? opts.maxiter : default_maxiter(op.unknowns());

    // Right Jacobi preconditioning keeps r the true residual of the original system.
    std::vector<double> minv(n, 0.0);
    for (std::size_t t = 0; t < interior.size(); ++t) minv[interior[t]] = 1.0 / op.coefficient(0, t);

    std::vector<double> r(b, b + n), rhat(r), p(n, 0.0), v(n, 0.0), phat(n, 0.0), s(n, 0.0),
        shat(n, 0.0), t(n, 0.0);
    double* xv = x.interior_buffer().data();
    double rho_old = 1.0, alpha = 1.0, omega = 1.0;

    auto true_residual = [&] {
        op.apply_raw(xv, t.data());
        for (std::size_t i : interior) r[i] = b[i] - t[i];
        return k.sup(r.data(), n);
    };

    int it = 0;
    double res = g_sup;
    for (; it < maxiter; ++it) {
        const double rho = k.dot(rhat.data(), r.data(), n);
        if (rho == 0.0 || omega == 0.0) {
            // Breakdown: restart the recurrence from the current iterate.
            res = true_residual();
            if (res <= target) break;
            rhat = r;
            std::fill(p.begin(), p.end(), 0.0);
            std::fill(v.begin(), v.end(), 0.0);
            rho_old = alpha = omega = 1.0;
            continue;
        }
        const double beta = (rho / rho_old) * (alpha / omega);
        k.axpy(-omega, v.data(), p.data(), n);
        k.xpby(r.data(), beta, p.data(), n);
        k.mul(minv.data(), p.data(), phat.data(), n);
        op.apply_raw(phat.data(), v.data());
        const double rv = k.dot(rhat.data(), v.data(), n);
        if (rv == 0.0) {
            omega = 0.0;
            continue;
        }
        alpha = rho / rv;
        s = r;
        k.axpy(-alpha, v.data(), s.data(), n);
        k.axpy(alpha, phat.data(), xv, n);
        if (k.sup(s.data(), n) <= target) {
            res = true_residual();
            if (res <= target) {
                ++it;
                break;
            }
            rho_old = rho;
            omega = 0.0;  // forces a restart from the replaced residual
            continue;
        }
        k.mul(minv.data(), s.data(), shat.data(), n);
        op.apply_raw(shat.data(), t.data());
        const double tt = k.dot(t.data(), t.data(), n);
        omega = tt == 0.0 ? 0.0 : k.dot(t.data(), s.data(), n) / tt;
        k.axpy(omega, shat.data(), xv, n);
        r = s;
        k.axpy(-omega, t.data(), r.data(), n);
        rho_old = rho;
        if (k.sup(r.data(), n) <= target) {
            res = true_residual();
            if (res <= target) {
                ++it;
                break;
            }
        }
    }
    st.iterations = it;
    st.residual = res;
    if (res <= target) return x;

    if (grid.n() <= opts.dense_fallback_max_n) {
        GridField xd = solve_dense(op, g);
        GridField check = op.apply(xd);
        double dres = 0.0;
        for (std::size_t i : interior) dres = std::max(dres, std::abs(check[i] - b[i]));
        st.dense = true;
        st.residual = dres;
        if (dres <= target) return xd;
        throw LinearSolveDiverged(it, dres);
    }
    throw LinearSolveDiverged(it, res);
}

GridField solve_dense(const OperatorAssembly& op, const GridField& g) {
    const BallGrid& grid = op.grid();
    const auto interior = grid.interior();
    const auto m = static_cast<Eigen::Index>(interior.size());
    std::vector<Eigen::Index> compact(grid.size(), -1);
    for (std::size_t t = 0; t < interior.size(); ++t) compact[interior[t]] = static_cast<Eigen::Index>(t);

    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    Eigen::VectorXd rhs(m);
    const auto& off = op.offsets();
    for (std::size_t t = 0; t < interior.size(); ++t) {
        const auto row = static_cast<Eigen::Index>(t);
        rhs(row) = g[interior[t]];
        for (int p = 0; p < kernels::kStencilPoints; ++p) {
            const std::size_t nb = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(interior[t]) + off[p]);
            if (compact[nb] >= 0) a(row, compact[nb]) += op.coefficient(p, t);
        }
    }
    const Eigen::VectorXd sol = a.partialPivLu().solve(rhs);
    GridField out(op.grid_ptr());
    for (std::size_t t = 0; t < interior.size(); ++t) out.set(interior[t], sol(static_cast<Eigen::Index>(t)));
    return out;
}

}  // namespace hess2
