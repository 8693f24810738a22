#include <cmath>

#include "doctest.h"
#include "hess2/errors.hpp"
#include "hess2/linear.hpp"
#include "manufactured.hpp"
#include "oracles.hpp"

using namespace hess2;

namespace {

double sup_interior(const GridField& f) {
    double s = 0.0;
    for (std::size_t idx : f.grid().interior()) s = std::max(s, std::abs(f[idx]));
    return s;
}

double sup_diff(const GridField& a, const GridField& b) {
    double s = 0.0;
    for (std::size_t idx : a.grid().interior()) s = std::max(s, std::abs(a[idx] - b[idx]));
    return s;
}

// Interior nodes whose 18 stencil neighbours are interior as well.
bool deep(const BallGrid& g, std::size_t idx) {
    for (int di = -1; di <= 1; ++di)
        for (int dj = -1; dj <= 1; ++dj)
            for (int dk = -1; dk <= 1; ++dk)
                if (!g.is_interior(idx + g.stride(di, dj, dk))) return false;
    return true;
}

GridField smooth_pinned(const GridPtr& g, double amp, double phase) {
    const double R = 1.0 - g->h() * g->bandwidth();
    return GridField::sample_pinned(g, [=](const Vec3& x) {
        const double b = R * R - (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
        return amp * b * b * std::cos(x[0] + 2 * x[1] - x[2] + phase);
    });
}

}  // namespace

TEST_SUITE("linear") {

TEST_CASE("residual at w = 0") {
    const GridPtr g = make_grid(17);
    const GridField w0(g);
    const Tau tz = tau_zero();
    CHECK(sup_interior(residual_G(w0, tz, 0.1, DifferentiatedF(parse("0")))) == 0.0);

    const Tau tc = tau_convex(3.0);
    CHECK(sup_interior(residual_G(w0, tc, 0.1, DifferentiatedF(parse("3")))) < 1e-13);

    const GridField r = residual_G(w0, tz, 0.1, DifferentiatedF(parse("y1")));
    for (std::size_t idx : g->interior()) {
        const double x1 = g->position(idx)[0];
        CHECK(r[idx] == doctest::Approx(-0.1 * x1).epsilon(1e-13));
    }
    for (std::size_t idx = 0; idx < g->size(); ++idx)
        if (!g->is_interior(idx)) CHECK(r[idx] == 0.0);
}

TEST_CASE("transformed node at w = 0") {
    const GridPtr g = make_grid(17);
    const Tau tz = tau_zero();
    const double eps = 0.2;
    const std::size_t idx = g->index(10, 7, 9);
    const Vec3 x = g->position(idx);
    const TransformedNode node = transform_node(GridField(g), tz, eps, idx);
    CHECK(node.r == SymMat3::diag(tz.values));
    const double psi = 0.5 * (2 * x[0] * x[0] + 2 * x[1] * x[1] - x[2] * x[2]);
    CHECK(node.point.z == doctest::Approx(std::pow(eps, 4) * psi));
    for (int i = 0; i < 3; ++i) {
        CHECK(node.point.y[i] == doctest::Approx(eps * eps * x[i]));
        CHECK(node.point.p[i] == doctest::Approx(tz.values[i] * eps * eps * x[i]));
    }
}

TEST_CASE("EvalError from f names the node") {
    const GridPtr g = make_grid(9);
    try {
        residual_G(GridField(g), tau_zero(), 0.1, DifferentiatedF(parse("log(y1)")));
        FAIL("expected EvalError");
    } catch (const EvalError& e) {
        CHECK(std::string(e.what()).find("at node") != std::string::npos);
    }
}

TEST_CASE("assembly at w = 0") {
    const GridPtr g = make_grid(17);
    const Tau tz = tau_zero();
    const double eps = 0.1;
    const OperatorAssembly op = assemble(GridField(g), tz, eps, DifferentiatedF(parse("p1 - 2*p3 + 3*u")));
    CHECK(op.min_ellipticity_margin() == tz.min_pair_sum());
    for (std::size_t t = 0; t < op.unknowns(); ++t) {
        CHECK(op.second_order()[t] == SymMat3::diag(1, 1, 4));
        CHECK(op.first_order()[t][0] == doctest::Approx(-eps * eps));
        CHECK(op.first_order()[t][1] == 0.0);
        CHECK(op.first_order()[t][2] == doctest::Approx(2 * eps * eps));
        CHECK(op.zeroth_order()[t] == doctest::Approx(-3 * std::pow(eps, 4)));
    }
    const OperatorAssembly c = assemble(GridField(g), tz, eps, DifferentiatedF(parse("7")));
    for (std::size_t t = 0; t < c.unknowns(); ++t) {
        CHECK(c.first_order()[t] == Vec3{0, 0, 0});
        CHECK(c.zeroth_order()[t] == 0.0);
    }
}

TEST_CASE("operator action on a quadratic") {
    const GridPtr g = make_grid(17);
    const Tau tz = tau_zero();
    const OperatorAssembly op = assemble(GridField(g), tz, 0.1, DifferentiatedF(parse("0")));
    const GridField q = GridField::sample_pinned(g, [](const Vec3& x) { return 0.5 * x[0] * x[0]; });
    const GridField lq = op.apply(q);
    int seen = 0;
    for (std::size_t idx : g->interior()) {
        if (!deep(*g, idx)) continue;
        CHECK(lq[idx] == doctest::Approx(sigma_reduced(1, 1, tz.values)).epsilon(1e-10));
        ++seen;
    }
    CHECK(seen > 100);
}

TEST_CASE("assembly linearizes the residual") {
    const GridPtr g = make_grid(17);
    const Tau tz = tau_zero();
    const double eps = 0.1;
    const DifferentiatedF f(parse("y1 + sin(u) + p1*p2 + exp(p3)"));
    const GridField w = smooth_pinned(g, 0.3, 0.2);
    const GridField rho = smooth_pinned(g, 1.0, 1.1);
    const OperatorAssembly op = assemble(w, tz, eps, f);
    const GridField arho = op.apply(rho);
    const GridField gw = residual_G(w, tz, eps, f);
    double rem[2];
    const double ts[2] = {1e-3, 1e-4};
    for (int i = 0; i < 2; ++i) {
        const GridField gt = residual_G(w + ts[i] * rho, tz, eps, f);
        double r = 0.0;
        for (std::size_t idx : g->interior()) r = std::max(r, std::abs(gt[idx] - gw[idx] - ts[i] * arho[idx]));
        rem[i] = r;
    }
    // Quadratic remainder: shrinks ~100x when t shrinks 10x.
    CHECK(rem[1] < rem[0] / 50.0);
}

TEST_CASE("loss of ellipticity is reported") {
    const GridPtr g = make_grid(17);
    const GridField w = GridField::sample_pinned(g, [](const Vec3& x) { return -10.0 * x[2] * x[2]; });
    CHECK_THROWS_AS(assemble(w, tau_zero(), 0.1, DifferentiatedF(parse("0"))), EllipticityLost);
}

TEST_CASE("solve with zero right-hand side") {
    const GridPtr g = make_grid(17);
    const OperatorAssembly op = assemble(GridField(g), tau_zero(), 0.1, DifferentiatedF(parse("0")));
    SolveStats st;
    const GridField rho = solve_dirichlet(op, GridField(g), {}, &st);
    CHECK(sup_interior(rho) == 0.0);
    CHECK(st.iterations == 0);
}

TEST_CASE("manufactured solution is recovered") {
    for (int n : {17, 33}) {
        const GridPtr g = make_grid(n);
        const Tau tz = tau_zero();
        const OperatorAssembly op = assemble(GridField(g), tz, 0.1, DifferentiatedF(parse("0")));
        const manufactured::Bump bump = manufactured::for_grid(*g);
        const GridField exact = GridField::sample_pinned(g, [&](const Vec3& x) { return bump.value(x); });

        // Discrete image: only the solver error remains.
        SolveOptions opts;
        opts.tol = 1e-12;
        SolveStats st;
        const GridField rho = solve_dirichlet(op, op.apply(exact), opts, &st);
        CHECK_FALSE(st.dense);
        CHECK(st.residual <= opts.tol * (1 + sup_interior(op.apply(exact))));
        CHECK(sup_diff(rho, exact) < 1e-10);

        // Continuous image: error bounded by the consistency error.
        const double c[3] = {1, 1, 4};
        const GridField gc = GridField::sample_pinned(g, [&](const Vec3& x) { return bump.op(x, c); });
        const double consistency = sup_diff(op.apply(exact), gc);
        const GridField rc = solve_dirichlet(op, gc, opts);
        CHECK(sup_diff(rc, exact) <= 10.0 * (opts.tol + consistency));
    }
}

TEST_CASE("Krylov and dense solutions agree") {
    const GridPtr g = make_grid(17);
    const Tau tz = tau_zero();
    const DifferentiatedF f(parse("y1*p2 + u"));
    const GridField w = smooth_pinned(g, 0.2, 0.0);
    const OperatorAssembly op = assemble(w, tz, 0.1, f);
    for (int trial = 0; trial < 3; ++trial) {
        const GridField rhs = GridField::sample_pinned(g, [](const Vec3&) { return oracle::uniform(-1, 1); });
        SolveStats st;
        const GridField a = solve_dirichlet(op, rhs, {}, &st);
        CHECK_FALSE(st.dense);
        const GridField b = solve_dense(op, rhs);
        CHECK(sup_diff(a, b) < 1e-8);
    }
}

TEST_CASE("solve is homogeneous in (A, g)") {
    const GridPtr g = make_grid(17);
    const OperatorAssembly op = assemble(GridField(g), tau_zero(), 0.1, DifferentiatedF(parse("y2")));
    OperatorAssembly op2 = op;
    op2.scale(2.0);
    const GridField rhs = smooth_pinned(g, 1.0, 0.4);
    const GridField a = solve_dirichlet(op, rhs);
    const GridField b = solve_dirichlet(op2, 2.0 * rhs);
    CHECK(sup_diff(a, b) < 1e-9 * (1 + sup_interior(a)));
}

TEST_CASE("discrete maximum principle bound") {
    // For L = sum c_i d_ii with c = (1,1,4), v = (R^2 - |x|^2) ||g|| / (2 sum c_i)
    // satisfies L v = -||g|| exactly and v >= 0 on the pinned nodes when R is
    // the largest non-exterior radius, so |rho| <= R^2 ||g|| / 12.
    const GridPtr g = make_grid(17);
    const OperatorAssembly op = assemble(GridField(g), tau_zero(), 0.1, DifferentiatedF(parse("0")));
    double R = 0.0;
    for (std::size_t idx = 0; idx < g->size(); ++idx) {
        if (g->tag(idx) == NodeTag::Exterior) continue;
        const Vec3 x = g->position(idx);
        R = std::max(R, std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]));
    }
    for (int trial = 0; trial < 5; ++trial) {
        const GridField rhs = GridField::sample_pinned(g, [](const Vec3&) { return oracle::uniform(-1, 1); });
        SolveOptions opts;
        opts.tol = 1e-12;
        const GridField rho = solve_dirichlet(op, rhs, opts);
        CHECK(sup_interior(rho) <= R * R * sup_interior(rhs) / 12.0 * (1 + 1e-6));
    }
}

TEST_CASE("thread count does not change results") {
    const GridPtr g = make_grid(17);
    const Tau tz = tau_zero();
    const DifferentiatedF f(parse("exp(y1)*p3 + u^2"));
    const GridField w = smooth_pinned(g, 0.2, 0.5);
    const GridField r1 = residual_G(w, tz, 0.1, f, 1), r4 = residual_G(w, tz, 0.1, f, 4);
    for (std::size_t idx = 0; idx < g->size(); ++idx) CHECK(r1[idx] == r4[idx]);
    const OperatorAssembly a1 = assemble(w, tz, 0.1, f, 1), a4 = assemble(w, tz, 0.1, f, 4);
    const GridField x1 = a1.apply(w), x4 = a4.apply(w);
    for (std::size_t idx = 0; idx < g->size(); ++idx) CHECK(x1[idx] == x4[idx]);
    CHECK(a1.min_ellipticity_margin() == a4.min_ellipticity_margin());
}

}  // TEST_SUITE
