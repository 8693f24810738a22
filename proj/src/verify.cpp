#include "hess2/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hess2/errors.hpp"

namespace hess2 {
namespace {

double det(const SymMat3& m) {
    return m.m11 * (m.m22 * m.m33 - m.m23 * m.m23) - m.m12 * (m.m12 * m.m33 - m.m23 * m.m13) +
           m.m13 * (m.m12 * m.m23 - m.m22 * m.m13);
}

double zero_tolerance(const Tau& tau) {
    const double s1 = sigma(1, tau.values);
    return 1e-10 * s1 * s1;
}

// 0.8 eps^2, shrunk on coarse grids whose interior ball is smaller.
double sample_radius(const PhysicalSolution& sol) {
    return std::min(0.8 * sol.eps() * sol.eps(), 0.99 * sol.radius());
}

char sign_char(double v, double tol) { return v > tol ? '+' : (v < -tol ? '-' : '0'); }

// Largest |second difference| along the axes of a nodal field, over interior
// nodes within `reach` of the origin whose axis neighbours are interior too.
double max_second_difference(const BallGrid& g, const std::vector<double>& phi, double reach) {
    double out = 0.0;
    for (std::size_t idx : g.interior()) {
        const Vec3 x = g.position(idx);
        if (x[0] * x[0] + x[1] * x[1] + x[2] * x[2] > reach * reach) continue;
        for (int a = 0; a < 3; ++a) {
            const std::ptrdiff_t s = g.stride(a == 0, a == 1, a == 2);
            const std::size_t up = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) + s);
            const std::size_t dn = static_cast<std::size_t>(static_cast<std::ptrdiff_t>(idx) - s);
            if (!g.is_interior(up) || !g.is_interior(dn)) continue;
            out = std::max(out, std::abs(phi[up] - 2.0 * phi[idx] + phi[dn]));
        }
    }
    return out;
}

}  // namespace

std::string_view to_string(Convexity c) {
    switch (c) {
        case Convexity::Convex3: return "convex_3";
        case Convexity::TwoConvexNot3: return "two_convex_not_3";
        case Convexity::OneConvexNot2: return "one_convex_not_2";
        case Convexity::OneConvexNotConvex: return "one_convex_not_convex";
        case Convexity::Unclassified: return "unclassified";
    }
    return "unclassified";
}

std::vector<SamplePoint> sample_solution(const PhysicalSolution& sol, const DifferentiatedF& f,
                                         int sample_n) {
    if (sample_n < 1) throw DomainError("sample_n must be positive");
    const double r = sample_radius(sol);
    std::vector<SamplePoint> out;
    auto coord = [&](int i) { return sample_n == 1 ? 0.0 : -r + 2.0 * r * i / (sample_n - 1); };
    for (int i = 0; i < sample_n; ++i)
        for (int j = 0; j < sample_n; ++j)
            for (int k = 0; k < sample_n; ++k) {
                const Vec3 y{coord(i), coord(j), coord(k)};
                if (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] > r * r) continue;
                SamplePoint s;
                s.y = y;
                s.u = sol.value(y);
                s.du = sol.gradient(y);
                s.d2u = sol.hessian(y);
                s.f = eval(f.f, FPoint{y, s.u, s.du});
                s.sigmas = Lambda3{{s.d2u.trace(), s2_value(s.d2u), det(s.d2u)}};
                out.push_back(s);
            }
    return out;
}

double physical_residual(const PhysicalSolution& sol, const DifferentiatedF& f, int sample_n) {
    double sup = 0.0;
    for (const SamplePoint& s : sample_solution(sol, f, sample_n)) {
        sup = std::max(sup, std::abs(s.sigmas[1] - s.f));
    }
    return sup;
}

std::string sign_key(const Lambda3& s, double tol) {
    return {sign_char(s[0], tol), sign_char(s[1], tol), sign_char(s[2], tol)};
}

Convexity classify_signs(const std::vector<Lambda3>& sigmas, double tol) {
    if (sigmas.empty()) return Convexity::Unclassified;
    bool s1_pos = true, all_pos = true, s3_neg = true, s2_nonneg = true;
    bool s2_zero = false, s2_pos = false, s2_neg = false, s3_neg_some = false;
    for (const Lambda3& s : sigmas) {
        const std::string key = sign_key(s, tol);
        s1_pos = s1_pos && key[0] == '+';
        all_pos = all_pos && key == "+++";
        s3_neg = s3_neg && key[2] == '-';
        s3_neg_some = s3_neg_some || key[2] == '-';
        s2_nonneg = s2_nonneg && key[1] != '-';
        s2_zero = s2_zero || key[1] == '0';
        s2_pos = s2_pos || key[1] == '+';
        s2_neg = s2_neg || key[1] == '-';
    }
    if (all_pos) return Convexity::Convex3;
    if (s1_pos && s3_neg && (s2_zero || (s2_pos && s2_neg))) return Convexity::OneConvexNotConvex;
    if (s1_pos && s2_nonneg && s3_neg_some) return Convexity::TwoConvexNot3;
    if (s1_pos && s2_neg) return Convexity::OneConvexNot2;
    return Convexity::Unclassified;
}

Convexity classify_solution(const PhysicalSolution& sol, const DifferentiatedF& f, int sample_n) {
    std::vector<Lambda3> sigmas;
    for (const SamplePoint& s : sample_solution(sol, f, sample_n)) sigmas.push_back(s.sigmas);
    return classify_signs(sigmas, zero_tolerance(sol.tau()));
}

EllipticityReport ellipticity_report(const PhysicalSolution& sol, int sample_n) {
    if (sample_n < 1) throw DomainError("sample_n must be positive");
    const double r = sample_radius(sol);
    auto coord = [&](int i) { return sample_n == 1 ? 0.0 : -r + 2.0 * r * i / (sample_n - 1); };
    EllipticityReport rep;
    rep.margin_min = std::numeric_limits<double>::infinity();
    for (int i = 0; i < sample_n; ++i)
        for (int j = 0; j < sample_n; ++j)
            for (int k = 0; k < sample_n; ++k) {
                const Vec3 y{coord(i), coord(j), coord(k)};
                if (y[0] * y[0] + y[1] * y[1] + y[2] * y[2] > r * r) continue;
                rep.margin_min = std::min(rep.margin_min, ellipticity_margin(sol.transformed_hessian(y)));
            }
    rep.bound = 0.5 * sol.tau().min_pair_sum();
    rep.pass = rep.margin_min >= rep.bound;
    return rep;
}

double residual_budget(const PhysicalSolution& sol, const DifferentiatedF& f, double nodal_residual,
                       double stop_tol) {
    const GridField& w = sol.w();
    const BallGrid& g = w.grid();
    const double eps = sol.eps();
    std::vector<double> quad(g.size(), 0.0), rhs(g.size(), 0.0);
    for (std::size_t idx : g.interior()) {
        const TransformedNode node = transform_node(w, sol.tau(), eps, idx);
        quad[idx] = eps * eps * s2_value(hessian_at(w, idx));
        rhs[idx] = eval(f.f, node.point);
    }
    // Nodes of every cell that meets the sampled ball.
    const double reach = sample_radius(sol) / (eps * eps) + std::sqrt(3.0) * g.h();
    const double interp =
        0.375 * (max_second_difference(g, quad, reach) + max_second_difference(g, rhs, reach));
    return eps * (nodal_residual + stop_tol) + interp;
}

VerificationReport verify(const PhysicalSolution& sol, const DifferentiatedF& f, int sample_n,
                          double nodal_residual, double stop_tol) {
    VerificationReport rep;
    const double tol = zero_tolerance(sol.tau());
    std::vector<Lambda3> sigmas;
    for (const SamplePoint& s : sample_solution(sol, f, sample_n)) {
        rep.residual_sup = std::max(rep.residual_sup, std::abs(s.sigmas[1] - s.f));
        sigmas.push_back(s.sigmas);
        ++rep.sign_samples[sign_key(s.sigmas, tol)];
    }
    rep.convexity = classify_signs(sigmas, tol);
    rep.residual_budget = residual_budget(sol, f, nodal_residual, stop_tol);
    rep.residual_pass = rep.residual_sup <= rep.residual_budget;

    const EllipticityReport e = ellipticity_report(sol, sample_n);
    rep.ellipticity_margin_min = e.margin_min;
    rep.ellipticity_bound = e.bound;
    rep.ellipticity_pass = e.pass;
    return rep;
}

}  // namespace hess2
