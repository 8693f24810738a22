#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "hess2/expr.hpp"
#include "hess2/iteration.hpp"

namespace hess2 {

enum class Convexity {
    Convex3,
    TwoConvexNot3,
    OneConvexNot2,
    OneConvexNotConvex,
    Unclassified,
};

std::string_view to_string(Convexity c);

// One evaluation point of the verifier lattice.
struct SamplePoint {
    Vec3 y;
    double u = 0.0;
    Vec3 du{};
    SymMat3 d2u;
    double f = 0.0;
    Lambda3 sigmas;  // (S_1, S_2, S_3) of D^2 u
};

// sample_n^3 lattice over [-R, R]^3 restricted to |y| <= R, where R = 0.8 eps^2
// or 0.99 * radius() when that is smaller.
std::vector<SamplePoint> sample_solution(const PhysicalSolution& sol, const DifferentiatedF& f,
                                         int sample_n);

// sup |S_2[D^2 u] - f(y, u, Du)| over the sample lattice.
double physical_residual(const PhysicalSolution& sol, const DifferentiatedF& f, int sample_n);

// Sign-pattern convexity class of the sampled Hessians. Values within
// 1e-10 * sigma_1(tau)^2 of zero count as zero. Rules, first match wins:
//   convex_3              S1, S2, S3 > 0 everywhere
//   one_convex_not_convex S1 > 0, S3 < 0 everywhere; S2 vanishes or changes sign
//   two_convex_not_3      S1 > 0, S2 >= 0 everywhere; S3 < 0 somewhere
//   one_convex_not_2      S1 > 0 everywhere; S2 < 0 somewhere
//   unclassified          otherwise
Convexity classify_solution(const PhysicalSolution& sol, const DifferentiatedF& f, int sample_n);

struct EllipticityReport {
    double margin_min = 0.0;
    double bound = 0.0;
    bool pass = false;
};

EllipticityReport ellipticity_report(const PhysicalSolution& sol, int sample_n);

struct VerificationReport {
    double residual_sup = 0.0;
    double residual_budget = 0.0;
    bool residual_pass = false;
    double ellipticity_margin_min = 0.0;
    double ellipticity_bound = 0.0;
    bool ellipticity_pass = false;
    Convexity convexity = Convexity::Unclassified;
    // Keys are sign triples of (S1, S2, S3) such as "+0-".
    std::map<std::string, int> sign_samples;

    bool pass() const { return residual_pass && ellipticity_pass; }
};

// Allowed physical residual: eps * (nodal residual + stop tolerance) plus the
// trilinear interpolation error bound (3/8) h^2 max|D^2 phi| of the nodal
// fields phi = eps^2 S_2(D^2 w) and f~ that interpolation mixes nonlinearly.
double residual_budget(const PhysicalSolution& sol, const DifferentiatedF& f, double nodal_residual,
                       double stop_tol);

// Runs every check. `nodal_residual` is ||G(w)||_inf from the solve.
VerificationReport verify(const PhysicalSolution& sol, const DifferentiatedF& f, int sample_n,
                          double nodal_residual, double stop_tol);

// Classification from sign patterns alone (exposed for tests).
Convexity classify_signs(const std::vector<Lambda3>& sigmas, double zero_tol);

std::string sign_key(const Lambda3& sigmas, double zero_tol);

}  // namespace hess2
