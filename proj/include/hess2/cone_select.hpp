#pragma once

#include <string_view>

#include "hess2/symmetric.hpp"

namespace hess2 {

// Coefficients of the base quadratic psi(y) = 1/2 sum tau_i y_i^2.
//
// Construction always checks: sigma_2(values) == sigma2_target (1e-10 relative),
// sigma_1 > 0 and every sigma_{1;i} > 0, so the frozen-coefficient operator
// sum_i sigma_{1;i}(tau) d_i^2 is uniformly elliptic.
struct Tau {
    Lambda3 values;  // descending
    ConeClass cone = ConeClass::Outside;
    double sigma2_target = 0.0;

    // Minimum pairwise sum tau_i + tau_j; equals the smallest sigma_{1;i}.
    double min_pair_sum() const;
};

enum class TauMode { Auto, Convex, Nonconvex };

std::string_view to_string(TauMode m);
TauMode parse_tau_mode(std::string_view s);

// Canonical P_2 element scale * (2, 2, -1).
Tau tau_zero(double scale = 1.0);

// tau = ((1+alpha)(1+beta) Theta, (1+alpha) Theta, -Theta) with sigma_2 = a < 0.
// Needs (1+beta) alpha < 1.
Tau tau_negative(double a, double alpha, double beta);

// (t, t, -t/8), t = sqrt(4b/3): sigma_2 = b > 0, sigma_3 < 0.
Tau tau_positive_nonconvex(double b);

// (t, t, t), t = sqrt(c/3): sigma_2 = c > 0, sigma_3 > 0.
Tau tau_convex(double c);

// Picks tau from the sign of f0 = f(Z0) (compared to zero at 1e-12).
Tau select_tau(double f0, TauMode mode);

}  // namespace hess2
