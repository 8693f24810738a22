#include "hess2/cone_select.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>

#include "hess2/errors.hpp"

namespace hess2 {
namespace {

constexpr double kZeroF0 = 1e-12;

Tau finish(Lambda3 values, ConeClass expected, double target) {
    Tau tau{values.sorted_descending(), expected, target};
    const double s2 = sigma(2, tau.values);
    const double scale = std::max({1.0, std::abs(target), std::abs(sigma(1, tau.values))});
    if (std::abs(s2 - target) > 1e-10 * scale) {
        throw DomainError("tau construction: sigma_2 misses its target");
    }
    if (!(sigma(1, tau.values) > 0.0)) throw DomainError("tau construction: sigma_1 <= 0");
    for (int i = 1; i <= 3; ++i) {
        if (!(sigma_reduced(1, i, tau.values) > 0.0)) {
            throw DomainError("tau construction: sigma_{1;" + std::to_string(i) + "} <= 0");
        }
    }
    return tau;
}

}  // namespace

double Tau::min_pair_sum() const {
    return std::min({sigma_reduced(1, 1, values), sigma_reduced(1, 2, values),
                     sigma_reduced(1, 3, values)});
}

std::string_view to_string(TauMode m) {
    switch (m) {
        case TauMode::Auto: return "auto";
        case TauMode::Convex: return "convex";
        case TauMode::Nonconvex: return "nonconvex";
    }
    return "auto";
}

TauMode parse_tau_mode(std::string_view s) {
    if (s == "auto") return TauMode::Auto;
    if (s == "convex") return TauMode::Convex;
    if (s == "nonconvex") return TauMode::Nonconvex;
    throw ConfigError("unknown mode '" + std::string(s) + "' (expected auto, convex or nonconvex)");
}

Tau tau_zero(double scale) {
    if (!(scale > 0.0)) throw DomainError("tau_zero: scale must be positive");
    return finish(Lambda3{{2.0 * scale, 2.0 * scale, -scale}}, ConeClass::P2, 0.0);
}

Tau tau_negative(double a, double alpha, double beta) {
    if (!(a < 0.0)) throw DomainError("tau_negative: requires a < 0");
    if (!(alpha > 0.0)) throw DomainError("tau_negative: requires alpha > 0");
    if (!(beta > 0.0)) throw DomainError("tau_negative: requires beta > 0");
    const double k = (1.0 + beta) * alpha - 1.0;
    if (!(k < 0.0)) {
        std::ostringstream msg;
        msg << "tau_negative: requires (1+beta)*alpha - 1 < 0, got " << k;
        throw DomainError(msg.str());
    }
    // With p = (1+alpha)(1+beta) and q = 1+alpha as stored, sigma_2 of
    // (p, q, -1) Theta is (pq - p - q) Theta^2 = (1+alpha) [(1+beta) alpha - 1] Theta^2.
    // The gap pq - p - q cancels as (1+beta) alpha -> 1, so it is formed from the
    // rounded p, q with an error-free sum.
    const double p = (1.0 + alpha) * (1.0 + beta), q = 1.0 + alpha;
    const double s = p + q, qq = s - p;
    const double s_err = (p - (s - qq)) + (q - qq);
    const double gap = std::fma(p, q, -s) - s_err;
    const double theta = std::sqrt(a / gap);
    return finish(Lambda3{{p * theta, q * theta, -theta}}, ConeClass::Gamma1Not2, a);
}

Tau tau_positive_nonconvex(double b) {
    if (!(b > 0.0)) throw DomainError("tau_positive_nonconvex: requires b > 0");
    const double t = std::sqrt(4.0 * b / 3.0);
    return finish(Lambda3{{t, t, -t / 8.0}}, ConeClass::Gamma2Not3, b);
}

Tau tau_convex(double c) {
    if (!(c > 0.0)) throw DomainError("tau_convex: requires c > 0");
    const double t = std::sqrt(c / 3.0);
    return finish(Lambda3{{t, t, t}}, ConeClass::Gamma3, c);
}

Tau select_tau(double f0, TauMode mode) {
    const bool zero = std::abs(f0) <= kZeroF0;
    if (mode == TauMode::Convex && (zero || f0 < 0.0)) {
        throw DomainError("select_tau: convex mode needs f(Z0) > 0");
    }
    if (zero) return tau_zero();
    if (f0 < 0.0) return tau_negative(f0, 0.5, 0.5);
    return mode == TauMode::Convex ? tau_convex(f0) : tau_positive_nonconvex(f0);
}

}  // namespace hess2
