#include "hess2/symmetric.hpp"

#include <cmath>
#include <string>

#include "hess2/errors.hpp"

namespace hess2 {

std::string_view to_string(ConeClass c) {
    switch (c) {
        case ConeClass::Gamma3: return "Gamma3";
        case ConeClass::Gamma2Not3: return "Gamma2_not3";
        case ConeClass::Gamma1Not2: return "Gamma1_not2";
        case ConeClass::P1: return "P1";
        case ConeClass::P2: return "P2";
        case ConeClass::Outside: return "Outside";
    }
    return "Outside";
}

double sigma(int k, const Lambda3& lam) {
    const double a = lam[0], b = lam[1], c = lam[2];
    switch (k) {
        case 1: return a + b + c;
        case 2: return a * b + b * c + a * c;
        case 3: return a * b * c;
        default: throw DomainError("sigma: k must be 1, 2 or 3 (got " + std::to_string(k) + ")");
    }
}

double sigma_reduced(int k, int i, const Lambda3& lam) {
    if (i < 1 || i > 3) {
        throw DomainError("sigma_reduced: axis index must be 1..3 (got " + std::to_string(i) + ")");
    }
    // The two coordinates that remain once lambda_i is deleted.
    const double a = lam[i == 1 ? 1 : 0];
    const double b = lam[i == 3 ? 1 : 2];
    switch (k) {
        case 1: return a + b;
        case 2: return a * b;
        default: throw DomainError("sigma_reduced: k must be 1 or 2 (got " + std::to_string(k) + ")");
    }
}

ConeClass classify_cone(const Lambda3& lam, double tol) {
    const double s1 = sigma(1, lam), s2 = sigma(2, lam), s3 = sigma(3, lam);
    const auto pos = [tol](double s) { return s > tol; };
    const auto neg = [tol](double s) { return s < -tol; };
    const auto zero = [tol](double s) { return std::abs(s) <= tol; };

    if (pos(s1) && pos(s2) && pos(s3)) return ConeClass::Gamma3;
    if (pos(s1) && pos(s2)) return ConeClass::Gamma2Not3;
    if (pos(s1) && neg(s2)) return ConeClass::Gamma1Not2;
    if (pos(s1) && zero(s2) && neg(s3)) return ConeClass::P2;
    if (s1 >= -tol && zero(s2) && zero(s3)) return ConeClass::P1;
    return ConeClass::Outside;
}

bool maclaurin_holds(int k, int l, const Lambda3& lam) {
    if (l < 1 || k > 3 || l > k) {
        throw PreconditionError("maclaurin_holds: need 1 <= l <= k <= 3");
    }
    for (int j = 1; j <= k; ++j) {
        if (!(sigma(j, lam) > 0.0)) {
            throw PreconditionError("maclaurin_holds: lambda is not in Gamma_" + std::to_string(k));
        }
    }
    static constexpr double binom[4] = {1.0, 3.0, 3.0, 1.0};
    const double lhs = std::pow(sigma(k, lam) / binom[k], 1.0 / k);
    const double rhs = std::pow(sigma(l, lam) / binom[l], 1.0 / l);
    return lhs <= rhs * (1.0 + 1e-12);
}

}  // namespace hess2
