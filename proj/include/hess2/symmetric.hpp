#pragma once

#include <algorithm>
#include <array>
#include <functional>
#include <string_view>

namespace hess2 {

// A point of R^3 viewed as eigenvalues / cone coordinates.
struct Lambda3 {
    std::array<double, 3> values{};

    constexpr double operator[](int i) const { return values[static_cast<std::size_t>(i)]; }

    Lambda3 sorted_descending() const {
        Lambda3 out = *this;
        std::sort(out.values.begin(), out.values.end(), std::greater<>());
        return out;
    }
};

enum class ConeClass { Gamma3, Gamma2Not3, Gamma1Not2, P1, P2, Outside };

std::string_view to_string(ConeClass c);

inline constexpr double kDefaultConeTol = 1e-10;

// k-th elementary symmetric polynomial, k in {1,2,3}.
double sigma(int k, const Lambda3& lam);

// sigma_k of the pair left after deleting coordinate i (1-based), k in {1,2}.
// Equivalently d sigma_{k+1} / d lambda_i.
double sigma_reduced(int k, int i, const Lambda3& lam);

// Sign-pattern classification of (sigma_1, sigma_2, sigma_3); |sigma_j| <= tol
// counts as zero.
ConeClass classify_cone(const Lambda3& lam, double tol = kDefaultConeTol);

// [sigma_k / C(3,k)]^(1/k) <= [sigma_l / C(3,l)]^(1/l) with multiplicative
// slack 1 + 1e-12. Requires 1 <= l <= k <= 3 and lam in Gamma_k.
bool maclaurin_holds(int k, int l, const Lambda3& lam);

}  // namespace hess2
