#include "hess2/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hess2/errors.hpp"

namespace hess2 {
namespace {

constexpr double kGapThreshold = 1e-8;

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

Vec3 normalized(const Vec3& v) {
    const double n = std::sqrt(dot(v, v));
    return {v[0] / n, v[1] / n, v[2] / n};
}

SpectralDecomp sorted(Lambda3 values, std::array<Vec3, 3> vectors) {
    std::array<int, 3> order{0, 1, 2};
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return values[a] > values[b]; });
    SpectralDecomp out;
    for (std::size_t i = 0; i < 3; ++i) {
        out.eigenvalues.values[i] = values[order[i]];
        out.eigenvectors[i] = vectors[static_cast<std::size_t>(order[i])];
    }
    return out;
}

// Null vector of (M - lambda I) for an isolated eigenvalue: the longest cross
// product of two rows.
Vec3 isolated_eigenvector(const SymMat3& m, double lambda) {
    auto full = m.to_full();
    for (int i = 0; i < 3; ++i) full[i][i] -= lambda;
    const Vec3 c[3] = {cross(full[0], full[1]), cross(full[0], full[2]), cross(full[1], full[2])};
    int best = 0;
    for (int i = 1; i < 3; ++i) {
        if (dot(c[i], c[i]) > dot(c[best], c[best])) best = i;
    }
    return normalized(c[best]);
}

// Any unit vector orthogonal to unit v.
Vec3 orthogonal_unit(const Vec3& v) {
    const Vec3 axis = std::abs(v[0]) < 0.6 ? Vec3{1, 0, 0} : Vec3{0, 1, 0};
    return normalized(cross(v, axis));
}

}  // namespace

SymMat3 SymMat3::from_full(const std::array<Vec3, 3>& a) {
    double scale = 0.0;
    for (const auto& row : a)
        for (double x : row) scale = std::max(scale, std::abs(x));
    const double tol = 1e-12 * std::max(1.0, scale);
    if (std::abs(a[0][1] - a[1][0]) > tol || std::abs(a[0][2] - a[2][0]) > tol ||
        std::abs(a[1][2] - a[2][1]) > tol) {
        throw DomainError("SymMat3::from_full: input matrix is not symmetric");
    }
    return {a[0][0], a[1][1], a[2][2], a[0][1], a[0][2], a[1][2]};
}

double SymMat3::operator()(int i, int j) const {
    if (i > j) std::swap(i, j);
    switch (i * 3 + j) {
        case 0: return m11;
        case 1: return m12;
        case 2: return m13;
        case 4: return m22;
        case 5: return m23;
        case 8: return m33;
        default: throw DomainError("SymMat3: index out of range");
    }
}

std::array<Vec3, 3> SymMat3::to_full() const {
    return {{{m11, m12, m13}, {m12, m22, m23}, {m13, m23, m33}}};
}

double SymMat3::norm() const {
    return std::sqrt(m11 * m11 + m22 * m22 + m33 * m33 +
                     2.0 * (m12 * m12 + m13 * m13 + m23 * m23));
}

Vec3 SymMat3::apply(const Vec3& v) const {
    return {m11 * v[0] + m12 * v[1] + m13 * v[2],
            m12 * v[0] + m22 * v[1] + m23 * v[2],
            m13 * v[0] + m23 * v[1] + m33 * v[2]};
}

SpectralDecomp eigen_jacobi(const SymMat3& m) {
    auto a = m.to_full();
    std::array<Vec3, 3> v{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};  // columns are eigenvectors

    for (int sweep = 0; sweep < 50; ++sweep) {
        const double off = a[0][1] * a[0][1] + a[0][2] * a[0][2] + a[1][2] * a[1][2];
        if (off == 0.0) break;
        const double diag = a[0][0] * a[0][0] + a[1][1] * a[1][1] + a[2][2] * a[2][2];
        if (off <= 1e-34 * diag) break;
        for (int p = 0; p < 2; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                if (a[p][q] == 0.0) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = std::copysign(1.0, theta) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v[k][p], vkq = v[k][q];
                    v[k][p] = c * vkp - s * vkq;
                    v[k][q] = s * vkp + c * vkq;
                }
            }
        }
    }
    std::array<Vec3, 3> vectors{};
    for (int i = 0; i < 3; ++i)
        for (int k = 0; k < 3; ++k) vectors[i][k] = v[k][i];
    return sorted(Lambda3{{a[0][0], a[1][1], a[2][2]}}, vectors);
}

SpectralDecomp eigen(const SymMat3& m) {
    const double norm = m.norm();
    if (norm == 0.0) {
        return {Lambda3{{0, 0, 0}}, {{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}}};
    }
    const double gap_tol = kGapThreshold * (1.0 + norm);

    // Trigonometric solution of the characteristic cubic of the deviator.
    const double q = m.trace() / 3.0;
    const SymMat3 b{m.m11 - q, m.m22 - q, m.m33 - q, m.m12, m.m13, m.m23};
    const double p = b.norm() / std::sqrt(6.0);
    if (p < gap_tol) return eigen_jacobi(m);

    const double det = b.m11 * (b.m22 * b.m33 - b.m23 * b.m23) -
                       b.m12 * (b.m12 * b.m33 - b.m23 * b.m13) +
                       b.m13 * (b.m12 * b.m23 - b.m22 * b.m13);
    const double r = std::clamp(det / (2.0 * p * p * p), -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double l1 = q + 2.0 * p * std::cos(phi);
    const double l3 = q + 2.0 * p * std::cos(phi + 2.0 * std::numbers::pi / 3.0);
    const double l2 = 3.0 * q - l1 - l3;

    if (l1 - l2 < gap_tol || l2 - l3 < gap_tol) return eigen_jacobi(m);

    // The eigenvalue farther from the middle one is well separated; its vector
    // comes from a cross product, the other two from the 2x2 problem on the
    // orthogonal complement.
    const double isolated = (l1 - l2 >= l2 - l3) ? l1 : l3;
    const Vec3 v0 = isolated_eigenvector(m, isolated);
    const Vec3 e1 = orthogonal_unit(v0);
    const Vec3 e2 = cross(v0, e1);
    const Vec3 me1 = m.apply(e1), me2 = m.apply(e2);
    const double a11 = dot(e1, me1), a22 = dot(e2, me2), a12 = dot(e1, me2);

    double c = 1.0, s = 0.0;
    if (a12 != 0.0) {
        const double theta = (a22 - a11) / (2.0 * a12);
        const double t = std::copysign(1.0, theta) /
                         (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        c = 1.0 / std::sqrt(t * t + 1.0);
        s = t * c;
    }
    const Vec3 v1{c * e1[0] - s * e2[0], c * e1[1] - s * e2[1], c * e1[2] - s * e2[2]};
    const Vec3 v2 = cross(v0, v1);

    const std::array<Vec3, 3> vectors{v0, v1, v2};
    Lambda3 values;
    for (std::size_t i = 0; i < 3; ++i) values.values[i] = dot(vectors[i], m.apply(vectors[i]));
    return sorted(values, vectors);
}

SymMat3 s2_gradient(const SymMat3& m) {
    return {m.m22 + m.m33, m.m11 + m.m33, m.m11 + m.m22, -m.m12, -m.m13, -m.m23};
}

double s2_value(const SymMat3& m) {
    return m.m11 * m.m22 - m.m12 * m.m12 + m.m22 * m.m33 - m.m23 * m.m23 +
           m.m11 * m.m33 - m.m13 * m.m13;
}

double ellipticity_margin(const SymMat3& m) {
    const Lambda3 l = eigen(m).eigenvalues;
    // Sorted descending, so the smallest pair sum is the last two.
    return l[1] + l[2];
}

}  // namespace hess2
