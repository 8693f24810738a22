#pragma once

#include <array>

#include "hess2/symmetric.hpp"

namespace hess2 {

using Vec3 = std::array<double, 3>;

// Symmetric 3x3 matrix stored by its six independent entries.
struct SymMat3 {
    double m11 = 0, m22 = 0, m33 = 0, m12 = 0, m13 = 0, m23 = 0;

    static SymMat3 diag(double a, double b, double c) { return {a, b, c, 0, 0, 0}; }
    static SymMat3 diag(const Lambda3& l) { return diag(l[0], l[1], l[2]); }
    static SymMat3 identity() { return diag(1, 1, 1); }

    // Throws DomainError unless `full` is symmetric to 1e-12 (relative to its
    // largest entry, with an absolute floor of 1e-12).
    static SymMat3 from_full(const std::array<Vec3, 3>& full);

    // Zero-based element access.
    double operator()(int i, int j) const;
    std::array<Vec3, 3> to_full() const;

    double trace() const { return m11 + m22 + m33; }
    // Frobenius norm.
    double norm() const;
    Vec3 apply(const Vec3& v) const;

    friend SymMat3 operator+(const SymMat3& a, const SymMat3& b) {
        return {a.m11 + b.m11, a.m22 + b.m22, a.m33 + b.m33,
                a.m12 + b.m12, a.m13 + b.m13, a.m23 + b.m23};
    }
    friend SymMat3 operator*(double s, const SymMat3& a) {
        return {s * a.m11, s * a.m22, s * a.m33, s * a.m12, s * a.m13, s * a.m23};
    }
    friend bool operator==(const SymMat3&, const SymMat3&) = default;
};

struct SpectralDecomp {
    Lambda3 eigenvalues;                // descending
    std::array<Vec3, 3> eigenvectors;   // eigenvectors[i] pairs with eigenvalues[i]
};

// Closed-form (trigonometric) eigenvalues with a Jacobi-rotation fallback for
// near-multiple spectra.
SpectralDecomp eigen(const SymMat3& m);

// Cyclic Jacobi rotations; always used for spectra with gaps below the
// closed-form threshold, exposed for testing.
SpectralDecomp eigen_jacobi(const SymMat3& m);

// dS_2/dr = trace(M) I - M.
SymMat3 s2_gradient(const SymMat3& m);

// S_2(M): sum of the principal 2x2 minors.
double s2_value(const SymMat3& m);

// min_{i<j} (lambda_i + lambda_j); positive iff trace(M) I - M is positive definite.
double ellipticity_margin(const SymMat3& m);

}  // namespace hess2
