#pragma once

#include <complex>
#include <random>
#include <vector>

#include "bivarfun/linalg.hpp"

// Shared deterministic generators and small independent oracles for tests.
namespace testsup {

using bivarfun::Complex;
using bivarfun::ComplexMatrix;
using bivarfun::ComplexVector;

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64(seed); }

inline Complex random_complex(std::mt19937_64& g) {
    std::normal_distribution<double> d(0.0, 1.0);
    const double re = d(g);
    const double im = d(g);
    return {re, im};
}

inline ComplexMatrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& g,
                                   double scale = 1.0) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i)
        for (Eigen::Index j = 0; j < cols; ++j) m(i, j) = scale * random_complex(g);
    return m;
}

// Random unitary via QR of a Gaussian matrix.
inline ComplexMatrix random_unitary(Eigen::Index n, std::mt19937_64& g) {
    ComplexMatrix a = random_matrix(n, n, g);
    Eigen::HouseholderQR<ComplexMatrix> qr(a);
    ComplexMatrix q = qr.householderQ();
    // Fix the phase so the factorization is unique-ish; not required, but
    // keeps repeated draws well spread.
    ComplexMatrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (Eigen::Index i = 0; i < n; ++i) {
        const Complex d = r(i, i);
        if (std::abs(d) > 0) q.col(i) *= d / std::abs(d);
    }
    return q;
}

inline ComplexVector random_vector(Eigen::Index n, std::mt19937_64& g) {
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = random_complex(g);
    return v;
}

// Uniform draw from the closed disc of the given radius.
inline Complex random_in_disc(std::mt19937_64& g, double radius) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const double r = radius * std::sqrt(u(g));
    const double t = 2.0 * 3.141592653589793 * u(g);
    return std::polar(r, t);
}

inline ComplexVector random_vector_in_disc(Eigen::Index n, std::mt19937_64& g, double radius) {
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = random_in_disc(g, radius);
    return v;
}

// Diagonalizable matrix S diag(values) S^{-1} with a controlled similarity.
inline ComplexMatrix diagonalizable_matrix(const ComplexVector& values, std::mt19937_64& g,
                                           double nonnormality = 0.3) {
    const Eigen::Index n = values.size();
    ComplexMatrix s = ComplexMatrix::Identity(n, n) + nonnormality * random_matrix(n, n, g);
    return s * values.asDiagonal() * s.inverse();
}

// 2x2 nilpotent Jordan block [[0,1],[0,0]].
inline ComplexMatrix jordan2() {
    ComplexMatrix j(2, 2);
    j << 0.0, 1.0, 0.0, 0.0;
    return j;
}

inline double rel_err(const ComplexMatrix& got, const ComplexMatrix& want) {
    const double denom = std::max(1e-300, want.norm());
    return (got - want).norm() / denom;
}

}  // namespace testsup
