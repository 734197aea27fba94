#pragma once

#include <complex>
#include <functional>
#include <optional>

#include <Eigen/Dense>

#include "bivarfun/config.hpp"
#include "bivarfun/errors.hpp"

namespace bivarfun {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

namespace linalg {

/// Eigenvalues, optional right-eigenvector basis, and a condition estimate
/// kappa_2(S) for that basis. When the basis is too ill-conditioned to be
/// useful (estimate above the configured threshold, e.g. for defective
/// matrices) `vectors` is empty and `basis_unavailable` is set; the
/// eigenvalues are still valid.
struct EigenDecomposition {
    ComplexVector values;
    std::optional<ComplexMatrix> vectors;
    double condition_estimate = 1.0;
    bool basis_unavailable = false;
};

/// Kronecker product. Block (i,j) of the result equals p(i,j) * q.
/// Throws SizeLimitError if either result dimension exceeds max_dim.
ComplexMatrix kron(const ComplexMatrix& p, const ComplexMatrix& q,
                   Eigen::Index max_dim = 1 << 15);

/// Column-stacking vectorization; satisfies kron(Q, P) * vec(X) = vec(P X Q^T).
ComplexVector vec(const ComplexMatrix& x);

/// Inverse of vec for the given shape.
ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols);

/// Permutation K with K * vec(X) = vec(X^T) for X of shape rows x cols.
ComplexMatrix perfect_shuffle(Eigen::Index rows, Eigen::Index cols);

/// Dense complex eigendecomposition (Schur-based QR iteration).
EigenDecomposition eig(const ComplexMatrix& a, bool want_vectors = false,
                       const Config& cfg = {});

/// Solve M X = RHS for square, numerically nonsingular M.
/// Throws SingularMatrixError (carrying the smallest pivot magnitude) when M
/// is singular to working precision.
ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& rhs);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& m, double tol = 1e-10);

/// Largest singular value of an implicitly given operator on C^dim, via
/// power iteration on op* . op. `apply`/`apply_adjoint` must be exact
/// adjoints of each other for the returned value to be meaningful.
double spectral_norm_power(
    const std::function<ComplexVector(const ComplexVector&)>& apply,
    const std::function<ComplexVector(const ComplexVector&)>& apply_adjoint,
    Eigen::Index dim, double tol = 1e-10, int max_iter = 20000);

/// kappa_2 = sigma_max / sigma_min; +inf for singular or empty input.
double condition_number(const ComplexMatrix& m);

}  // namespace linalg
}  // namespace bivarfun
