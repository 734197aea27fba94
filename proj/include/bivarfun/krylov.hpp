#pragma once

#include <optional>

#include "bivarfun/matfun.hpp"

namespace bivarfun::krylov {

using funexpr::FunExpr;
using matfun::QuadratureSpec;

/// Arnoldi relation A U_k = basis * hess with orthonormal basis columns.
/// Without breakdown: basis is n x (k+1) and hess (k+1) x k. On happy
/// breakdown at step j the Krylov space is invariant; basis is n x j and
/// hess the square j x j compression.
struct ArnoldiDecomposition {
    ComplexMatrix basis;
    ComplexMatrix hess;
    std::optional<int> breakdown_step;
};

/// Modified Gram-Schmidt with one reorthogonalization pass.
ArnoldiDecomposition arnoldi(const ComplexMatrix& a, const ComplexVector& c, int k);

struct KrylovApproxResult {
    ComplexVector x_kl;  // lifted approximation, length n_A * n_B
    ComplexVector y_kl;  // compressed solution, length k_used * l_used
    int k_used = 0;
    int l_used = 0;
    std::optional<double> error_vs_exact;
    std::optional<double> apriori_bound;
    matfun::EvalMetadata meta;
};

/// Arnoldi approximation of f{A,B} c for c = vec(c_A c_B^T): compress both
/// matrices onto their Krylov bases, evaluate the small bivariate function
/// with contours built from the FULL matrices' numerical ranges (the
/// compressions' ranges are contained in them), and lift. Computes the
/// exact error when the full operator fits the size cap, and the a-priori
/// bound when `with_bound` is set.
KrylovApproxResult bivariate_krylov(const FunExpr& f, const ComplexMatrix& a,
                                    const ComplexMatrix& b, const ComplexVector& c_a,
                                    const ComplexVector& c_b, int k, int l,
                                    const QuadratureSpec& q = {}, const Config& cfg = {},
                                    bool with_exact = true, bool with_bound = true);

/// 2 (1+sqrt(2))^2 ||c||_2 * E_hat, where E_hat estimates the best
/// bivariate polynomial approximation error of degree (k-1, l-1) on
/// W(A) x W(B): a tensor Chebyshev interpolant on the bounding rectangles'
/// diagonals, maximized over the sampled range boundaries. E_hat is a
/// near-best estimate of the true infimum, not an upper bound of it.
double apriori_error_bound(const FunExpr& f, const ComplexMatrix& a, const ComplexMatrix& b,
                           const ComplexVector& c_a, const ComplexVector& c_b, int k, int l,
                           int degree_cap = 64, const Config& cfg = {});

}  // namespace bivarfun::krylov
