#pragma once

#include "bivarfun/matfun.hpp"

namespace bivarfun::frechet {

using matfun::BivariateOperator;
using matfun::Contour;
using matfun::QuadratureSpec;
using funexpr::FunExpr;

/// Norm and bound summary for the Frechet derivative Df{A}: `norm` is the
/// spectral norm of the vectorized operator (the absolute condition number
/// of f at A under Frobenius-norm perturbations), `bound` is
/// (1+sqrt(2))^2 times the sampled supremum of |f'| over W(A), and
/// `ratio` = norm / bound.
struct FrechetResult {
    BivariateOperator op;
    double norm = 0.0;
    double bound = 0.0;
    double ratio = 0.0;
    double sup_fprime = 0.0;
    int sup_samples = 0;
};

/// Df{A} as the divided-difference bivariate function evaluated at (A, A^T).
/// W(A^T) equals W(A), so one contour serves both arguments.
BivariateOperator frechet_operator(const FunExpr& f, const ComplexMatrix& a,
                                   const QuadratureSpec& q = {}, const Config& cfg = {});

/// Independent route: the top-right n x n block of f applied to the
/// 2n x 2n block matrix [[A, E], [0, A]] equals Df{A}(E).
ComplexMatrix frechet_block_oracle(const FunExpr& f, const ComplexMatrix& a,
                                   const ComplexMatrix& e, const QuadratureSpec& q = {},
                                   const Config& cfg = {});

FrechetResult frechet_norm_and_bound(const FunExpr& f, const ComplexMatrix& a,
                                     const QuadratureSpec& q = {}, const Config& cfg = {});

/// || (f(A+hE) - f(A))/h - Df{A}(E) ||_2 / ||E||_2; first-order in h.
double frechet_finite_difference_check(const FunExpr& f, const ComplexMatrix& a,
                                       const ComplexMatrix& e, double h,
                                       const QuadratureSpec& q = {}, const Config& cfg = {});

}  // namespace bivarfun::frechet
