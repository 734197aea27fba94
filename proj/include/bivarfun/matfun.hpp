#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bivarfun/config.hpp"
#include "bivarfun/fieldvals.hpp"
#include "bivarfun/funexpr.hpp"
#include "bivarfun/linalg.hpp"

namespace bivarfun::matfun {

using fieldvals::Contour;
using fieldvals::NumericalRangeApprox;
using funexpr::DividedDifferenceExpr;
using funexpr::FunExpr;
using funexpr::MatrixFunExpr;

/// Trapezoidal contour quadrature parameters. With `adaptive` set the node
/// count doubles until the relative change between refinements drops below
/// rel_tol or max_nodes is reached (the result then carries an accuracy
/// warning).
struct QuadratureSpec {
    int nodes = 256;
    bool adaptive = true;
    double rel_tol = 1e-10;
    int max_nodes = 4096;
};

struct EvalMetadata {
    int nodes_used = 0;
    double est_error = 0.0;
    double scale = 0.0;
    bool accuracy_warning = false;
    std::string note;
};

struct FunResult {
    ComplexMatrix value;
    EvalMetadata meta;
};

/// The operator f{A,B} acting on n_A x n_B matrices. Always usable in
/// operator form X -> sum_j R_A(x_j) X T_j^T (resolvents and weighted
/// row-sums cached from the quadrature); additionally materialized as an
/// (n_A n_B) x (n_A n_B) Kronecker-form matrix when within the size cap.
class BivariateOperator {
public:
    Eigen::Index dim_a() const { return na_; }
    Eigen::Index dim_b() const { return nb_; }

    ComplexMatrix apply(const ComplexMatrix& x) const;
    ComplexMatrix apply_adjoint(const ComplexMatrix& y) const;

    bool has_materialized() const { return mat_.has_value(); }
    const ComplexMatrix& materialized() const;

    /// Spectral norm of the vectorized operator: dense SVD when
    /// materialized, power iteration on the applier otherwise.
    double norm(const Config& cfg = {}) const;

    const EvalMetadata& meta() const { return meta_; }
    EvalMetadata& meta() { return meta_; }

    static BivariateOperator from_quadrature(Eigen::Index na, Eigen::Index nb,
                                             std::vector<ComplexMatrix> res_a,
                                             std::vector<ComplexMatrix> t_factors,
                                             std::optional<ComplexMatrix> mat,
                                             EvalMetadata meta);
    static BivariateOperator from_matrix(ComplexMatrix m, Eigen::Index na, Eigen::Index nb,
                                         EvalMetadata meta);

private:
    Eigen::Index na_ = 0, nb_ = 0;
    std::vector<ComplexMatrix> res_a_;
    std::vector<ComplexMatrix> t_;
    std::optional<ComplexMatrix> mat_;
    EvalMetadata meta_;
};

/// f(A) by trapezoidal quadrature of the Cauchy integral over `g`.
/// Preconditions: f univariate, all eigenvalues of A strictly inside g,
/// analyticity probe passes (otherwise AnalyticityError).
FunResult eval_univariate(const FunExpr& f, const ComplexMatrix& a, const Contour& g,
                          const QuadratureSpec& q = {}, const Config& cfg = {});

/// Matrix-valued F(A): the block matrix with blocks f_ij(A). Resolvents are
/// shared across all entries.
FunResult eval_matrix_valued(const MatrixFunExpr& f, const ComplexMatrix& a, const Contour& g,
                             const QuadratureSpec& q = {}, const Config& cfg = {});

BivariateOperator eval_bivariate(const FunExpr& f, const ComplexMatrix& a,
                                 const ComplexMatrix& b, const Contour& ga, const Contour& gb,
                                 const QuadratureSpec& q = {}, const Config& cfg = {});
BivariateOperator eval_bivariate(const DividedDifferenceExpr& f, const ComplexMatrix& a,
                                 const ComplexMatrix& b, const Contour& ga, const Contour& gb,
                                 const QuadratureSpec& q = {}, const Config& cfg = {});

/// Matrix-valued bivariate F{A,B}: the (m n_B n_A) x (p n_B n_A) matrix with
/// blocks f_ij{A,B}.
FunResult eval_bivariate_matrix_valued(const MatrixFunExpr& f, const ComplexMatrix& a,
                                       const ComplexMatrix& b, const Contour& ga,
                                       const Contour& gb, const QuadratureSpec& q = {},
                                       const Config& cfg = {});

ComplexMatrix apply_bivariate(const BivariateOperator& op, const ComplexMatrix& x);

/// d-variate f{A_1,...,A_d} in Kronecker form (last variable's factor
/// leftmost), via recursion over the first variable: an outer quadrature in
/// x_1 wraps the evaluation of the partially bound function. 2 <= d <= 4 and
/// the product of dimensions must stay within the size cap.
FunResult eval_multivariate(const FunExpr& f, std::span<const ComplexMatrix> as,
                            std::span<const Contour> gs, const QuadratureSpec& q = {},
                            const Config& cfg = {});

/// Independent diagonalization oracle: with A = S L S^{-1}, B = T M T^{-1},
/// returns (T kron S) diag(f(l_i, m_j)) (T^{-1} kron S^{-1}), the inverse
/// factors computed per matrix (never by inverting the big Kronecker
/// product). Requires both eigenbases to be well conditioned.
BivariateOperator oracle_diag(const FunExpr& f, const ComplexMatrix& a, const ComplexMatrix& b,
                              const Config& cfg = {});

/// Numerical range plus enclosing contour bundle used by the evaluation and
/// certification front ends.
struct Enclosure {
    NumericalRangeApprox nr;
    Contour contour;
    double margin = 0.0;
};

Enclosure enclose(const ComplexMatrix& a, const Config& cfg = {},
                  std::optional<double> margin = std::nullopt,
                  std::optional<int> angles = std::nullopt);

}  // namespace bivarfun::matfun
