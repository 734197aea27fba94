#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bivarfun/frechet.hpp"
#include "bivarfun/matfun.hpp"

namespace bivarfun::certify {

using fieldvals::Contour;
using fieldvals::NumericalRangeApprox;
using funexpr::DividedDifferenceExpr;
using funexpr::FunExpr;
using funexpr::MatrixFunExpr;
using matfun::QuadratureSpec;

/// Outcome of one inequality check. `rhs_sup_sample` is a sampled (lower
/// bound) estimate of the supremum on the right-hand side, so pass == false
/// flags a case for refinement rather than disproving the bound;
/// `rhs_is_lower_bound` records that caveat. `ratio` compares against
/// constant * rhs; `raw_ratio` is lhs / rhs.
struct CertificateReport {
    std::string inequality_id;
    double lhs = 0.0;
    double rhs_sup_sample = 0.0;
    double constant = 1.0;
    double ratio = 0.0;
    double raw_ratio = 0.0;
    bool pass = false;
    bool rhs_is_lower_bound = true;
    bool refined = false;
    int boundary_samples = 0;
    int quadrature_nodes = 0;
    std::vector<double> margins;
    std::string note;
};

/// Sampled sup of |f| (or of the pointwise spectral norm, for matrix-valued
/// F) over the product of the given numerical ranges.
double sup_on_range_product(const FunExpr& f, std::span<const NumericalRangeApprox> ranges,
                            int samples_per_range);
double sup_on_range_product(const MatrixFunExpr& f,
                            std::span<const NumericalRangeApprox> ranges,
                            int samples_per_range);
double sup_on_range_product(const DividedDifferenceExpr& dd,
                            std::span<const NumericalRangeApprox> ranges,
                            int samples_per_range);

/// ||f(A)||_2 <= (1+sqrt(2)) sup_{W(A)} |f|.
CertificateReport certify_univariate(const FunExpr& f, const ComplexMatrix& a,
                                     const QuadratureSpec& q = {}, const Config& cfg = {});
/// Matrix-valued version (complete spectral-set bound), same constant.
CertificateReport certify_univariate(const MatrixFunExpr& f, const ComplexMatrix& a,
                                     const QuadratureSpec& q = {}, const Config& cfg = {});

/// ||f{A,B}||_2 <= (1+sqrt(2))^2 sup_{W(A) x W(B)} |f|.
CertificateReport certify_bivariate(const FunExpr& f, const ComplexMatrix& a,
                                    const ComplexMatrix& b, const QuadratureSpec& q = {},
                                    const Config& cfg = {});
CertificateReport certify_bivariate(const DividedDifferenceExpr& dd, const ComplexMatrix& a,
                                    const ComplexMatrix& b, const QuadratureSpec& q = {},
                                    const Config& cfg = {});
CertificateReport certify_bivariate(const MatrixFunExpr& f, const ComplexMatrix& a,
                                    const ComplexMatrix& b, const QuadratureSpec& q = {},
                                    const Config& cfg = {});

/// ||f{A_1,...,A_d}||_2 <= (1+sqrt(2))^d sup of |f| over the product.
/// The default quadrature is coarser than the bivariate one: the tensor node
/// grid grows like nodes^d.
CertificateReport certify_multivariate(const FunExpr& f, std::span<const ComplexMatrix> as,
                                       const QuadratureSpec& q = QuadratureSpec{64, true, 1e-9, 256},
                                       const Config& cfg = {});

/// ||f{A,B}||_2 <= sup of |f| over the torus, for contractions A, B.
/// Contours are circles slightly outside the closed unit disc, so f must be
/// analytic there (probe-enforced).
CertificateReport certify_ando(const FunExpr& f, const ComplexMatrix& a,
                               const ComplexMatrix& b, const QuadratureSpec& q = {},
                               const Config& cfg = {});

/// Frechet condition-number bound ||Df{A}||_2 <= (1+sqrt(2))^2 sup |f'|.
CertificateReport certify_frechet(const FunExpr& f, const ComplexMatrix& a,
                                  const QuadratureSpec& q = {}, const Config& cfg = {});

/// Cauchy dual transform G(z) = (1/2 pi i) oint F*(sigma)/(sigma - z) d
/// sigma for z strictly inside the contour. Sets *accuracy_warning when z
/// comes within ten node spacings of the curve.
ComplexMatrix cauchy_dual(const MatrixFunExpr& f, const Contour& g, Complex z,
                          const QuadratureSpec& q = {}, bool* accuracy_warning = nullptr);

/// Two sampled inequality checks for the dual transform: sup of ||G|| over
/// an interior grid against sup ||F|| (constant 1), and
/// ||F(A) + G(A)*||_2 against sup ||F|| (constant 2).
struct LemmaReports {
    CertificateReport dual_sup;    // "lemma1"
    CertificateReport symmetrized; // "lemma2"
};
LemmaReports lemma_harness(const MatrixFunExpr& f, const ComplexMatrix& a, const Contour& g,
                           const QuadratureSpec& q = {}, const Config& cfg = {});
LemmaReports lemma_harness(const MatrixFunExpr& f, const ComplexMatrix& a,
                           const QuadratureSpec& q = {}, const Config& cfg = {});

/// Randomized hill climb on the raw ratio ||f{A,B}|| / sup|f|.
struct SearchOptions {
    std::vector<Eigen::Index> sizes = {2};
    int iterations = 1000;
    std::uint64_t seed = 0;
    bool normal_only = false;        // restrict to normal pairs (diagonal form)
    bool include_jordan_seed = true; // start from the nilpotent Jordan pair
    double step_scale = 0.05;
    int stagnation_limit = 50;
    std::size_t leaderboard = 10;
};

struct SearchRecord {
    double raw_ratio = 0.0;
    ComplexMatrix a, b;
    std::string origin;  // "seed", "climb", "restart"
};

std::vector<SearchRecord> extremal_search(const FunExpr& f, const SearchOptions& opt,
                                          const Config& cfg = {});

}  // namespace bivarfun::certify
