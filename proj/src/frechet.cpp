#include "bivarfun/frechet.hpp"

#include <cmath>
#include <numbers>

namespace bivarfun::frechet {

namespace {

// (1 + sqrt(2))^2
const double kConstSq = (1.0 + std::numbers::sqrt2) * (1.0 + std::numbers::sqrt2);

}  // namespace

BivariateOperator frechet_operator(const FunExpr& f, const ComplexMatrix& a,
                                   const QuadratureSpec& q, const Config& cfg) {
    if (f.arity() != 1) throw DimensionError("frechet_operator: f must be univariate");
    const auto dd = funexpr::divided_difference(f);
    const auto enc = matfun::enclose(a, cfg);
    // W(A^T) = W(A), so the one contour encloses both argument ranges.
    return matfun::eval_bivariate(dd, a, a.transpose(), enc.contour, enc.contour, q, cfg);
}

ComplexMatrix frechet_block_oracle(const FunExpr& f, const ComplexMatrix& a,
                                   const ComplexMatrix& e, const QuadratureSpec& q,
                                   const Config& cfg) {
    const Eigen::Index n = a.rows();
    if (a.rows() != a.cols() || e.rows() != e.cols() || e.rows() != n) {
        throw DimensionError("frechet_block_oracle: A and E must be square and equal size");
    }
    ComplexMatrix block = ComplexMatrix::Zero(2 * n, 2 * n);
    block.topLeftCorner(n, n) = a;
    block.topRightCorner(n, n) = e;
    block.bottomRightCorner(n, n) = a;
    const auto enc = matfun::enclose(block, cfg);
    const auto r = matfun::eval_univariate(f, block, enc.contour, q, cfg);
    return r.value.topRightCorner(n, n);
}

FrechetResult frechet_norm_and_bound(const FunExpr& f, const ComplexMatrix& a,
                                     const QuadratureSpec& q, const Config& cfg) {
    FrechetResult out{frechet_operator(f, a, q, cfg)};
    out.norm = out.op.norm(cfg);
    if (!out.op.has_materialized()) {
        out.op.meta().note += "norm via power iteration on the applier; ";
    }

    const auto fp = f.diff(1);
    const fieldvals::NumericalRangeApprox nr = fieldvals::numrange(a, cfg.certify_angles);
    const fieldvals::NumericalRangeApprox ranges[1] = {nr};
    out.sup_samples = 2 * cfg.certify_angles;
    out.sup_fprime = fieldvals::sup_over_ranges(
        [&fp](std::span<const Complex> pt) { return std::abs(fp.eval(pt)); }, ranges,
        out.sup_samples);
    out.bound = kConstSq * out.sup_fprime;
    out.ratio = (out.norm == 0.0 && out.bound == 0.0) ? 0.0 : out.norm / out.bound;
    return out;
}

double frechet_finite_difference_check(const FunExpr& f, const ComplexMatrix& a,
                                       const ComplexMatrix& e, double h,
                                       const QuadratureSpec& q, const Config& cfg) {
    if (h <= 0.0) throw DimensionError("frechet_finite_difference_check: h must be positive");
    const double norm_e = linalg::spectral_norm(e, cfg.tol_norm);
    if (norm_e == 0.0) throw DimensionError("frechet_finite_difference_check: E must be nonzero");

    // One contour for both evaluations; the default margin dwarfs the h*||E||
    // spectrum shift, and sharing nodes makes the difference quadrature-noise
    // free to first order.
    const auto nr = fieldvals::numrange(a, cfg.numrange_angles);
    const double margin =
        std::max(fieldvals::default_margin(nr, cfg), 10.0 * h * norm_e);
    const Contour g = fieldvals::enclosing_contour(nr, margin);

    const ComplexMatrix fa = matfun::eval_univariate(f, a, g, q, cfg).value;
    const ComplexMatrix fah =
        matfun::eval_univariate(f, ComplexMatrix(a + h * e), g, q, cfg).value;
    const ComplexMatrix dfe = frechet_operator(f, a, q, cfg).apply(e);
    return linalg::spectral_norm(ComplexMatrix((fah - fa) / h - dfe), cfg.tol_norm) / norm_e;
}

}  // namespace bivarfun::frechet
