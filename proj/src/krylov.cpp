#include "bivarfun/krylov.hpp"

#include <cmath>
#include <numbers>

namespace bivarfun::krylov {

namespace {

const double kConstSq = (1.0 + std::numbers::sqrt2) * (1.0 + std::numbers::sqrt2);

// Chebyshev points of the first kind mapped onto the segment through the
// bounding rectangle of the sampled boundary (its main diagonal; for
// real-interval ranges this is the classical Chebyshev grid).
std::vector<Complex> chebyshev_nodes(const fieldvals::NumericalRangeApprox& nr, int count) {
    double re_min = 1e300, re_max = -1e300, im_min = 1e300, im_max = -1e300;
    for (const Complex& p : nr.boundary) {
        re_min = std::min(re_min, p.real());
        re_max = std::max(re_max, p.real());
        im_min = std::min(im_min, p.imag());
        im_max = std::max(im_max, p.imag());
    }
    const Complex p0(re_min, im_min), p1(re_max, im_max);
    const Complex mid = 0.5 * (p0 + p1);
    const Complex half = 0.5 * (p1 - p0);
    if (std::abs(half) < 1e-13 * (1.0 + std::abs(mid))) {
        return {mid};  // point-like range: constant interpolant
    }
    std::vector<Complex> nodes(count);
    for (int i = 0; i < count; ++i) {
        const double t = std::cos((2.0 * i + 1.0) * std::numbers::pi / (2.0 * count));
        nodes[i] = mid + t * half;
    }
    return nodes;
}

struct Barycentric {
    std::vector<Complex> nodes;
    std::vector<Complex> weights;

    explicit Barycentric(std::vector<Complex> n) : nodes(std::move(n)) {
        const std::size_t m = nodes.size();
        weights.assign(m, Complex(1.0, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t j = 0; j < m; ++j) {
                if (i != j) weights[i] /= (nodes[i] - nodes[j]);
            }
        }
    }

    // Cardinal vector L_i(x); exact at the nodes.
    std::vector<Complex> cardinal(Complex x) const {
        const std::size_t m = nodes.size();
        std::vector<Complex> l(m, Complex(0.0, 0.0));
        for (std::size_t i = 0; i < m; ++i) {
            if (x == nodes[i]) {
                l[i] = 1.0;
                return l;
            }
        }
        Complex denom(0.0, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            l[i] = weights[i] / (x - nodes[i]);
            denom += l[i];
        }
        for (auto& v : l) v /= denom;
        return l;
    }
};

}  // namespace

ArnoldiDecomposition arnoldi(const ComplexMatrix& a, const ComplexVector& c, int k) {
    const Eigen::Index n = a.rows();
    if (a.rows() != a.cols()) throw DimensionError("arnoldi: matrix must be square");
    if (c.size() != n) throw DimensionError("arnoldi: starting vector has wrong length");
    if (k < 1 || k > n) throw DimensionError("arnoldi: need 1 <= k <= n");
    const double cnorm = c.norm();
    if (cnorm == 0.0) throw DimensionError("arnoldi: starting vector must be nonzero");

    const double norm_a = linalg::spectral_norm(a);
    ComplexMatrix u(n, k + 1);
    ComplexMatrix h = ComplexMatrix::Zero(k + 1, k);
    u.col(0) = c / cnorm;

    for (int j = 0; j < k; ++j) {
        ComplexVector w = a * u.col(j);
        for (int i = 0; i <= j; ++i) {
            const Complex hij = u.col(i).dot(w);  // conjugated in the first argument
            w -= hij * u.col(i);
            h(i, j) = hij;
        }
        // One reorthogonalization pass keeps the basis orthonormal at 1e-10.
        for (int i = 0; i <= j; ++i) {
            const Complex corr = u.col(i).dot(w);
            w -= corr * u.col(i);
            h(i, j) += corr;
        }
        const double res = w.norm();
        if (res <= 1e-12 * norm_a) {
            ArnoldiDecomposition out;
            out.basis = u.leftCols(j + 1);
            out.hess = h.topLeftCorner(j + 1, j + 1);
            out.breakdown_step = j + 1;
            return out;
        }
        h(j + 1, j) = res;
        u.col(j + 1) = w / res;
    }
    return ArnoldiDecomposition{std::move(u), std::move(h), std::nullopt};
}

KrylovApproxResult bivariate_krylov(const FunExpr& f, const ComplexMatrix& a,
                                    const ComplexMatrix& b, const ComplexVector& c_a,
                                    const ComplexVector& c_b, int k, int l,
                                    const QuadratureSpec& q, const Config& cfg,
                                    bool with_exact, bool with_bound) {
    if (f.arity() != 2) throw DimensionError("bivariate_krylov: function must be bivariate");

    KrylovApproxResult out;
    const auto arn_a = arnoldi(a, c_a, std::min<int>(k, a.rows()));
    const auto arn_b = arnoldi(b, c_b, std::min<int>(l, b.rows()));
    out.k_used = std::min<int>(k, arn_a.breakdown_step.value_or(k));
    out.l_used = std::min<int>(l, arn_b.breakdown_step.value_or(l));
    if (out.k_used < k || out.l_used < l) {
        out.meta.note += "subspace dimensions clamped to breakdown steps; ";
    }
    const auto uk = arn_a.basis.leftCols(out.k_used);
    const auto vl = arn_b.basis.leftCols(out.l_used);

    const ComplexMatrix ha = uk.adjoint() * a * uk;
    const ComplexMatrix hb = vl.adjoint() * b * vl;

    // Contours around the full matrices' ranges stay valid for the
    // compressions, whose numerical ranges they contain.
    const auto enc_a = matfun::enclose(a, cfg);
    const auto enc_b = matfun::enclose(b, cfg);

    const auto op_small = matfun::eval_bivariate(f, ha, hb, enc_a.contour, enc_b.contour, q, cfg);
    out.meta = op_small.meta();

    const ComplexMatrix z = (uk.adjoint() * c_a) * (vl.adjoint() * c_b).transpose();
    const ComplexMatrix y = op_small.apply(z);
    out.y_kl = linalg::vec(y);
    out.x_kl = linalg::vec(ComplexMatrix(uk * y * vl.transpose()));

    if (with_exact && a.rows() * b.rows() <= cfg.kron_dim_cap) {
        const auto op_full =
            matfun::eval_bivariate(f, a, b, enc_a.contour, enc_b.contour, q, cfg);
        const ComplexMatrix cab = c_a * c_b.transpose();
        const ComplexVector exact = linalg::vec(op_full.apply(cab));
        out.error_vs_exact = (exact - out.x_kl).norm();
        out.meta.scale = std::max(out.meta.scale, op_full.meta().scale);
    }
    if (with_bound) {
        out.apriori_bound =
            apriori_error_bound(f, a, b, c_a, c_b, out.k_used, out.l_used, 64, cfg);
    }
    return out;
}

double apriori_error_bound(const FunExpr& f, const ComplexMatrix& a, const ComplexMatrix& b,
                           const ComplexVector& c_a, const ComplexVector& c_b, int k, int l,
                           int degree_cap, const Config& cfg) {
    if (f.arity() != 2) throw DimensionError("apriori_error_bound: function must be bivariate");
    const auto enc_a = matfun::enclose(a, cfg);
    const auto enc_b = matfun::enclose(b, cfg);
    const fieldvals::Contour cs[2] = {enc_a.contour, enc_b.contour};
    if (!funexpr::analyticity_probe(f, cs, cfg.probe_points, cfg.probe_cap)) {
        throw AnalyticityError("apriori_error_bound: analyticity probe failed");
    }

    const int deg_x = std::min(k - 1, degree_cap);
    const int deg_y = std::min(l - 1, degree_cap);
    const Barycentric bx(chebyshev_nodes(enc_a.nr, deg_x + 1));
    const Barycentric by(chebyshev_nodes(enc_b.nr, deg_y + 1));

    ComplexMatrix values(bx.nodes.size(), by.nodes.size());
    for (std::size_t i = 0; i < bx.nodes.size(); ++i) {
        for (std::size_t j = 0; j < by.nodes.size(); ++j) {
            values(i, j) = f.eval2(bx.nodes[i], by.nodes[j]);
        }
    }

    auto residual = [&](std::span<const Complex> pt) {
        const auto lx = bx.cardinal(pt[0]);
        const auto ly = by.cardinal(pt[1]);
        Complex p(0.0, 0.0);
        for (std::size_t i = 0; i < lx.size(); ++i) {
            Complex row(0.0, 0.0);
            for (std::size_t j = 0; j < ly.size(); ++j) row += ly[j] * values(i, j);
            p += lx[i] * row;
        }
        return std::abs(f.eval2(pt[0], pt[1]) - p);
    };
    const fieldvals::NumericalRangeApprox ranges[2] = {enc_a.nr, enc_b.nr};
    const double e_hat = fieldvals::sup_over_ranges(residual, ranges, 256);

    return 2.0 * kConstSq * c_a.norm() * c_b.norm() * e_hat;
}

}  // namespace bivarfun::krylov
