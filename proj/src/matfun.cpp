#include "bivarfun/matfun.hpp"

#include <cmath>
#include <functional>
#include <numbers>

namespace bivarfun::matfun {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kImag{0.0, 1.0};

struct NodeData {
    std::vector<Complex> x;              // node positions on the contour
    std::vector<Complex> dgamma;         // curve derivative at the nodes
    std::vector<ComplexMatrix> res;      // (x_j I - A)^{-1}
    double max_res_norm = 0.0;           // Frobenius, for the scale estimate
};

NodeData build_nodes(const Contour& g, const ComplexMatrix& a, int n) {
    const Eigen::Index dim = a.rows();
    const ComplexMatrix eye = ComplexMatrix::Identity(dim, dim);
    NodeData nd;
    nd.x.resize(n);
    nd.dgamma.resize(n);
    nd.res.reserve(n);
    for (int j = 0; j < n; ++j) {
        const double t = kTwoPi * j / n;
        nd.x[j] = g.point(t);
        nd.dgamma[j] = g.derivative(t);
        ComplexMatrix r = linalg::solve(nd.x[j] * eye - a, eye);
        nd.max_res_norm = std::max(nd.max_res_norm, r.norm());
        nd.res.push_back(std::move(r));
    }
    return nd;
}

ComplexVector check_spectrum_inside(const ComplexMatrix& a, const Contour& g,
                                    const char* what) {
    const auto d = linalg::eig(a);
    for (Eigen::Index i = 0; i < d.values.size(); ++i) {
        if (!g.contains(d.values(i))) {
            throw AnalyticityError(std::string(what) + ": eigenvalue (" +
                                   std::to_string(d.values(i).real()) + ", " +
                                   std::to_string(d.values(i).imag()) +
                                   ") is not strictly inside the contour");
        }
    }
    return d.values;
}

// The contour probe cannot see singularities deep inside the enclosed
// region; f must at least be finite on the spectrum itself for f(A) to
// exist, so evaluate there explicitly.
template <typename F>
void check_finite_at(F&& f, const char* what) {
    bool ok = true;
    try {
        const Complex v = f();
        ok = std::isfinite(v.real()) && std::isfinite(v.imag());
    } catch (const Error&) {
        ok = false;
    }
    if (!ok) {
        throw AnalyticityError(std::string(what) +
                               ": function is singular at a spectrum point");
    }
}

double rel_delta(const ComplexMatrix& next, const ComplexMatrix& prev) {
    const double denom = std::max(next.norm(), 1e-300);
    return (next - prev).norm() / denom;
}

// Shared adaptive-doubling driver. `build` produces a result matrix for a
// given node count; the loop doubles until the successive relative change
// drops below rel_tol.
ComplexMatrix adaptive_loop(const std::function<ComplexMatrix(int)>& build,
                            const QuadratureSpec& q, EvalMetadata& meta) {
    int n = std::max(16, q.nodes);
    ComplexMatrix current = build(n);
    meta.nodes_used = n;
    if (!q.adaptive) return current;
    while (n < q.max_nodes) {
        const int next_n = n * 2;
        ComplexMatrix next = build(next_n);
        const double delta = rel_delta(next, current);
        current = std::move(next);
        n = next_n;
        meta.nodes_used = n;
        meta.est_error = delta;
        if (delta <= q.rel_tol) return current;
    }
    meta.accuracy_warning = true;
    meta.note += "quadrature did not reach rel_tol at max_nodes; ";
    return current;
}

}  // namespace

ComplexMatrix BivariateOperator::apply(const ComplexMatrix& x) const {
    if (x.rows() != na_ || x.cols() != nb_) {
        throw DimensionError("BivariateOperator::apply: argument must be " +
                             std::to_string(na_) + "x" + std::to_string(nb_));
    }
    if (!res_a_.empty()) {
        ComplexMatrix out = ComplexMatrix::Zero(na_, nb_);
        for (std::size_t j = 0; j < res_a_.size(); ++j) {
            out.noalias() += res_a_[j] * x * t_[j].transpose();
        }
        return out;
    }
    return linalg::unvec(ComplexVector(*mat_ * linalg::vec(x)), na_, nb_);
}

ComplexMatrix BivariateOperator::apply_adjoint(const ComplexMatrix& y) const {
    if (y.rows() != na_ || y.cols() != nb_) {
        throw DimensionError("BivariateOperator::apply_adjoint: bad argument shape");
    }
    if (!res_a_.empty()) {
        ComplexMatrix out = ComplexMatrix::Zero(na_, nb_);
        for (std::size_t j = 0; j < res_a_.size(); ++j) {
            out.noalias() += res_a_[j].adjoint() * y * t_[j].conjugate();
        }
        return out;
    }
    return linalg::unvec(ComplexVector(mat_->adjoint() * linalg::vec(y)), na_, nb_);
}

const ComplexMatrix& BivariateOperator::materialized() const {
    if (!mat_) {
        throw SizeLimitError("BivariateOperator: not materialized (size cap exceeded)");
    }
    return *mat_;
}

double BivariateOperator::norm(const Config& cfg) const {
    if (mat_) return linalg::spectral_norm(*mat_, cfg.tol_norm);
    auto ap = [this](const ComplexVector& v) {
        return linalg::vec(apply(linalg::unvec(v, na_, nb_)));
    };
    auto aph = [this](const ComplexVector& v) {
        return linalg::vec(apply_adjoint(linalg::unvec(v, na_, nb_)));
    };
    return linalg::spectral_norm_power(ap, aph, na_ * nb_, cfg.tol_norm);
}

BivariateOperator BivariateOperator::from_quadrature(Eigen::Index na, Eigen::Index nb,
                                                     std::vector<ComplexMatrix> res_a,
                                                     std::vector<ComplexMatrix> t_factors,
                                                     std::optional<ComplexMatrix> mat,
                                                     EvalMetadata meta) {
    BivariateOperator op;
    op.na_ = na;
    op.nb_ = nb;
    op.res_a_ = std::move(res_a);
    op.t_ = std::move(t_factors);
    op.mat_ = std::move(mat);
    op.meta_ = std::move(meta);
    return op;
}

BivariateOperator BivariateOperator::from_matrix(ComplexMatrix m, Eigen::Index na,
                                                 Eigen::Index nb, EvalMetadata meta) {
    BivariateOperator op;
    op.na_ = na;
    op.nb_ = nb;
    op.mat_ = std::move(m);
    op.meta_ = std::move(meta);
    return op;
}

FunResult eval_univariate(const FunExpr& f, const ComplexMatrix& a, const Contour& g,
                          const QuadratureSpec& q, const Config& cfg) {
    if (f.arity() != 1) throw DimensionError("eval_univariate: function must be univariate");
    const ComplexVector vals = check_spectrum_inside(a, g, "eval_univariate");
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        check_finite_at([&] { return f.eval1(vals(i)); }, "eval_univariate");
    }
    const Contour cs[1] = {g};
    if (!funexpr::analyticity_probe(f, cs, cfg.probe_points, cfg.probe_cap)) {
        throw AnalyticityError("eval_univariate: analyticity probe failed on the contour");
    }
    FunResult out;
    out.value = adaptive_loop(
        [&](int n) {
            NodeData nd = build_nodes(g, a, n);
            ComplexMatrix acc = ComplexMatrix::Zero(a.rows(), a.cols());
            double max_f = 0.0;
            for (int j = 0; j < n; ++j) {
                const Complex fx = f.eval1(nd.x[j]);
                max_f = std::max(max_f, std::abs(fx));
                acc.noalias() += (fx * nd.dgamma[j]) * nd.res[j];
            }
            out.meta.scale = max_f * nd.max_res_norm;
            return ComplexMatrix(acc / (kImag * static_cast<double>(n)));
        },
        q, out.meta);
    return out;
}

FunResult eval_matrix_valued(const MatrixFunExpr& f, const ComplexMatrix& a, const Contour& g,
                             const QuadratureSpec& q, const Config& cfg) {
    if (f.arity() != 1) throw DimensionError("eval_matrix_valued: function must be univariate");
    const ComplexVector vals = check_spectrum_inside(a, g, "eval_matrix_valued");
    for (Eigen::Index i = 0; i < vals.size(); ++i) {
        for (Eigen::Index bi = 0; bi < f.rows(); ++bi) {
            for (Eigen::Index bj = 0; bj < f.cols(); ++bj) {
                check_finite_at([&] { return f.at(bi, bj).eval1(vals(i)); },
                                "eval_matrix_valued");
            }
        }
    }
    const Contour cs[1] = {g};
    if (!funexpr::analyticity_probe(f, cs, cfg.probe_points, cfg.probe_cap)) {
        throw AnalyticityError("eval_matrix_valued: analyticity probe failed");
    }
    const Eigen::Index n = a.rows();
    FunResult out;
    out.value = adaptive_loop(
        [&](int nodes) {
            NodeData nd = build_nodes(g, a, nodes);
            ComplexMatrix acc = ComplexMatrix::Zero(f.rows() * n, f.cols() * n);
            double max_f = 0.0;
            Complex pt[1];
            for (int j = 0; j < nodes; ++j) {
                pt[0] = nd.x[j];
                const Complex w = nd.dgamma[j] / (kImag * static_cast<double>(nodes));
                for (Eigen::Index bi = 0; bi < f.rows(); ++bi) {
                    for (Eigen::Index bj = 0; bj < f.cols(); ++bj) {
                        const Complex fx = f.at(bi, bj).eval(pt);
                        max_f = std::max(max_f, std::abs(fx));
                        acc.block(bi * n, bj * n, n, n).noalias() += (w * fx) * nd.res[j];
                    }
                }
            }
            out.meta.scale = max_f * nd.max_res_norm;
            return acc;
        },
        q, out.meta);
    return out;
}

namespace {

// Shared bivariate quadrature core; `fxy` is any scalar evaluator.
BivariateOperator eval_bivariate_core(const std::function<Complex(Complex, Complex)>& fxy,
                                      const ComplexMatrix& a, const ComplexMatrix& b,
                                      const Contour& ga, const Contour& gb,
                                      const QuadratureSpec& q, const Config& cfg) {
    const ComplexVector va = check_spectrum_inside(a, ga, "eval_bivariate (first argument)");
    const ComplexVector vb = check_spectrum_inside(b, gb, "eval_bivariate (second argument)");
    for (Eigen::Index i = 0; i < va.size(); ++i) {
        for (Eigen::Index j = 0; j < vb.size(); ++j) {
            check_finite_at([&] { return fxy(va(i), vb(j)); }, "eval_bivariate");
        }
    }

    const Eigen::Index na = a.rows(), nb = b.rows();
    const bool materialize = na * nb <= cfg.kron_dim_cap;

    EvalMetadata meta;
    std::vector<ComplexMatrix> res_a_keep, t_keep;
    std::optional<ComplexMatrix> mat_keep;

    int n = std::max(16, q.nodes);
    double prev_probe_norm = -1.0;
    ComplexMatrix prev_mat;
    Eigen::MatrixXcd probe = Eigen::MatrixXcd::Zero(na, nb);
    // Deterministic probe matrix for convergence checks in applier-only mode.
    for (Eigen::Index i = 0; i < na; ++i)
        for (Eigen::Index j = 0; j < nb; ++j)
            probe(i, j) = Complex(1.0 + 0.01 * static_cast<double>(i),
                                  0.02 * static_cast<double>(j) - 0.5);
    probe /= probe.norm();

    for (;;) {
        NodeData nda = build_nodes(ga, a, n);
        NodeData ndb = build_nodes(gb, b, n);

        Eigen::MatrixXcd coeff(n, n);
        double max_f = 0.0;
        const double inv = -1.0 / (static_cast<double>(n) * static_cast<double>(n));
        for (int j = 0; j < n; ++j) {
            for (int k = 0; k < n; ++k) {
                const Complex fx = fxy(nda.x[j], ndb.x[k]);
                max_f = std::max(max_f, std::abs(fx));
                coeff(j, k) = inv * nda.dgamma[j] * ndb.dgamma[k] * fx;
            }
        }
        meta.scale = max_f * nda.max_res_norm * ndb.max_res_norm;

        std::vector<ComplexMatrix> t(n);
        for (int j = 0; j < n; ++j) {
            ComplexMatrix tj = ComplexMatrix::Zero(nb, nb);
            for (int k = 0; k < n; ++k) tj.noalias() += coeff(j, k) * ndb.res[k];
            t[j] = std::move(tj);
        }

        std::optional<ComplexMatrix> mat;
        if (materialize) {
            ComplexMatrix m = ComplexMatrix::Zero(na * nb, na * nb);
            for (int k = 0; k < n; ++k) {
                ComplexMatrix mk = ComplexMatrix::Zero(na, na);
                for (int j = 0; j < n; ++j) mk.noalias() += coeff(j, k) * nda.res[j];
                // m += kron(res_b[k], mk)
                for (Eigen::Index bi = 0; bi < nb; ++bi) {
                    for (Eigen::Index bj = 0; bj < nb; ++bj) {
                        m.block(bi * na, bj * na, na, na).noalias() +=
                            ndb.res[k](bi, bj) * mk;
                    }
                }
            }
            mat = std::move(m);
        }

        meta.nodes_used = n;
        bool done = !q.adaptive;
        if (!done) {
            if (materialize) {
                if (prev_mat.size() > 0) {
                    meta.est_error = rel_delta(*mat, prev_mat);
                    done = meta.est_error <= q.rel_tol;
                }
                prev_mat = *mat;
            } else {
                // Compare the action on a fixed probe matrix.
                ComplexMatrix acted = ComplexMatrix::Zero(na, nb);
                for (int j = 0; j < n; ++j) acted.noalias() += nda.res[j] * probe * t[j].transpose();
                const double pn = acted.norm();
                if (prev_probe_norm >= 0.0) {
                    meta.est_error = std::abs(pn - prev_probe_norm) / std::max(pn, 1e-300);
                    done = meta.est_error <= q.rel_tol;
                }
                prev_probe_norm = pn;
            }
        }
        if (!done && n >= q.max_nodes) {
            meta.accuracy_warning = true;
            meta.note += "quadrature did not reach rel_tol at max_nodes; ";
            done = true;
        }
        if (done) {
            res_a_keep = std::move(nda.res);
            t_keep = std::move(t);
            mat_keep = std::move(mat);
            break;
        }
        n *= 2;
    }

    return BivariateOperator::from_quadrature(na, nb, std::move(res_a_keep), std::move(t_keep),
                                              std::move(mat_keep), std::move(meta));
}

}  // namespace

BivariateOperator eval_bivariate(const FunExpr& f, const ComplexMatrix& a,
                                 const ComplexMatrix& b, const Contour& ga, const Contour& gb,
                                 const QuadratureSpec& q, const Config& cfg) {
    if (f.arity() != 2) throw DimensionError("eval_bivariate: function must be bivariate");
    const Contour cs[2] = {ga, gb};
    if (!funexpr::analyticity_probe(f, cs, cfg.probe_points, cfg.probe_cap)) {
        throw AnalyticityError("eval_bivariate: analyticity probe failed on the contour pair");
    }
    return eval_bivariate_core([&f](Complex x, Complex y) { return f.eval2(x, y); }, a, b, ga,
                               gb, q, cfg);
}

BivariateOperator eval_bivariate(const DividedDifferenceExpr& f, const ComplexMatrix& a,
                                 const ComplexMatrix& b, const Contour& ga, const Contour& gb,
                                 const QuadratureSpec& q, const Config& cfg) {
    if (!funexpr::analyticity_probe(f, ga, gb, cfg.probe_points, cfg.probe_cap)) {
        throw AnalyticityError("eval_bivariate: divided difference failed the analyticity probe");
    }
    return eval_bivariate_core([&f](Complex x, Complex y) { return f.eval(x, y); }, a, b, ga,
                               gb, q, cfg);
}

FunResult eval_bivariate_matrix_valued(const MatrixFunExpr& f, const ComplexMatrix& a,
                                       const ComplexMatrix& b, const Contour& ga,
                                       const Contour& gb, const QuadratureSpec& q,
                                       const Config& cfg) {
    if (f.arity() != 2) throw DimensionError("eval_bivariate_matrix_valued: arity must be 2");
    const Contour cs[2] = {ga, gb};
    if (!funexpr::analyticity_probe(f, cs, cfg.probe_points, cfg.probe_cap)) {
        throw AnalyticityError("eval_bivariate_matrix_valued: analyticity probe failed");
    }
    const Eigen::Index block = a.rows() * b.rows();
    FunResult out;
    ComplexMatrix result(f.rows() * block, f.cols() * block);
    double worst_err = 0.0;
    for (Eigen::Index i = 0; i < f.rows(); ++i) {
        for (Eigen::Index j = 0; j < f.cols(); ++j) {
            BivariateOperator op = eval_bivariate_core(
                [&](Complex x, Complex y) { return f.at(i, j).eval2(x, y); }, a, b, ga, gb, q,
                cfg);
            result.block(i * block, j * block, block, block) = op.materialized();
            out.meta.nodes_used = std::max(out.meta.nodes_used, op.meta().nodes_used);
            out.meta.scale = std::max(out.meta.scale, op.meta().scale);
            out.meta.accuracy_warning |= op.meta().accuracy_warning;
            worst_err = std::max(worst_err, op.meta().est_error);
        }
    }
    out.meta.est_error = worst_err;
    out.value = std::move(result);
    return out;
}

ComplexMatrix apply_bivariate(const BivariateOperator& op, const ComplexMatrix& x) {
    return op.apply(x);
}

namespace {

// Recursive Kronecker-form accumulation for the multivariate case. Level v
// integrates over the v-th contour with all earlier variables bound.
ComplexMatrix multivariate_rec(const FunExpr& f, std::span<const NodeData> levels,
                               std::vector<Complex>& point, std::size_t v,
                               std::span<const Eigen::Index> dims_from) {
    const NodeData& nd = levels[v];
    const int n = static_cast<int>(nd.x.size());
    const Complex weight_denom = kImag * static_cast<double>(n);
    const Eigen::Index out_dim = dims_from[v];
    ComplexMatrix acc = ComplexMatrix::Zero(out_dim, out_dim);
    if (v + 1 == levels.size()) {
        for (int j = 0; j < n; ++j) {
            point[v] = nd.x[j];
            const Complex fx = f.eval(point);
            acc.noalias() += (fx * nd.dgamma[j] / weight_denom) * nd.res[j];
        }
        return acc;
    }
    const Eigen::Index inner_dim = dims_from[v + 1];
    const Eigen::Index nv = nd.res[0].rows();
    for (int j = 0; j < n; ++j) {
        point[v] = nd.x[j];
        const ComplexMatrix inner = multivariate_rec(f, levels, point, v + 1, dims_from);
        const Complex w = nd.dgamma[j] / weight_denom;
        // acc += w * kron(inner, res[j])
        for (Eigen::Index bi = 0; bi < inner_dim; ++bi) {
            for (Eigen::Index bj = 0; bj < inner_dim; ++bj) {
                acc.block(bi * nv, bj * nv, nv, nv).noalias() +=
                    (w * inner(bi, bj)) * nd.res[j];
            }
        }
    }
    return acc;
}

}  // namespace

FunResult eval_multivariate(const FunExpr& f, std::span<const ComplexMatrix> as,
                            std::span<const Contour> gs, const QuadratureSpec& q,
                            const Config& cfg) {
    const int d = static_cast<int>(as.size());
    if (d < 2 || d > 4) throw DimensionError("eval_multivariate: need 2 <= d <= 4");
    if (static_cast<int>(gs.size()) != d || f.arity() != d) {
        throw DimensionError("eval_multivariate: matrices, contours, and arity must agree");
    }
    Eigen::Index total = 1;
    for (const auto& a : as) {
        if (a.rows() != a.cols()) throw DimensionError("eval_multivariate: matrices must be square");
        total *= a.rows();
    }
    if (total > cfg.kron_dim_cap) {
        throw SizeLimitError("eval_multivariate: operator dimension " + std::to_string(total) +
                             " exceeds cap " + std::to_string(cfg.kron_dim_cap));
    }
    std::vector<ComplexVector> spectra;
    for (int v = 0; v < d; ++v) {
        spectra.push_back(check_spectrum_inside(as[v], gs[v], "eval_multivariate"));
    }
    {
        // Probe all eigenvalue tuples.
        std::vector<Eigen::Index> idx(d, 0);
        std::vector<Complex> pt(d);
        for (;;) {
            for (int v = 0; v < d; ++v) pt[v] = spectra[v](idx[v]);
            check_finite_at([&] { return f.eval(pt); }, "eval_multivariate");
            int v = 0;
            while (v < d && ++idx[v] == spectra[v].size()) {
                idx[v] = 0;
                ++v;
            }
            if (v == d) break;
        }
    }
    if (!funexpr::analyticity_probe(f, gs, cfg.probe_points, cfg.probe_cap)) {
        throw AnalyticityError("eval_multivariate: analyticity probe failed");
    }

    // dims_from[v] = product of dimensions from level v on.
    std::vector<Eigen::Index> dims_from(d);
    Eigen::Index prod = 1;
    for (int v = d - 1; v >= 0; --v) {
        prod *= as[v].rows();
        dims_from[v] = prod;
    }

    FunResult out;
    out.value = adaptive_loop(
        [&](int n) {
            std::vector<NodeData> levels;
            levels.reserve(d);
            double scale = 1.0;
            for (int v = 0; v < d; ++v) {
                levels.push_back(build_nodes(gs[v], as[v], n));
                scale *= levels.back().max_res_norm;
            }
            out.meta.scale = scale;
            std::vector<Complex> point(d);
            return multivariate_rec(f, levels, point, 0, dims_from);
        },
        q, out.meta);
    return out;
}

BivariateOperator oracle_diag(const FunExpr& f, const ComplexMatrix& a, const ComplexMatrix& b,
                              const Config& cfg) {
    if (f.arity() != 2) throw DimensionError("oracle_diag: function must be bivariate");
    const auto da = linalg::eig(a, true, cfg);
    const auto db = linalg::eig(b, true, cfg);
    if (!da.vectors || !db.vectors) {
        throw OracleUnavailableError(
            "oracle_diag: input not numerically diagonalizable (condition estimates " +
            std::to_string(da.condition_estimate) + ", " + std::to_string(db.condition_estimate) +
            ")");
    }
    const Eigen::Index na = a.rows(), nb = b.rows();
    const ComplexMatrix& s = *da.vectors;
    const ComplexMatrix& t = *db.vectors;
    const ComplexMatrix sinv = linalg::solve(s, ComplexMatrix::Identity(na, na));
    const ComplexMatrix tinv = linalg::solve(t, ComplexMatrix::Identity(nb, nb));

    ComplexVector diag(na * nb);
    for (Eigen::Index jb = 0; jb < nb; ++jb) {
        for (Eigen::Index ia = 0; ia < na; ++ia) {
            diag(jb * na + ia) = f.eval2(da.values(ia), db.values(jb));
        }
    }
    const ComplexMatrix w = linalg::kron(t, s, cfg.kron_dim_cap);
    const ComplexMatrix winv = linalg::kron(tinv, sinv, cfg.kron_dim_cap);
    ComplexMatrix m = w * diag.asDiagonal() * winv;

    EvalMetadata meta;
    meta.note = "diagonalization oracle";
    meta.scale = da.condition_estimate * db.condition_estimate;
    return BivariateOperator::from_matrix(std::move(m), na, nb, std::move(meta));
}

Enclosure enclose(const ComplexMatrix& a, const Config& cfg, std::optional<double> margin,
                  std::optional<int> angles) {
    Enclosure e;
    e.nr = fieldvals::numrange(a, angles.value_or(cfg.numrange_angles));
    e.margin = margin.value_or(fieldvals::default_margin(e.nr, cfg));
    e.contour = fieldvals::enclosing_contour(e.nr, e.margin);
    return e;
}

}  // namespace bivarfun::matfun
