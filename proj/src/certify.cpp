#include "bivarfun/certify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace bivarfun::certify {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr Complex kImag{0.0, 1.0};
const double kK = 1.0 + std::numbers::sqrt2;

int default_samples(std::size_t arity, const Config& cfg) {
    if (arity <= 2) return 2 * cfg.certify_angles;
    if (arity == 3) return 150;
    return 48;
}

// One-shot certification driver with a single automatic refinement pass
// (double the quadrature nodes and the boundary samples) before a failure
// is reported. The rhs accumulates through max() so refinement never lowers
// the sampled sup.
CertificateReport run_core(std::string id, double constant,
                           const std::function<double(const QuadratureSpec&)>& lhs_fn,
                           const std::function<double(int)>& rhs_fn, int base_samples,
                           const QuadratureSpec& q, const Config& cfg) {
    CertificateReport r;
    r.inequality_id = std::move(id);
    r.constant = constant;
    r.boundary_samples = base_samples;
    r.lhs = lhs_fn(q);
    r.rhs_sup_sample = rhs_fn(base_samples);

    auto finish = [&] {
        r.raw_ratio = r.rhs_sup_sample > 0.0
                          ? r.lhs / r.rhs_sup_sample
                          : (r.lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
        r.ratio = r.raw_ratio / r.constant;
        r.pass = r.ratio <= 1.0 + cfg.tol_cert;
    };
    finish();
    if (!r.pass) {
        r.refined = true;
        QuadratureSpec q2 = q;
        q2.nodes = std::min(q.nodes * 2, q.max_nodes);
        q2.max_nodes = std::max(q.max_nodes, q2.nodes);
        r.lhs = lhs_fn(q2);
        r.boundary_samples = 2 * base_samples;
        r.rhs_sup_sample = std::max(r.rhs_sup_sample, rhs_fn(r.boundary_samples));
        finish();
    }
    return r;
}

}  // namespace

double sup_on_range_product(const FunExpr& f, std::span<const NumericalRangeApprox> ranges,
                            int samples_per_range) {
    if (static_cast<int>(ranges.size()) != f.arity()) {
        throw DimensionError("sup_on_range_product: range count must equal arity");
    }
    return fieldvals::sup_over_ranges(
        [&f](std::span<const Complex> pt) { return std::abs(f.eval(pt)); }, ranges,
        samples_per_range);
}

double sup_on_range_product(const MatrixFunExpr& f,
                            std::span<const NumericalRangeApprox> ranges,
                            int samples_per_range) {
    if (static_cast<int>(ranges.size()) != f.arity()) {
        throw DimensionError("sup_on_range_product: range count must equal arity");
    }
    return fieldvals::sup_over_ranges(
        [&f](std::span<const Complex> pt) { return linalg::spectral_norm(f.eval(pt)); },
        ranges, samples_per_range);
}

double sup_on_range_product(const DividedDifferenceExpr& dd,
                            std::span<const NumericalRangeApprox> ranges,
                            int samples_per_range) {
    if (ranges.size() != 2) {
        throw DimensionError("sup_on_range_product: divided difference needs two ranges");
    }
    return fieldvals::sup_over_ranges(
        [&dd](std::span<const Complex> pt) { return std::abs(dd.eval(pt[0], pt[1])); },
        ranges, samples_per_range);
}

CertificateReport certify_univariate(const FunExpr& f, const ComplexMatrix& a,
                                     const QuadratureSpec& q, const Config& cfg) {
    const auto enc = matfun::enclose(a, cfg);
    const auto nr = fieldvals::numrange(a, cfg.certify_angles);
    const NumericalRangeApprox ranges[1] = {nr};
    int nodes_seen = 0;
    auto lhs = [&](const QuadratureSpec& qq) {
        auto r = matfun::eval_univariate(f, a, enc.contour, qq, cfg);
        nodes_seen = r.meta.nodes_used;
        return linalg::spectral_norm(r.value, cfg.tol_norm);
    };
    auto rhs = [&](int samples) { return sup_on_range_product(f, ranges, samples); };
    auto rep = run_core("cp1", kK, lhs, rhs, default_samples(1, cfg), q, cfg);
    rep.quadrature_nodes = nodes_seen;
    rep.margins = {enc.margin};
    return rep;
}

CertificateReport certify_univariate(const MatrixFunExpr& f, const ComplexMatrix& a,
                                     const QuadratureSpec& q, const Config& cfg) {
    const auto enc = matfun::enclose(a, cfg);
    const auto nr = fieldvals::numrange(a, cfg.certify_angles);
    const NumericalRangeApprox ranges[1] = {nr};
    int nodes_seen = 0;
    auto lhs = [&](const QuadratureSpec& qq) {
        auto r = matfun::eval_matrix_valued(f, a, enc.contour, qq, cfg);
        nodes_seen = r.meta.nodes_used;
        return linalg::spectral_norm(r.value, cfg.tol_norm);
    };
    auto rhs = [&](int samples) { return sup_on_range_product(f, ranges, samples); };
    auto rep = run_core("cp-matrix", kK, lhs, rhs, default_samples(1, cfg), q, cfg);
    rep.quadrature_nodes = nodes_seen;
    rep.margins = {enc.margin};
    return rep;
}

namespace {

template <typename Evaluable>
CertificateReport certify_bivariate_impl(const char* id, const Evaluable& f,
                                         const ComplexMatrix& a, const ComplexMatrix& b,
                                         const QuadratureSpec& q, const Config& cfg) {
    const auto enc_a = matfun::enclose(a, cfg);
    const auto enc_b = matfun::enclose(b, cfg);
    const auto nra = fieldvals::numrange(a, cfg.certify_angles);
    const auto nrb = fieldvals::numrange(b, cfg.certify_angles);
    const NumericalRangeApprox ranges[2] = {nra, nrb};
    int nodes_seen = 0;
    auto lhs = [&](const QuadratureSpec& qq) {
        auto op = matfun::eval_bivariate(f, a, b, enc_a.contour, enc_b.contour, qq, cfg);
        nodes_seen = op.meta().nodes_used;
        return op.norm(cfg);
    };
    auto rhs = [&](int samples) { return sup_on_range_product(f, ranges, samples); };
    auto rep = run_core(id, kK * kK, lhs, rhs, default_samples(2, cfg), q, cfg);
    rep.quadrature_nodes = nodes_seen;
    rep.margins = {enc_a.margin, enc_b.margin};
    return rep;
}

}  // namespace

CertificateReport certify_bivariate(const FunExpr& f, const ComplexMatrix& a,
                                    const ComplexMatrix& b, const QuadratureSpec& q,
                                    const Config& cfg) {
    return certify_bivariate_impl("bivariate", f, a, b, q, cfg);
}

CertificateReport certify_bivariate(const DividedDifferenceExpr& dd, const ComplexMatrix& a,
                                    const ComplexMatrix& b, const QuadratureSpec& q,
                                    const Config& cfg) {
    return certify_bivariate_impl("bivariate", dd, a, b, q, cfg);
}

CertificateReport certify_bivariate(const MatrixFunExpr& f, const ComplexMatrix& a,
                                    const ComplexMatrix& b, const QuadratureSpec& q,
                                    const Config& cfg) {
    const auto enc_a = matfun::enclose(a, cfg);
    const auto enc_b = matfun::enclose(b, cfg);
    const auto nra = fieldvals::numrange(a, cfg.certify_angles);
    const auto nrb = fieldvals::numrange(b, cfg.certify_angles);
    const NumericalRangeApprox ranges[2] = {nra, nrb};
    int nodes_seen = 0;
    auto lhs = [&](const QuadratureSpec& qq) {
        auto r = matfun::eval_bivariate_matrix_valued(f, a, b, enc_a.contour, enc_b.contour,
                                                      qq, cfg);
        nodes_seen = r.meta.nodes_used;
        return linalg::spectral_norm(r.value, cfg.tol_norm);
    };
    auto rhs = [&](int samples) { return sup_on_range_product(f, ranges, samples); };
    // The tensor grid pays a small-matrix SVD per point; 512 per range keeps
    // matrix-valued certification responsive.
    auto rep = run_core("bivariate", kK * kK, lhs, rhs, 512, q, cfg);
    rep.quadrature_nodes = nodes_seen;
    rep.margins = {enc_a.margin, enc_b.margin};
    return rep;
}

CertificateReport certify_multivariate(const FunExpr& f, std::span<const ComplexMatrix> as,
                                       const QuadratureSpec& q, const Config& cfg) {
    const std::size_t d = as.size();
    std::vector<matfun::Enclosure> encs;
    std::vector<Contour> contours;
    std::vector<NumericalRangeApprox> ranges;
    std::vector<double> margins;
    const int angles = d <= 2 ? cfg.certify_angles : 360;
    for (const auto& m : as) {
        encs.push_back(matfun::enclose(m, cfg));
        contours.push_back(encs.back().contour);
        margins.push_back(encs.back().margin);
        ranges.push_back(fieldvals::numrange(m, angles));
    }
    int nodes_seen = 0;
    auto lhs = [&](const QuadratureSpec& qq) {
        auto r = matfun::eval_multivariate(f, as, contours, qq, cfg);
        nodes_seen = r.meta.nodes_used;
        return linalg::spectral_norm(r.value, cfg.tol_norm);
    };
    auto rhs = [&](int samples) { return sup_on_range_product(f, ranges, samples); };
    auto rep = run_core("multivariate", std::pow(kK, static_cast<double>(d)), lhs, rhs,
                        default_samples(d, cfg), q, cfg);
    rep.quadrature_nodes = nodes_seen;
    rep.margins = std::move(margins);
    return rep;
}

namespace {

// Sup of |f| over the distinguished boundary of the bidisc.
double torus_sup(const FunExpr& f, int samples) {
    double best = 0.0;
    double best_a = 0.0, best_b = 0.0;
    for (int i = 0; i < samples; ++i) {
        const double alpha = kTwoPi * i / samples;
        const Complex x = std::polar(1.0, alpha);
        for (int j = 0; j < samples; ++j) {
            const double beta = kTwoPi * j / samples;
            const double v = std::abs(f.eval2(x, std::polar(1.0, beta)));
            if (v > best) {
                best = v;
                best_a = alpha;
                best_b = beta;
            }
        }
    }
    // Coordinate-wise golden refinement around the grid arg-max.
    const double bracket = kTwoPi / samples;
    for (int pass = 0; pass < 2; ++pass) {
        auto ga = [&](double t) {
            return std::abs(f.eval2(std::polar(1.0, t), std::polar(1.0, best_b)));
        };
        double lo = best_a - bracket, hi = best_a + bracket;
        for (int it = 0; it < 80; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (ga(m1) < ga(m2)) lo = m1; else hi = m2;
        }
        best_a = 0.5 * (lo + hi);
        auto gb = [&](double t) {
            return std::abs(f.eval2(std::polar(1.0, best_a), std::polar(1.0, t)));
        };
        lo = best_b - bracket, hi = best_b + bracket;
        for (int it = 0; it < 80; ++it) {
            const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
            if (gb(m1) < gb(m2)) lo = m1; else hi = m2;
        }
        best_b = 0.5 * (lo + hi);
        best = std::max(best, gb(best_b));
    }
    return best;
}

}  // namespace

CertificateReport certify_ando(const FunExpr& f, const ComplexMatrix& a,
                               const ComplexMatrix& b, const QuadratureSpec& q,
                               const Config& cfg) {
    const double na = linalg::spectral_norm(a, cfg.tol_norm);
    const double nb = linalg::spectral_norm(b, cfg.tol_norm);
    if (na > 1.0 + 1e-12 || nb > 1.0 + 1e-12) {
        throw DimensionError("certify_ando: both matrices must be contractions");
    }
    Contour disc;
    disc.kind = Contour::Kind::Circle;
    disc.center = Complex(0, 0);
    disc.semi_major = disc.semi_minor = 1.05;
    int nodes_seen = 0;
    auto lhs = [&](const QuadratureSpec& qq) {
        auto op = matfun::eval_bivariate(f, a, b, disc, disc, qq, cfg);
        nodes_seen = op.meta().nodes_used;
        return op.norm(cfg);
    };
    auto rhs = [&](int samples) { return torus_sup(f, samples); };
    // The torus grid is quadratic in the sample count; 512 per angle with
    // refinement pins the sup well below tol_cert.
    auto rep = run_core("ando", 1.0, lhs, rhs, 512, q, cfg);
    rep.quadrature_nodes = nodes_seen;
    rep.margins = {0.05};
    rep.note += "rhs sampled on the torus; ";
    return rep;
}

CertificateReport certify_frechet(const FunExpr& f, const ComplexMatrix& a,
                                  const QuadratureSpec& q, const Config& cfg) {
    const auto fp = f.diff(1);
    const auto nr = fieldvals::numrange(a, cfg.certify_angles);
    const NumericalRangeApprox ranges[1] = {nr};
    int nodes_seen = 0;
    auto lhs = [&](const QuadratureSpec& qq) {
        auto op = frechet::frechet_operator(f, a, qq, cfg);
        nodes_seen = op.meta().nodes_used;
        return op.norm(cfg);
    };
    auto rhs = [&](int samples) { return sup_on_range_product(fp, ranges, samples); };
    auto rep = run_core("frechet", kK * kK, lhs, rhs, default_samples(1, cfg), q, cfg);
    rep.quadrature_nodes = nodes_seen;
    rep.note += "rhs is sup |f'| on W(A); ";
    return rep;
}

ComplexMatrix cauchy_dual(const MatrixFunExpr& f, const Contour& g, Complex z,
                          const QuadratureSpec& q, bool* accuracy_warning) {
    if (f.arity() != 1) throw DimensionError("cauchy_dual: F must be univariate");
    if (!g.contains(z)) throw DimensionError("cauchy_dual: z must lie strictly inside");

    auto build = [&](int n) {
        ComplexMatrix acc = ComplexMatrix::Zero(f.cols(), f.rows());
        Complex pt[1];
        for (int j = 0; j < n; ++j) {
            const double t = kTwoPi * j / n;
            const Complex sigma = g.point(t);
            pt[0] = sigma;
            const ComplexMatrix fv = f.eval(pt);
            acc += (g.derivative(t) / (kImag * static_cast<double>(n))) * fv.adjoint() /
                   (sigma - z);
        }
        return acc;
    };

    int n = std::max(16, q.nodes);
    ComplexMatrix current = build(n);
    if (q.adaptive) {
        while (n < q.max_nodes) {
            ComplexMatrix next = build(2 * n);
            const double delta = (next - current).norm() / std::max(next.norm(), 1e-300);
            current = std::move(next);
            n *= 2;
            if (delta <= q.rel_tol) break;
        }
    }
    if (accuracy_warning) {
        const double spacing = g.circumference() / n;
        *accuracy_warning = g.boundary_distance(z) < 10.0 * spacing;
    }
    return current;
}

LemmaReports lemma_harness(const MatrixFunExpr& f, const ComplexMatrix& a, const Contour& g,
                           const QuadratureSpec& q, const Config& cfg) {
    if (f.arity() != 1) throw DimensionError("lemma_harness: F must be univariate");
    {
        const auto nra = fieldvals::numrange(a, cfg.numrange_angles);
        for (const Complex& p : nra.boundary) {
            if (!g.contains(p)) {
                throw AnalyticityError("lemma_harness: W(A) is not strictly inside the contour");
            }
        }
    }
    const Contour cs[1] = {g};
    if (!funexpr::analyticity_probe(f, cs, cfg.probe_points, cfg.probe_cap)) {
        throw AnalyticityError("lemma_harness: analyticity probe failed");
    }

    const Eigen::Index n = a.rows();
    const ComplexMatrix eye = ComplexMatrix::Identity(n, n);

    struct Pass {
        double sup_f = 0.0;
        double sup_g = 0.0;
        double symmetrized = 0.0;
    };
    auto run_pass = [&](int nodes, int zgrid) {
        Pass p;
        // Node data on the contour.
        std::vector<Complex> sigma(nodes), weight(nodes);
        std::vector<ComplexMatrix> fval(nodes);
        Complex pt[1];
        for (int j = 0; j < nodes; ++j) {
            const double t = kTwoPi * j / nodes;
            sigma[j] = g.point(t);
            weight[j] = g.derivative(t) / (kImag * static_cast<double>(nodes));
            pt[0] = sigma[j];
            fval[j] = f.eval(pt);
            p.sup_f = std::max(p.sup_f, linalg::spectral_norm(fval[j]));
        }
        // F(A) and G(A) share the same resolvents.
        ComplexMatrix fa = ComplexMatrix::Zero(f.rows() * n, f.cols() * n);
        ComplexMatrix ga = ComplexMatrix::Zero(f.cols() * n, f.rows() * n);
        for (int j = 0; j < nodes; ++j) {
            const ComplexMatrix res = linalg::solve(sigma[j] * eye - a, eye);
            for (Eigen::Index bi = 0; bi < f.rows(); ++bi)
                for (Eigen::Index bj = 0; bj < f.cols(); ++bj)
                    fa.block(bi * n, bj * n, n, n).noalias() +=
                        (weight[j] * fval[j](bi, bj)) * res;
            const ComplexMatrix fadj = fval[j].adjoint();
            for (Eigen::Index bi = 0; bi < f.cols(); ++bi)
                for (Eigen::Index bj = 0; bj < f.rows(); ++bj)
                    ga.block(bi * n, bj * n, n, n).noalias() +=
                        (weight[j] * fadj(bi, bj)) * res;
        }
        p.symmetrized =
            linalg::spectral_norm(ComplexMatrix(fa + ga.adjoint()), cfg.tol_norm);

        // Interior sup of ||G(z)|| on shrunk copies of the contour.
        for (double scale : {0.0, 0.25, 0.5, 0.75, 0.9}) {
            for (int i = 0; i < zgrid; ++i) {
                const double t = kTwoPi * i / zgrid;
                const Complex z = g.center + scale * (g.point(t) - g.center);
                ComplexMatrix gz = ComplexMatrix::Zero(f.cols(), f.rows());
                for (int j = 0; j < nodes; ++j) {
                    gz += weight[j] * fval[j].adjoint() / (sigma[j] - z);
                }
                p.sup_g = std::max(p.sup_g, linalg::spectral_norm(gz));
                if (scale == 0.0) break;  // center only once
            }
        }
        return p;
    };

    Pass p = run_pass(std::max(q.nodes, 256), 64);

    LemmaReports out;
    auto fill = [&](CertificateReport& r, const char* id, double lhs, double constant) {
        r.inequality_id = id;
        r.lhs = lhs;
        r.rhs_sup_sample = p.sup_f;
        r.constant = constant;
        r.raw_ratio = r.rhs_sup_sample > 0 ? r.lhs / r.rhs_sup_sample : 0.0;
        r.ratio = r.raw_ratio / constant;
        r.pass = r.ratio <= 1.0 + cfg.tol_cert;
        r.quadrature_nodes = std::max(q.nodes, 256);
        r.boundary_samples = 64;
    };
    fill(out.dual_sup, "lemma1", p.sup_g, 1.0);
    fill(out.symmetrized, "lemma2", p.symmetrized, 2.0);

    if (!out.dual_sup.pass || !out.symmetrized.pass) {
        const Pass p2 = run_pass(std::max(q.nodes, 256) * 2, 128);
        p.sup_f = std::max(p.sup_f, p2.sup_f);
        p.sup_g = p2.sup_g;
        p.symmetrized = p2.symmetrized;
        fill(out.dual_sup, "lemma1", p.sup_g, 1.0);
        fill(out.symmetrized, "lemma2", p.symmetrized, 2.0);
        out.dual_sup.refined = out.symmetrized.refined = true;
    }
    return out;
}

LemmaReports lemma_harness(const MatrixFunExpr& f, const ComplexMatrix& a,
                           const QuadratureSpec& q, const Config& cfg) {
    const auto enc = matfun::enclose(a, cfg);
    return lemma_harness(f, a, enc.contour, q, cfg);
}

namespace {

// Light-weight raw ratio used inside the hill climb; the winner is worth
// re-evaluating at full settings afterwards.
double raw_ratio_light(const FunExpr& f, const ComplexMatrix& a, const ComplexMatrix& b,
                       const Config& cfg) {
    const auto enc_a = matfun::enclose(a, cfg, std::nullopt, 90);
    const auto enc_b = matfun::enclose(b, cfg, std::nullopt, 90);
    QuadratureSpec q;
    q.nodes = 64;
    q.adaptive = false;
    const auto op = matfun::eval_bivariate(f, a, b, enc_a.contour, enc_b.contour, q, cfg);
    const NumericalRangeApprox ranges[2] = {enc_a.nr, enc_b.nr};
    const double rhs = sup_on_range_product(f, ranges, 128);
    if (rhs <= 0.0) return 0.0;
    return op.norm(cfg) / rhs;
}

}  // namespace

std::vector<SearchRecord> extremal_search(const FunExpr& f, const SearchOptions& opt,
                                          const Config& cfg) {
    if (f.arity() != 2) throw DimensionError("extremal_search: function must be bivariate");
    if (opt.sizes.empty()) throw DimensionError("extremal_search: need at least one size");

    std::mt19937_64 rng(opt.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<std::size_t> pick_size(0, opt.sizes.size() - 1);

    auto random_entry = [&] { return Complex(gauss(rng), gauss(rng)); };
    auto random_candidate = [&](Eigen::Index n) {
        ComplexMatrix m(n, n);
        if (opt.normal_only) {
            m.setZero();
            for (Eigen::Index i = 0; i < n; ++i) m(i, i) = random_entry();
        } else {
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) m(i, j) = random_entry();
            m /= std::sqrt(static_cast<double>(n));
        }
        return m;
    };
    auto perturb = [&](const ComplexMatrix& m) {
        const Eigen::Index n = m.rows();
        const double scale =
            opt.step_scale * std::max(1e-8, linalg::spectral_norm(m, cfg.tol_norm));
        ComplexMatrix out = m;
        if (opt.normal_only) {
            for (Eigen::Index i = 0; i < n; ++i) out(i, i) += scale * random_entry();
        } else {
            ComplexMatrix d(n, n);
            for (Eigen::Index i = 0; i < n; ++i)
                for (Eigen::Index j = 0; j < n; ++j) d(i, j) = random_entry();
            out += (scale / linalg::spectral_norm(d, cfg.tol_norm)) * d;
        }
        return out;
    };
    auto safe_ratio = [&](const ComplexMatrix& a, const ComplexMatrix& b) {
        try {
            return raw_ratio_light(f, a, b, cfg);
        } catch (const Error&) {
            return -1.0;  // reject candidates the evaluator refuses
        }
    };

    std::vector<SearchRecord> board;
    auto record = [&](double ratio, const ComplexMatrix& a, const ComplexMatrix& b,
                      const char* origin) {
        board.push_back({ratio, a, b, origin});
        std::stable_sort(board.begin(), board.end(),
                         [](const SearchRecord& x, const SearchRecord& y) {
                             return x.raw_ratio > y.raw_ratio;
                         });
        if (board.size() > opt.leaderboard) board.resize(opt.leaderboard);
    };

    ComplexMatrix a, b;
    if (opt.include_jordan_seed && !opt.normal_only) {
        a = ComplexMatrix::Zero(2, 2);
        a(0, 1) = 1.0;
        b = a;
    } else {
        const Eigen::Index n = opt.sizes[pick_size(rng)];
        a = random_candidate(n);
        b = random_candidate(n);
    }
    double current = safe_ratio(a, b);
    record(current, a, b, "seed");

    int stagnant = 0;
    for (int it = 0; it < opt.iterations; ++it) {
        if (stagnant >= opt.stagnation_limit) {
            const Eigen::Index n = opt.sizes[pick_size(rng)];
            a = random_candidate(n);
            b = random_candidate(n);
            current = safe_ratio(a, b);
            record(current, a, b, "restart");
            stagnant = 0;
            continue;
        }
        const ComplexMatrix a2 = perturb(a);
        const ComplexMatrix b2 = perturb(b);
        const double r2 = safe_ratio(a2, b2);
        if (r2 > current) {
            a = a2;
            b = b2;
            current = r2;
            record(current, a, b, "climb");
            stagnant = 0;
        } else {
            ++stagnant;
        }
    }
    return board;
}

}  // namespace bivarfun::certify
