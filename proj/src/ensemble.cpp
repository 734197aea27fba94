#include "bivarfun/ensemble.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

namespace bivarfun::ensemble {

using certify::CertificateReport;
using funexpr::parse;

namespace {

Complex gauss(std::mt19937_64& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    const double re = d(rng);
    const double im = d(rng);
    return {re, im};
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Eigen::Index draw_size(const EnsembleSpec& spec, std::mt19937_64& rng, Eigen::Index cap) {
    const Eigen::Index lo = std::max<Eigen::Index>(2, spec.min_size);
    const Eigen::Index hi = std::max(lo, std::min(spec.max_size, cap));
    std::uniform_int_distribution<Eigen::Index> d(lo, hi);
    return d(rng);
}

ComplexMatrix draw_matrix(const std::string& kind, Eigen::Index n, std::mt19937_64& rng) {
    if (kind == "normal") return random_normal(n, rng);
    if (kind == "contraction") return random_contraction(n, rng);
    if (kind == "hpd") return random_hpd_shifted(n, rng);
    return random_general(n, rng);
}

// Matrix-valued test functions: small grids mixing polynomials and exp.
funexpr::MatrixFunExpr matrix_suite_entry(int which) {
    switch (which % 4) {
        case 0:
            return funexpr::MatrixFunExpr(
                2, 2, {parse("exp(x)", 1), parse("x", 1), parse("1", 1), parse("x^2", 1)});
        case 1:
            return funexpr::MatrixFunExpr(
                2, 3, {parse("x", 1), parse("1", 1), parse("x^2", 1), parse("0.5", 1),
                       parse("exp(x)", 1), parse("x^3 - x", 1)});
        case 2:
            return funexpr::MatrixFunExpr(1, 1, {parse("exp(x)*sin(x)", 1)});
        default:
            return funexpr::MatrixFunExpr(
                2, 2, {parse("1.5", 1), parse("0", 1), parse("0.3", 1), parse("(-2)", 1)});
    }
}

}  // namespace

ComplexMatrix random_general(Eigen::Index n, std::mt19937_64& rng) {
    ComplexMatrix m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = gauss(rng);
    std::uniform_real_distribution<double> scale(0.5, 2.0);
    m *= scale(rng) / std::sqrt(static_cast<double>(n));
    return m;
}

ComplexMatrix random_normal(Eigen::Index n, std::mt19937_64& rng) {
    ComplexMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
    Eigen::HouseholderQR<ComplexMatrix> qr(g);
    const ComplexMatrix u = qr.householderQ();
    ComplexVector lam(n);
    std::uniform_real_distribution<double> radius(0.0, 1.0);
    std::uniform_real_distribution<double> angle(0.0, 2.0 * std::numbers::pi);
    for (Eigen::Index i = 0; i < n; ++i) {
        lam(i) = std::polar(std::sqrt(radius(rng)), angle(rng));
    }
    return u * lam.asDiagonal() * u.adjoint();
}

ComplexMatrix random_contraction(Eigen::Index n, std::mt19937_64& rng) {
    ComplexMatrix m = random_general(n, rng);
    return m * (0.9 / linalg::spectral_norm(m));
}

ComplexMatrix random_hpd_shifted(Eigen::Index n, std::mt19937_64& rng) {
    ComplexMatrix g(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) g(i, j) = gauss(rng);
    ComplexMatrix gram = g * g.adjoint();
    gram /= linalg::spectral_norm(gram);
    return ComplexMatrix::Identity(n, n) + gram;
}

double safe_shift(std::span<const fieldvals::Contour> contours) {
    double shift = 1.0;
    for (const auto& g : contours) {
        double min_re = 1e300;
        for (int i = 0; i < 256; ++i) {
            min_re = std::min(min_re, g.point(2.0 * std::numbers::pi * i / 256).real());
        }
        shift -= min_re;
    }
    return shift;
}

std::vector<CaseOutcome> run_suite(const EnsembleSpec& spec, const matfun::QuadratureSpec& q,
                                   const Config& cfg) {
    std::mt19937_64 rng(spec.seed);
    std::vector<CaseOutcome> out;
    out.reserve(spec.cases);

    auto case_id = [&](int i, const std::string& fn, Eigen::Index n) {
        return spec.inequality + "/" + std::to_string(i) + "/" + fn + "/n" + std::to_string(n);
    };

    for (int i = 0; i < spec.cases; ++i) {
        if (spec.inequality == "cp1" || spec.inequality == "frechet") {
            static const char* suite[] = {"exp(x)",          "x^2", "sin(x)",
                                          "x^3 - 2*x + 1",   "@shifted",
                                          "exp(x)*cos(x)"};
            const std::string pick = suite[i % 6];
            const Eigen::Index n = draw_size(spec, rng, 8);
            const ComplexMatrix a = draw_matrix(spec.matrix_kind, n, rng);
            std::string fn = pick;
            if (pick == "@shifted") {
                const auto enc = matfun::enclose(a, cfg);
                const fieldvals::Contour cs[1] = {enc.contour};
                fn = "1/(x + " + fmt(safe_shift(cs)) + ")";
            }
            const auto f = parse(fn, 1);
            auto rep = spec.inequality == "cp1" ? certify::certify_univariate(f, a, q, cfg)
                                                : certify::certify_frechet(f, a, q, cfg);
            out.push_back({case_id(i, fn, n), std::move(rep)});
        } else if (spec.inequality == "cp-matrix") {
            const Eigen::Index n = draw_size(spec, rng, 8);
            const ComplexMatrix a = draw_matrix(spec.matrix_kind, n, rng);
            const auto f = matrix_suite_entry(i);
            auto rep = certify::certify_univariate(f, a, q, cfg);
            out.push_back({case_id(i, "F" + std::to_string(i % 4), n), std::move(rep)});
        } else if (spec.inequality == "bivariate") {
            static const char* suite[] = {"x*y",      "exp(x+y)",      "exp(x*y)",
                                          "@shifted", "sin(x)*cos(y)", "@dd_exp",
                                          "@dd_poly"};
            const std::string pick = suite[i % 7];
            const Eigen::Index na = draw_size(spec, rng, 8);
            const Eigen::Index nb = draw_size(spec, rng, 8);
            const ComplexMatrix a = draw_matrix(spec.matrix_kind, na, rng);
            const ComplexMatrix b = draw_matrix(spec.matrix_kind, nb, rng);
            CertificateReport rep;
            std::string fn = pick;
            if (pick == "@dd_exp") {
                rep = certify::certify_bivariate(funexpr::divided_difference(parse("exp(x)", 1)),
                                                 a, b, q, cfg);
            } else if (pick == "@dd_poly") {
                rep = certify::certify_bivariate(
                    funexpr::divided_difference(parse("x^3 - 2*x + 1", 1)), a, b, q, cfg);
            } else {
                if (pick == "@shifted") {
                    const auto ea = matfun::enclose(a, cfg);
                    const auto eb = matfun::enclose(b, cfg);
                    const fieldvals::Contour cs[2] = {ea.contour, eb.contour};
                    fn = "1/(x + y + " + fmt(safe_shift(cs)) + ")";
                }
                rep = certify::certify_bivariate(parse(fn, 2), a, b, q, cfg);
            }
            out.push_back({case_id(i, fn, na * 10 + nb), std::move(rep)});
        } else if (spec.inequality == "multivariate") {
            static const char* suite[] = {"x1*x2*x3", "exp(x1+x2+x3)",
                                          "x1*x2*x3 + x1 + x2^2", "@shifted",
                                          "sin(x1)*cos(x2)*exp(x3)"};
            const std::string pick = suite[i % 5];
            std::vector<ComplexMatrix> as;
            Eigen::Index prod = 1;
            for (int v = 0; v < 3; ++v) {
                const Eigen::Index n = draw_size(spec, rng, 8);
                as.push_back(draw_matrix(spec.matrix_kind, n, rng));
                prod *= n;
            }
            if (prod > cfg.kron_dim_cap) {
                for (auto& m : as) m = m.topLeftCorner(2, 2).eval();
            }
            std::string fn = pick;
            if (pick == "@shifted") {
                std::vector<fieldvals::Contour> cs;
                for (const auto& m : as) cs.push_back(matfun::enclose(m, cfg).contour);
                fn = "1/(x1 + x2 + x3 + " + fmt(safe_shift(cs)) + ")";
            }
            auto rep = certify::certify_multivariate(parse(fn, 3), as,
                                                     matfun::QuadratureSpec{64, true, 1e-9, 256}, cfg);
            out.push_back({case_id(i, fn, prod), std::move(rep)});
        } else if (spec.inequality == "ando") {
            static const char* suite[] = {"x*y", "exp(x*y)", "1 + x*y + x^3*y^2",
                                          "exp(x+y)"};
            const std::string fn = suite[i % 4];
            const Eigen::Index na = draw_size(spec, rng, 8);
            const Eigen::Index nb = draw_size(spec, rng, 8);
            const ComplexMatrix a = random_contraction(na, rng);
            const ComplexMatrix b = random_contraction(nb, rng);
            auto rep = certify::certify_ando(parse(fn, 2), a, b, q, cfg);
            out.push_back({case_id(i, fn, na * 10 + nb), std::move(rep)});
        } else if (spec.inequality == "lemma1" || spec.inequality == "lemma2") {
            const Eigen::Index n = draw_size(spec, rng, 8);
            const ComplexMatrix a = draw_matrix(spec.matrix_kind, n, rng);
            const auto f = matrix_suite_entry(i);
            auto pair = certify::lemma_harness(f, a, q, cfg);
            auto rep = spec.inequality == "lemma1" ? std::move(pair.dual_sup)
                                                   : std::move(pair.symmetrized);
            out.push_back({case_id(i, "F" + std::to_string(i % 4), n), std::move(rep)});
        } else {
            throw DimensionError("run_suite: unknown inequality '" + spec.inequality + "'");
        }
    }
    return out;
}

}  // namespace bivarfun::ensemble
