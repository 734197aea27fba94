#include <doctest.h>

#include "bivarfun/matfun.hpp"
#include "support/test_support.hpp"

using namespace bivarfun;
using namespace bivarfun::matfun;
using funexpr::parse;

namespace {

Contour circle(Complex c, double r) {
    Contour g;
    g.kind = Contour::Kind::Circle;
    g.center = c;
    g.semi_major = g.semi_minor = r;
    return g;
}

// Diagonalizable test matrix with a bounded similarity condition number.
ComplexMatrix well_conditioned_diagonalizable(Eigen::Index n, std::mt19937_64& g,
                                              double kappa_max = 100.0) {
    for (;;) {
        const ComplexVector lam = testsup::random_vector(n, g);
        ComplexMatrix s = ComplexMatrix::Identity(n, n) + 0.3 * testsup::random_matrix(n, n, g);
        if (linalg::condition_number(s) > kappa_max) continue;
        return s * lam.asDiagonal() * s.inverse();
    }
}

// Matrix exponential oracle via diagonalization (test-side, independent of
// the quadrature path).
ComplexMatrix exp_oracle(const ComplexMatrix& a) {
    Eigen::ComplexEigenSolver<ComplexMatrix> es(a);
    const ComplexMatrix s = es.eigenvectors();
    ComplexVector e = es.eigenvalues();
    for (Eigen::Index i = 0; i < e.size(); ++i) e(i) = std::exp(e(i));
    return s * e.asDiagonal() * s.inverse();
}

}  // namespace

TEST_CASE("eval_univariate: identity function reproduces A") {
    auto g = testsup::rng(401);
    const ComplexMatrix a = testsup::random_matrix(5, 5, g);
    const auto enc = enclose(a);
    const auto r = eval_univariate(parse("x", 1), a, enc.contour);
    CHECK(testsup::rel_err(r.value, a) <= 1e-10);
}

TEST_CASE("eval_univariate: exp of diag(0,1)") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(1, 1) = 1.0;
    const auto r = eval_univariate(parse("exp(x)", 1), a, circle(0.5, 1.5));
    ComplexMatrix want = ComplexMatrix::Zero(2, 2);
    want(0, 0) = 1.0;
    want(1, 1) = std::exp(1.0);
    CHECK((r.value - want).norm() <= 1e-10);
}

TEST_CASE("eval_univariate: diagonalization oracle agreement") {
    auto g = testsup::rng(402);
    const ComplexMatrix a = well_conditioned_diagonalizable(6, g);
    const auto enc = enclose(a);
    const auto r = eval_univariate(parse("exp(x)", 1), a, enc.contour);
    CHECK(testsup::rel_err(r.value, exp_oracle(a)) <= 1e-8);
}

TEST_CASE("eval_univariate: error paths") {
    const ComplexMatrix a = testsup::jordan2();
    // Spectrum outside the contour.
    CHECK_THROWS_AS(eval_univariate(parse("x", 1), a, circle(5.0, 0.5)), AnalyticityError);
    // Pole of f inside the contour region.
    CHECK_THROWS_AS(eval_univariate(parse("1/x", 1), a, circle(0.0, 1.0)), AnalyticityError);
    // Non-convergence at max_nodes flags a warning instead of throwing: pole
    // just outside the contour makes the trapezoid rule converge slowly.
    QuadratureSpec q;
    q.nodes = 16;
    q.max_nodes = 32;
    const auto r = eval_univariate(parse("1/(x - 1.0415)", 1), a, circle(0.0, 1.04), q);
    CHECK(r.meta.accuracy_warning);
}

TEST_CASE("eval_matrix_valued: stacked identity blocks") {
    auto g = testsup::rng(403);
    const ComplexMatrix a = testsup::random_matrix(3, 3, g);
    const auto enc = enclose(a);
    const funexpr::MatrixFunExpr f(2, 1, {parse("x", 1), parse("1", 1)});
    const auto r = eval_matrix_valued(f, a, enc.contour);
    REQUIRE(r.value.rows() == 6);
    REQUIRE(r.value.cols() == 3);
    CHECK(testsup::rel_err(r.value.topRows(3), a) <= 1e-9);
    CHECK((r.value.bottomRows(3) - ComplexMatrix::Identity(3, 3)).norm() <= 1e-9);
}

TEST_CASE("eval_matrix_valued: block diagonal exp pattern") {
    auto g = testsup::rng(404);
    const ComplexMatrix a = testsup::random_matrix(2, 2, g);
    const auto enc = enclose(a);
    const funexpr::MatrixFunExpr f(2, 2, {parse("exp(x)", 1), parse("0", 1),
                                          parse("0", 1), parse("exp(x)", 1)});
    const auto r = eval_matrix_valued(f, a, enc.contour);
    const ComplexMatrix e = exp_oracle(a);
    CHECK(testsup::rel_err(r.value.block(0, 0, 2, 2), e) <= 1e-8);
    CHECK(testsup::rel_err(r.value.block(2, 2, 2, 2), e) <= 1e-8);
    CHECK(r.value.block(0, 2, 2, 2).norm() <= 1e-10);
    CHECK(r.value.block(2, 0, 2, 2).norm() <= 1e-10);
}

TEST_CASE("eval_matrix_valued: Horner oracle on a polynomial grid") {
    auto g = testsup::rng(405);
    const ComplexMatrix a = testsup::random_matrix(3, 3, g);
    const auto enc = enclose(a);
    // Entries with explicit coefficient lists for the Horner oracle.
    const std::vector<std::vector<double>> coeffs = {
        {1.0, -2.0, 0.5}, {0.0, 1.0}, {2.0, 0.0, -1.0, 0.25}, {3.0}};
    const char* texts[] = {"1 - 2*x + 0.5*x^2", "x", "2 - x^2 + 0.25*x^3", "3"};
    std::vector<funexpr::FunExpr> entries;
    for (const char* t : texts) entries.push_back(parse(t, 1));
    const funexpr::MatrixFunExpr f(2, 2, std::move(entries));
    const auto r = eval_matrix_valued(f, a, enc.contour);
    for (int i = 0; i < 2; ++i) {
        for (int j = 0; j < 2; ++j) {
            ComplexMatrix horner = ComplexMatrix::Zero(3, 3);
            const auto& c = coeffs[i * 2 + j];
            for (auto it = c.rbegin(); it != c.rend(); ++it) {
                horner = a * horner + *it * ComplexMatrix::Identity(3, 3);
            }
            CHECK(testsup::rel_err(r.value.block(3 * i, 3 * j, 3, 3), horner) <= 1e-9);
        }
    }
}

TEST_CASE("eval_bivariate: constant 1 gives the identity operator") {
    auto g = testsup::rng(406);
    const ComplexMatrix a = testsup::random_matrix(3, 3, g);
    const ComplexMatrix b = testsup::random_matrix(2, 2, g);
    const auto ea = enclose(a), eb = enclose(b);
    const auto op = eval_bivariate(parse("1", 2), a, b, ea.contour, eb.contour);
    CHECK((op.materialized() - ComplexMatrix::Identity(6, 6)).norm() <= 1e-9);
    // Operator form: X -> X.
    const ComplexMatrix x = testsup::random_matrix(3, 2, g);
    CHECK(testsup::rel_err(op.apply(x), x) <= 1e-9);
}

TEST_CASE("eval_bivariate: Kronecker polynomial identity") {
    auto g = testsup::rng(407);
    const ComplexMatrix a = 0.7 * testsup::random_matrix(3, 3, g);
    const ComplexMatrix b = 0.7 * testsup::random_matrix(2, 2, g);
    const auto ea = enclose(a), eb = enclose(b);
    const auto op = eval_bivariate(parse("1 + x*y + x^3*y^2", 2), a, b, ea.contour, eb.contour);
    const ComplexMatrix want = ComplexMatrix::Identity(6, 6) + linalg::kron(b, a) +
                               linalg::kron(ComplexMatrix(b * b), ComplexMatrix(a * a * a));
    const double scale = std::max(1.0, want.norm());
    CHECK((op.materialized() - want).norm() <= 1e-9 * scale);
}

TEST_CASE("eval_bivariate: Jordan pair xy has unit norm") {
    const ComplexMatrix a = testsup::jordan2();
    const auto ea = enclose(a);
    const auto op = eval_bivariate(parse("x*y", 2), a, a, ea.contour, ea.contour);
    CHECK(std::abs(op.norm() - 1.0) <= 1e-8);
}

TEST_CASE("apply_bivariate: direct operator form of the cubic example") {
    auto g = testsup::rng(408);
    const ComplexMatrix a = 0.6 * testsup::random_matrix(3, 3, g);
    const ComplexMatrix b = 0.6 * testsup::random_matrix(3, 3, g);
    const auto ea = enclose(a), eb = enclose(b);
    const auto op = eval_bivariate(parse("1 + x*y + x^3*y^2", 2), a, b, ea.contour, eb.contour);
    const ComplexMatrix x = testsup::random_matrix(3, 3, g);
    const ComplexMatrix want =
        x + a * x * b.transpose() + a * a * a * x * (b * b).transpose();
    CHECK((apply_bivariate(op, x) - want).norm() <= 1e-9 * std::max(1.0, want.norm()));
}

TEST_CASE("apply_bivariate: consistent with the materialized form") {
    auto g = testsup::rng(409);
    const ComplexMatrix a = testsup::random_matrix(4, 4, g);
    const ComplexMatrix b = testsup::random_matrix(3, 3, g);
    const auto ea = enclose(a), eb = enclose(b);
    const auto op = eval_bivariate(parse("exp(x*y)", 2), a, b, ea.contour, eb.contour);
    const ComplexMatrix x = testsup::random_matrix(4, 3, g);
    const ComplexVector via_mat = op.materialized() * linalg::vec(x);
    const ComplexVector via_apply = linalg::vec(op.apply(x));
    const double scale = std::max(1.0, via_mat.norm()) * std::max(1.0, op.meta().scale);
    CHECK((via_mat - via_apply).norm() <= 1e-10 * scale);
}

TEST_CASE("apply_bivariate: adjoint consistency") {
    auto g = testsup::rng(410);
    const ComplexMatrix a = testsup::random_matrix(3, 3, g);
    const ComplexMatrix b = testsup::random_matrix(2, 2, g);
    const auto ea = enclose(a), eb = enclose(b);
    const auto op = eval_bivariate(parse("exp(x+y)", 2), a, b, ea.contour, eb.contour);
    const ComplexMatrix x = testsup::random_matrix(3, 2, g);
    const ComplexMatrix y = testsup::random_matrix(3, 2, g);
    // <op(x), y> == <x, op*(y)> in the Frobenius inner product.
    const Complex lhs = (op.apply(x).array().conjugate() * y.array()).sum();
    const Complex rhs = (x.array().conjugate() * op.apply_adjoint(y).array()).sum();
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
}

TEST_CASE("oracle_diag: diagonal inputs") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2), b = ComplexMatrix::Zero(2, 2);
    a(0, 0) = Complex(1, 0);
    a(1, 1) = Complex(0, 1);
    b(0, 0) = Complex(2, 0);
    b(1, 1) = Complex(-1, 0);
    const auto f = parse("x + 10*y", 2);
    const auto op = oracle_diag(f, a, b);
    const ComplexMatrix m = op.materialized();
    // Entry ordering: (j_b * n_a + i_a) diagonal with f(a_ii, b_jj).
    CHECK(std::abs(m(0, 0) - f.eval2(a(0, 0), b(0, 0))) <= 1e-12 * std::abs(m(0, 0)));
    CHECK(std::abs(m(1, 1) - f.eval2(a(1, 1), b(0, 0))) <= 1e-12 * std::abs(m(1, 1)));
    CHECK(std::abs(m(2, 2) - f.eval2(a(0, 0), b(1, 1))) <= 1e-12 * std::abs(m(2, 2)));
    CHECK(std::abs(m(3, 3) - f.eval2(a(1, 1), b(1, 1))) <= 1e-12 * std::abs(m(3, 3)));
}

TEST_CASE("oracle_diag: polynomial cross-check and separable exp factorization") {
    auto g = testsup::rng(411);
    const ComplexMatrix a = well_conditioned_diagonalizable(3, g);
    const ComplexMatrix b = well_conditioned_diagonalizable(4, g);

    const auto poly = oracle_diag(parse("1 + x*y + x^3*y^2", 2), a, b);
    const ComplexMatrix want = ComplexMatrix::Identity(12, 12) + linalg::kron(b, a) +
                               linalg::kron(ComplexMatrix(b * b), ComplexMatrix(a * a * a));
    const double kk = linalg::condition_number(a) * linalg::condition_number(b);
    CHECK((poly.materialized() - want).norm() <= 1e-9 * kk * std::max(1.0, want.norm()));

    const auto sep = oracle_diag(parse("exp(x+y)", 2), a, b);
    const ComplexMatrix fact = linalg::kron(exp_oracle(b), exp_oracle(a));
    CHECK(testsup::rel_err(sep.materialized(), fact) <= 1e-8);
}

TEST_CASE("oracle_diag: refuses defective input") {
    const auto f = parse("x*y", 2);
    CHECK_THROWS_AS(oracle_diag(f, testsup::jordan2(), testsup::jordan2()),
                    OracleUnavailableError);
}

TEST_CASE("quadrature agrees with the diagonalization oracle") {
    auto g = testsup::rng(412);
    for (const char* text : {"exp(x+y)", "exp(x*y)", "1 + x*y + x^3*y^2"}) {
        const auto f = parse(text, 2);
        const ComplexMatrix a = 0.8 * well_conditioned_diagonalizable(4, g);
        const ComplexMatrix b = 0.8 * well_conditioned_diagonalizable(3, g);
        const auto ea = enclose(a), eb = enclose(b);
        const auto quad = eval_bivariate(f, a, b, ea.contour, eb.contour);
        const auto dia = oracle_diag(f, a, b);
        CHECK(testsup::rel_err(quad.materialized(), dia.materialized()) <= 1e-8);
    }
}

TEST_CASE("eval_bivariate: linearity in the function") {
    auto g = testsup::rng(413);
    const ComplexMatrix a = testsup::random_matrix(3, 3, g);
    const ComplexMatrix b = testsup::random_matrix(3, 3, g);
    const auto ea = enclose(a), eb = enclose(b);
    const Complex alpha(0.7, -0.3), beta(-1.1, 0.4);
    const auto f1 = eval_bivariate(parse("exp(x+y)", 2), a, b, ea.contour, eb.contour);
    const auto f2 = eval_bivariate(parse("x*y", 2), a, b, ea.contour, eb.contour);
    const auto combo = eval_bivariate(
        parse("(0.7 - 0.3*i)*exp(x+y) + (-1.1 + 0.4*i)*(x*y)", 2), a, b, ea.contour, eb.contour);
    const ComplexMatrix want = alpha * f1.materialized() + beta * f2.materialized();
    const double scale = std::max(1.0, want.norm());
    CHECK((combo.materialized() - want).norm() <= 1e-10 * scale * 10);
}

TEST_CASE("eval_bivariate: contour independence") {
    auto g = testsup::rng(414);
    const ComplexMatrix a = testsup::random_matrix(3, 3, g);
    const ComplexMatrix b = testsup::random_matrix(2, 2, g);
    const auto na = fieldvals::numrange(a, 360), nb = fieldvals::numrange(b, 360);
    const auto f = parse("exp(x*y)", 2);
    const auto op1 = eval_bivariate(f, a, b, fieldvals::enclosing_contour(na, 0.15),
                                    fieldvals::enclosing_contour(nb, 0.2));
    const auto op2 = eval_bivariate(f, a, b, fieldvals::enclosing_contour(na, 0.6),
                                    fieldvals::enclosing_contour(nb, 0.45));
    const double scale = std::max({1.0, op1.meta().scale, op2.meta().scale});
    CHECK((op1.materialized() - op2.materialized()).norm() <= 1e-8 * scale);
}

TEST_CASE("eval_bivariate: polynomial exactness for fixed node counts") {
    auto g = testsup::rng(415);
    const ComplexMatrix a = testsup::random_matrix(3, 3, g);
    const ComplexMatrix b = testsup::random_matrix(3, 3, g);
    const auto ea = enclose(a), eb = enclose(b);
    // f in Pi_{3,3} with explicit coefficients.
    const auto f = parse("2 - x + 0.5*x^2*y^3 + x^3*y - y^2", 2);
    QuadratureSpec q;
    q.nodes = 64;
    q.adaptive = false;
    const auto op = eval_bivariate(f, a, b, ea.contour, eb.contour, q);
    auto mat_pow = [](const ComplexMatrix& m, int k) {
        ComplexMatrix r = ComplexMatrix::Identity(m.rows(), m.cols());
        for (int i = 0; i < k; ++i) r = r * m;
        return r;
    };
    ComplexMatrix want = 2.0 * ComplexMatrix::Identity(9, 9);
    want -= linalg::kron(mat_pow(b, 0), mat_pow(a, 1));
    want += 0.5 * linalg::kron(mat_pow(b, 3), mat_pow(a, 2));
    want += linalg::kron(mat_pow(b, 1), mat_pow(a, 3));
    want -= linalg::kron(mat_pow(b, 2), mat_pow(a, 0));
    CHECK((op.materialized() - want).norm() <= 1e-9 * std::max(1.0, want.norm()));
}

TEST_CASE("eval_bivariate: transposition symmetry via perfect shuffle") {
    auto g = testsup::rng(416);
    const ComplexMatrix a = testsup::random_matrix(3, 3, g);
    const ComplexMatrix b = testsup::random_matrix(2, 2, g);
    const auto ea = enclose(a), eb = enclose(b);
    const auto f_ab = eval_bivariate(parse("exp(x)*sin(y) + x*y", 2), a, b, ea.contour, eb.contour);
    // Swapped arguments with swapped variable roles.
    const auto f_ba = eval_bivariate(parse("exp(y)*sin(x) + y*x", 2), b, a, eb.contour, ea.contour);
    const ComplexMatrix k_ab = linalg::perfect_shuffle(a.rows(), b.rows());
    const ComplexMatrix k_ba = linalg::perfect_shuffle(b.rows(), a.rows());
    const ComplexMatrix lhs = f_ba.materialized();
    const ComplexMatrix rhs = k_ab * f_ab.materialized() * k_ba;
    CHECK((lhs - rhs).norm() <= 1e-10 * std::max(1.0, rhs.norm()) * 10);
}

TEST_CASE("quadrature convergence: doubling nodes shrinks the oracle deviation") {
    auto g = testsup::rng(417);
    // Pole of f at moderate distance keeps the N=64 error well above the
    // floating floor so the halving is observable.
    const ComplexVector la = testsup::random_vector_in_disc(4, g, 0.4);
    const ComplexVector lb = testsup::random_vector_in_disc(4, g, 0.4);
    const ComplexMatrix a = testsup::diagonalizable_matrix(la, g, 0.2);
    const ComplexMatrix b = testsup::diagonalizable_matrix(lb, g, 0.2);
    const auto f = parse("1/(x + y + 1.9)", 2);
    const Contour ca = circle(0.0, 0.8), cb = circle(0.0, 0.8);
    const auto exact = oracle_diag(f, a, b);

    auto deviation = [&](int n) {
        QuadratureSpec q;
        q.nodes = n;
        q.adaptive = false;
        const auto op = eval_bivariate(f, a, b, ca, cb, q);
        return (op.materialized() - exact.materialized()).norm();
    };
    const double e64 = deviation(64);
    const double e128 = deviation(128);
    const double e256 = deviation(256);
    CHECK(e128 <= 0.5 * e64 + 1e-12);
    CHECK(e256 <= 0.5 * e128 + 1e-12);
    CHECK(e64 > 1e-11);  // meaningful error at the coarse level
}

TEST_CASE("eval_multivariate: rank-one Kronecker product of Jordan blocks") {
    const ComplexMatrix j = testsup::jordan2();
    const std::vector<ComplexMatrix> as = {j, j, j};
    const auto enc = enclose(j);
    const std::vector<Contour> gs = {enc.contour, enc.contour, enc.contour};
    QuadratureSpec q;
    q.nodes = 64;
    q.max_nodes = 256;
    const auto r = eval_multivariate(parse("x1*x2*x3", 3), as, gs, q);
    const ComplexMatrix want = linalg::kron(j, linalg::kron(j, j));
    CHECK((r.value - want).norm() <= 1e-7);
    CHECK(std::abs(linalg::spectral_norm(r.value) - 1.0) <= 1e-7);
}

TEST_CASE("eval_multivariate: d = 2 agrees with the bivariate path") {
    auto g = testsup::rng(418);
    const ComplexMatrix a = testsup::random_matrix(3, 3, g);
    const ComplexMatrix b = testsup::random_matrix(2, 2, g);
    const auto ea = enclose(a), eb = enclose(b);
    const auto f = parse("exp(x1*x2)", 2);
    const std::vector<ComplexMatrix> as = {a, b};
    const std::vector<Contour> gs = {ea.contour, eb.contour};
    const auto multi = eval_multivariate(f, as, gs);
    const auto bi = eval_bivariate(parse("exp(x*y)", 2), a, b, ea.contour, eb.contour);
    CHECK(testsup::rel_err(multi.value, bi.materialized()) <= 1e-8);
}

TEST_CASE("eval_multivariate: Kronecker sum on diagonal inputs") {
    ComplexMatrix a1 = ComplexMatrix::Zero(2, 2), a2 = a1, a3 = a1;
    a1.diagonal() << Complex(0.1, 0.2), Complex(-0.3, 0.0);
    a2.diagonal() << Complex(0.5, -0.1), Complex(0.2, 0.4);
    a3.diagonal() << Complex(-0.2, 0.3), Complex(0.0, -0.5);
    const std::vector<ComplexMatrix> as = {a1, a2, a3};
    std::vector<Contour> gs;
    for (const auto& m : as) gs.push_back(enclose(m).contour);
    QuadratureSpec q;
    q.nodes = 64;
    q.max_nodes = 256;
    const auto r = eval_multivariate(parse("x1 + x2 + x3", 3), as, gs, q);
    const ComplexMatrix i2 = ComplexMatrix::Identity(2, 2);
    const ComplexMatrix want = linalg::kron(i2, linalg::kron(i2, a1)) +
                               linalg::kron(i2, linalg::kron(a2, i2)) +
                               linalg::kron(a3, linalg::kron(i2, i2));
    CHECK((r.value - want).norm() <= 1e-8 * std::max(1.0, want.norm()));
}

TEST_CASE("eval_multivariate: size and arity guards") {
    const ComplexMatrix j = testsup::jordan2();
    const auto enc = enclose(j);
    const std::vector<ComplexMatrix> one = {j};
    const std::vector<Contour> g1 = {enc.contour};
    CHECK_THROWS_AS(eval_multivariate(parse("x1", 1), one, g1), DimensionError);

    Config tiny;
    tiny.kron_dim_cap = 4;
    const std::vector<ComplexMatrix> three = {j, j, j};
    const std::vector<Contour> g3 = {enc.contour, enc.contour, enc.contour};
    CHECK_THROWS_AS(eval_multivariate(parse("x1*x2*x3", 3), three, g3, {}, tiny),
                    SizeLimitError);
}
