#include <doctest.h>

#include "bivarfun/krylov.hpp"
#include "support/test_support.hpp"

using namespace bivarfun;
using namespace bivarfun::krylov;
using funexpr::parse;

namespace {

// Hermitian positive definite matrix with spectrum inside [1, 2].
ComplexMatrix hpd_shifted(Eigen::Index n, std::mt19937_64& g) {
    const ComplexMatrix m = testsup::random_matrix(n, n, g);
    ComplexMatrix gram = m * m.adjoint();
    gram /= linalg::spectral_norm(gram);
    return ComplexMatrix::Identity(n, n) + gram;
}

// Independent exact-solve oracle for f = 1/(x+y): the operator is the
// inverse of the Kronecker sum B (x) I + I (x) A.
ComplexVector inverse_sum_oracle(const ComplexMatrix& a, const ComplexMatrix& b,
                                 const ComplexVector& c) {
    const Eigen::Index na = a.rows(), nb = b.rows();
    const ComplexMatrix sum = linalg::kron(b, ComplexMatrix::Identity(na, na)) +
                              linalg::kron(ComplexMatrix::Identity(nb, nb), a);
    return linalg::solve(sum, c);
}

}  // namespace

TEST_CASE("arnoldi: identity matrix breaks down immediately") {
    auto g = testsup::rng(601);
    const ComplexVector c = testsup::random_vector(5, g);
    const auto d = arnoldi(ComplexMatrix::Identity(5, 5), c, 3);
    REQUIRE(d.breakdown_step.has_value());
    CHECK(*d.breakdown_step == 1);
    CHECK(d.basis.cols() == 1);
    CHECK((d.basis.col(0) - c / c.norm()).norm() <= 1e-13);
    CHECK(d.hess.rows() == 1);
    CHECK(std::abs(d.hess(0, 0) - Complex(1.0, 0.0)) <= 1e-13);
}

TEST_CASE("arnoldi: canonical Krylov chain of the shift matrix") {
    ComplexMatrix shift = ComplexMatrix::Zero(4, 4);
    for (int i = 0; i < 3; ++i) shift(i + 1, i) = 1.0;
    ComplexVector e1 = ComplexVector::Zero(4);
    e1(0) = 1.0;
    const auto d = arnoldi(shift, e1, 4);
    REQUIRE(d.breakdown_step.has_value());
    CHECK(*d.breakdown_step == 4);
    CHECK((d.basis - ComplexMatrix::Identity(4, 4)).norm() <= 1e-12);
    CHECK((d.hess - shift).norm() <= 1e-12);
}

TEST_CASE("arnoldi: relation and orthonormality on random input") {
    auto g = testsup::rng(602);
    const ComplexMatrix a = testsup::random_matrix(8, 8, g);
    const ComplexVector c = testsup::random_vector(8, g);
    const int k = 5;
    const auto d = arnoldi(a, c, k);
    REQUIRE(!d.breakdown_step.has_value());
    const double na = linalg::spectral_norm(a);
    CHECK((a * d.basis.leftCols(k) - d.basis * d.hess).norm() <= 1e-10 * na);
    CHECK((d.basis.adjoint() * d.basis - ComplexMatrix::Identity(k + 1, k + 1)).norm() <=
          1e-10);
    CHECK_THROWS_AS(arnoldi(a, ComplexVector::Zero(8), 3), DimensionError);
}

TEST_CASE("bivariate_krylov: polynomial exactness at matching degrees") {
    auto g = testsup::rng(603);
    const ComplexMatrix a = testsup::random_matrix(5, 5, g);
    const ComplexMatrix b = testsup::random_matrix(4, 4, g);
    const ComplexVector ca = testsup::random_vector(5, g);
    const ComplexVector cb = testsup::random_vector(4, g);
    const auto r = bivariate_krylov(parse("x*y", 2), a, b, ca, cb, 2, 2);
    REQUIRE(r.error_vs_exact.has_value());
    const double scale = std::max(1.0, r.x_kl.norm());
    CHECK(*r.error_vs_exact <= 1e-9 * scale * std::max(1.0, r.meta.scale));
    // Isometry of the lift.
    CHECK(r.x_kl.norm() == doctest::Approx(r.y_kl.norm()).epsilon(1e-10));
}

TEST_CASE("bivariate_krylov: full-dimension subspaces are exact") {
    auto g = testsup::rng(604);
    const ComplexMatrix a = testsup::random_matrix(4, 4, g);
    const ComplexMatrix b = testsup::random_matrix(3, 3, g);
    const ComplexVector ca = testsup::random_vector(4, g);
    const ComplexVector cb = testsup::random_vector(3, g);
    const auto r = bivariate_krylov(parse("exp(x+y)", 2), a, b, ca, cb, 4, 3);
    REQUIRE(r.error_vs_exact.has_value());
    CHECK(*r.error_vs_exact <= 1e-8 * std::max(1.0, r.x_kl.norm()) * std::max(1.0, r.meta.scale));
}

TEST_CASE("bivariate_krylov: clamps to breakdown and stays exact") {
    auto g = testsup::rng(605);
    // A has a 2-dimensional Krylov space for this start vector.
    ComplexMatrix a = ComplexMatrix::Zero(4, 4);
    a(0, 0) = 1.0;
    a(1, 1) = 2.0;
    a(2, 2) = 3.0;
    a(3, 3) = 3.0;
    ComplexVector ca = ComplexVector::Zero(4);
    ca(0) = 1.0;
    ca(1) = 1.0;
    const ComplexMatrix b = testsup::random_matrix(3, 3, g);
    const ComplexVector cb = testsup::random_vector(3, g);
    const auto r = bivariate_krylov(parse("exp(x)*exp(y)", 2), a, b, ca, cb, 4, 3);
    CHECK(r.k_used == 2);
    REQUIRE(r.error_vs_exact.has_value());
    // Invariant subspace: the clamped approximation is still exact.
    CHECK(*r.error_vs_exact <= 1e-8 * std::max(1.0, r.x_kl.norm()) * std::max(1.0, r.meta.scale));
}

TEST_CASE("bivariate_krylov: Galerkin start-vector reproduction at k = l = 1") {
    auto g = testsup::rng(606);
    const ComplexMatrix a = testsup::random_matrix(4, 4, g);
    const ComplexMatrix b = testsup::random_matrix(4, 4, g);
    ComplexVector ca = testsup::random_vector(4, g);
    ComplexVector cb = testsup::random_vector(4, g);
    const auto r = bivariate_krylov(parse("1", 2), a, b, ca, cb, 1, 1, {}, {}, true, false);
    // The compressed coefficient vector carries the full weight of c.
    CHECK(r.y_kl.norm() == doctest::Approx(ca.norm() * cb.norm()).epsilon(1e-12));
    // f = 1 reproduces c itself.
    CHECK((r.x_kl - linalg::vec(ComplexMatrix(ca * cb.transpose()))).norm() <=
          1e-9 * ca.norm() * cb.norm());
}

TEST_CASE("bivariate_krylov: monotone error decay for the resolvent sum") {
    auto g = testsup::rng(607);
    const ComplexMatrix a = hpd_shifted(8, g);
    const ComplexMatrix b = hpd_shifted(8, g);
    const ComplexVector ca = ComplexVector::Ones(8);
    const ComplexVector cb = ComplexVector::Ones(8);
    const auto f = parse("1/(x+y)", 2);

    std::vector<double> errs;
    for (int kl : {2, 4, 6}) {
        const auto r = bivariate_krylov(f, a, b, ca, cb, kl, kl, {}, {}, false, false);
        const ComplexVector exact =
            inverse_sum_oracle(a, b, linalg::vec(ComplexMatrix(ca * cb.transpose())));
        errs.push_back((exact - r.x_kl).norm());
    }
    CHECK(errs[1] <= errs[0] + 1e-12);
    CHECK(errs[2] <= errs[1] + 1e-12);
    CHECK(errs[2] < 0.5 * errs[0] + 1e-12);
}

TEST_CASE("apriori bound: vanishes for polynomials below the degree pair") {
    auto g = testsup::rng(608);
    const ComplexMatrix a = testsup::random_matrix(4, 4, g);
    const ComplexMatrix b = testsup::random_matrix(4, 4, g);
    const ComplexVector ca = testsup::random_vector(4, g);
    const ComplexVector cb = testsup::random_vector(4, g);
    const double bound =
        apriori_error_bound(parse("1 + x*y + x^2*y", 2), a, b, ca, cb, 3, 2);
    CHECK(bound <= 1e-9 * (1.0 + ca.norm() * cb.norm()));
}

TEST_CASE("apriori bound: decays with the subspace dimensions") {
    auto g = testsup::rng(609);
    // Contractions keep both ranges inside the unit disc.
    ComplexMatrix a = testsup::random_matrix(5, 5, g);
    a *= 0.9 / linalg::spectral_norm(a);
    ComplexMatrix b = testsup::random_matrix(5, 5, g);
    b *= 0.9 / linalg::spectral_norm(b);
    const ComplexVector ca = testsup::random_vector(5, g);
    const ComplexVector cb = testsup::random_vector(5, g);
    const auto f = parse("exp(x+y)", 2);
    const double b3 = apriori_error_bound(f, a, b, ca, cb, 3, 3);
    const double b6 = apriori_error_bound(f, a, b, ca, cb, 6, 6);
    CHECK(b6 * 10.0 <= b3);
}

TEST_CASE("apriori bound: dominates the observed error on shifted HPD pairs") {
    auto g = testsup::rng(610);
    const auto f = parse("1/(x+y)", 2);
    int holds = 0, total = 0;
    for (int trial = 0; trial < 6; ++trial) {
        const ComplexMatrix a = hpd_shifted(8, g);
        const ComplexMatrix b = hpd_shifted(8, g);
        const ComplexVector ca = ComplexVector::Ones(8);
        const ComplexVector cb = ComplexVector::Ones(8);
        for (int kl : {3, 5}) {
            const auto r = bivariate_krylov(f, a, b, ca, cb, kl, kl);
            REQUIRE(r.error_vs_exact.has_value());
            REQUIRE(r.apriori_bound.has_value());
            ++total;
            if (*r.error_vs_exact <= *r.apriori_bound + 1e-8 * std::max(1.0, r.meta.scale)) {
                ++holds;
            }
        }
    }
    // The Chebyshev estimate is near-best, not a certified upper bound of
    // the infimum; occasional slack is tolerated but not the rule.
    CHECK(holds >= total - 1);
}
