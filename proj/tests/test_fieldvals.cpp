#include <doctest.h>

#include <numbers>

#include "bivarfun/fieldvals.hpp"
#include "support/test_support.hpp"

using namespace bivarfun;
using namespace bivarfun::fieldvals;

namespace {

// Independent point-to-contour distance oracle: dense parameter sampling
// plus local ternary refinement, no reuse of Contour::boundary_distance.
double distance_oracle(const Contour& g, Complex z) {
    auto dist = [&](double t) { return std::abs(g.point(t) - z); };
    const int n = 20000;
    double best_t = 0, best = dist(0);
    for (int i = 1; i < n; ++i) {
        const double t = 2.0 * std::numbers::pi * i / n;
        const double d = dist(t);
        if (d < best) {
            best = d;
            best_t = t;
        }
    }
    double lo = best_t - 2.0 * std::numbers::pi / n, hi = best_t + 2.0 * std::numbers::pi / n;
    for (int it = 0; it < 200; ++it) {
        const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
        if (dist(m1) < dist(m2)) hi = m2; else lo = m1;
    }
    return dist(0.5 * (lo + hi));
}

// Area of the halfplane intersection of the support constraints, clipped
// against a large box (Sutherland-Hodgman).
double support_polygon_area(const NumericalRangeApprox& nr, double box) {
    using P = std::pair<double, double>;
    std::vector<P> poly{{-box, -box}, {box, -box}, {box, box}, {-box, box}};
    for (std::size_t k = 0; k < nr.angles.size(); ++k) {
        const double cx = std::cos(nr.angles[k]);
        const double sx = -std::sin(nr.angles[k]);  // Re(e^{i t}(x+iy)) = x cos - y sin
        const double h = nr.support[k];
        std::vector<P> next;
        const std::size_t n = poly.size();
        for (std::size_t i = 0; i < n; ++i) {
            const P a = poly[i], b = poly[(i + 1) % n];
            const double fa = cx * a.first + sx * a.second - h;
            const double fb = cx * b.first + sx * b.second - h;
            if (fa <= 0) next.push_back(a);
            if ((fa < 0 && fb > 0) || (fa > 0 && fb < 0)) {
                const double t = fa / (fa - fb);
                next.push_back({a.first + t * (b.first - a.first),
                                a.second + t * (b.second - a.second)});
            }
        }
        poly = std::move(next);
        if (poly.empty()) return 0.0;
    }
    double area = 0.0;
    for (std::size_t i = 0; i < poly.size(); ++i) {
        const P a = poly[i], b = poly[(i + 1) % poly.size()];
        area += a.first * b.second - b.first * a.second;
    }
    return 0.5 * std::abs(area);
}

}  // namespace

TEST_CASE("numrange: Jordan block gives the radius-1/2 disc") {
    const auto nr = numrange(testsup::jordan2(), 360);
    double max_mod = 0.0, max_dev = 0.0;
    for (std::size_t k = 0; k < nr.angles.size(); ++k) {
        max_mod = std::max(max_mod, std::abs(nr.boundary[k]));
        max_dev = std::max(max_dev, std::abs(nr.support[k] - 0.5));
    }
    CHECK(std::abs(max_mod - 0.5) <= 1e-8);
    CHECK(max_dev <= 1e-8);
}

TEST_CASE("numrange: diag(0,1) boundary spans [0,1]") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(1, 1) = 1.0;
    const auto nr = numrange(a, 64);
    double re_min = 1e9, re_max = -1e9, im_max = 0;
    for (const auto& q : nr.boundary) {
        re_min = std::min(re_min, q.real());
        re_max = std::max(re_max, q.real());
        im_max = std::max(im_max, std::abs(q.imag()));
    }
    CHECK(re_min == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(re_max == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(im_max <= 1e-12);
}

TEST_CASE("numrange: Hermitian support endpoints are extreme eigenvalues") {
    auto g = testsup::rng(201);
    const ComplexMatrix b = testsup::random_matrix(5, 5, g);
    const ComplexMatrix a = 0.5 * (b + b.adjoint());
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(a);
    const auto nr = numrange(a, 8);
    CHECK(nr.support[0] == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-12));
    // h(pi) is at index n_angles/2.
    CHECK(nr.support[4] == doctest::Approx(-es.eigenvalues().minCoeff()).epsilon(1e-12));
    for (const auto& q : nr.boundary) CHECK(std::abs(q.imag()) <= 1e-12 * (1 + a.norm()));
}

TEST_CASE("contains: Rayleigh points, trace mean, and outside points") {
    auto g = testsup::rng(202);
    const ComplexMatrix a = testsup::random_matrix(5, 5, g);
    const auto nr = numrange(a, 128);

    const Complex mean = a.trace() / 5.0;
    CHECK(contains(nr, mean, 1e-12 * (1.0 + a.norm())));

    ComplexVector v = testsup::random_vector(5, g);
    v.normalize();
    const Complex rq = (v.adjoint() * a * v)(0, 0);
    CHECK(contains(nr, rq, 1e-12));

    const auto nrj = numrange(testsup::jordan2(), 128);
    CHECK(!contains(nrj, Complex(0.6, 0.0), 1e-10));
}

TEST_CASE("contains: support consistency of boundary points") {
    auto g = testsup::rng(203);
    const ComplexMatrix a = testsup::random_matrix(6, 6, g);
    const auto nr = numrange(a, 96);
    for (const auto& q : nr.boundary) {
        CHECK(contains(nr, q, 1e-10 * (1.0 + a.norm())));
    }
}

TEST_CASE("contains: spectrum lies inside the sampled range") {
    auto g = testsup::rng(204);
    for (int trial = 0; trial < 4; ++trial) {
        const ComplexMatrix a = testsup::random_matrix(6, 6, g);
        const auto nr = numrange(a, 180);
        const auto d = linalg::eig(a);
        const double slack = 1e-8 * linalg::spectral_norm(a);
        for (Eigen::Index i = 0; i < d.values.size(); ++i) {
            CHECK(contains(nr, d.values(i), slack));
        }
    }
}

TEST_CASE("numrange: monotone refinement") {
    auto g = testsup::rng(205);
    const ComplexMatrix a = testsup::random_matrix(5, 5, g);
    const auto nr1 = numrange(a, 90);
    const auto nr2 = numrange(a, 180);
    const double m1 = *std::max_element(nr1.support.begin(), nr1.support.end());
    const double m2 = *std::max_element(nr2.support.begin(), nr2.support.end());
    CHECK(m2 >= m1 - 1e-12);
    const double box = 10.0 * (1.0 + a.norm());
    CHECK(support_polygon_area(nr2, box) <= support_polygon_area(nr1, box) + 1e-9);
}

TEST_CASE("numrange: affine covariance of boundary points") {
    auto g = testsup::rng(206);
    const ComplexMatrix a = testsup::random_matrix(4, 4, g);
    const double alpha = 1.7;
    const Complex beta(0.3, -1.2);
    const ComplexMatrix b = alpha * a + beta * ComplexMatrix::Identity(4, 4);
    const auto nra = numrange(a, 64);
    const auto nrb = numrange(b, 64);
    for (std::size_t k = 0; k < nra.boundary.size(); ++k) {
        CHECK(std::abs(nrb.boundary[k] - (alpha * nra.boundary[k] + beta)) <=
              1e-10 * (1.0 + std::abs(nrb.boundary[k])));
    }
}

TEST_CASE("enclosing_contour: Jordan disc with margin 0.1") {
    const auto nr = numrange(testsup::jordan2(), 360);
    const Contour g = enclosing_contour(nr, 0.1);
    CHECK(g.kind == Contour::Kind::Circle);
    CHECK(std::abs(g.center) <= 1e-8);
    CHECK(g.semi_major >= 0.6 - 1e-9);
    CHECK(g.semi_major <= 0.65);
    double cl = 1e9;
    for (const auto& p : nr.boundary) cl = std::min(cl, distance_oracle(g, p));
    CHECK(cl >= 0.1 - 1e-7);
}

TEST_CASE("enclosing_contour: Hermitian segment keeps clearance") {
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(1, 1) = 1.0;
    const auto nr = numrange(a, 180);
    const Contour g = enclosing_contour(nr, 0.1);
    double cl = 1e9;
    for (const auto& p : nr.boundary) cl = std::min(cl, distance_oracle(g, p));
    CHECK(cl >= 0.1 - 1e-7);
    CHECK(g.contains(Complex(0.5, 0.0)));
    CHECK(g.contains(Complex(0.0, 0.0)));
    CHECK(g.contains(Complex(1.0, 0.0)));
}

TEST_CASE("enclosing_contour: scalar multiple of identity") {
    const Complex lambda(0.7, -0.4);
    ComplexMatrix a = lambda * ComplexMatrix::Identity(3, 3);
    const auto nr = numrange(a, 64);
    const Contour g = enclosing_contour(nr, 0.25);
    CHECK(g.kind == Contour::Kind::Circle);
    CHECK(std::abs(g.center - lambda) <= 1e-10);
    CHECK(g.semi_major == doctest::Approx(0.25).epsilon(1e-9));
}

TEST_CASE("contour: parametrization derivative matches finite differences") {
    Contour g;
    g.kind = Contour::Kind::Ellipse;
    g.center = Complex(0.5, -0.2);
    g.semi_major = 2.0;
    g.semi_minor = 0.7;
    g.rotation = 0.4;
    const double h = 1e-6;
    for (double t : {0.1, 1.3, 2.9, 4.4, 6.0}) {
        const Complex fd = (g.point(t + h) - g.point(t - h)) / (2.0 * h);
        CHECK(std::abs(fd - g.derivative(t)) <= 1e-7);
    }
}

TEST_CASE("boundary sampler covers degenerate and full ranges") {
    // Segment case.
    ComplexMatrix a = ComplexMatrix::Zero(2, 2);
    a(1, 1) = 1.0;
    BoundarySampler seg(numrange(a, 90));
    CHECK(!seg.degenerate_point());
    bool found_mid = false;
    for (const auto& [s, p] : seg.uniform(64)) {
        CHECK(p.real() >= -1e-10);
        CHECK(p.real() <= 1.0 + 1e-10);
        if (std::abs(p - Complex(0.5, 0.0)) < 0.05) found_mid = true;
    }
    CHECK(found_mid);

    // Point case.
    BoundarySampler pt(numrange(ComplexMatrix::Identity(3, 3), 16));
    CHECK(pt.degenerate_point());
    CHECK(pt.uniform(8).size() == 1);

    // Disc case: samples stay inside the sampled range.
    const auto nrj = numrange(testsup::jordan2(), 180);
    BoundarySampler disc(nrj);
    for (const auto& [s, p] : disc.uniform(200)) {
        CHECK(std::abs(p) <= 0.5 + 1e-9);
    }
}

TEST_CASE("convex hull: degenerate inputs") {
    CHECK(convex_hull({Complex(1, 1), Complex(1, 1), Complex(1, 1)}).size() == 1);
    const auto seg = convex_hull({Complex(0, 0), Complex(0.5, 0), Complex(1, 0)});
    CHECK(seg.size() == 2);
}
