#include <doctest.h>

#include <cstring>
#include <sstream>

#include "bivarfun/matrix_io.hpp"
#include "support/test_support.hpp"

using namespace bivarfun;

TEST_CASE("matrix JSON round-trips bit-exactly") {
    auto g = testsup::rng(101);
    const ComplexMatrix m = testsup::random_matrix(4, 3, g, 1e3);
    std::stringstream s;
    io::write_matrix_json(m, s);
    const ComplexMatrix back = io::read_matrix_json(s);
    REQUIRE(back.rows() == 4);
    REQUIRE(back.cols() == 3);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 3; ++j) {
            // Bit-exact, not approximately equal.
            CHECK(std::memcmp(&back(i, j), &m(i, j), sizeof(Complex)) == 0);
        }
    }
}

TEST_CASE("matrix JSON rejects malformed input") {
    std::stringstream bad1("{\"rows\": 2, \"cols\": 2, \"entries\": [[1,0]]}");
    CHECK_THROWS_AS(io::read_matrix_json(bad1), IoError);
    std::stringstream bad2("{\"cols\": 2, \"entries\": []}");
    CHECK_THROWS_AS(io::read_matrix_json(bad2), IoError);
    std::stringstream bad3("not json");
    CHECK_THROWS_AS(io::read_matrix_json(bad3), IoError);
}

TEST_CASE("Matrix Market array format round-trip") {
    auto g = testsup::rng(102);
    const ComplexMatrix m = testsup::random_matrix(3, 5, g);
    std::stringstream s;
    io::write_matrix_market(m, s);
    const ComplexMatrix back = io::read_matrix_market(s);
    CHECK(testsup::rel_err(back, m) < 1e-15);
}

TEST_CASE("Matrix Market coordinate format") {
    std::stringstream s(
        "%%MatrixMarket matrix coordinate complex general\n"
        "% a comment line\n"
        "2 2 2\n"
        "1 2 1.5 -0.5\n"
        "2 1 0 3\n");
    const ComplexMatrix m = io::read_matrix_market(s);
    CHECK(m(0, 1) == Complex(1.5, -0.5));
    CHECK(m(1, 0) == Complex(0, 3));
    CHECK(std::abs(m(0, 0)) == 0.0);
}

TEST_CASE("Matrix Market real field is accepted") {
    std::stringstream s(
        "%%MatrixMarket matrix array real general\n"
        "2 1\n"
        "1.0\n"
        "2.0\n");
    const ComplexMatrix m = io::read_matrix_market(s);
    CHECK(m(0, 0) == Complex(1, 0));
    CHECK(m(1, 0) == Complex(2, 0));
}

TEST_CASE("read_matrix dispatches by content") {
    const std::string dir = "/tmp/bivarfun_io_test";
    std::system(("mkdir -p " + dir).c_str());
    auto g = testsup::rng(103);
    const ComplexMatrix m = testsup::random_matrix(2, 2, g);
    io::write_matrix(m, dir + "/a.json");
    io::write_matrix(m, dir + "/a.mtx");
    CHECK(testsup::rel_err(io::read_matrix(dir + "/a.json"), m) < 1e-15);
    CHECK(testsup::rel_err(io::read_matrix(dir + "/a.mtx"), m) < 1e-15);
    CHECK_THROWS_AS(io::read_matrix(dir + "/missing.json"), IoError);
}
