#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "bivarfun/certify.hpp"

namespace bivarfun::ensemble {

/// Deterministic random-case generator for the certification suites. A
/// given (inequality, seed, cases, sizes, matrix_kind) tuple always produces
/// the same case list.
struct EnsembleSpec {
    std::string inequality = "bivariate";  // cp1 | cp-matrix | bivariate |
                                           // multivariate | ando | lemma1 |
                                           // lemma2 | frechet
    int cases = 40;
    Eigen::Index min_size = 2;
    Eigen::Index max_size = 8;
    std::uint64_t seed = 12345;
    std::string matrix_kind = "general";   // general | normal | contraction | hpd
};

struct CaseOutcome {
    std::string case_id;
    certify::CertificateReport report;
};

std::vector<CaseOutcome> run_suite(const EnsembleSpec& spec,
                                   const matfun::QuadratureSpec& q = {},
                                   const Config& cfg = {});

/// Random matrix draws used by the suites (seeded, reproducible).
ComplexMatrix random_general(Eigen::Index n, std::mt19937_64& rng);
ComplexMatrix random_normal(Eigen::Index n, std::mt19937_64& rng);
ComplexMatrix random_contraction(Eigen::Index n, std::mt19937_64& rng);
ComplexMatrix random_hpd_shifted(Eigen::Index n, std::mt19937_64& rng);

/// Real shift s such that Re(x_1 + ... + x_d + s) >= 1 on the product of
/// the given contours (keeps 1/(sum + s) analytic there).
double safe_shift(std::span<const fieldvals::Contour> contours);

}  // namespace bivarfun::ensemble
