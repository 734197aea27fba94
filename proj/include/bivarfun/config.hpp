#pragma once

#include <Eigen/Core>

namespace bivarfun {

/// Central configuration record. All numerical tolerances and size caps used
/// across the library live here so a single instance pins down the behavior
/// of a whole run.
struct Config {
    // Eigendecomposition residual target: ||A v - lambda v||_2 <= tol_eig * ||A||_2.
    double tol_eig = 1e-10;
    // Linear solve residual target: ||M X - R|| <= tol_solve * ||M|| ||X||.
    double tol_solve = 1e-12;
    // Relative accuracy of spectral-norm computations.
    double tol_norm = 1e-10;
    // Slack accepted by certification checks: pass iff ratio <= 1 + tol_cert.
    double tol_cert = 1e-6;

    // An eigenbasis with condition estimate above this is treated as
    // unusable; diagonalization oracles refuse such inputs.
    double diagonalizable_kappa_max = 1e8;

    // Largest dimension (n_A * n_B, or the product of all factors) for which
    // Kronecker-form operators are materialized as dense matrices.
    Eigen::Index kron_dim_cap = 4096;

    // Support-function sweep resolution.
    int numrange_angles = 360;
    // Denser sweep used on certification paths (plus local refinement).
    int certify_angles = 720;

    // Contour margin = margin_scale * (1 + diameter of the sampled boundary).
    double margin_scale = 0.1;

    // Analyticity probe: points per contour per shrink level, and the
    // magnitude cap beyond which a function is treated as non-analytic.
    int probe_points = 16;
    double probe_cap = 1e12;
};

}  // namespace bivarfun
