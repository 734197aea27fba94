#include "bivarfun/linalg.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace bivarfun::linalg {

ComplexMatrix kron(const ComplexMatrix& p, const ComplexMatrix& q, Eigen::Index max_dim) {
    const Eigen::Index rows = p.rows() * q.rows();
    const Eigen::Index cols = p.cols() * q.cols();
    if (rows > max_dim || cols > max_dim) {
        throw SizeLimitError("kron: result dimension " + std::to_string(rows) + "x" +
                             std::to_string(cols) + " exceeds cap " + std::to_string(max_dim));
    }
    ComplexMatrix out(rows, cols);
    for (Eigen::Index i = 0; i < p.rows(); ++i) {
        for (Eigen::Index j = 0; j < p.cols(); ++j) {
            out.block(i * q.rows(), j * q.cols(), q.rows(), q.cols()) = p(i, j) * q;
        }
    }
    return out;
}

ComplexVector vec(const ComplexMatrix& x) {
    // Eigen stores column-major, so this is exactly column stacking.
    return Eigen::Map<const ComplexVector>(x.data(), x.size());
}

ComplexMatrix unvec(const ComplexVector& v, Eigen::Index rows, Eigen::Index cols) {
    if (v.size() != rows * cols) {
        throw DimensionError("unvec: vector length " + std::to_string(v.size()) +
                             " does not match shape " + std::to_string(rows) + "x" +
                             std::to_string(cols));
    }
    return Eigen::Map<const ComplexMatrix>(v.data(), rows, cols);
}

ComplexMatrix perfect_shuffle(Eigen::Index rows, Eigen::Index cols) {
    ComplexMatrix k = ComplexMatrix::Zero(rows * cols, rows * cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        for (Eigen::Index j = 0; j < cols; ++j) {
            // vec(X) index of X(i,j) is j*rows+i; vec(X^T) index is i*cols+j.
            k(i * cols + j, j * rows + i) = 1.0;
        }
    }
    return k;
}

double condition_number(const ComplexMatrix& m) {
    if (m.size() == 0) return std::numeric_limits<double>::infinity();
    Eigen::JacobiSVD<ComplexMatrix> svd(m);
    const auto& s = svd.singularValues();
    const double smin = s(s.size() - 1);
    if (smin <= 0.0) return std::numeric_limits<double>::infinity();
    return s(0) / smin;
}

EigenDecomposition eig(const ComplexMatrix& a, bool want_vectors, const Config& cfg) {
    if (a.rows() != a.cols()) {
        throw DimensionError("eig: matrix must be square, got " + std::to_string(a.rows()) +
                             "x" + std::to_string(a.cols()));
    }
    Eigen::ComplexEigenSolver<ComplexMatrix> solver(a, want_vectors);
    if (solver.info() != Eigen::Success) {
        throw EigenSolverError("eig: QR iteration did not converge");
    }
    EigenDecomposition out;
    out.values = solver.eigenvalues();
    if (want_vectors) {
        ComplexMatrix s = solver.eigenvectors();
        out.condition_estimate = condition_number(s);
        if (out.condition_estimate <= cfg.diagonalizable_kappa_max) {
            out.vectors = std::move(s);
        } else {
            out.basis_unavailable = true;
        }
    }
    return out;
}

ComplexMatrix solve(const ComplexMatrix& m, const ComplexMatrix& rhs) {
    if (m.rows() != m.cols()) {
        throw DimensionError("solve: matrix must be square");
    }
    if (m.rows() != rhs.rows()) {
        throw DimensionError("solve: rhs has " + std::to_string(rhs.rows()) +
                             " rows, expected " + std::to_string(m.rows()));
    }
    Eigen::PartialPivLU<ComplexMatrix> lu(m);
    const auto diag = lu.matrixLU().diagonal();
    double min_pivot = std::numeric_limits<double>::infinity();
    double max_pivot = 0.0;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
        const double p = std::abs(diag(i));
        min_pivot = std::min(min_pivot, p);
        max_pivot = std::max(max_pivot, p);
    }
    const double eps = std::numeric_limits<double>::epsilon();
    if (min_pivot <= static_cast<double>(m.rows()) * eps * max_pivot) {
        throw SingularMatrixError(
            "solve: matrix singular to working precision (pivot " +
                std::to_string(min_pivot) + ")",
            min_pivot);
    }
    return lu.solve(rhs);
}

double spectral_norm(const ComplexMatrix& m, double tol) {
    if (m.size() == 0) return 0.0;
    const Eigen::Index dim = std::max(m.rows(), m.cols());
    if (dim <= 128) {
        Eigen::JacobiSVD<ComplexMatrix> svd(m);
        return svd.singularValues()(0);
    }
    if (dim <= 1536) {
        // The top singular value of M is computed accurately from the top
        // eigenvalue of the Gram matrix; squaring only harms small ones.
        ComplexMatrix gram = (m.rows() <= m.cols()) ? ComplexMatrix(m * m.adjoint())
                                                    : ComplexMatrix(m.adjoint() * m);
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(gram, Eigen::EigenvaluesOnly);
        const double top = es.eigenvalues().maxCoeff();
        return top > 0.0 ? std::sqrt(top) : 0.0;
    }
    auto apply = [&m](const ComplexVector& x) { return ComplexVector(m * x); };
    auto apply_adjoint = [&m](const ComplexVector& x) {
        return ComplexVector(m.adjoint() * x);
    };
    return spectral_norm_power(apply, apply_adjoint, m.cols(), tol);
}

double spectral_norm_power(
    const std::function<ComplexVector(const ComplexVector&)>& apply,
    const std::function<ComplexVector(const ComplexVector&)>& apply_adjoint,
    Eigen::Index dim, double tol, int max_iter) {
    if (dim == 0) return 0.0;
    // Deterministic pseudo-random start so results are reproducible.
    std::mt19937_64 rng(0x9e3779b97f4a7c15ULL);
    std::normal_distribution<double> gauss(0.0, 1.0);
    ComplexVector x(dim);
    for (Eigen::Index i = 0; i < dim; ++i) x(i) = Complex(gauss(rng), gauss(rng));
    x.normalize();

    double sigma = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        ComplexVector y = apply(x);
        const double ny = y.norm();
        if (ny == 0.0) return 0.0;
        ComplexVector z = apply_adjoint(y);
        const double nz = z.norm();
        const double estimate = nz / 1.0;  // ||A* A x|| with ||x|| = 1
        const double next = std::sqrt(estimate);
        x = z / nz;
        if (it > 2 && std::abs(next - sigma) <= tol * std::max(1.0, next)) {
            return next;
        }
        sigma = next;
    }
    return sigma;
}

}  // namespace bivarfun::linalg
