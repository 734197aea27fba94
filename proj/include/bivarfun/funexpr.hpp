#pragma once

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "bivarfun/fieldvals.hpp"
#include "bivarfun/linalg.hpp"

namespace bivarfun::funexpr {

/// Immutable analytic expression tree in variables x1..xd (aliases x, y for
/// d <= 2). Supported operations: + - * / unary-, integer powers ^k, exp,
/// log, sin, cos, sqrt, and the imaginary unit i. log and sqrt use principal
/// branches.
class FunExpr {
public:
    enum class Kind { Constant, Variable, Add, Sub, Mul, Div, Neg, IntPow, Exp, Log, Sin, Cos, Sqrt };

    struct Node;
    using NodePtr = std::shared_ptr<const Node>;
    struct Node {
        Kind kind;
        Complex value{};    // Constant
        int var_index = 0;  // Variable, 1-based
        int exponent = 0;   // IntPow
        NodePtr a, b;
    };

    FunExpr() = default;
    FunExpr(NodePtr root, int arity) : root_(std::move(root)), arity_(arity) {}

    int arity() const { return arity_; }
    bool valid() const { return root_ != nullptr; }
    const NodePtr& root() const { return root_; }

    /// Exact recursive evaluation in complex double arithmetic. Throws
    /// EvalDomainError on division by zero, log/sqrt at 0, or a non-finite
    /// intermediate value.
    Complex eval(std::span<const Complex> point) const;
    Complex eval1(Complex x) const;
    Complex eval2(Complex x, Complex y) const;

    /// Exception-free evaluation used by the analyticity probe. Reports
    /// whether the value is finite and the closest approach of any log/sqrt
    /// argument to the branch cut (-inf, 0].
    struct Probe {
        bool ok = false;
        Complex value{};
        double cut_distance = std::numeric_limits<double>::infinity();
    };
    Probe probe_eval(std::span<const Complex> point) const;

    /// Symbolic partial derivative with 0/1 constant folding.
    FunExpr diff(int var) const;

    /// Printable form that reparses to an identically-evaluating tree.
    std::string to_string() const;

    /// Substitute x1 = value and shift the remaining variables down by one
    /// (arity decreases by 1). Used by the recursive multivariate evaluator.
    FunExpr bind_first(Complex value) const;

private:
    NodePtr root_;
    int arity_ = 0;
};

/// Recursive-descent parser. Precedence ^ > unary - > * / > + -, binary
/// operators left-associative; exponents must be nonnegative integer
/// literals. Variables: x1..x8 up to the declared arity; x and y alias
/// x1 and x2. Throws SyntaxError with a byte offset.
FunExpr parse(const std::string& text, int arity);

/// Bivariate divided difference f[x,y] of a univariate f: evaluates
/// (f(x)-f(y))/(x-y) away from the diagonal and f'((x+y)/2) within the
/// switch window |x-y| <= threshold * (1+|x|+|y|).
struct DividedDifferenceExpr {
    FunExpr base;
    FunExpr derivative;
    double switch_threshold = 1e-6;

    Complex eval(Complex x, Complex y) const;
    FunExpr::Probe probe_eval(Complex x, Complex y) const;
};

DividedDifferenceExpr divided_difference(const FunExpr& f);

/// Matrix of expressions sharing one arity (matrix-valued analytic F).
class MatrixFunExpr {
public:
    MatrixFunExpr(Eigen::Index rows, Eigen::Index cols, std::vector<FunExpr> entries);

    Eigen::Index rows() const { return rows_; }
    Eigen::Index cols() const { return cols_; }
    int arity() const { return arity_; }
    const FunExpr& at(Eigen::Index i, Eigen::Index j) const { return entries_[i * cols_ + j]; }

    /// Pointwise evaluation F(point) as a numeric matrix.
    ComplexMatrix eval(std::span<const Complex> point) const;

private:
    Eigen::Index rows_, cols_;
    int arity_;
    std::vector<FunExpr> entries_;
};

/// Heuristic analyticity guard: evaluates the function at n_probe^arity
/// tensor points on the contours and on two inward-shrunk copies, requiring
/// finite values of magnitude <= cap and no log/sqrt branch-cut proximity.
/// This cannot prove analyticity; it rejects obvious violations.
bool analyticity_probe(const FunExpr& f, std::span<const fieldvals::Contour> contours,
                       int n_probe = 16, double cap = 1e12);
bool analyticity_probe(const DividedDifferenceExpr& dd, const fieldvals::Contour& ga,
                       const fieldvals::Contour& gb, int n_probe = 16, double cap = 1e12);
bool analyticity_probe(const MatrixFunExpr& f, std::span<const fieldvals::Contour> contours,
                       int n_probe = 16, double cap = 1e12);

}  // namespace bivarfun::funexpr
