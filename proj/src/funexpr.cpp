#include "bivarfun/funexpr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <numbers>

namespace bivarfun::funexpr {

namespace {

using Kind = FunExpr::Kind;
using NodePtr = FunExpr::NodePtr;

NodePtr make(Kind k, NodePtr a = nullptr, NodePtr b = nullptr) {
    auto n = std::make_shared<FunExpr::Node>();
    n->kind = k;
    n->a = std::move(a);
    n->b = std::move(b);
    return n;
}

NodePtr constant(Complex v) {
    auto n = std::make_shared<FunExpr::Node>();
    n->kind = Kind::Constant;
    n->value = v;
    return n;
}

NodePtr variable(int idx) {
    auto n = std::make_shared<FunExpr::Node>();
    n->kind = Kind::Variable;
    n->var_index = idx;
    return n;
}

NodePtr int_pow(NodePtr base, int k) {
    auto n = std::make_shared<FunExpr::Node>();
    n->kind = Kind::IntPow;
    n->exponent = k;
    n->a = std::move(base);
    return n;
}

bool is_const(const NodePtr& n) { return n->kind == Kind::Constant; }
bool is_const(const NodePtr& n, Complex v) { return is_const(n) && n->value == v; }

// Folding constructors (0/1 identities plus constant subtrees).
NodePtr fadd(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0)) return b;
    if (is_const(b, 0.0)) return a;
    if (is_const(a) && is_const(b)) return constant(a->value + b->value);
    return make(Kind::Add, std::move(a), std::move(b));
}

NodePtr fneg(NodePtr a) {
    if (is_const(a)) return constant(-a->value);
    if (a->kind == Kind::Neg) return a->a;
    return make(Kind::Neg, std::move(a));
}

NodePtr fsub(NodePtr a, NodePtr b) {
    if (is_const(b, 0.0)) return a;
    if (is_const(a, 0.0)) return fneg(std::move(b));
    if (is_const(a) && is_const(b)) return constant(a->value - b->value);
    return make(Kind::Sub, std::move(a), std::move(b));
}

NodePtr fmul(NodePtr a, NodePtr b) {
    if (is_const(a, 0.0) || is_const(b, 0.0)) return constant(0.0);
    if (is_const(a, 1.0)) return b;
    if (is_const(b, 1.0)) return a;
    if (is_const(a) && is_const(b)) return constant(a->value * b->value);
    return make(Kind::Mul, std::move(a), std::move(b));
}

NodePtr fdiv(NodePtr a, NodePtr b) {
    if (is_const(b, 1.0)) return a;
    if (is_const(a) && is_const(b) && b->value != 0.0) return constant(a->value / b->value);
    return make(Kind::Div, std::move(a), std::move(b));
}

NodePtr fpow(NodePtr a, int k) {
    if (k == 0) return constant(1.0);
    if (k == 1) return a;
    if (is_const(a)) return constant(std::pow(a->value, k));
    return int_pow(std::move(a), k);
}

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Constant: return "constant";
        case Kind::Variable: return "variable";
        case Kind::Add: return "+";
        case Kind::Sub: return "-";
        case Kind::Mul: return "*";
        case Kind::Div: return "/";
        case Kind::Neg: return "unary -";
        case Kind::IntPow: return "^";
        case Kind::Exp: return "exp";
        case Kind::Log: return "log";
        case Kind::Sin: return "sin";
        case Kind::Cos: return "cos";
        case Kind::Sqrt: return "sqrt";
    }
    return "?";
}

Complex ipow(Complex base, int k) {
    Complex r(1.0, 0.0);
    Complex p = base;
    for (int e = k; e > 0; e >>= 1) {
        if (e & 1) r *= p;
        p *= p;
    }
    return r;
}

Complex eval_node(const FunExpr::Node* n, std::span<const Complex> pt) {
    switch (n->kind) {
        case Kind::Constant: return n->value;
        case Kind::Variable: return pt[n->var_index - 1];
        case Kind::Add: return eval_node(n->a.get(), pt) + eval_node(n->b.get(), pt);
        case Kind::Sub: return eval_node(n->a.get(), pt) - eval_node(n->b.get(), pt);
        case Kind::Mul: return eval_node(n->a.get(), pt) * eval_node(n->b.get(), pt);
        case Kind::Div: {
            const Complex den = eval_node(n->b.get(), pt);
            if (den == Complex(0.0, 0.0)) throw EvalDomainError("division by zero", "/");
            return eval_node(n->a.get(), pt) / den;
        }
        case Kind::Neg: return -eval_node(n->a.get(), pt);
        case Kind::IntPow: return ipow(eval_node(n->a.get(), pt), n->exponent);
        case Kind::Exp: return std::exp(eval_node(n->a.get(), pt));
        case Kind::Log: {
            const Complex u = eval_node(n->a.get(), pt);
            if (u == Complex(0.0, 0.0)) throw EvalDomainError("log of zero", "log");
            return std::log(u);
        }
        case Kind::Sin: return std::sin(eval_node(n->a.get(), pt));
        case Kind::Cos: return std::cos(eval_node(n->a.get(), pt));
        case Kind::Sqrt: return std::sqrt(eval_node(n->a.get(), pt));
    }
    throw EvalDomainError("corrupt tree", "?");
}

// Distance from u to the branch cut (-inf, 0].
double cut_distance(Complex u) {
    if (u.real() <= 0.0) return std::abs(u.imag());
    return std::abs(u);
}

bool probe_node(const FunExpr::Node* n, std::span<const Complex> pt, Complex& out,
                double& min_cut) {
    switch (n->kind) {
        case Kind::Constant: out = n->value; return true;
        case Kind::Variable: out = pt[n->var_index - 1]; return true;
        case Kind::Neg: {
            Complex u;
            if (!probe_node(n->a.get(), pt, u, min_cut)) return false;
            out = -u;
            return true;
        }
        case Kind::IntPow: {
            Complex u;
            if (!probe_node(n->a.get(), pt, u, min_cut)) return false;
            out = ipow(u, n->exponent);
            return std::isfinite(out.real()) && std::isfinite(out.imag());
        }
        case Kind::Exp: case Kind::Sin: case Kind::Cos: {
            Complex u;
            if (!probe_node(n->a.get(), pt, u, min_cut)) return false;
            out = n->kind == Kind::Exp ? std::exp(u) : (n->kind == Kind::Sin ? std::sin(u) : std::cos(u));
            return std::isfinite(out.real()) && std::isfinite(out.imag());
        }
        case Kind::Log: case Kind::Sqrt: {
            Complex u;
            if (!probe_node(n->a.get(), pt, u, min_cut)) return false;
            min_cut = std::min(min_cut, cut_distance(u));
            if (u == Complex(0.0, 0.0)) return false;
            out = n->kind == Kind::Log ? std::log(u) : std::sqrt(u);
            return std::isfinite(out.real()) && std::isfinite(out.imag());
        }
        default: {
            Complex a, b;
            if (!probe_node(n->a.get(), pt, a, min_cut)) return false;
            if (!probe_node(n->b.get(), pt, b, min_cut)) return false;
            switch (n->kind) {
                case Kind::Add: out = a + b; break;
                case Kind::Sub: out = a - b; break;
                case Kind::Mul: out = a * b; break;
                case Kind::Div:
                    if (b == Complex(0.0, 0.0)) return false;
                    out = a / b;
                    break;
                default: return false;
            }
            return std::isfinite(out.real()) && std::isfinite(out.imag());
        }
    }
}

NodePtr diff_node(const NodePtr& n, int var) {
    switch (n->kind) {
        case Kind::Constant: return constant(0.0);
        case Kind::Variable: return constant(n->var_index == var ? 1.0 : 0.0);
        case Kind::Add: return fadd(diff_node(n->a, var), diff_node(n->b, var));
        case Kind::Sub: return fsub(diff_node(n->a, var), diff_node(n->b, var));
        case Kind::Mul:
            return fadd(fmul(diff_node(n->a, var), n->b), fmul(n->a, diff_node(n->b, var)));
        case Kind::Div:
            return fdiv(fsub(fmul(diff_node(n->a, var), n->b), fmul(n->a, diff_node(n->b, var))),
                        fpow(n->b, 2));
        case Kind::Neg: return fneg(diff_node(n->a, var));
        case Kind::IntPow:
            return fmul(fmul(constant(static_cast<double>(n->exponent)), fpow(n->a, n->exponent - 1)),
                        diff_node(n->a, var));
        case Kind::Exp: return fmul(make(Kind::Exp, n->a), diff_node(n->a, var));
        case Kind::Log: return fdiv(diff_node(n->a, var), n->a);
        case Kind::Sin: return fmul(make(Kind::Cos, n->a), diff_node(n->a, var));
        case Kind::Cos: return fneg(fmul(make(Kind::Sin, n->a), diff_node(n->a, var)));
        case Kind::Sqrt:
            return fdiv(diff_node(n->a, var), fmul(constant(2.0), make(Kind::Sqrt, n->a)));
    }
    return nullptr;
}

NodePtr bind_first_node(const NodePtr& n, Complex value) {
    switch (n->kind) {
        case Kind::Constant: return n;
        case Kind::Variable:
            if (n->var_index == 1) return constant(value);
            return variable(n->var_index - 1);
        case Kind::IntPow: return fpow(bind_first_node(n->a, value), n->exponent);
        case Kind::Neg: return fneg(bind_first_node(n->a, value));
        case Kind::Add: return fadd(bind_first_node(n->a, value), bind_first_node(n->b, value));
        case Kind::Sub: return fsub(bind_first_node(n->a, value), bind_first_node(n->b, value));
        case Kind::Mul: return fmul(bind_first_node(n->a, value), bind_first_node(n->b, value));
        case Kind::Div: return fdiv(bind_first_node(n->a, value), bind_first_node(n->b, value));
        default: return make(n->kind, bind_first_node(n->a, value));
    }
}

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// Precedence levels: + - (1), * / (2), unary - (3), ^ (4), atoms (5).
void print_node(const FunExpr::Node* n, int parent_prec, std::string& out) {
    switch (n->kind) {
        case Kind::Constant: {
            const Complex v = n->value;
            if (v.imag() == 0.0 && v.real() >= 0.0) {
                out += format_double(v.real());
            } else if (v.imag() == 0.0) {
                out += "(" + format_double(v.real()) + ")";
            } else {
                out += "(" + format_double(v.real());
                out += v.imag() >= 0.0 ? " + " : " - ";
                out += format_double(std::abs(v.imag())) + "*i)";
            }
            return;
        }
        case Kind::Variable: out += "x" + std::to_string(n->var_index); return;
        case Kind::Add: case Kind::Sub: {
            const bool paren = parent_prec > 1;
            if (paren) out += "(";
            print_node(n->a.get(), 1, out);
            out += n->kind == Kind::Add ? " + " : " - ";
            print_node(n->b.get(), 2, out);
            if (paren) out += ")";
            return;
        }
        case Kind::Mul: case Kind::Div: {
            const bool paren = parent_prec > 2;
            if (paren) out += "(";
            print_node(n->a.get(), 2, out);
            out += n->kind == Kind::Mul ? "*" : "/";
            print_node(n->b.get(), 3, out);
            if (paren) out += ")";
            return;
        }
        case Kind::Neg: {
            const bool paren = parent_prec > 3;
            if (paren) out += "(";
            out += "-";
            print_node(n->a.get(), 3, out);
            if (paren) out += ")";
            return;
        }
        case Kind::IntPow: {
            print_node(n->a.get(), 5, out);
            out += "^" + std::to_string(n->exponent);
            return;
        }
        case Kind::Exp: case Kind::Log: case Kind::Sin: case Kind::Cos: case Kind::Sqrt: {
            out += kind_name(n->kind);
            out += "(";
            print_node(n->a.get(), 0, out);
            out += ")";
            return;
        }
    }
}

class Parser {
public:
    Parser(const std::string& text, int arity) : text_(text), arity_(arity) {}

    NodePtr run() {
        NodePtr e = expr();
        skip_ws();
        if (pos_ != text_.size()) {
            throw SyntaxError("unexpected trailing input", pos_);
        }
        return e;
    }

private:
    const std::string& text_;
    int arity_;
    std::size_t pos_ = 0;

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }
    bool peek(char c) {
        skip_ws();
        return pos_ < text_.size() && text_[pos_] == c;
    }
    bool accept(char c) {
        if (peek(c)) {
            ++pos_;
            return true;
        }
        return false;
    }
    void expect(char c) {
        if (!accept(c)) {
            throw SyntaxError(std::string("expected '") + c + "'", pos_);
        }
    }

    NodePtr expr() {
        NodePtr lhs = term();
        for (;;) {
            if (accept('+')) {
                lhs = make(Kind::Add, std::move(lhs), term());
            } else if (accept('-')) {
                lhs = make(Kind::Sub, std::move(lhs), term());
            } else {
                return lhs;
            }
        }
    }

    NodePtr term() {
        NodePtr lhs = factor();
        for (;;) {
            if (accept('*')) {
                lhs = make(Kind::Mul, std::move(lhs), factor());
            } else if (accept('/')) {
                lhs = make(Kind::Div, std::move(lhs), factor());
            } else {
                return lhs;
            }
        }
    }

    NodePtr factor() {
        if (accept('-')) return make(Kind::Neg, factor());
        return power();
    }

    NodePtr power() {
        NodePtr base = atom();
        if (!accept('^')) return base;
        skip_ws();
        const std::size_t start = pos_;
        if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            throw SyntaxError("exponent must be a nonnegative integer literal", pos_);
        }
        long k = 0;
        while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
            k = k * 10 + (text_[pos_] - '0');
            if (k > 1'000'000) throw SyntaxError("exponent too large", start);
            ++pos_;
        }
        if (pos_ < text_.size() && (text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E')) {
            throw SyntaxError("exponent must be a nonnegative integer literal", start);
        }
        if (peek('^')) {
            throw SyntaxError("chained '^' is not supported; parenthesize or fold the exponent",
                              pos_);
        }
        return int_pow(std::move(base), static_cast<int>(k));
    }

    NodePtr atom() {
        skip_ws();
        if (pos_ >= text_.size()) throw SyntaxError("unexpected end of input", pos_);
        const char c = text_[pos_];
        if (c == '(') {
            ++pos_;
            NodePtr e = expr();
            expect(')');
            return e;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
            return number();
        }
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            return identifier();
        }
        throw SyntaxError(std::string("unexpected character '") + c + "'", pos_);
    }

    NodePtr number() {
        const char* begin = text_.c_str() + pos_;
        char* end = nullptr;
        const double v = std::strtod(begin, &end);
        if (end == begin) throw SyntaxError("malformed number", pos_);
        pos_ += static_cast<std::size_t>(end - begin);
        return constant(v);
    }

    NodePtr identifier() {
        const std::size_t start = pos_;
        while (pos_ < text_.size() &&
               (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
            ++pos_;
        }
        const std::string name = text_.substr(start, pos_ - start);
        if (name == "i") return constant(Complex(0.0, 1.0));
        if (name == "x") return var_checked(1, start);
        if (name == "y") return var_checked(2, start);
        if (name.size() == 2 && name[0] == 'x' && name[1] >= '1' && name[1] <= '8') {
            return var_checked(name[1] - '0', start);
        }
        static const std::pair<const char*, Kind> funcs[] = {
            {"exp", Kind::Exp}, {"log", Kind::Log}, {"sin", Kind::Sin},
            {"cos", Kind::Cos}, {"sqrt", Kind::Sqrt}};
        for (const auto& [fname, kind] : funcs) {
            if (name == fname) {
                expect('(');
                NodePtr arg = expr();
                expect(')');
                return make(kind, std::move(arg));
            }
        }
        throw SyntaxError("unknown identifier '" + name + "'", start);
    }

    NodePtr var_checked(int idx, std::size_t at) {
        if (idx > arity_) {
            throw SyntaxError("variable x" + std::to_string(idx) + " exceeds arity " +
                                  std::to_string(arity_),
                              at);
        }
        return variable(idx);
    }
};

}  // namespace

Complex FunExpr::eval(std::span<const Complex> point) const {
    if (static_cast<int>(point.size()) != arity_) {
        throw DimensionError("FunExpr::eval: point size does not match arity");
    }
    const Complex v = eval_node(root_.get(), point);
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
        throw EvalDomainError("non-finite value", "result");
    }
    return v;
}

Complex FunExpr::eval1(Complex x) const {
    const Complex pt[1] = {x};
    return eval(pt);
}

Complex FunExpr::eval2(Complex x, Complex y) const {
    const Complex pt[2] = {x, y};
    return eval(pt);
}

FunExpr::Probe FunExpr::probe_eval(std::span<const Complex> point) const {
    Probe p;
    p.ok = probe_node(root_.get(), point, p.value, p.cut_distance);
    if (p.ok && (!std::isfinite(p.value.real()) || !std::isfinite(p.value.imag()))) p.ok = false;
    return p;
}

FunExpr FunExpr::diff(int var) const {
    if (var < 1 || var > arity_) throw DimensionError("diff: variable index out of range");
    return FunExpr(diff_node(root_, var), arity_);
}

std::string FunExpr::to_string() const {
    std::string out;
    print_node(root_.get(), 0, out);
    return out;
}

FunExpr FunExpr::bind_first(Complex value) const {
    if (arity_ < 2) throw DimensionError("bind_first: arity must be at least 2");
    return FunExpr(bind_first_node(root_, value), arity_ - 1);
}

FunExpr parse(const std::string& text, int arity) {
    if (arity < 1 || arity > 8) throw DimensionError("parse: arity must be in [1, 8]");
    Parser p(text, arity);
    return FunExpr(p.run(), arity);
}

Complex DividedDifferenceExpr::eval(Complex x, Complex y) const {
    if (std::abs(x - y) > switch_threshold * (1.0 + std::abs(x) + std::abs(y))) {
        return (base.eval1(x) - base.eval1(y)) / (x - y);
    }
    return derivative.eval1(0.5 * (x + y));
}

FunExpr::Probe DividedDifferenceExpr::probe_eval(Complex x, Complex y) const {
    FunExpr::Probe out;
    if (std::abs(x - y) > switch_threshold * (1.0 + std::abs(x) + std::abs(y))) {
        const Complex ptx[1] = {x}, pty[1] = {y};
        const auto px = base.probe_eval(ptx);
        const auto py = base.probe_eval(pty);
        out.ok = px.ok && py.ok;
        out.cut_distance = std::min(px.cut_distance, py.cut_distance);
        if (out.ok) out.value = (px.value - py.value) / (x - y);
    } else {
        const Complex mid[1] = {0.5 * (x + y)};
        out = derivative.probe_eval(mid);
    }
    if (out.ok && (!std::isfinite(out.value.real()) || !std::isfinite(out.value.imag()))) {
        out.ok = false;
    }
    return out;
}

DividedDifferenceExpr divided_difference(const FunExpr& f) {
    if (f.arity() != 1) throw DimensionError("divided_difference: base must be univariate");
    return DividedDifferenceExpr{f, f.diff(1), 1e-6};
}

MatrixFunExpr::MatrixFunExpr(Eigen::Index rows, Eigen::Index cols, std::vector<FunExpr> entries)
    : rows_(rows), cols_(cols), entries_(std::move(entries)) {
    if (rows_ <= 0 || cols_ <= 0 ||
        static_cast<Eigen::Index>(entries_.size()) != rows_ * cols_) {
        throw DimensionError("MatrixFunExpr: entries must fill rows*cols");
    }
    arity_ = entries_[0].arity();
    for (const auto& e : entries_) {
        if (e.arity() != arity_) {
            throw DimensionError("MatrixFunExpr: all entries must share one arity");
        }
    }
}

ComplexMatrix MatrixFunExpr::eval(std::span<const Complex> point) const {
    ComplexMatrix m(rows_, cols_);
    for (Eigen::Index i = 0; i < rows_; ++i)
        for (Eigen::Index j = 0; j < cols_; ++j) m(i, j) = at(i, j).eval(point);
    return m;
}

namespace {

// Probe points: the contour itself plus two inward-shrunk copies.
constexpr double kProbeScales[3] = {1.0, 2.0 / 3.0, 1.0 / 3.0};

template <typename ProbeFn>
bool run_probe(std::span<const fieldvals::Contour> contours, int n_probe, ProbeFn&& probe_at) {
    const int d = static_cast<int>(contours.size());
    std::vector<Complex> pt(d);
    for (double scale : kProbeScales) {
        std::vector<int> idx(d, 0);
        for (;;) {
            for (int v = 0; v < d; ++v) {
                const double t = 2.0 * std::numbers::pi * idx[v] / n_probe;
                const Complex on = contours[v].point(t);
                pt[v] = contours[v].center + scale * (on - contours[v].center);
            }
            if (!probe_at(pt)) return false;
            int v = 0;
            while (v < d && ++idx[v] == n_probe) {
                idx[v] = 0;
                ++v;
            }
            if (v == d) break;
        }
    }
    return true;
}

bool probe_ok(const FunExpr::Probe& p, double cap) {
    return p.ok && std::abs(p.value) <= cap && p.cut_distance > 1e-8;
}

}  // namespace

bool analyticity_probe(const FunExpr& f, std::span<const fieldvals::Contour> contours,
                       int n_probe, double cap) {
    if (static_cast<int>(contours.size()) != f.arity()) {
        throw DimensionError("analyticity_probe: contour count must equal arity");
    }
    return run_probe(contours, n_probe, [&](std::span<const Complex> pt) {
        return probe_ok(f.probe_eval(pt), cap);
    });
}

bool analyticity_probe(const DividedDifferenceExpr& dd, const fieldvals::Contour& ga,
                       const fieldvals::Contour& gb, int n_probe, double cap) {
    const fieldvals::Contour cs[2] = {ga, gb};
    return run_probe(cs, n_probe, [&](std::span<const Complex> pt) {
        return probe_ok(dd.probe_eval(pt[0], pt[1]), cap);
    });
}

bool analyticity_probe(const MatrixFunExpr& f, std::span<const fieldvals::Contour> contours,
                       int n_probe, double cap) {
    if (static_cast<int>(contours.size()) != f.arity()) {
        throw DimensionError("analyticity_probe: contour count must equal arity");
    }
    return run_probe(contours, n_probe, [&](std::span<const Complex> pt) {
        for (Eigen::Index i = 0; i < f.rows(); ++i) {
            for (Eigen::Index j = 0; j < f.cols(); ++j) {
                if (!probe_ok(f.at(i, j).probe_eval(pt), cap)) return false;
            }
        }
        return true;
    });
}

}  // namespace bivarfun::funexpr
