#include "bivarfun/fieldvals.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include <Eigen/Eigenvalues>

namespace bivarfun::fieldvals {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Hermitian part of e^{i theta} A.
ComplexMatrix rotated_hermitian_part(const ComplexMatrix& a, double theta) {
    const ComplexMatrix r = std::polar(1.0, theta) * a;
    return 0.5 * (r + r.adjoint());
}

// Golden-section maximization of a smooth 1-D function on [lo, hi].
template <typename F>
double golden_max(F&& f, double lo, double hi, int iters = 60) {
    constexpr double phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    for (int i = 0; i < iters && (b - a) > 1e-14 * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = f(x1);
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

Complex Contour::point(double t) const {
    const Complex local(semi_major * std::cos(t), semi_minor * std::sin(t));
    return center + std::polar(1.0, rotation) * local;
}

Complex Contour::derivative(double t) const {
    const Complex local(-semi_major * std::sin(t), semi_minor * std::cos(t));
    return std::polar(1.0, rotation) * local;
}

bool Contour::contains(Complex z, double clearance) const {
    const Complex w = std::polar(1.0, -rotation) * (z - center);
    const double u = w.real() / semi_major;
    const double v = w.imag() / semi_minor;
    if (u * u + v * v >= 1.0) return false;
    if (clearance > 0.0) return boundary_distance(z) >= clearance;
    return true;
}

double Contour::boundary_distance(Complex z) const {
    const Complex w = std::polar(1.0, -rotation) * (z - center);
    if (kind == Kind::Circle || semi_major == semi_minor) {
        return std::abs(semi_major - std::abs(w));
    }
    const double u = w.real(), v = w.imag();
    auto neg_dist2 = [&](double t) {
        const double du = semi_major * std::cos(t) - u;
        const double dv = semi_minor * std::sin(t) - v;
        return -(du * du + dv * dv);
    };
    // Coarse scan, then local refinement around the best parameter.
    const int scan = 256;
    double best_t = 0.0, best = neg_dist2(0.0);
    for (int i = 1; i < scan; ++i) {
        const double t = kTwoPi * i / scan;
        const double val = neg_dist2(t);
        if (val > best) {
            best = val;
            best_t = t;
        }
    }
    const double dt = kTwoPi / scan;
    const double t = golden_max(neg_dist2, best_t - dt, best_t + dt);
    return std::sqrt(-neg_dist2(t));
}

double Contour::circumference() const {
    const double a = semi_major, b = semi_minor;
    // Ramanujan's approximation; exact for circles.
    return std::numbers::pi * (3.0 * (a + b) - std::sqrt((3.0 * a + b) * (a + 3.0 * b)));
}

NumericalRangeApprox numrange(const ComplexMatrix& a, int n_angles) {
    if (a.rows() != a.cols()) throw DimensionError("numrange: matrix must be square");
    if (n_angles < 8) throw DimensionError("numrange: need at least 8 angles");
    NumericalRangeApprox nr;
    nr.angles.reserve(n_angles);
    nr.support.reserve(n_angles);
    nr.boundary.reserve(n_angles);
    for (int k = 0; k < n_angles; ++k) {
        const double theta = kTwoPi * k / n_angles;
        Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rotated_hermitian_part(a, theta));
        if (es.info() != Eigen::Success) {
            throw EigenSolverError("numrange: Hermitian eigensolver failed");
        }
        const Eigen::Index top = es.eigenvalues().size() - 1;
        const ComplexVector v = es.eigenvectors().col(top);
        nr.angles.push_back(theta);
        nr.support.push_back(es.eigenvalues()(top));
        nr.boundary.push_back((v.adjoint() * a * v)(0, 0));
    }
    return nr;
}

double support_at(const ComplexMatrix& a, double theta) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rotated_hermitian_part(a, theta),
                                                    Eigen::EigenvaluesOnly);
    return es.eigenvalues()(es.eigenvalues().size() - 1);
}

Complex boundary_point_at(const ComplexMatrix& a, double theta) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(rotated_hermitian_part(a, theta));
    const ComplexVector v = es.eigenvectors().col(es.eigenvalues().size() - 1);
    return (v.adjoint() * a * v)(0, 0);
}

bool contains(const NumericalRangeApprox& nr, Complex z, double slack) {
    for (std::size_t k = 0; k < nr.angles.size(); ++k) {
        if ((std::polar(1.0, nr.angles[k]) * z).real() > nr.support[k] + slack) return false;
    }
    return true;
}

double boundary_diameter(const NumericalRangeApprox& nr) {
    const auto hull = convex_hull(nr.boundary);
    double d = 0.0;
    for (std::size_t i = 0; i < hull.size(); ++i) {
        for (std::size_t j = i + 1; j < hull.size(); ++j) {
            d = std::max(d, std::abs(hull[i] - hull[j]));
        }
    }
    return d;
}

double default_margin(const NumericalRangeApprox& nr, const Config& cfg) {
    return cfg.margin_scale * (1.0 + boundary_diameter(nr));
}

Contour enclosing_contour(const NumericalRangeApprox& nr, double margin) {
    if (margin <= 0.0) throw DimensionError("enclosing_contour: margin must be positive");
    const auto& pts = nr.boundary;
    Complex c(0, 0);
    for (const auto& p : pts) c += p;
    c /= static_cast<double>(pts.size());

    // Principal axis of the boundary cloud.
    double sxx = 0, syy = 0, sxy = 0;
    for (const auto& p : pts) {
        const double u = (p - c).real(), v = (p - c).imag();
        sxx += u * u;
        syy += v * v;
        sxy += u * v;
    }
    const double rot = 0.5 * std::atan2(2.0 * sxy, sxx - syy);

    double a0 = 0, b0 = 0;
    for (const auto& p : pts) {
        const Complex w = std::polar(1.0, -rot) * (p - c);
        a0 = std::max(a0, std::abs(w.real()));
        b0 = std::max(b0, std::abs(w.imag()));
    }

    Contour g;
    g.kind = Contour::Kind::Ellipse;
    g.center = c;
    g.rotation = rot;
    g.semi_major = a0 + margin;
    g.semi_minor = b0 + margin;

    // The axis inflation alone does not guarantee a Euclidean clearance of
    // `margin` for elongated clouds; grow until the nearest sampled point is
    // at least `margin` away from the curve.
    for (int pass = 0; pass < 64; ++pass) {
        double cl = std::numeric_limits<double>::infinity();
        for (const auto& p : pts) cl = std::min(cl, g.boundary_distance(p));
        if (cl >= margin * (1.0 - 1e-12)) break;
        const double grow = 1.05 * (margin - cl);
        g.semi_major += grow;
        g.semi_minor += grow;
    }

    if (g.semi_major < g.semi_minor) {
        std::swap(g.semi_major, g.semi_minor);
        g.rotation += std::numbers::pi / 2.0;
    }
    if (g.semi_major - g.semi_minor <= 1e-9 * g.semi_major) {
        g.kind = Contour::Kind::Circle;
        const double r = 0.5 * (g.semi_major + g.semi_minor);
        g.semi_major = g.semi_minor = r;
        g.rotation = 0.0;
    }
    return g;
}

std::vector<Complex> convex_hull(std::vector<Complex> pts) {
    if (pts.empty()) return pts;
    // Collapse numerically identical points so the chain stays stable.
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, std::abs(p));
    const double tol = 1e-13 * (1.0 + scale);

    std::sort(pts.begin(), pts.end(), [](Complex a, Complex b) {
        return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    std::vector<Complex> uniq;
    for (const auto& p : pts) {
        if (uniq.empty() || std::abs(p - uniq.back()) > tol) uniq.push_back(p);
    }
    if (uniq.size() <= 2) return uniq;

    auto cross = [](Complex o, Complex a, Complex b) {
        return (a.real() - o.real()) * (b.imag() - o.imag()) -
               (a.imag() - o.imag()) * (b.real() - o.real());
    };
    const double area_tol = tol * (1.0 + scale);

    std::vector<Complex> hull;
    // Lower chain.
    for (const auto& p : uniq) {
        while (hull.size() >= 2 && cross(hull[hull.size() - 2], hull.back(), p) <= area_tol) {
            hull.pop_back();
        }
        hull.push_back(p);
    }
    // Upper chain.
    const std::size_t lower_size = hull.size() + 1;
    for (auto it = uniq.rbegin() + 1; it != uniq.rend(); ++it) {
        while (hull.size() >= lower_size &&
               cross(hull[hull.size() - 2], hull.back(), *it) <= area_tol) {
            hull.pop_back();
        }
        hull.push_back(*it);
    }
    hull.pop_back();
    return hull;
}

void write_csv(const NumericalRangeApprox& nr, std::ostream& out) {
    out << "theta,support,re_boundary,im_boundary\n";
    char buf[160];
    for (std::size_t k = 0; k < nr.angles.size(); ++k) {
        std::snprintf(buf, sizeof(buf), "%.17g,%.17g,%.17g,%.17g\n", nr.angles[k],
                      nr.support[k], nr.boundary[k].real(), nr.boundary[k].imag());
        out << buf;
    }
}

BoundarySampler::BoundarySampler(const NumericalRangeApprox& nr) {
    verts_ = convex_hull(nr.boundary);
    if (verts_.empty()) throw DimensionError("BoundarySampler: empty boundary");
    if (verts_.size() == 1) {
        total_len_ = 0.0;
        return;
    }
    cumlen_.resize(verts_.size() + 1, 0.0);
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        const Complex next = verts_[(i + 1) % verts_.size()];
        cumlen_[i + 1] = cumlen_[i] + std::abs(next - verts_[i]);
    }
    total_len_ = cumlen_.back();
}

Complex BoundarySampler::at(double s) const {
    if (verts_.size() == 1 || total_len_ == 0.0) return verts_[0];
    s = std::fmod(s, total_len_);
    if (s < 0) s += total_len_;
    const auto it = std::upper_bound(cumlen_.begin(), cumlen_.end(), s);
    const std::size_t edge = std::min<std::size_t>(
        verts_.size() - 1, static_cast<std::size_t>(it - cumlen_.begin()) - 1);
    const Complex p0 = verts_[edge];
    const Complex p1 = verts_[(edge + 1) % verts_.size()];
    const double seg = cumlen_[edge + 1] - cumlen_[edge];
    const double t = seg > 0 ? (s - cumlen_[edge]) / seg : 0.0;
    return p0 + t * (p1 - p0);
}

std::vector<std::pair<double, Complex>> BoundarySampler::uniform(int count) const {
    std::vector<std::pair<double, Complex>> out;
    if (verts_.size() == 1 || total_len_ == 0.0) {
        out.emplace_back(0.0, verts_[0]);
        return out;
    }
    out.reserve(count);
    for (int i = 0; i < count; ++i) {
        const double s = total_len_ * i / count;
        out.emplace_back(s, at(s));
    }
    return out;
}

std::vector<std::pair<double, Complex>> BoundarySampler::vertices() const {
    std::vector<std::pair<double, Complex>> out;
    out.reserve(verts_.size());
    for (std::size_t i = 0; i < verts_.size(); ++i) {
        out.emplace_back(cumlen_.empty() ? 0.0 : cumlen_[i], verts_[i]);
    }
    return out;
}

double sup_over_ranges(const std::function<double(std::span<const Complex>)>& magnitude,
                       std::span<const NumericalRangeApprox> ranges, int samples_per_range,
                       int refine_passes) {
    const std::size_t d = ranges.size();
    std::vector<BoundarySampler> samplers;
    samplers.reserve(d);
    std::vector<std::vector<std::pair<double, Complex>>> grids;
    for (const auto& r : ranges) {
        samplers.emplace_back(r);
        grids.push_back(samplers.back().uniform(samples_per_range));
        // Coarse hulls (normal matrices) have long edges whose extreme
        // points the uniform grid can miss; dense hulls are already covered.
        const auto verts = samplers.back().vertices();
        if (static_cast<int>(verts.size()) <=
            std::max(64, samples_per_range / 4)) {
            grids.back().insert(grids.back().end(), verts.begin(), verts.end());
        }
    }

    std::vector<std::size_t> idx(d, 0);
    std::vector<Complex> pt(d);
    std::vector<double> best_s(d, 0.0);
    std::vector<Complex> best_pt(d);
    double best = -std::numeric_limits<double>::infinity();
    for (;;) {
        for (std::size_t v = 0; v < d; ++v) pt[v] = grids[v][idx[v]].second;
        const double val = magnitude(pt);
        if (val > best) {
            best = val;
            for (std::size_t v = 0; v < d; ++v) best_s[v] = grids[v][idx[v]].first;
            best_pt = pt;
        }
        std::size_t v = 0;
        while (v < d && ++idx[v] == grids[v].size()) {
            idx[v] = 0;
            ++v;
        }
        if (v == d) break;
    }

    // Local refinement: maximize along each boundary parameter in turn.
    for (int pass = 0; pass < refine_passes; ++pass) {
        for (std::size_t v = 0; v < d; ++v) {
            if (samplers[v].degenerate_point()) continue;
            const double bracket = samplers[v].length() / grids[v].size();
            std::vector<Complex> probe = best_pt;
            auto g = [&](double s) {
                probe[v] = samplers[v].at(s);
                return magnitude(probe);
            };
            const double s = golden_max(g, best_s[v] - bracket, best_s[v] + bracket, 80);
            const double val = g(s);
            if (val > best) {
                best = val;
                best_s[v] = s;
                best_pt[v] = samplers[v].at(s);
            }
        }
    }
    return best;
}

}  // namespace bivarfun::fieldvals
