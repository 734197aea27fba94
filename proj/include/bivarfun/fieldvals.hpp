#pragma once

#include <functional>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "bivarfun/config.hpp"
#include "bivarfun/linalg.hpp"

namespace bivarfun::fieldvals {

/// Sampled outer description of the numerical range W(A): support values
/// h(theta) = lambda_max((e^{i theta} A + e^{-i theta} A^*)/2) on a uniform
/// angle grid, together with the Rayleigh points q(theta) = v^* A v of the
/// corresponding top eigenvectors. The q points lie on the boundary of W(A);
/// the halfplane intersection of the support values encloses it.
struct NumericalRangeApprox {
    std::vector<double> angles;
    std::vector<double> support;
    std::vector<Complex> boundary;
};

/// Positively oriented circle or ellipse. `rotation` is the angle of the
/// major axis; circles keep semi_major == semi_minor and rotation 0.
struct Contour {
    enum class Kind { Circle, Ellipse };
    Kind kind = Kind::Circle;
    Complex center{0.0, 0.0};
    double semi_major = 1.0;
    double semi_minor = 1.0;
    double rotation = 0.0;

    Complex point(double t) const;
    Complex derivative(double t) const;
    /// Strict interior test; with clearance > 0 additionally requires
    /// distance to the curve >= clearance.
    bool contains(Complex z, double clearance = 0.0) const;
    /// Distance from z (inside or outside) to the contour curve.
    double boundary_distance(Complex z) const;
    double circumference() const;
};

NumericalRangeApprox numrange(const ComplexMatrix& a, int n_angles = 360);

/// Support value / boundary point at a single angle (used by local refinement).
double support_at(const ComplexMatrix& a, double theta);
Complex boundary_point_at(const ComplexMatrix& a, double theta);

/// True iff Re(e^{i theta_k} z) <= h(theta_k) + slack for every sampled angle.
bool contains(const NumericalRangeApprox& nr, Complex z, double slack);

double boundary_diameter(const NumericalRangeApprox& nr);

/// margin_scale * (1 + boundary diameter).
double default_margin(const NumericalRangeApprox& nr, const Config& cfg = {});

/// Two-pass ellipse fit (centroid + principal axes + max projections),
/// inflated so every sampled boundary point keeps distance >= margin from
/// the curve. Degenerate ranges (segments, points) yield margin-thick
/// ellipses or circles.
Contour enclosing_contour(const NumericalRangeApprox& nr, double margin);

/// Counterclockwise convex hull (monotone chain); collinear points dropped.
/// Returns 1 or 2 points for degenerate inputs.
std::vector<Complex> convex_hull(std::vector<Complex> pts);

/// CSV rows "theta,support,re_boundary,im_boundary".
void write_csv(const NumericalRangeApprox& nr, std::ostream& out);

/// Closed polyline through the convex hull of the sampled boundary,
/// parametrized by arclength. All its points lie in the closed numerical
/// range, so maxima sampled on it are certified lower bounds of suprema
/// over W(A).
class BoundarySampler {
public:
    explicit BoundarySampler(const NumericalRangeApprox& nr);

    bool degenerate_point() const { return verts_.size() == 1; }
    double length() const { return total_len_; }
    Complex at(double s) const;
    /// `count` arclength-uniform (s, point) pairs; a single pair for a
    /// point-like range.
    std::vector<std::pair<double, Complex>> uniform(int count) const;

    /// Hull vertices with their arclength parameters. These are the extreme
    /// points of the sampled range; sup-sampling must include them because
    /// uniform samples can land far from a vertex on long edges.
    std::vector<std::pair<double, Complex>> vertices() const;

private:
    std::vector<Complex> verts_;
    std::vector<double> cumlen_;
    double total_len_ = 0.0;
};

/// Sampled supremum of a magnitude function over the product of sampled
/// range boundaries: tensor grid of arclength-uniform boundary samples plus
/// coordinate-wise golden-section refinement around the grid arg-max. The
/// result is a certified lower bound of the true supremum over the product
/// of closed numerical ranges, and it never decreases when samples_per_range
/// grows through doubling.
double sup_over_ranges(const std::function<double(std::span<const Complex>)>& magnitude,
                       std::span<const NumericalRangeApprox> ranges, int samples_per_range,
                       int refine_passes = 2);

}  // namespace bivarfun::fieldvals
