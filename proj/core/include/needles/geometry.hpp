#pragma once

#include <array>
#include <utility>

namespace needles {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend constexpr Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend constexpr Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend constexpr Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend constexpr bool operator==(Vec2, Vec2) = default;
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
double norm(Vec2 a);

/// Rotation of `v` by angle `angle` (counterclockwise).
Vec2 rotate(Vec2 v, double angle);

/// Reduces an angle to [0, pi).
double reduce_angle(double theta);

/// Periodic box [0, Lx) x [0, Ly).
class Torus2 {
public:
    Torus2() = default;
    Torus2(double lx, double ly);

    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double area() const { return lx_ * ly_; }

    /// Wraps a point into [0, Lx) x [0, Ly).
    Vec2 wrap(Vec2 p) const;
    /// Minimum-image representative of `d`, components in [-L/2, L/2).
    Vec2 minimum_image(Vec2 d) const;

private:
    double lx_ = 3.141592653589793;
    double ly_ = 3.141592653589793;
};

/// One needle: centre, orientation (reduced to [0, pi) at construction) and length.
class NeedleConfig {
public:
    NeedleConfig(Vec2 centre, double theta, double eps);

    Vec2 centre() const { return centre_; }
    double theta() const { return theta_; }
    double eps() const { return eps_; }

private:
    Vec2 centre_;
    double theta_;
    double eps_;
};

/// Endpoints x -/+ (eps/2)(cos theta, sin theta). Not torus-wrapped.
std::pair<Vec2, Vec2> needle_endpoints(const NeedleConfig& c);

/// Default grazing tolerance (distance) relative to the needle length.
inline constexpr double kGrazingTolerance = 1e-12;

/// Closed-segment intersection in the plane. Contacts within `tol` (a
/// distance) count as intersections.
bool segments_intersect(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2, double tol);

/// True iff the two needles' closed segments intersect under the
/// minimum-image convention. Both needles must share eps, and eps must be
/// below half the box size. Grazing contact counts as overlap.
bool needles_overlap(const NeedleConfig& c1, const NeedleConfig& c2, const Torus2& dom,
                     double rel_tol = kGrazingTolerance);

/// Overlap predicate for needles whose centre offset is already known
/// (second centre minus first centre, unwrapped).
bool needles_overlap_offset(Vec2 offset, double theta1, double theta2, double eps,
                            double rel_tol = kGrazingTolerance);

/// Excluded region of a needle for a fixed relative angle.
struct Rhombus {
    std::array<Vec2, 4> vertices;  // A, B, C, D
    bool degenerate = false;       // relative angle 0 (or pi): a segment of length 2 eps
};

/// Vertices x_A..x_D of the set of centres of a second needle, at relative
/// angle `theta_rel`, that overlap needle `c1`.
Rhombus excluded_rhombus(const NeedleConfig& c1, double theta_rel);

/// Non-negative shoelace area.
double rhombus_area(const Rhombus& r);

/// Closed point-in-convex-quadrilateral test with a distance tolerance. For a
/// degenerate rhombus this tests membership of the collapsed segment.
bool rhombus_contains(const Rhombus& r, Vec2 p, double tol = 0.0);

}  // namespace needles
