#include "needles/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "needles/error.hpp"

namespace needles {

double norm(Vec2 a) { return std::hypot(a.x, a.y); }

Vec2 rotate(Vec2 v, double angle) {
    const double c = std::cos(angle);
    const double s = std::sin(angle);
    return {c * v.x - s * v.y, s * v.x + c * v.y};
}

double reduce_angle(double theta) {
    constexpr double pi = std::numbers::pi;
    double r = std::fmod(theta, pi);
    if (r < 0.0) r += pi;
    // fmod of a tiny negative value can round up to exactly pi
    if (r >= pi) r = 0.0;
    return r;
}

Torus2::Torus2(double lx, double ly) : lx_(lx), ly_(ly) {
    detail::require(lx > 0.0 && ly > 0.0 && std::isfinite(lx) && std::isfinite(ly),
                    "Torus2: box lengths must be positive and finite");
}

namespace {

double wrap_coord(double v, double l) {
    double r = std::fmod(v, l);
    if (r < 0.0) r += l;
    if (r >= l) r = 0.0;
    return r;
}

double min_image_coord(double d, double l) {
    double r = d - l * std::floor(d / l + 0.5);
    // floor(... + 0.5) puts r in [-l/2, l/2); guard the rounding edge
    if (r >= 0.5 * l) r -= l;
    if (r < -0.5 * l) r += l;
    return r;
}

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b) {
    const Vec2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return norm(p - a);
    const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
    return norm(p - (a + t * ab));
}

}  // namespace

Vec2 Torus2::wrap(Vec2 p) const { return {wrap_coord(p.x, lx_), wrap_coord(p.y, ly_)}; }

Vec2 Torus2::minimum_image(Vec2 d) const {
    return {min_image_coord(d.x, lx_), min_image_coord(d.y, ly_)};
}

NeedleConfig::NeedleConfig(Vec2 centre, double theta, double eps)
    : centre_(centre), theta_(reduce_angle(theta)), eps_(eps) {
    detail::require(eps > 0.0 && std::isfinite(eps), "NeedleConfig: eps must be positive");
    detail::require(std::isfinite(centre.x) && std::isfinite(centre.y) && std::isfinite(theta),
                    "NeedleConfig: non-finite state");
}

std::pair<Vec2, Vec2> needle_endpoints(const NeedleConfig& c) {
    const Vec2 half = (0.5 * c.eps()) * Vec2{std::cos(c.theta()), std::sin(c.theta())};
    return {c.centre() - half, c.centre() + half};
}

bool segments_intersect(Vec2 p1, Vec2 q1, Vec2 p2, Vec2 q2, double tol) {
    const Vec2 d1 = q1 - p1;
    const Vec2 d2 = q2 - p2;
    const double o1 = cross(d1, p2 - p1);
    const double o2 = cross(d1, q2 - p1);
    const double o3 = cross(d2, p1 - p2);
    const double o4 = cross(d2, q1 - p2);
    const bool straddle12 = (o1 > 0.0 && o2 < 0.0) || (o1 < 0.0 && o2 > 0.0);
    const bool straddle34 = (o3 > 0.0 && o4 < 0.0) || (o3 < 0.0 && o4 > 0.0);
    if (straddle12 && straddle34) return true;
    // Touching, collinear overlap or a near miss: decide by the gap.
    const double gap = std::min({point_segment_distance(p1, p2, q2), point_segment_distance(q1, p2, q2),
                                 point_segment_distance(p2, p1, q1), point_segment_distance(q2, p1, q1)});
    return gap <= tol;
}

bool needles_overlap_offset(Vec2 offset, double theta1, double theta2, double eps, double rel_tol) {
    const double tol = rel_tol * eps;
    if (dot(offset, offset) > (eps + tol) * (eps + tol)) return false;
    const Vec2 h1 = (0.5 * eps) * Vec2{std::cos(theta1), std::sin(theta1)};
    const Vec2 h2 = (0.5 * eps) * Vec2{std::cos(theta2), std::sin(theta2)};
    return segments_intersect(Vec2{} - h1, h1, offset - h2, offset + h2, tol);
}

bool needles_overlap(const NeedleConfig& c1, const NeedleConfig& c2, const Torus2& dom, double rel_tol) {
    const Vec2 offset = dom.minimum_image(c2.centre() - c1.centre());
    return needles_overlap_offset(offset, c1.theta(), c2.theta(), c1.eps(), rel_tol);
}

Rhombus excluded_rhombus(const NeedleConfig& c1, double theta_rel) {
    const double rel = reduce_angle(theta_rel);
    const double c = std::cos(rel);
    const double s = std::sin(rel);
    const double h = 0.5 * c1.eps();
    auto vertex = [&](double u, double v) { return c1.centre() + rotate(Vec2{h * u, h * v}, c1.theta()); };
    Rhombus r;
    r.vertices = {vertex(-1.0 + c, s), vertex(1.0 + c, s), vertex(1.0 - c, -s), vertex(-1.0 - c, -s)};
    r.degenerate = (rel == 0.0);
    return r;
}

double rhombus_area(const Rhombus& r) {
    double twice = 0.0;
    for (std::size_t i = 0; i < 4; ++i) twice += cross(r.vertices[i], r.vertices[(i + 1) % 4]);
    return 0.5 * std::abs(twice);
}

bool rhombus_contains(const Rhombus& r, Vec2 p, double tol) {
    const auto& v = r.vertices;
    if (r.degenerate) return point_segment_distance(p, v[3], v[1]) <= tol;
    // Vertices run clockwise, so the interior lies to the right of every edge.
    for (std::size_t i = 0; i < 4; ++i) {
        const Vec2 a = v[i];
        const Vec2 edge = v[(i + 1) % 4] - a;
        if (cross(edge, p - a) > tol * norm(edge)) return false;
    }
    return true;
}

}  // namespace needles
