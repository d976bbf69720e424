#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tricons {

constexpr double kPi = 3.14159265358979323846;

struct MeasureError : std::runtime_error {
    explicit MeasureError(const std::string& what) : std::runtime_error(what) {}
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
    friend Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
    friend Vec2 operator*(double s, Vec2 a) { return {s * a.x, s * a.y}; }
    friend Vec2 operator*(Vec2 a, double s) { return {s * a.x, s * a.y}; }
    friend Vec2 operator/(Vec2 a, double s) { return {a.x / s, a.y / s}; }
    friend bool operator==(Vec2 a, Vec2 b) { return a.x == b.x && a.y == b.y; }
};

inline double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Vec2 a) { return std::hypot(a.x, a.y); }
inline double dist(Vec2 a, Vec2 b) { return norm(a - b); }
inline Vec2 perp(Vec2 a) { return {-a.y, a.x}; }
inline Vec2 unit(Vec2 a) {
    double n = norm(a);
    return {a.x / n, a.y / n};
}
inline Vec2 midpoint(Vec2 a, Vec2 b) { return {(a.x + b.x) / 2.0, (a.y + b.y) / 2.0}; }

/// Undirected angle of the corner p->q, p->r, in (0, pi) for non-degenerate corners.
inline double corner_angle(Vec2 p, Vec2 q, Vec2 r) {
    Vec2 u = q - p, v = r - p;
    return std::atan2(std::fabs(cross(u, v)), dot(u, v));
}

/// Line in normalized implicit form: n . p = d with |n| = 1 and the first
/// nonzero component of n positive.
struct Line {
    Vec2 n;       // unit normal, canonical sign
    double d = 0; // offset, n . p = d for p on the line

    Vec2 direction() const { return {-n.y, n.x}; }
    /// Point of the line closest to the origin.
    Vec2 base_point() const { return d * n; }
};

inline Line make_line_normal_offset(Vec2 n, double d) {
    double len = norm(n);
    if (!(len > 0.0)) throw MeasureError("line with zero normal");
    Vec2 u = n / len;
    double off = d / len;
    if (u.x < 0.0 || (u.x == 0.0 && u.y < 0.0)) {
        u = {-u.x, -u.y};
        off = -off;
    }
    return Line{u, off};
}

inline Line line_through(Vec2 p, Vec2 q) {
    Vec2 dir = q - p;
    return make_line_normal_offset(perp(dir), dot(perp(dir), p));
}

inline Line line_point_normal(Vec2 p, Vec2 n) { return make_line_normal_offset(n, dot(n, p)); }

inline Line line_point_direction(Vec2 p, Vec2 dir) { return line_point_normal(p, perp(dir)); }

inline double signed_dist(Vec2 p, const Line& l) { return dot(l.n, p) - l.d; }
inline double point_line_dist(Vec2 p, const Line& l) { return std::fabs(signed_dist(p, l)); }

inline Vec2 project_onto(Vec2 p, const Line& l) { return p - signed_dist(p, l) * l.n; }

struct Circle {
    Vec2 center;
    double r = 0;
};

inline double point_circle_residual(Vec2 p, const Circle& c) {
    return std::fabs(dist(p, c.center) - c.r);
}

/// |sin| of the angle between two lines; zero iff parallel.
inline double parallel_residual(const Line& l1, const Line& l2) {
    return std::fabs(cross(l1.n, l2.n));
}

/// |cos| of the angle between two lines; zero iff perpendicular.
inline double perp_residual(const Line& l1, const Line& l2) {
    return std::fabs(dot(l1.n, l2.n));
}

/// Angle between the canonical normals, in [0, pi). A pair of lines only
/// determines this value up to the reflection t -> pi - t, so comparisons
/// should use angle_mod_pi_dist.
inline double angle_between_lines(const Line& l1, const Line& l2) {
    double t = std::atan2(cross(l1.n, l2.n), dot(l1.n, l2.n));
    if (t < 0) t += kPi;
    if (t >= kPi) t -= kPi;
    return t;
}

/// Value folded into [0, pi).
inline double fold_mod_pi(double t) {
    t = std::fmod(t, kPi);
    if (t < 0) t += kPi;
    return t;
}

/// Distance between two line-angle values modulo pi and modulo the
/// orientation reflection (so fold(x) == fold(pi - x)).
inline double angle_mod_pi_dist(double x, double y) {
    double dplus = fold_mod_pi(x - y);
    dplus = std::min(dplus, kPi - dplus);
    double dminus = fold_mod_pi(x + y);
    dminus = std::min(dminus, kPi - dminus);
    return std::min(dplus, dminus);
}

/// Signed ratio XY/YZ for collinear points (projection-based; callers are
/// expected to have checked collinearity separately).
inline double collinear_ratio(Vec2 x, Vec2 y, Vec2 z) {
    Vec2 den = z - y;
    double den2 = dot(den, den);
    if (den2 == 0.0) throw MeasureError("collinear ratio with coincident denominator endpoints");
    return dot(y - x, den) / den2;
}

/// Signed ratio XY/ZW for parallel vectors.
inline double vector_ratio(Vec2 x, Vec2 y, Vec2 z, Vec2 w) {
    Vec2 den = w - z;
    double den2 = dot(den, den);
    if (den2 == 0.0) throw MeasureError("vector ratio with coincident denominator endpoints");
    return dot(y - x, den) / den2;
}

/// Cross-ratio (X,Y;Z,W) of four collinear points:
/// ((Z-X)/(Z-Y)) / ((W-X)/(W-Y)) on signed abscissas along the common line.
inline double cross_ratio(Vec2 x, Vec2 y, Vec2 z, Vec2 w) {
    Vec2 dir = y - x;
    double n2 = dot(dir, dir);
    if (n2 == 0.0) throw MeasureError("cross ratio with coincident base points");
    Vec2 u = dir / std::sqrt(n2);
    double tx = dot(x, u), ty = dot(y, u), tz = dot(z, u), tw = dot(w, u);
    double num = (tz - tx) * (tw - ty);
    double den = (tz - ty) * (tw - tx);
    if (den == 0.0) throw MeasureError("cross ratio with coincident points");
    return num / den;
}

inline std::optional<Vec2> intersect_lines(const Line& l1, const Line& l2) {
    double det = cross(l1.n, l2.n);
    if (det == 0.0) return std::nullopt;
    // Solve n1.p = d1, n2.p = d2.
    double x = (l1.d * l2.n.y - l2.d * l1.n.y) / det;
    double y = (l1.n.x * l2.d - l2.n.x * l1.d) / det;
    return Vec2{x, y};
}

inline std::vector<Vec2> intersect_line_circle(const Line& l, const Circle& c) {
    double h = signed_dist(c.center, l);
    double disc = c.r * c.r - h * h;
    std::vector<Vec2> out;
    if (disc < 0) return out;
    Vec2 foot = c.center - h * l.n;
    double t = std::sqrt(std::max(0.0, disc));
    Vec2 dir = l.direction();
    out.push_back(foot + t * dir);
    if (t > 0) out.push_back(foot - t * dir);
    return out;
}

inline std::vector<Vec2> intersect_circles(const Circle& c1, const Circle& c2) {
    Vec2 delta = c2.center - c1.center;
    double d2 = dot(delta, delta);
    std::vector<Vec2> out;
    if (d2 == 0.0) return out;
    double d = std::sqrt(d2);
    double u = (d2 + c1.r * c1.r - c2.r * c2.r) / (2 * d);
    double disc = c1.r * c1.r - u * u;
    if (disc < 0) return out;
    Vec2 axis = delta / d;
    Vec2 foot = c1.center + u * axis;
    double t = std::sqrt(std::max(0.0, disc));
    out.push_back(foot + t * perp(axis));
    if (t > 0) out.push_back(foot - t * perp(axis));
    return out;
}

/// Circumcenter of three non-collinear points.
inline Vec2 circumcenter(Vec2 p, Vec2 q, Vec2 r) {
    Vec2 pq = q - p, pr = r - p;
    double det = 2.0 * cross(pq, pr);
    if (det == 0.0) throw MeasureError("circumcenter of collinear points");
    double q2 = dot(pq, pq), r2 = dot(pr, pr);
    Vec2 rel{(pr.y * q2 - pq.y * r2) / det, (pq.x * r2 - pr.x * q2) / det};
    return p + rel;
}

/// Tangent lines from an outside (or on-circle) point to a circle.
inline std::vector<Line> tangents_from_point(Vec2 p, const Circle& c) {
    std::vector<Line> out;
    double d = dist(p, c.center);
    if (d < c.r) return out;
    if (d == 0.0) return out;
    // Angle between the center ray and the touch-point rays.
    double cosv = c.r / d;
    double sinv = std::sqrt(std::max(0.0, 1.0 - cosv * cosv));
    Vec2 u = (p - c.center) / d;
    Vec2 t1 = c.center + c.r * Vec2{u.x * cosv - u.y * sinv, u.x * sinv + u.y * cosv};
    Vec2 t2 = c.center + c.r * Vec2{u.x * cosv + u.y * sinv, -u.x * sinv + u.y * cosv};
    if (dist(p, t1) == 0.0) {
        // p on the circle: the unique tangent at p.
        out.push_back(line_point_normal(p, u));
        return out;
    }
    out.push_back(line_through(p, t1));
    if (dist(t1, t2) > 0.0) out.push_back(line_through(p, t2));
    return out;
}

} // namespace tricons
