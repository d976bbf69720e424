#pragma once

#include <cmath>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tricons/catalog.hpp"
#include "tricons/geometry.hpp"
#include "tricons/sampling.hpp"

namespace tricons {

struct InstantiationError : std::runtime_error {
    explicit InstantiationError(const std::string& what) : std::runtime_error(what) {}
};

/// Numeric realization of every catalog object on one concrete triangle.
struct Instantiation {
    std::vector<Vec2> points;
    std::vector<Line> lines;
    std::vector<Circle> circles;
    std::vector<double> angles; // radians, in (0, pi)
    double scale = 1.0;         // circumradius of the probe triangle

    Vec2 point(ObjectId id) const { return points.at(static_cast<size_t>(id.index)); }
    const Line& line(ObjectId id) const { return lines.at(static_cast<size_t>(id.index)); }
    const Circle& circle(ObjectId id) const { return circles.at(static_cast<size_t>(id.index)); }
    double angle(ObjectId id) const { return angles.at(static_cast<size_t>(id.index)); }
};

namespace detail {

struct TriangleFrame {
    Vec2 A, B, C;
    double la, lb, lc; // side lengths |BC|, |CA|, |AB|
    Vec2 O, I, H, G;
    Circle circum;

    explicit TriangleFrame(const TriangleInstance& t) : A(t.a), B(t.b), C(t.c) {
        la = dist(B, C);
        lb = dist(C, A);
        lc = dist(A, B);
        O = circumcenter(A, B, C);
        I = (la * A + lb * B + lc * C) / (la + lb + lc);
        H = A + B + C - 2.0 * O;
        G = (A + B + C) / 3.0;
        circum = Circle{O, dist(O, A)};
    }

    Vec2 vertex(int i) const { return i == 0 ? A : (i == 1 ? B : C); }
    double side(int i) const { return i == 0 ? la : (i == 1 ? lb : lc); }

    Vec2 altitude_foot(int i) const {
        Vec2 p = vertex(i), q = vertex((i + 1) % 3), r = vertex((i + 2) % 3);
        return project_onto(p, line_through(q, r));
    }
    Vec2 bisector_foot(int i) const {
        // Divides the opposite side in the ratio of the adjacent sides.
        Vec2 q = vertex((i + 1) % 3), r = vertex((i + 2) % 3);
        double sq = side((i + 2) % 3), sr = side((i + 1) % 3);
        return (sr * q + sq * r) / (sq + sr);
    }
    Vec2 side_midpoint(int i) const { return midpoint(vertex((i + 1) % 3), vertex((i + 2) % 3)); }
    Vec2 euler_point(int i) const { return midpoint(vertex(i), H); }
    Vec2 antipode(int i) const { return 2.0 * O - vertex(i); }

    /// Second intersection of the internal bisector from vertex i with the
    /// circumcircle (the midpoint of the far arc).
    Vec2 arc_midpoint(int i) const {
        Vec2 v = vertex(i);
        auto hits = intersect_line_circle(line_through(v, I), circum);
        if (hits.empty()) throw InstantiationError("bisector does not meet circumcircle");
        Vec2 best = hits.front();
        for (Vec2 h : hits) {
            if (dist(h, v) > dist(best, v)) best = h;
        }
        return best;
    }

    Line side_line(int i) const { return line_through(vertex((i + 1) % 3), vertex((i + 2) % 3)); }
    Line median(int i) const { return line_through(vertex(i), side_midpoint(i)); }
    Line altitude(int i) const {
        Vec2 q = vertex((i + 1) % 3), r = vertex((i + 2) % 3);
        return line_point_normal(vertex(i), r - q);
    }
    Line bisector(int i) const { return line_through(vertex(i), I); }
    Line side_bisector(int i) const {
        Vec2 q = vertex((i + 1) % 3), r = vertex((i + 2) % 3);
        return line_point_normal(midpoint(q, r), r - q);
    }

    double interior_angle(int i) const {
        return corner_angle(vertex(i), vertex((i + 1) % 3), vertex((i + 2) % 3));
    }
};

inline int suffix_index(const std::string& tag) {
    if (tag.size() >= 2 && tag[tag.size() - 2] == '_') {
        char s = tag.back();
        if (s == 'a') return 0;
        if (s == 'b') return 1;
        if (s == 'c') return 2;
    }
    return -1;
}

} // namespace detail

/// Realizes every catalog object on the given triangle via the entry's
/// constructor tag. Throws InstantiationError (naming the object) if a tag is
/// unknown or produces a non-finite value.
inline Instantiation instantiate_catalog(const TriangleInstance& tri, const Catalog& catalog) {
    detail::TriangleFrame f(tri);
    Instantiation inst;
    inst.scale = f.circum.r;

    auto bad = [](const std::string& name) {
        return InstantiationError("constructor produced a non-finite value for object " + name);
    };

    for (const auto& e : catalog.entries(Kind::Point)) {
        const std::string& t = e.ctor;
        int i = detail::suffix_index(t);
        Vec2 p;
        if (t == "vertex_a" || t == "vertex_b" || t == "vertex_c") p = f.vertex(i);
        else if (t == "circumcenter") p = f.O;
        else if (t == "incenter") p = f.I;
        else if (t == "orthocenter") p = f.H;
        else if (t == "centroid") p = f.G;
        else if (t.rfind("altitude_foot_", 0) == 0) p = f.altitude_foot(i);
        else if (t.rfind("bisector_foot_", 0) == 0) p = f.bisector_foot(i);
        else if (t.rfind("side_midpoint_", 0) == 0) p = f.side_midpoint(i);
        else if (t == "nine_point_center") p = midpoint(f.O, f.H);
        else if (t.rfind("euler_point_", 0) == 0) p = f.euler_point(i);
        else if (t.rfind("antipode_", 0) == 0) p = f.antipode(i);
        else if (t.rfind("arc_midpoint_", 0) == 0) p = f.arc_midpoint(i);
        else throw InstantiationError("unknown point constructor tag " + t + " for " + e.name);
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw bad(e.name);
        inst.points.push_back(p);
    }

    for (const auto& e : catalog.entries(Kind::Line)) {
        const std::string& t = e.ctor;
        int i = detail::suffix_index(t);
        Line l;
        if (t.rfind("side_bisector_", 0) == 0) l = f.side_bisector(i);
        else if (t.rfind("side_", 0) == 0) l = f.side_line(i);
        else if (t.rfind("median_", 0) == 0) l = f.median(i);
        else if (t.rfind("altitude_", 0) == 0) l = f.altitude(i);
        else if (t.rfind("bisector_", 0) == 0) l = f.bisector(i);
        else if (t == "euler_line") l = line_through(f.O, f.H);
        else throw InstantiationError("unknown line constructor tag " + t + " for " + e.name);
        if (!std::isfinite(l.n.x) || !std::isfinite(l.n.y) || !std::isfinite(l.d))
            throw bad(e.name);
        inst.lines.push_back(l);
    }

    for (const auto& e : catalog.entries(Kind::Circle)) {
        const std::string& t = e.ctor;
        Circle c;
        if (t == "circumcircle") c = f.circum;
        else if (t == "incircle") c = Circle{f.I, point_line_dist(f.I, f.side_line(0))};
        else if (t == "nine_point_circle") {
            Vec2 n = midpoint(f.O, f.H);
            c = Circle{n, dist(n, f.side_midpoint(0))};
        } else if (t == "circle_bic_a") {
            Vec2 ctr = circumcenter(f.B, f.I, f.C);
            c = Circle{ctr, dist(ctr, f.I)};
        } else if (t == "circle_bic_b") {
            Vec2 ctr = circumcenter(f.C, f.I, f.A);
            c = Circle{ctr, dist(ctr, f.I)};
        } else if (t == "circle_bic_c") {
            Vec2 ctr = circumcenter(f.A, f.I, f.B);
            c = Circle{ctr, dist(ctr, f.I)};
        } else
            throw InstantiationError("unknown circle constructor tag " + t + " for " + e.name);
        if (!std::isfinite(c.center.x) || !std::isfinite(c.center.y) || !std::isfinite(c.r) ||
            !(c.r > 0))
            throw bad(e.name);
        inst.circles.push_back(c);
    }

    for (const auto& e : catalog.entries(Kind::Angle)) {
        const std::string& t = e.ctor;
        int i = detail::suffix_index(t);
        if (t != "angle_a" && t != "angle_b" && t != "angle_c")
            throw InstantiationError("unknown angle constructor tag " + t + " for " + e.name);
        double v = f.interior_angle(i);
        if (!std::isfinite(v)) throw bad(e.name);
        inst.angles.push_back(v);
    }

    return inst;
}

enum class QueryKind {
    PointLineIncidence,   // |signed distance|, args: point, line
    PointCircleIncidence, // | |p-center| - r |, args: point, circle
    LinesParallel,        // |sin(angle)|, args: line, line
    LinesPerpendicular,   // |cos(angle)|, args: line, line
    CollinearRatio,       // signed XY/YZ, args: 3 points
    VectorRatio,          // signed XY/ZW, args: 4 points
    VectorParallelism,    // |cross(XY, ZW)| / (|XY| |ZW|), args: 4 points
    CrossRatio,           // (X,Y;Z,W), args: 4 collinear points
    AngleBetweenLines,    // canonical-normal angle in [0, pi), args: line, line
    PointLineDistance,    // alias of PointLineIncidence
};

struct MeasurementQuery {
    QueryKind kind;
    ObjectId args[4];
};

/// Evaluates one numeric measurement over realized objects.
inline double measure(const Instantiation& inst, const MeasurementQuery& q) {
    switch (q.kind) {
        case QueryKind::PointLineIncidence:
        case QueryKind::PointLineDistance:
            return point_line_dist(inst.point(q.args[0]), inst.line(q.args[1]));
        case QueryKind::PointCircleIncidence:
            return point_circle_residual(inst.point(q.args[0]), inst.circle(q.args[1]));
        case QueryKind::LinesParallel:
            return parallel_residual(inst.line(q.args[0]), inst.line(q.args[1]));
        case QueryKind::LinesPerpendicular:
            return perp_residual(inst.line(q.args[0]), inst.line(q.args[1]));
        case QueryKind::CollinearRatio:
            return collinear_ratio(inst.point(q.args[0]), inst.point(q.args[1]),
                                   inst.point(q.args[2]));
        case QueryKind::VectorRatio:
            return vector_ratio(inst.point(q.args[0]), inst.point(q.args[1]),
                                inst.point(q.args[2]), inst.point(q.args[3]));
        case QueryKind::VectorParallelism: {
            Vec2 u = inst.point(q.args[1]) - inst.point(q.args[0]);
            Vec2 v = inst.point(q.args[3]) - inst.point(q.args[2]);
            double nu = norm(u), nv = norm(v);
            if (nu == 0.0 || nv == 0.0)
                throw MeasureError("vector parallelism with coincident endpoints");
            return std::fabs(cross(u, v)) / (nu * nv);
        }
        case QueryKind::CrossRatio:
            return cross_ratio(inst.point(q.args[0]), inst.point(q.args[1]),
                               inst.point(q.args[2]), inst.point(q.args[3]));
        case QueryKind::AngleBetweenLines:
            return angle_between_lines(inst.line(q.args[0]), inst.line(q.args[1]));
    }
    throw MeasureError("unknown measurement query");
}

} // namespace tricons
