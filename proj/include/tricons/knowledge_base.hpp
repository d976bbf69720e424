#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "tricons/catalog.hpp"
#include "tricons/geometry.hpp"
#include "tricons/instantiate.hpp"
#include "tricons/sampling.hpp"

namespace tricons {

struct KbParseError : std::runtime_error {
    int line = 0;
    int column = 0;
    KbParseError(const std::string& what, int line_, int col_)
        : std::runtime_error(what + " at line " + std::to_string(line_) + ", column " +
                             std::to_string(col_)),
          line(line_), column(col_) {}
};

struct KbReferenceError : std::runtime_error {
    explicit KbReferenceError(const std::string& what) : std::runtime_error(what) {}
};

/// How an angle object determines the angle between two lines. The measured
/// value is only defined modulo pi and up to reflection, so forms are matched
/// with angle_mod_pi_dist; admission records the first matching form.
enum class AngleForm : uint8_t {
    Phi,              // phi
    PiMinusPhi,       // pi - phi
    HalfPhi,          // phi/2
    HalfPiMinusHalfPhi, // pi/2 - phi/2
    HalfPiMinusPhi,   // pi/2 - phi
    HalfPiPlusHalfPhi,  // pi/2 + phi/2
};

inline constexpr AngleForm kAllAngleForms[] = {
    AngleForm::Phi,          AngleForm::PiMinusPhi,     AngleForm::HalfPhi,
    AngleForm::HalfPiMinusHalfPhi, AngleForm::HalfPiMinusPhi, AngleForm::HalfPiPlusHalfPhi,
};

inline double eval_angle_form(AngleForm f, double phi) {
    switch (f) {
        case AngleForm::Phi: return phi;
        case AngleForm::PiMinusPhi: return kPi - phi;
        case AngleForm::HalfPhi: return phi / 2.0;
        case AngleForm::HalfPiMinusHalfPhi: return kPi / 2.0 - phi / 2.0;
        case AngleForm::HalfPiMinusPhi: return kPi / 2.0 - phi;
        case AngleForm::HalfPiPlusHalfPhi: return kPi / 2.0 + phi / 2.0;
    }
    return phi;
}

inline const char* angle_form_name(AngleForm f) {
    switch (f) {
        case AngleForm::Phi: return "phi";
        case AngleForm::PiMinusPhi: return "pi-phi";
        case AngleForm::HalfPhi: return "phi/2";
        case AngleForm::HalfPiMinusHalfPhi: return "pi/2-phi/2";
        case AngleForm::HalfPiMinusPhi: return "pi/2-phi";
        case AngleForm::HalfPiPlusHalfPhi: return "pi/2+phi/2";
    }
    return "?";
}

inline AngleForm parse_angle_form(const std::string& s) {
    for (AngleForm f : kAllAngleForms) {
        if (s == angle_form_name(f)) return f;
    }
    throw KbReferenceError("unknown angle form tag: " + s);
}

struct AngleDef {
    int p = 0, q = 0; // line indices
    int angle = 0;
    AngleForm form = AngleForm::Phi;
    friend bool operator==(const AngleDef&, const AngleDef&) = default;
    friend auto operator<=>(const AngleDef&, const AngleDef&) = default;
};

struct LocusDef {
    int x = 0, y = 0; // point indices
    int angle = 0;
    int circle = 0;
    friend bool operator==(const LocusDef&, const LocusDef&) = default;
    friend auto operator<=>(const LocusDef&, const LocusDef&) = default;
};

/// The eleven relation families over catalog indices. All vectors are kept
/// canonically sorted so equal knowledge bases serialize to identical bytes.
struct KnowledgeBase {
    std::vector<std::vector<int>> inc_lines;      // point -> sorted line indices
    std::vector<std::vector<int>> inc_circles;    // point -> sorted circle indices
    std::vector<std::vector<int>> perp_lines;     // line -> sorted line indices
    std::vector<std::vector<int>> parallel_lines; // line -> sorted line indices
    std::vector<int> circle_center;               // circle -> point index or -1
    std::vector<std::optional<std::pair<int, int>>> circle_diameter;
    std::vector<std::vector<int>> tangent_lines;  // circle -> sorted line indices
    std::vector<std::array<int, 3>> ratio_triplets;
    std::vector<std::array<int, 4>> ratio_quadruplets;
    std::vector<AngleDef> angle_defs;
    std::vector<std::array<int, 3>> perp_bisectors; // (point, point, line), first < second
    std::vector<std::array<int, 4>> harmonic_quadruplets;
    std::vector<LocusDef> locus_defs;
    std::vector<std::array<int, 3>> homothety_triplets; // (point, line, line)

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

    bool incident_line(int point, int line) const {
        const auto& v = inc_lines[static_cast<size_t>(point)];
        return std::binary_search(v.begin(), v.end(), line);
    }
    bool incident_circle(int point, int circle) const {
        const auto& v = inc_circles[static_cast<size_t>(point)];
        return std::binary_search(v.begin(), v.end(), circle);
    }
    bool perpendicular(int l1, int l2) const {
        const auto& v = perp_lines[static_cast<size_t>(l1)];
        return std::binary_search(v.begin(), v.end(), l2);
    }
    bool parallel(int l1, int l2) const {
        const auto& v = parallel_lines[static_cast<size_t>(l1)];
        return std::binary_search(v.begin(), v.end(), l2);
    }
    bool tangent(int circle, int line) const {
        const auto& v = tangent_lines[static_cast<size_t>(circle)];
        return std::binary_search(v.begin(), v.end(), line);
    }

    void normalize() {
        auto sort_sets = [](std::vector<std::vector<int>>& m) {
            for (auto& v : m) {
                std::sort(v.begin(), v.end());
                v.erase(std::unique(v.begin(), v.end()), v.end());
            }
        };
        sort_sets(inc_lines);
        sort_sets(inc_circles);
        sort_sets(perp_lines);
        sort_sets(parallel_lines);
        sort_sets(tangent_lines);
        auto sort_unique = [](auto& v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
        };
        sort_unique(ratio_triplets);
        sort_unique(ratio_quadruplets);
        sort_unique(angle_defs);
        sort_unique(perp_bisectors);
        sort_unique(harmonic_quadruplets);
        sort_unique(locus_defs);
        sort_unique(homothety_triplets);
    }
};

namespace detail {

/// One probe set: instantiations of the whole catalog on sample triangles.
inline std::vector<Instantiation> probe_instantiations(const Catalog& catalog, int probes,
                                                       uint64_t seed,
                                                       const SamplingPolicy& policy = {}) {
    std::vector<Instantiation> out;
    out.reserve(static_cast<size_t>(probes));
    for (int i = 0; i < probes; ++i) {
        out.push_back(instantiate_catalog(sample_triangle(seed + static_cast<uint64_t>(i), policy),
                                          catalog));
    }
    return out;
}

inline bool constant_scalar(const std::vector<double>& vals, double tol) {
    for (double v : vals) {
        if (std::fabs(v - vals[0]) > tol * std::max(1.0, std::fabs(vals[0]))) return false;
    }
    return true;
}

/// Undirected central angle that a chord seen at inscribed angle `ins` spans:
/// 2*ins reduced to [0, pi].
inline double central_from_inscribed(double ins) {
    double t = std::fmod(2.0 * ins, 2.0 * kPi);
    if (t < 0) t += 2.0 * kPi;
    return std::min(t, 2.0 * kPi - t);
}

struct RelationTests {
    const std::vector<Instantiation>& probes;
    double tol;

    bool point_on_line(int p, int l) const {
        for (const auto& inst : probes) {
            if (point_line_dist(inst.points[p], inst.lines[l]) > tol * inst.scale) return false;
        }
        return true;
    }
    bool point_on_circle(int p, int c) const {
        for (const auto& inst : probes) {
            if (point_circle_residual(inst.points[p], inst.circles[c]) > tol * inst.scale)
                return false;
        }
        return true;
    }
    bool lines_perpendicular(int l1, int l2) const {
        for (const auto& inst : probes) {
            if (perp_residual(inst.lines[l1], inst.lines[l2]) > tol) return false;
        }
        return true;
    }
    bool lines_parallel_distinct(int l1, int l2) const {
        for (const auto& inst : probes) {
            if (parallel_residual(inst.lines[l1], inst.lines[l2]) > tol) return false;
            // Exclude numerically coincident lines.
            const Line& m = inst.lines[l2];
            Vec2 b0 = m.base_point();
            Vec2 b1 = b0 + inst.scale * m.direction();
            if (point_line_dist(b0, inst.lines[l1]) <= tol * inst.scale &&
                point_line_dist(b1, inst.lines[l1]) <= tol * inst.scale)
                return false;
        }
        return true;
    }
    bool circle_centered_at(int c, int p) const {
        for (const auto& inst : probes) {
            if (dist(inst.points[p], inst.circles[c].center) > tol * inst.scale) return false;
        }
        return true;
    }
    bool diameter_pair(int c, int p, int q) const {
        for (const auto& inst : probes) {
            if (dist(midpoint(inst.points[p], inst.points[q]), inst.circles[c].center) >
                tol * inst.scale)
                return false;
        }
        return true;
    }
    bool line_tangent(int c, int l) const {
        for (const auto& inst : probes) {
            if (std::fabs(point_line_dist(inst.circles[c].center, inst.lines[l]) -
                          inst.circles[c].r) > tol * inst.scale)
                return false;
        }
        return true;
    }
    bool points_collinear(int x, int y, int z) const {
        for (const auto& inst : probes) {
            Vec2 px = inst.points[x], py = inst.points[y], pz = inst.points[z];
            if (dist(px, py) <= tol * inst.scale) return false;
            if (point_line_dist(pz, line_through(px, py)) > tol * inst.scale) return false;
        }
        return true;
    }
    bool ratio_triplet(int x, int y, int z) const {
        if (!points_collinear(x, y, z)) return false;
        std::vector<double> vals;
        for (const auto& inst : probes) {
            Vec2 py = inst.points[y], pz = inst.points[z];
            if (dist(py, pz) <= tol * inst.scale) return false;
            vals.push_back(collinear_ratio(inst.points[x], py, pz));
        }
        return constant_scalar(vals, tol);
    }
    bool ratio_quadruplet(int x, int y, int z, int w) const {
        std::vector<double> vals;
        for (const auto& inst : probes) {
            Vec2 u = inst.points[y] - inst.points[x];
            Vec2 v = inst.points[w] - inst.points[z];
            double nu = norm(u), nv = norm(v);
            if (nu <= tol * inst.scale || nv <= tol * inst.scale) return false;
            if (std::fabs(cross(u, v)) / (nu * nv) > tol) return false;
            vals.push_back(dot(u, v) / (nv * nv));
        }
        return constant_scalar(vals, tol);
    }
    bool angle_def(int p, int q, int a, AngleForm form) const {
        for (const auto& inst : probes) {
            double measured = angle_between_lines(inst.lines[p], inst.lines[q]);
            double want = eval_angle_form(form, inst.angles[a]);
            if (angle_mod_pi_dist(measured, want) > tol) return false;
        }
        return true;
    }
    bool perp_bisector(int x, int y, int l) const {
        for (const auto& inst : probes) {
            Vec2 px = inst.points[x], py = inst.points[y];
            if (dist(px, py) <= tol * inst.scale) return false;
            if (point_line_dist(midpoint(px, py), inst.lines[l]) > tol * inst.scale) return false;
            if (perp_residual(line_through(px, py), inst.lines[l]) > tol) return false;
        }
        return true;
    }
    bool harmonic(int x, int y, int z, int w) const {
        if (!points_collinear(x, y, z) || !points_collinear(x, y, w)) return false;
        for (const auto& inst : probes) {
            double cr;
            try {
                cr = cross_ratio(inst.points[x], inst.points[y], inst.points[z], inst.points[w]);
            } catch (const MeasureError&) {
                return false;
            }
            if (std::fabs(cr + 1.0) > tol) return false;
        }
        return true;
    }
    bool locus(int x, int y, int a, int c, AngleForm form) const {
        for (const auto& inst : probes) {
            double want = central_from_inscribed(eval_angle_form(form, inst.angles[a]));
            double got = corner_angle(inst.circles[c].center, inst.points[x], inst.points[y]);
            if (std::fabs(got - want) > tol) return false;
        }
        return true;
    }
    bool homothety(int x, int p, int q) const {
        std::vector<double> vals;
        for (const auto& inst : probes) {
            const Line& lp = inst.lines[p];
            const Line& lq = inst.lines[q];
            Vec2 px = inst.points[x];
            double dp = dot(lp.n, px) - lp.d;
            double dq = dot(lp.n, px) - dot(lp.n, lq.base_point());
            if (std::fabs(dp) <= tol * inst.scale || std::fabs(dq) <= tol * inst.scale)
                return false;
            vals.push_back(dq / dp);
        }
        return constant_scalar(vals, tol);
    }
};

} // namespace detail

/// Derives the knowledge base by probing `probes` sample triangles: a tuple
/// enters a relation iff its defining condition holds on every probe and the
/// measured scalar or form is identical across probes. Scalar witnesses are
/// discarded afterwards.
inline KnowledgeBase derive_relations(const Catalog& catalog, int probes, double tolerance,
                                      uint64_t seed, const SamplingPolicy& policy = {}) {
    if (probes < 2) throw std::invalid_argument("derive_relations requires probes >= 2");
    auto insts = detail::probe_instantiations(catalog, probes, seed, policy);
    detail::RelationTests t{insts, tolerance};

    const int np = catalog.count(Kind::Point);
    const int nl = catalog.count(Kind::Line);
    const int nc = catalog.count(Kind::Circle);
    const int na = catalog.count(Kind::Angle);

    KnowledgeBase kb;
    kb.inc_lines.resize(static_cast<size_t>(np));
    kb.inc_circles.resize(static_cast<size_t>(np));
    kb.perp_lines.resize(static_cast<size_t>(nl));
    kb.parallel_lines.resize(static_cast<size_t>(nl));
    kb.circle_center.assign(static_cast<size_t>(nc), -1);
    kb.circle_diameter.resize(static_cast<size_t>(nc));
    kb.tangent_lines.resize(static_cast<size_t>(nc));

    for (int p = 0; p < np; ++p) {
        for (int l = 0; l < nl; ++l)
            if (t.point_on_line(p, l)) kb.inc_lines[static_cast<size_t>(p)].push_back(l);
        for (int c = 0; c < nc; ++c)
            if (t.point_on_circle(p, c)) kb.inc_circles[static_cast<size_t>(p)].push_back(c);
    }
    for (int l1 = 0; l1 < nl; ++l1) {
        for (int l2 = l1 + 1; l2 < nl; ++l2) {
            if (t.lines_perpendicular(l1, l2)) {
                kb.perp_lines[static_cast<size_t>(l1)].push_back(l2);
                kb.perp_lines[static_cast<size_t>(l2)].push_back(l1);
            }
            if (t.lines_parallel_distinct(l1, l2)) {
                kb.parallel_lines[static_cast<size_t>(l1)].push_back(l2);
                kb.parallel_lines[static_cast<size_t>(l2)].push_back(l1);
            }
        }
    }
    for (int c = 0; c < nc; ++c) {
        for (int p = 0; p < np; ++p) {
            if (t.circle_centered_at(c, p)) {
                kb.circle_center[static_cast<size_t>(c)] = p;
                break;
            }
        }
        for (int l = 0; l < nl; ++l)
            if (t.line_tangent(c, l)) kb.tangent_lines[static_cast<size_t>(c)].push_back(l);
        if (kb.circle_center[static_cast<size_t>(c)] < 0) continue;
        bool found = false;
        for (int p = 0; p < np && !found; ++p) {
            if (!t.point_on_circle(p, c)) continue;
            for (int q = p + 1; q < np && !found; ++q) {
                if (!t.point_on_circle(q, c)) continue;
                if (t.diameter_pair(c, p, q)) {
                    kb.circle_diameter[static_cast<size_t>(c)] = std::pair<int, int>{p, q};
                    found = true;
                }
            }
        }
    }

    // Collinear point families, reused by ratio triplets and harmonic tuples.
    for (int x = 0; x < np; ++x) {
        for (int y = 0; y < np; ++y) {
            if (y == x) continue;
            std::vector<int> on_line;
            for (int z = 0; z < np; ++z) {
                if (z == x || z == y) continue;
                if (t.points_collinear(x, y, z)) on_line.push_back(z);
            }
            for (int z : on_line) {
                if (t.ratio_triplet(x, y, z)) kb.ratio_triplets.push_back({x, y, z});
            }
            for (int z : on_line) {
                for (int w : on_line) {
                    if (w == z) continue;
                    if (t.harmonic(x, y, z, w)) kb.harmonic_quadruplets.push_back({x, y, z, w});
                }
            }
        }
    }

    for (int x = 0; x < np; ++x) {
        for (int y = 0; y < np; ++y) {
            if (y == x) continue;
            for (int z = 0; z < np; ++z) {
                for (int w = 0; w < np; ++w) {
                    if (w == z) continue;
                    if ((x == z && y == w) || (x == w && y == z)) continue;
                    if (t.ratio_quadruplet(x, y, z, w))
                        kb.ratio_quadruplets.push_back({x, y, z, w});
                }
            }
        }
    }

    for (int p = 0; p < nl; ++p) {
        for (int q = 0; q < nl; ++q) {
            if (q == p) continue;
            for (int a = 0; a < na; ++a) {
                for (AngleForm form : kAllAngleForms) {
                    if (t.angle_def(p, q, a, form)) {
                        kb.angle_defs.push_back(AngleDef{p, q, a, form});
                        break;
                    }
                }
            }
        }
    }

    for (int x = 0; x < np; ++x) {
        for (int y = x + 1; y < np; ++y) {
            for (int l = 0; l < nl; ++l) {
                if (t.perp_bisector(x, y, l)) kb.perp_bisectors.push_back({x, y, l});
            }
        }
    }

    for (int x = 0; x < np; ++x) {
        for (int y = 0; y < np; ++y) {
            if (y == x) continue;
            for (int c = 0; c < nc; ++c) {
                if (!t.point_on_circle(x, c) || !t.point_on_circle(y, c)) continue;
                for (int a = 0; a < na; ++a) {
                    for (AngleForm form : kAllAngleForms) {
                        if (t.locus(x, y, a, c, form)) {
                            kb.locus_defs.push_back(LocusDef{x, y, a, c});
                            break;
                        }
                    }
                }
            }
        }
    }

    for (int x = 0; x < np; ++x) {
        for (int p = 0; p < nl; ++p) {
            if (t.point_on_line(x, p)) continue;
            for (int q = 0; q < nl; ++q) {
                if (q == p || t.point_on_line(x, q)) continue;
                if (!t.lines_parallel_distinct(p, q)) continue;
                if (t.homothety(x, p, q)) kb.homothety_triplets.push_back({x, p, q});
            }
        }
    }

    kb.normalize();
    return kb;
}

// ---------------------------------------------------------------------------
// Validation against fresh probes.

struct ValidationFailure {
    std::string family;
    std::string tuple;   // human-readable tuple rendering
    uint64_t probe_seed = 0;
    double residual = 0; // largest offending residual, when meaningful
};

struct ValidationReport {
    int probes_checked = 0;
    std::vector<ValidationFailure> failures;
    bool ok() const { return failures.empty(); }
};

/// Re-tests every stored tuple on `fresh_probes` new sample triangles; a tuple
/// fails if its defining condition (including cross-probe constancy) does not
/// hold on the fresh set. The caller should pass a seed disjoint from the
/// derivation seed.
inline ValidationReport validate_relations(const KnowledgeBase& kb, const Catalog& catalog,
                                           int fresh_probes, double tolerance, uint64_t seed,
                                           const SamplingPolicy& policy = {}) {
    auto insts = detail::probe_instantiations(catalog, fresh_probes, seed, policy);
    detail::RelationTests t{insts, tolerance};
    ValidationReport report;
    report.probes_checked = fresh_probes;

    auto pname = [&](int i) { return catalog.entries(Kind::Point)[static_cast<size_t>(i)].name; };
    auto lname = [&](int i) { return catalog.entries(Kind::Line)[static_cast<size_t>(i)].name; };
    auto cname = [&](int i) { return catalog.entries(Kind::Circle)[static_cast<size_t>(i)].name; };
    auto aname = [&](int i) { return catalog.entries(Kind::Angle)[static_cast<size_t>(i)].name; };
    auto fail = [&](const std::string& family, const std::string& tuple) {
        report.failures.push_back(ValidationFailure{family, tuple, seed, 0.0});
    };

    for (size_t p = 0; p < kb.inc_lines.size(); ++p)
        for (int l : kb.inc_lines[p])
            if (!t.point_on_line(static_cast<int>(p), l))
                fail("inc_lines", pname(static_cast<int>(p)) + "," + lname(l));
    for (size_t p = 0; p < kb.inc_circles.size(); ++p)
        for (int c : kb.inc_circles[p])
            if (!t.point_on_circle(static_cast<int>(p), c))
                fail("inc_circles", pname(static_cast<int>(p)) + "," + cname(c));
    for (size_t l = 0; l < kb.perp_lines.size(); ++l)
        for (int m : kb.perp_lines[l])
            if (!t.lines_perpendicular(static_cast<int>(l), m))
                fail("perp_lines", lname(static_cast<int>(l)) + "," + lname(m));
    for (size_t l = 0; l < kb.parallel_lines.size(); ++l)
        for (int m : kb.parallel_lines[l])
            if (!t.lines_parallel_distinct(static_cast<int>(l), m))
                fail("parallel_lines", lname(static_cast<int>(l)) + "," + lname(m));
    for (size_t c = 0; c < kb.circle_center.size(); ++c)
        if (kb.circle_center[c] >= 0 && !t.circle_centered_at(static_cast<int>(c), kb.circle_center[c]))
            fail("circle_center", cname(static_cast<int>(c)) + "," + pname(kb.circle_center[c]));
    for (size_t c = 0; c < kb.circle_diameter.size(); ++c)
        if (kb.circle_diameter[c] &&
            !t.diameter_pair(static_cast<int>(c), kb.circle_diameter[c]->first,
                             kb.circle_diameter[c]->second))
            fail("circle_diameter", cname(static_cast<int>(c)));
    for (size_t c = 0; c < kb.tangent_lines.size(); ++c)
        for (int l : kb.tangent_lines[c])
            if (!t.line_tangent(static_cast<int>(c), l))
                fail("tangent_lines", cname(static_cast<int>(c)) + "," + lname(l));
    for (const auto& r : kb.ratio_triplets)
        if (!t.ratio_triplet(r[0], r[1], r[2]))
            fail("known_ratio_triplets", pname(r[0]) + "," + pname(r[1]) + "," + pname(r[2]));
    for (const auto& r : kb.ratio_quadruplets)
        if (!t.ratio_quadruplet(r[0], r[1], r[2], r[3]))
            fail("known_ratio_quadruplets",
                 pname(r[0]) + "," + pname(r[1]) + "," + pname(r[2]) + "," + pname(r[3]));
    for (const auto& d : kb.angle_defs)
        if (!t.angle_def(d.p, d.q, d.angle, d.form))
            fail("angle_defs", lname(d.p) + "," + lname(d.q) + "," + aname(d.angle) + "," +
                                   angle_form_name(d.form));
    for (const auto& b : kb.perp_bisectors)
        if (!t.perp_bisector(b[0], b[1], b[2]))
            fail("perp_bisectors", pname(b[0]) + "," + pname(b[1]) + "," + lname(b[2]));
    for (const auto& h : kb.harmonic_quadruplets)
        if (!t.harmonic(h[0], h[1], h[2], h[3]))
            fail("harmonic_quadruplets",
                 pname(h[0]) + "," + pname(h[1]) + "," + pname(h[2]) + "," + pname(h[3]));
    for (const auto& d : kb.locus_defs) {
        bool ok = false;
        for (AngleForm form : kAllAngleForms) {
            if (t.locus(d.x, d.y, d.angle, d.circle, form)) {
                ok = true;
                break;
            }
        }
        if (!ok)
            fail("locus_defs", pname(d.x) + "," + pname(d.y) + "," + aname(d.angle) + "," +
                                   cname(d.circle));
    }
    for (const auto& h : kb.homothety_triplets)
        if (!t.homothety(h[0], h[1], h[2]))
            fail("homothety_triplets", pname(h[0]) + "," + lname(h[1]) + "," + lname(h[2]));

    return report;
}

// ---------------------------------------------------------------------------
// Serialization (canonical JSON).

inline std::string save_kb(const KnowledgeBase& kb, const Catalog& catalog) {
    using json = nlohmann::ordered_json;
    auto pname = [&](int i) { return catalog.entries(Kind::Point)[static_cast<size_t>(i)].name; };
    auto lname = [&](int i) { return catalog.entries(Kind::Line)[static_cast<size_t>(i)].name; };
    auto cname = [&](int i) { return catalog.entries(Kind::Circle)[static_cast<size_t>(i)].name; };
    auto aname = [&](int i) { return catalog.entries(Kind::Angle)[static_cast<size_t>(i)].name; };

    json j;
    auto name_map = [&](const std::vector<std::vector<int>>& m, auto&& key_name,
                        auto&& val_name) {
        json o = json::object();
        for (size_t i = 0; i < m.size(); ++i) {
            json arr = json::array();
            for (int v : m[i]) arr.push_back(val_name(v));
            o[key_name(static_cast<int>(i))] = std::move(arr);
        }
        return o;
    };
    j["inc_lines"] = name_map(kb.inc_lines, pname, lname);
    j["inc_circles"] = name_map(kb.inc_circles, pname, cname);
    j["perp_lines"] = name_map(kb.perp_lines, lname, lname);
    j["parallel_lines"] = name_map(kb.parallel_lines, lname, lname);
    {
        json o = json::object();
        for (size_t c = 0; c < kb.circle_center.size(); ++c)
            if (kb.circle_center[c] >= 0) o[cname(static_cast<int>(c))] = pname(kb.circle_center[c]);
        j["circle_center"] = std::move(o);
    }
    {
        json o = json::object();
        for (size_t c = 0; c < kb.circle_diameter.size(); ++c)
            if (kb.circle_diameter[c])
                o[cname(static_cast<int>(c))] =
                    json::array({pname(kb.circle_diameter[c]->first),
                                 pname(kb.circle_diameter[c]->second)});
        j["circle_diameter"] = std::move(o);
    }
    j["tangent_lines"] = name_map(kb.tangent_lines, cname, lname);
    {
        json arr = json::array();
        for (const auto& r : kb.ratio_triplets)
            arr.push_back(json::array({pname(r[0]), pname(r[1]), pname(r[2])}));
        j["known_ratio_triplets"] = std::move(arr);
    }
    {
        json arr = json::array();
        for (const auto& r : kb.ratio_quadruplets)
            arr.push_back(json::array({pname(r[0]), pname(r[1]), pname(r[2]), pname(r[3])}));
        j["known_ratio_quadruplets"] = std::move(arr);
    }
    {
        json arr = json::array();
        for (const auto& d : kb.angle_defs)
            arr.push_back(json::array(
                {lname(d.p), lname(d.q), aname(d.angle), angle_form_name(d.form)}));
        j["angle_defs"] = std::move(arr);
    }
    {
        json arr = json::array();
        for (const auto& b : kb.perp_bisectors)
            arr.push_back(json::array({pname(b[0]), pname(b[1]), lname(b[2])}));
        j["perp_bisectors"] = std::move(arr);
    }
    {
        json arr = json::array();
        for (const auto& h : kb.harmonic_quadruplets)
            arr.push_back(json::array({pname(h[0]), pname(h[1]), pname(h[2]), pname(h[3])}));
        j["harmonic_quadruplets"] = std::move(arr);
    }
    {
        json arr = json::array();
        for (const auto& d : kb.locus_defs)
            arr.push_back(json::array({pname(d.x), pname(d.y), aname(d.angle), cname(d.circle)}));
        j["locus_defs"] = std::move(arr);
    }
    {
        json arr = json::array();
        for (const auto& h : kb.homothety_triplets)
            arr.push_back(json::array({pname(h[0]), lname(h[1]), lname(h[2])}));
        j["homothety_triplets"] = std::move(arr);
    }
    return j.dump(2) + "\n";
}

namespace detail {

inline std::pair<int, int> line_col_of(const std::string& text, size_t byte) {
    int line = 1, col = 1;
    for (size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return {line, col};
}

} // namespace detail

inline KnowledgeBase load_kb(const std::string& text, const Catalog& catalog) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        auto [line, col] = detail::line_col_of(text, e.byte > 0 ? e.byte - 1 : 0);
        throw KbParseError(e.what(), line, col);
    }

    auto idx = [&](const std::string& name, Kind kind) {
        if (!catalog.has(name))
            throw KbReferenceError("knowledge base references unknown object: " + name);
        ObjectId oid = catalog.id(name);
        if (oid.kind != kind)
            throw KbReferenceError("object " + name + " is not a " + kind_name(kind));
        return oid.index;
    };

    KnowledgeBase kb;
    kb.inc_lines.resize(static_cast<size_t>(catalog.count(Kind::Point)));
    kb.inc_circles.resize(static_cast<size_t>(catalog.count(Kind::Point)));
    kb.perp_lines.resize(static_cast<size_t>(catalog.count(Kind::Line)));
    kb.parallel_lines.resize(static_cast<size_t>(catalog.count(Kind::Line)));
    kb.circle_center.assign(static_cast<size_t>(catalog.count(Kind::Circle)), -1);
    kb.circle_diameter.resize(static_cast<size_t>(catalog.count(Kind::Circle)));
    kb.tangent_lines.resize(static_cast<size_t>(catalog.count(Kind::Circle)));

    auto read_map = [&](const char* key, std::vector<std::vector<int>>& out, Kind key_kind,
                        Kind val_kind) {
        for (auto it = j.at(key).begin(); it != j.at(key).end(); ++it) {
            int k = idx(it.key(), key_kind);
            for (const auto& v : it.value())
                out[static_cast<size_t>(k)].push_back(idx(v.get<std::string>(), val_kind));
        }
    };
    read_map("inc_lines", kb.inc_lines, Kind::Point, Kind::Line);
    read_map("inc_circles", kb.inc_circles, Kind::Point, Kind::Circle);
    read_map("perp_lines", kb.perp_lines, Kind::Line, Kind::Line);
    read_map("parallel_lines", kb.parallel_lines, Kind::Line, Kind::Line);
    for (auto it = j.at("circle_center").begin(); it != j.at("circle_center").end(); ++it)
        kb.circle_center[static_cast<size_t>(idx(it.key(), Kind::Circle))] =
            idx(it.value().get<std::string>(), Kind::Point);
    for (auto it = j.at("circle_diameter").begin(); it != j.at("circle_diameter").end(); ++it) {
        const auto& pair = it.value();
        kb.circle_diameter[static_cast<size_t>(idx(it.key(), Kind::Circle))] =
            std::pair<int, int>{idx(pair.at(0).get<std::string>(), Kind::Point),
                                idx(pair.at(1).get<std::string>(), Kind::Point)};
    }
    read_map("tangent_lines", kb.tangent_lines, Kind::Circle, Kind::Line);
    for (const auto& r : j.at("known_ratio_triplets"))
        kb.ratio_triplets.push_back({idx(r.at(0).get<std::string>(), Kind::Point),
                                     idx(r.at(1).get<std::string>(), Kind::Point),
                                     idx(r.at(2).get<std::string>(), Kind::Point)});
    for (const auto& r : j.at("known_ratio_quadruplets"))
        kb.ratio_quadruplets.push_back({idx(r.at(0).get<std::string>(), Kind::Point),
                                        idx(r.at(1).get<std::string>(), Kind::Point),
                                        idx(r.at(2).get<std::string>(), Kind::Point),
                                        idx(r.at(3).get<std::string>(), Kind::Point)});
    for (const auto& d : j.at("angle_defs"))
        kb.angle_defs.push_back(AngleDef{idx(d.at(0).get<std::string>(), Kind::Line),
                                         idx(d.at(1).get<std::string>(), Kind::Line),
                                         idx(d.at(2).get<std::string>(), Kind::Angle),
                                         parse_angle_form(d.at(3).get<std::string>())});
    for (const auto& b : j.at("perp_bisectors"))
        kb.perp_bisectors.push_back({idx(b.at(0).get<std::string>(), Kind::Point),
                                     idx(b.at(1).get<std::string>(), Kind::Point),
                                     idx(b.at(2).get<std::string>(), Kind::Line)});
    for (const auto& h : j.at("harmonic_quadruplets"))
        kb.harmonic_quadruplets.push_back({idx(h.at(0).get<std::string>(), Kind::Point),
                                           idx(h.at(1).get<std::string>(), Kind::Point),
                                           idx(h.at(2).get<std::string>(), Kind::Point),
                                           idx(h.at(3).get<std::string>(), Kind::Point)});
    for (const auto& d : j.at("locus_defs"))
        kb.locus_defs.push_back(LocusDef{idx(d.at(0).get<std::string>(), Kind::Point),
                                         idx(d.at(1).get<std::string>(), Kind::Point),
                                         idx(d.at(2).get<std::string>(), Kind::Angle),
                                         idx(d.at(3).get<std::string>(), Kind::Circle)});
    for (const auto& h : j.at("homothety_triplets"))
        kb.homothety_triplets.push_back({idx(h.at(0).get<std::string>(), Kind::Point),
                                         idx(h.at(1).get<std::string>(), Kind::Line),
                                         idx(h.at(2).get<std::string>(), Kind::Line)});

    kb.normalize();
    return kb;
}

/// Structural invariants of the relation families (symmetry closures and
/// cross-family consistency). Returns human-readable violations, empty when
/// the knowledge base is well-formed.
inline std::vector<std::string> kb_invariant_violations(const KnowledgeBase& kb,
                                                        const Catalog& catalog) {
    std::vector<std::string> out;
    auto lname = [&](int i) { return catalog.entries(Kind::Line)[static_cast<size_t>(i)].name; };
    auto cname = [&](int i) { return catalog.entries(Kind::Circle)[static_cast<size_t>(i)].name; };
    for (size_t l = 0; l < kb.perp_lines.size(); ++l)
        for (int m : kb.perp_lines[l])
            if (!kb.perpendicular(m, static_cast<int>(l)))
                out.push_back("perp_lines not symmetric at " + lname(static_cast<int>(l)) + "," +
                              lname(m));
    for (size_t l = 0; l < kb.parallel_lines.size(); ++l) {
        for (int m : kb.parallel_lines[l]) {
            if (m == static_cast<int>(l))
                out.push_back("parallel_lines not irreflexive at " + lname(m));
            if (!kb.parallel(m, static_cast<int>(l)))
                out.push_back("parallel_lines not symmetric at " + lname(static_cast<int>(l)) +
                              "," + lname(m));
        }
    }
    for (const auto& b : kb.perp_bisectors) {
        // If some catalog line passes through both endpoints, it must be
        // recorded as perpendicular to the bisector line.
        for (size_t l = 0; l < kb.parallel_lines.size(); ++l) {
            int li = static_cast<int>(l);
            if (kb.incident_line(b[0], li) && kb.incident_line(b[1], li) &&
                !kb.perpendicular(li, b[2]))
                out.push_back("perp_bisector line " + lname(b[2]) +
                              " not perpendicular to segment line " + lname(li));
        }
    }
    for (size_t c = 0; c < kb.circle_diameter.size(); ++c) {
        if (!kb.circle_diameter[c]) continue;
        int ci = static_cast<int>(c);
        if (kb.circle_center[c] < 0)
            out.push_back("circle_diameter without circle_center for " + cname(ci));
        if (!kb.incident_circle(kb.circle_diameter[c]->first, ci) ||
            !kb.incident_circle(kb.circle_diameter[c]->second, ci))
            out.push_back("circle_diameter endpoints not on circle " + cname(ci));
    }
    return out;
}

} // namespace tricons
