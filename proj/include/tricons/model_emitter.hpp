#pragma once

#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tricons/catalog.hpp"
#include "tricons/knowledge_base.hpp"
#include "tricons/planner.hpp"

namespace tricons {

struct EmissionError : std::runtime_error {
    explicit EmissionError(const std::string& what) : std::runtime_error(what) {}
};

enum class EmitMode { FixedLength, Minimize };

struct EmittedModel {
    std::string model_text;
    std::string data_text;
    int n = 0; // fixed plan length, or the length bound in minimize mode
};

namespace detail {

inline void check_kb_shape(const KnowledgeBase& kb, const Catalog& catalog) {
    if (static_cast<int>(kb.inc_lines.size()) != catalog.count(Kind::Point) ||
        static_cast<int>(kb.perp_lines.size()) != catalog.count(Kind::Line) ||
        static_cast<int>(kb.tangent_lines.size()) != catalog.count(Kind::Circle))
        throw EmissionError("knowledge base does not match the catalog dimensions");
    for (int k = 0; k < kNumKinds; ++k) {
        if (catalog.count(static_cast<Kind>(k)) == 0)
            throw EmissionError(std::string("cannot emit an empty enumeration for kind ") +
                                kind_name(static_cast<Kind>(k)));
    }
}

inline std::string enum_def(const char* name, const Catalog& catalog, Kind kind) {
    std::ostringstream os;
    os << "enum " << name << " = { ";
    const auto& entries = catalog.entries(kind);
    for (size_t i = 0; i < entries.size(); ++i) {
        if (i) os << ", ";
        os << entries[i].name;
    }
    os << " };\n";
    return os.str();
}

struct BlockWriter {
    std::ostringstream& os;
    bool minimize;

    /// Emits one universally quantified transition block: the preconditions
    /// conjunction, then the effect equality and the frame conditions.
    void block(StepKind kind, const std::vector<std::string>& preconditions,
               const std::string& effect_slot) {
        const char* range = minimize ? "max_steps" : "n";
        os << "constraint forall(i in 1.." << range << ")\n(\n";
        os << "  construct[i] = " << step_kind_name(kind) << " ->\n";
        std::string pad = "      ";
        os << "    (\n";
        if (minimize) {
            os << "      i > n \\/\n      (\n";
            pad = "        ";
        }
        std::vector<std::string> lines = preconditions;
        const char* comps[] = {"points", "lines", "circles", "angles"};
        const char* sets[] = {"known_points", "known_lines", "known_circles", "known_angles"};
        Kind produced = step_signature(kind).produced;
        for (int k = 0; k < kNumKinds; ++k) {
            if (static_cast<Kind>(k) == produced) {
                lines.push_back(std::string(sets[k]) + "[i] = " + sets[k] + "[i-1] union { " +
                                effect_slot + " }");
            } else {
                lines.push_back(std::string(sets[k]) + "[i] = " + sets[k] + "[i-1]");
            }
        }
        (void)comps;
        for (size_t i = 0; i < lines.size(); ++i) {
            os << pad << lines[i];
            if (i + 1 < lines.size()) os << " /\\";
            os << "\n";
        }
        if (minimize) os << "      )\n";
        os << "    )\n);\n\n";
    }
};

} // namespace detail

/// Serializes the eleven relation families as MiniZinc data (canonically
/// ordered; empty families are emitted as empty literals).
inline std::string emit_data(const KnowledgeBase& kb, const Catalog& catalog) {
    detail::check_kb_shape(kb, catalog);
    auto pname = [&](int i) { return catalog.entries(Kind::Point)[static_cast<size_t>(i)].name; };
    auto lname = [&](int i) { return catalog.entries(Kind::Line)[static_cast<size_t>(i)].name; };
    auto cname = [&](int i) { return catalog.entries(Kind::Circle)[static_cast<size_t>(i)].name; };
    auto aname = [&](int i) { return catalog.entries(Kind::Angle)[static_cast<size_t>(i)].name; };

    std::ostringstream os;
    os << "% Geometric knowledge relations over the object enumerations.\n";

    auto set_of = [&](const std::vector<int>& v, auto&& name) {
        std::string s = "{";
        for (size_t i = 0; i < v.size(); ++i) {
            s += (i ? ", " : " ") + name(v[i]);
        }
        s += v.empty() ? "}" : " }";
        return s;
    };
    auto sets_array = [&](const char* param, const char* index_enum,
                          const std::vector<std::vector<int>>& m, auto&& vname) {
        os << param << " = array1d(" << index_enum << ", [";
        for (size_t i = 0; i < m.size(); ++i) {
            if (i) os << ", ";
            os << set_of(m[i], vname);
        }
        os << "]);\n";
    };

    sets_array("inc_lines", "Point", kb.inc_lines, lname);
    sets_array("inc_circles", "Point", kb.inc_circles, cname);
    sets_array("perp_lines", "Line", kb.perp_lines, lname);
    sets_array("parallel_lines", "Line", kb.parallel_lines, lname);

    {
        std::vector<int> with;
        for (size_t c = 0; c < kb.circle_center.size(); ++c)
            if (kb.circle_center[c] >= 0) with.push_back(static_cast<int>(c));
        os << "has_center = " << set_of(with, cname) << ";\n";
        os << "circle_center = array1d(Circle, [";
        for (size_t c = 0; c < kb.circle_center.size(); ++c) {
            if (c) os << ", ";
            os << pname(kb.circle_center[c] >= 0 ? kb.circle_center[c] : 0);
        }
        os << "]);\n";
    }
    {
        std::vector<int> with;
        for (size_t c = 0; c < kb.circle_diameter.size(); ++c)
            if (kb.circle_diameter[c]) with.push_back(static_cast<int>(c));
        os << "has_diameter = " << set_of(with, cname) << ";\n";
        for (int part = 0; part < 2; ++part) {
            os << (part == 0 ? "circle_diam_a" : "circle_diam_b") << " = array1d(Circle, [";
            for (size_t c = 0; c < kb.circle_diameter.size(); ++c) {
                if (c) os << ", ";
                int v = 0;
                if (kb.circle_diameter[c])
                    v = part == 0 ? kb.circle_diameter[c]->first : kb.circle_diameter[c]->second;
                os << pname(v);
            }
            os << "]);\n";
        }
    }
    sets_array("tangent_lines", "Circle", kb.tangent_lines, lname);

    auto tuple_array2d = [&](const char* count_name, const char* param, auto&& rows, int arity,
                             auto&& name_at) {
        os << count_name << " = " << rows.size() << ";\n";
        os << param << " = array2d(1.." << rows.size() << ", 1.." << arity << ", [";
        bool first = true;
        for (const auto& r : rows) {
            for (int k = 0; k < arity; ++k) {
                if (!first) os << ", ";
                os << name_at(r, k);
                first = false;
            }
        }
        os << "]);\n";
    };

    tuple_array2d("n_ratio3", "known_ratio_triplets", kb.ratio_triplets, 3,
                  [&](const std::array<int, 3>& r, int k) { return pname(r[static_cast<size_t>(k)]); });
    tuple_array2d("n_ratio4", "known_ratio_quadruplets", kb.ratio_quadruplets, 4,
                  [&](const std::array<int, 4>& r, int k) { return pname(r[static_cast<size_t>(k)]); });

    os << "n_angle_defs = " << kb.angle_defs.size() << ";\n";
    os << "angle_def_lines = array2d(1.." << kb.angle_defs.size() << ", 1..2, [";
    for (size_t i = 0; i < kb.angle_defs.size(); ++i) {
        if (i) os << ", ";
        os << lname(kb.angle_defs[i].p) << ", " << lname(kb.angle_defs[i].q);
    }
    os << "]);\n";
    os << "angle_def_angle = array1d(1.." << kb.angle_defs.size() << ", [";
    for (size_t i = 0; i < kb.angle_defs.size(); ++i) {
        if (i) os << ", ";
        os << aname(kb.angle_defs[i].angle);
    }
    os << "]);\n";

    tuple_array2d("n_perp_bisectors", "perp_bisector_points", kb.perp_bisectors, 2,
                  [&](const std::array<int, 3>& r, int k) { return pname(r[static_cast<size_t>(k)]); });
    os << "perp_bisector_line = array1d(1.." << kb.perp_bisectors.size() << ", [";
    for (size_t i = 0; i < kb.perp_bisectors.size(); ++i) {
        if (i) os << ", ";
        os << lname(kb.perp_bisectors[i][2]);
    }
    os << "]);\n";

    tuple_array2d("n_harmonic", "harmonic_quadruplets", kb.harmonic_quadruplets, 4,
                  [&](const std::array<int, 4>& r, int k) { return pname(r[static_cast<size_t>(k)]); });

    os << "n_locus = " << kb.locus_defs.size() << ";\n";
    os << "locus_points = array2d(1.." << kb.locus_defs.size() << ", 1..2, [";
    for (size_t i = 0; i < kb.locus_defs.size(); ++i) {
        if (i) os << ", ";
        os << pname(kb.locus_defs[i].x) << ", " << pname(kb.locus_defs[i].y);
    }
    os << "]);\n";
    os << "locus_angle = array1d(1.." << kb.locus_defs.size() << ", [";
    for (size_t i = 0; i < kb.locus_defs.size(); ++i) {
        if (i) os << ", ";
        os << aname(kb.locus_defs[i].angle);
    }
    os << "]);\n";
    os << "locus_circle = array1d(1.." << kb.locus_defs.size() << ", [";
    for (size_t i = 0; i < kb.locus_defs.size(); ++i) {
        if (i) os << ", ";
        os << cname(kb.locus_defs[i].circle);
    }
    os << "]);\n";

    os << "n_homothety = " << kb.homothety_triplets.size() << ";\n";
    os << "homothety_center = array1d(1.." << kb.homothety_triplets.size() << ", [";
    for (size_t i = 0; i < kb.homothety_triplets.size(); ++i) {
        if (i) os << ", ";
        os << pname(kb.homothety_triplets[i][0]);
    }
    os << "]);\n";
    os << "homothety_from = array1d(1.." << kb.homothety_triplets.size() << ", [";
    for (size_t i = 0; i < kb.homothety_triplets.size(); ++i) {
        if (i) os << ", ";
        os << lname(kb.homothety_triplets[i][1]);
    }
    os << "]);\n";
    os << "homothety_to = array1d(1.." << kb.homothety_triplets.size() << ", [";
    for (size_t i = 0; i < kb.homothety_triplets.size(); ++i) {
        if (i) os << ", ";
        os << lname(kb.homothety_triplets[i][2]);
    }
    os << "]);\n";

    return os.str();
}

/// Compiles (problem, knowledge base, length bound) into a constraint-model
/// text: state arrays, the construct array, one transition block per step
/// kind, the initial state and the goal constraint. Byte-stable for fixed
/// inputs.
inline EmittedModel emit_model(const Problem& problem, const KnowledgeBase& kb,
                               const Catalog& catalog, const PlannerConfig& config,
                               EmitMode mode) {
    detail::check_kb_shape(kb, catalog);
    for (ObjectId id : problem.given) {
        if (id.kind != Kind::Point || id.index >= catalog.count(Kind::Point))
            throw EmissionError("problem references an object absent from the knowledge base");
    }

    const bool minimize = mode == EmitMode::Minimize;
    const int n = config.max_steps;
    if (n < 0) throw EmissionError("negative plan length bound");
    if (minimize && n < 1) throw EmissionError("minimize mode needs max_steps >= 1");

    std::ostringstream os;
    os << "% Ruler-and-compass triangle construction planning as finite-domain\n";
    os << "% constraint solving. States are sets of constructed objects; each\n";
    os << "% step applies one construction operator.\n\n";
    if (minimize) {
        os << "int: max_steps = " << n << ";\n";
        os << "var 1..max_steps: n;\n\n";
    } else {
        os << "int: n = " << n << ";\n\n";
    }

    os << detail::enum_def("Point", catalog, Kind::Point);
    os << detail::enum_def("Line", catalog, Kind::Line);
    os << detail::enum_def("Circle", catalog, Kind::Circle);
    os << detail::enum_def("Angle", catalog, Kind::Angle);
    os << "enum ConsType = { ";
    for (int i = 0; i < kNumStepKinds; ++i) {
        if (i) os << ", ";
        os << step_kind_name(static_cast<StepKind>(i));
    }
    os << " };\n\n";

    os << "array[Point] of set of Line: inc_lines;\n";
    os << "array[Point] of set of Circle: inc_circles;\n";
    os << "array[Line] of set of Line: perp_lines;\n";
    os << "array[Line] of set of Line: parallel_lines;\n";
    os << "set of Circle: has_center;\n";
    os << "array[Circle] of Point: circle_center;\n";
    os << "set of Circle: has_diameter;\n";
    os << "array[Circle] of Point: circle_diam_a;\n";
    os << "array[Circle] of Point: circle_diam_b;\n";
    os << "array[Circle] of set of Line: tangent_lines;\n";
    os << "int: n_ratio3;\n";
    os << "array[1..n_ratio3, 1..3] of Point: known_ratio_triplets;\n";
    os << "int: n_ratio4;\n";
    os << "array[1..n_ratio4, 1..4] of Point: known_ratio_quadruplets;\n";
    os << "int: n_angle_defs;\n";
    os << "array[1..n_angle_defs, 1..2] of Line: angle_def_lines;\n";
    os << "array[1..n_angle_defs] of Angle: angle_def_angle;\n";
    os << "int: n_perp_bisectors;\n";
    os << "array[1..n_perp_bisectors, 1..2] of Point: perp_bisector_points;\n";
    os << "array[1..n_perp_bisectors] of Line: perp_bisector_line;\n";
    os << "int: n_harmonic;\n";
    os << "array[1..n_harmonic, 1..4] of Point: harmonic_quadruplets;\n";
    os << "int: n_locus;\n";
    os << "array[1..n_locus, 1..2] of Point: locus_points;\n";
    os << "array[1..n_locus] of Angle: locus_angle;\n";
    os << "array[1..n_locus] of Circle: locus_circle;\n";
    os << "int: n_homothety;\n";
    os << "array[1..n_homothety] of Point: homothety_center;\n";
    os << "array[1..n_homothety] of Line: homothety_from;\n";
    os << "array[1..n_homothety] of Line: homothety_to;\n\n";

    const char* bound = minimize ? "max_steps" : "n";
    os << "array[0.." << bound << "] of var set of Point: known_points;\n";
    os << "array[0.." << bound << "] of var set of Line: known_lines;\n";
    os << "array[0.." << bound << "] of var set of Circle: known_circles;\n";
    os << "array[0.." << bound << "] of var set of Angle: known_angles;\n";
    os << "array[1.." << bound << "] of var ConsType: construct;\n";
    os << "array[1.." << bound << ", 1..4] of var Point: points;\n";
    os << "array[1.." << bound << ", 1..2] of var Line: lines;\n";
    os << "array[1.." << bound << ", 1..2] of var Circle: circles;\n";
    os << "array[1.." << bound << ", 1..1] of var Angle: angles;\n\n";

    os << "constraint known_points[0] = { ";
    for (size_t i = 0; i < problem.given.size(); ++i) {
        if (i) os << ", ";
        os << catalog.name(problem.given[i]);
    }
    os << " };\n";
    os << "constraint known_lines[0] = {};\n";
    os << "constraint known_circles[0] = {};\n";
    os << "constraint known_angles[0] = {};\n\n";

    detail::BlockWriter w{os, minimize};

    w.block(StepKind::LineThroughPoints,
            {"points[i,1] in known_points[i-1]", "points[i,2] in known_points[i-1]",
             "points[i,1] != points[i,2]", "lines[i,1] in inc_lines[points[i,1]]",
             "lines[i,1] in inc_lines[points[i,2]]", "not (lines[i,1] in known_lines[i-1])"},
            "lines[i,1]");
    w.block(StepKind::LineIntersect,
            {"lines[i,1] in known_lines[i-1]", "lines[i,2] in known_lines[i-1]",
             "lines[i,1] != lines[i,2]", "not (lines[i,1] in parallel_lines[lines[i,2]])",
             "lines[i,1] in inc_lines[points[i,1]]", "lines[i,2] in inc_lines[points[i,1]]",
             "not (points[i,1] in known_points[i-1])"},
            "points[i,1]");
    w.block(StepKind::CircleCenterPoint,
            {"points[i,1] in known_points[i-1]", "points[i,2] in known_points[i-1]",
             "points[i,1] != points[i,2]", "circles[i,1] in has_center",
             "circle_center[circles[i,1]] = points[i,1]",
             "circles[i,1] in inc_circles[points[i,2]]",
             "not (circles[i,1] in known_circles[i-1])"},
            "circles[i,1]");
    w.block(StepKind::CircleFromDiameter,
            {"points[i,1] in known_points[i-1]", "points[i,2] in known_points[i-1]",
             "points[i,1] != points[i,2]", "circles[i,1] in has_diameter",
             "((circle_diam_a[circles[i,1]] = points[i,1] /\\ circle_diam_b[circles[i,1]] = "
             "points[i,2]) \\/ (circle_diam_a[circles[i,1]] = points[i,2] /\\ "
             "circle_diam_b[circles[i,1]] = points[i,1]))",
             "not (circles[i,1] in known_circles[i-1])"},
            "circles[i,1]");
    w.block(StepKind::LineCircleIntersect,
            {"lines[i,1] in known_lines[i-1]", "circles[i,1] in known_circles[i-1]",
             "lines[i,1] in inc_lines[points[i,1]]", "circles[i,1] in inc_circles[points[i,1]]",
             "not (points[i,1] in known_points[i-1])"},
            "points[i,1]");
    w.block(StepKind::CircleCircleIntersect,
            {"circles[i,1] in known_circles[i-1]", "circles[i,2] in known_circles[i-1]",
             "circles[i,1] != circles[i,2]", "circles[i,1] in inc_circles[points[i,1]]",
             "circles[i,2] in inc_circles[points[i,1]]",
             "not (points[i,1] in known_points[i-1])"},
            "points[i,1]");
    w.block(StepKind::PerpendicularThrough,
            {"lines[i,1] in known_lines[i-1]", "points[i,1] in known_points[i-1]",
             "lines[i,2] != lines[i,1]", "lines[i,2] in perp_lines[lines[i,1]]",
             "lines[i,2] in inc_lines[points[i,1]]", "not (lines[i,2] in known_lines[i-1])"},
            "lines[i,2]");
    w.block(StepKind::ParallelThrough,
            {"lines[i,1] in known_lines[i-1]", "points[i,1] in known_points[i-1]",
             "lines[i,2] != lines[i,1]", "lines[i,2] in parallel_lines[lines[i,1]]",
             "lines[i,2] in inc_lines[points[i,1]]", "not (lines[i,2] in known_lines[i-1])"},
            "lines[i,2]");
    w.block(StepKind::PerpBisector,
            {"points[i,1] in known_points[i-1]", "points[i,2] in known_points[i-1]",
             "points[i,1] != points[i,2]",
             "exists(t in 1..n_perp_bisectors)(((perp_bisector_points[t,1] = points[i,1] /\\ "
             "perp_bisector_points[t,2] = points[i,2]) \\/ (perp_bisector_points[t,1] = "
             "points[i,2] /\\ perp_bisector_points[t,2] = points[i,1])) /\\ "
             "perp_bisector_line[t] = lines[i,1])",
             "not (lines[i,1] in known_lines[i-1])"},
            "lines[i,1]");
    w.block(StepKind::RatioPoint3,
            {"points[i,1] in known_points[i-1]", "points[i,2] in known_points[i-1]",
             "exists(t in 1..n_ratio3)(known_ratio_triplets[t,1] = points[i,1] /\\ "
             "known_ratio_triplets[t,2] = points[i,2] /\\ known_ratio_triplets[t,3] = "
             "points[i,3])",
             "not (points[i,3] in known_points[i-1])"},
            "points[i,3]");
    w.block(StepKind::RatioPoint4,
            {"points[i,1] in known_points[i-1]", "points[i,2] in known_points[i-1]",
             "points[i,3] in known_points[i-1]",
             "exists(t in 1..n_ratio4)(known_ratio_quadruplets[t,1] = points[i,1] /\\ "
             "known_ratio_quadruplets[t,2] = points[i,2] /\\ known_ratio_quadruplets[t,3] = "
             "points[i,3] /\\ known_ratio_quadruplets[t,4] = points[i,4])",
             "not (points[i,4] in known_points[i-1])"},
            "points[i,4]");
    w.block(StepKind::AngleFromLines,
            {"lines[i,1] in known_lines[i-1]", "lines[i,2] in known_lines[i-1]",
             "lines[i,1] != lines[i,2]",
             "exists(t in 1..n_angle_defs)(angle_def_lines[t,1] = lines[i,1] /\\ "
             "angle_def_lines[t,2] = lines[i,2] /\\ angle_def_angle[t] = angles[i,1])",
             "not (angles[i,1] in known_angles[i-1])"},
            "angles[i,1]");
    w.block(StepKind::LineFromAngle,
            {"lines[i,1] in known_lines[i-1]", "angles[i,1] in known_angles[i-1]",
             "points[i,1] in known_points[i-1]", "lines[i,2] != lines[i,1]",
             "exists(t in 1..n_angle_defs)(angle_def_lines[t,1] = lines[i,1] /\\ "
             "angle_def_lines[t,2] = lines[i,2] /\\ angle_def_angle[t] = angles[i,1])",
             "lines[i,1] in inc_lines[points[i,1]]", "lines[i,2] in inc_lines[points[i,1]]",
             "not (lines[i,2] in known_lines[i-1])"},
            "lines[i,2]");
    w.block(StepKind::HarmonicPoint,
            {"points[i,1] in known_points[i-1]", "points[i,2] in known_points[i-1]",
             "points[i,3] in known_points[i-1]",
             "exists(t in 1..n_harmonic)(harmonic_quadruplets[t,1] = points[i,1] /\\ "
             "harmonic_quadruplets[t,2] = points[i,2] /\\ harmonic_quadruplets[t,3] = "
             "points[i,3] /\\ harmonic_quadruplets[t,4] = points[i,4])",
             "not (points[i,4] in known_points[i-1])"},
            "points[i,4]");
    w.block(StepKind::LocusCircle,
            {"points[i,1] in known_points[i-1]", "points[i,2] in known_points[i-1]",
             "points[i,1] != points[i,2]", "angles[i,1] in known_angles[i-1]",
             "exists(t in 1..n_locus)(locus_points[t,1] = points[i,1] /\\ locus_points[t,2] = "
             "points[i,2] /\\ locus_angle[t] = angles[i,1] /\\ locus_circle[t] = circles[i,1])",
             "not (circles[i,1] in known_circles[i-1])"},
            "circles[i,1]");
    w.block(StepKind::HomotheticLine,
            {"points[i,1] in known_points[i-1]", "lines[i,1] in known_lines[i-1]",
             "lines[i,2] != lines[i,1]",
             "exists(t in 1..n_homothety)(homothety_center[t] = points[i,1] /\\ "
             "homothety_from[t] = lines[i,1] /\\ homothety_to[t] = lines[i,2])",
             "not (lines[i,2] in known_lines[i-1])"},
            "lines[i,2]");
    w.block(StepKind::TangentFromPoint,
            {"points[i,1] in known_points[i-1]", "circles[i,1] in known_circles[i-1]",
             "lines[i,1] in tangent_lines[circles[i,1]]",
             "lines[i,1] in inc_lines[points[i,1]]", "not (lines[i,1] in known_lines[i-1])"},
            "lines[i,1]");
    w.block(StepKind::CenterOfCircle,
            {"circles[i,1] in known_circles[i-1]", "circles[i,1] in has_center",
             "circle_center[circles[i,1]] = points[i,1]",
             "not (points[i,1] in known_points[i-1])"},
            "points[i,1]");

    os << "constraint { A, B, C } subset known_points[n];\n\n";
    os << (minimize ? "solve minimize n;\n" : "solve satisfy;\n");

    EmittedModel out;
    out.model_text = os.str();
    out.data_text = emit_data(kb, catalog);
    out.n = n;
    return out;
}

} // namespace tricons
