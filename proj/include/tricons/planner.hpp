#pragma once

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "tricons/catalog.hpp"
#include "tricons/knowledge_base.hpp"

namespace tricons {

struct PreconditionError : std::runtime_error {
    std::string condition;
    explicit PreconditionError(std::string cond)
        : std::runtime_error("step precondition violated: " + cond), condition(std::move(cond)) {}
};

struct OracleLimitError : std::runtime_error {
    explicit OracleLimitError(const std::string& what) : std::runtime_error(what) {}
};

/// Sets of known objects, one bit per catalog object (up to 64 per kind).
struct State {
    uint64_t bits[kNumKinds] = {0, 0, 0, 0};

    bool contains(ObjectId id) const {
        return (bits[static_cast<int>(id.kind)] >> id.index) & 1ULL;
    }
    void add(ObjectId id) { bits[static_cast<int>(id.kind)] |= 1ULL << id.index; }
    int size() const {
        int n = 0;
        for (uint64_t b : bits) n += std::popcount(b);
        return n;
    }
    friend bool operator==(const State&, const State&) = default;
};

struct StateHash {
    size_t operator()(const State& s) const {
        uint64_t h = 0x9e3779b97f4a7c15ULL;
        for (uint64_t b : s.bits) {
            h ^= b + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
            h *= 0xbf58476d1ce4e5b9ULL;
        }
        return static_cast<size_t>(h ^ (h >> 31));
    }
};

enum class StepKind : uint8_t {
    LineThroughPoints,
    LineIntersect,
    CircleCenterPoint,
    CircleFromDiameter,
    LineCircleIntersect,
    CircleCircleIntersect,
    PerpendicularThrough,
    ParallelThrough,
    PerpBisector,
    RatioPoint3,
    RatioPoint4,
    AngleFromLines,
    LineFromAngle,
    HarmonicPoint,
    LocusCircle,
    HomotheticLine,
    TangentFromPoint,
    CenterOfCircle,
};

constexpr int kNumStepKinds = 18;

inline const char* step_kind_name(StepKind k) {
    static const char* names[] = {
        "LineThroughPoints", "LineIntersect",      "CircleCenterPoint", "CircleFromDiameter",
        "LineCircleIntersect", "CircleCircleIntersect", "PerpendicularThrough", "ParallelThrough",
        "PerpBisector",      "RatioPoint3",        "RatioPoint4",       "AngleFromLines",
        "LineFromAngle",     "HarmonicPoint",      "LocusCircle",       "HomotheticLine",
        "TangentFromPoint",  "CenterOfCircle",
    };
    return names[static_cast<int>(k)];
}

inline StepKind parse_step_kind(const std::string& s) {
    for (int i = 0; i < kNumStepKinds; ++i) {
        if (s == step_kind_name(static_cast<StepKind>(i))) return static_cast<StepKind>(i);
    }
    throw std::invalid_argument("unknown step kind: " + s);
}

/// Argument signature (kinds of consumed objects, in the printed order) and
/// the produced kind, per step kind.
struct StepSignature {
    std::vector<Kind> args;
    Kind produced;
};

inline const StepSignature& step_signature(StepKind k) {
    static const std::vector<StepSignature> sigs = {
        {{Kind::Point, Kind::Point}, Kind::Line},              // LineThroughPoints
        {{Kind::Line, Kind::Line}, Kind::Point},               // LineIntersect
        {{Kind::Point, Kind::Point}, Kind::Circle},            // CircleCenterPoint
        {{Kind::Point, Kind::Point}, Kind::Circle},            // CircleFromDiameter
        {{Kind::Line, Kind::Circle}, Kind::Point},             // LineCircleIntersect
        {{Kind::Circle, Kind::Circle}, Kind::Point},           // CircleCircleIntersect
        {{Kind::Line, Kind::Point}, Kind::Line},               // PerpendicularThrough
        {{Kind::Line, Kind::Point}, Kind::Line},               // ParallelThrough
        {{Kind::Point, Kind::Point}, Kind::Line},              // PerpBisector
        {{Kind::Point, Kind::Point}, Kind::Point},             // RatioPoint3
        {{Kind::Point, Kind::Point, Kind::Point}, Kind::Point},// RatioPoint4
        {{Kind::Line, Kind::Line}, Kind::Angle},               // AngleFromLines
        {{Kind::Line, Kind::Angle, Kind::Point}, Kind::Line},  // LineFromAngle
        {{Kind::Point, Kind::Point, Kind::Point}, Kind::Point},// HarmonicPoint
        {{Kind::Point, Kind::Point, Kind::Angle}, Kind::Circle},// LocusCircle
        {{Kind::Point, Kind::Line}, Kind::Line},               // HomotheticLine
        {{Kind::Point, Kind::Circle}, Kind::Line},             // TangentFromPoint
        {{Kind::Circle}, Kind::Point},                         // CenterOfCircle
    };
    return sigs[static_cast<int>(k)];
}

/// One construction step: consumed arguments grouped by kind, plus the single
/// produced object.
struct Step {
    StepKind kind = StepKind::LineThroughPoints;
    std::vector<int> point_args;
    std::vector<int> line_args;
    std::vector<int> circle_args;
    std::vector<int> angle_args;
    ObjectId produced;

    const std::vector<int>& args_of(Kind k) const {
        switch (k) {
            case Kind::Point: return point_args;
            case Kind::Line: return line_args;
            case Kind::Circle: return circle_args;
            case Kind::Angle: return angle_args;
        }
        return point_args;
    }
    std::vector<int>& args_of(Kind k) {
        return const_cast<std::vector<int>&>(static_cast<const Step*>(this)->args_of(k));
    }

    /// Consumed arguments flattened in the signature's printed order.
    std::vector<ObjectId> ordered_args() const {
        const auto& sig = step_signature(kind);
        int cursor[kNumKinds] = {0, 0, 0, 0};
        std::vector<ObjectId> out;
        for (Kind k : sig.args) {
            int& c = cursor[static_cast<int>(k)];
            out.push_back(ObjectId{k, args_of(k).at(static_cast<size_t>(c))});
            ++c;
        }
        return out;
    }

    friend bool operator==(const Step&, const Step&) = default;
};

struct Plan {
    std::vector<Step> steps;
    int length() const { return static_cast<int>(steps.size()); }
    friend bool operator==(const Plan&, const Plan&) = default;
};

/// A Wernick-style problem: three given points; the goal is always {A, B, C}.
struct Problem {
    std::array<ObjectId, 3> given;

    static Problem from_names(const Catalog& catalog, const std::string& p1,
                              const std::string& p2, const std::string& p3) {
        Problem pr{{catalog.point(p1), catalog.point(p2), catalog.point(p3)}};
        if (pr.given[0] == pr.given[1] || pr.given[0] == pr.given[2] ||
            pr.given[1] == pr.given[2])
            throw std::invalid_argument("problem points must be pairwise distinct");
        return pr;
    }

    State initial_state() const {
        State s;
        for (ObjectId id : given) s.add(id);
        return s;
    }
};

inline State goal_state(const Catalog& catalog) {
    State s;
    s.add(catalog.point("A"));
    s.add(catalog.point("B"));
    s.add(catalog.point("C"));
    return s;
}

enum class Strategy { Linear, Minimization, Incremental };

inline const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Linear: return "linear";
        case Strategy::Minimization: return "minimization";
        case Strategy::Incremental: return "incremental";
    }
    return "?";
}

inline Strategy parse_strategy(const std::string& s) {
    if (s == "linear") return Strategy::Linear;
    if (s == "minimization") return Strategy::Minimization;
    if (s == "incremental") return Strategy::Incremental;
    throw std::invalid_argument("unknown strategy: " + s);
}

struct PlannerConfig {
    int max_steps = 11;
    int window = 3;
    Strategy strategy = Strategy::Linear;
};

// ---------------------------------------------------------------------------
// Compiled step table.

/// A ground step instance plus the bitmasks needed to test applicability.
struct StepTemplate {
    Step step;
    uint64_t req[kNumKinds] = {0, 0, 0, 0};
    int produced_kind = 0;
    uint64_t produced_bit = 0;

    bool applicable(const State& s) const {
        for (int k = 0; k < kNumKinds; ++k) {
            if ((s.bits[k] & req[k]) != req[k]) return false;
        }
        return (s.bits[produced_kind] & produced_bit) == 0;
    }
};

/// All ground steps licensed by a knowledge base, in the canonical operator
/// order: steps producing goal points first, then by step kind, then by
/// lexicographic arguments, then by produced object.
class StepTable {
public:
    StepTable(const KnowledgeBase& kb, const Catalog& catalog) : goal_(goal_state(catalog)) {
        build(kb, catalog);
    }

    const std::vector<StepTemplate>& templates() const { return templates_; }
    const State& goal() const { return goal_; }

private:
    void add(StepKind kind, std::initializer_list<ObjectId> args, ObjectId produced) {
        StepTemplate t;
        t.step.kind = kind;
        for (ObjectId a : args) {
            t.step.args_of(a.kind).push_back(a.index);
            t.req[static_cast<int>(a.kind)] |= 1ULL << a.index;
        }
        t.step.produced = produced;
        t.produced_kind = static_cast<int>(produced.kind);
        t.produced_bit = 1ULL << produced.index;
        // A step may not consume its own product.
        if (t.req[t.produced_kind] & t.produced_bit) return;
        templates_.push_back(std::move(t));
    }

    void build(const KnowledgeBase& kb, const Catalog& catalog) {
        const int np = catalog.count(Kind::Point);
        const int nl = catalog.count(Kind::Line);
        const int nc = catalog.count(Kind::Circle);
        auto P = [](int i) { return ObjectId{Kind::Point, i}; };
        auto L = [](int i) { return ObjectId{Kind::Line, i}; };
        auto C = [](int i) { return ObjectId{Kind::Circle, i}; };
        auto A = [](int i) { return ObjectId{Kind::Angle, i}; };

        for (int l = 0; l < nl; ++l) {
            std::vector<int> on;
            for (int p = 0; p < np; ++p)
                if (kb.incident_line(p, l)) on.push_back(p);
            for (size_t i = 0; i < on.size(); ++i)
                for (size_t j = i + 1; j < on.size(); ++j)
                    add(StepKind::LineThroughPoints, {P(on[i]), P(on[j])}, L(l));
        }
        for (int p = 0; p < np; ++p) {
            const auto& ls = kb.inc_lines[static_cast<size_t>(p)];
            for (size_t i = 0; i < ls.size(); ++i) {
                for (size_t j = i + 1; j < ls.size(); ++j) {
                    if (kb.parallel(ls[i], ls[j])) continue;
                    add(StepKind::LineIntersect, {L(ls[i]), L(ls[j])}, P(p));
                }
            }
        }
        for (int c = 0; c < nc; ++c) {
            int ctr = kb.circle_center[static_cast<size_t>(c)];
            if (ctr >= 0) {
                for (int p = 0; p < np; ++p) {
                    if (p == ctr || !kb.incident_circle(p, c)) continue;
                    add(StepKind::CircleCenterPoint, {P(ctr), P(p)}, C(c));
                }
                add(StepKind::CenterOfCircle, {C(c)}, P(ctr));
            }
            if (kb.circle_diameter[static_cast<size_t>(c)]) {
                auto [p, q] = *kb.circle_diameter[static_cast<size_t>(c)];
                add(StepKind::CircleFromDiameter, {P(p), P(q)}, C(c));
            }
            for (int t : kb.tangent_lines[static_cast<size_t>(c)]) {
                for (int p = 0; p < np; ++p)
                    if (kb.incident_line(p, t))
                        add(StepKind::TangentFromPoint, {P(p), C(c)}, L(t));
            }
        }
        for (int p = 0; p < np; ++p) {
            for (int l : kb.inc_lines[static_cast<size_t>(p)])
                for (int c : kb.inc_circles[static_cast<size_t>(p)])
                    add(StepKind::LineCircleIntersect, {L(l), C(c)}, P(p));
            const auto& cs = kb.inc_circles[static_cast<size_t>(p)];
            for (size_t i = 0; i < cs.size(); ++i)
                for (size_t j = i + 1; j < cs.size(); ++j)
                    add(StepKind::CircleCircleIntersect, {C(cs[i]), C(cs[j])}, P(p));
        }
        for (int l = 0; l < nl; ++l) {
            for (int m : kb.perp_lines[static_cast<size_t>(l)])
                for (int p = 0; p < np; ++p)
                    if (kb.incident_line(p, m))
                        add(StepKind::PerpendicularThrough, {L(l), P(p)}, L(m));
            for (int m : kb.parallel_lines[static_cast<size_t>(l)])
                for (int p = 0; p < np; ++p)
                    if (kb.incident_line(p, m))
                        add(StepKind::ParallelThrough, {L(l), P(p)}, L(m));
        }
        for (const auto& b : kb.perp_bisectors)
            add(StepKind::PerpBisector, {P(b[0]), P(b[1])}, L(b[2]));
        for (const auto& r : kb.ratio_triplets)
            add(StepKind::RatioPoint3, {P(r[0]), P(r[1])}, P(r[2]));
        for (const auto& r : kb.ratio_quadruplets)
            add(StepKind::RatioPoint4, {P(r[0]), P(r[1]), P(r[2])}, P(r[3]));
        for (const auto& d : kb.angle_defs) {
            add(StepKind::AngleFromLines, {L(d.p), L(d.q)}, A(d.angle));
            // Rebuilding line q needs the angle, the other line and their
            // common point.
            for (int x = 0; x < np; ++x)
                if (kb.incident_line(x, d.p) && kb.incident_line(x, d.q))
                    add(StepKind::LineFromAngle, {L(d.p), A(d.angle), P(x)}, L(d.q));
        }
        for (const auto& h : kb.harmonic_quadruplets)
            add(StepKind::HarmonicPoint, {P(h[0]), P(h[1]), P(h[2])}, P(h[3]));
        for (const auto& d : kb.locus_defs)
            add(StepKind::LocusCircle, {P(d.x), P(d.y), A(d.angle)}, C(d.circle));
        for (const auto& h : kb.homothety_triplets)
            add(StepKind::HomotheticLine, {P(h[0]), L(h[1])}, L(h[2]));

        dedupe_and_sort();
    }

    void dedupe_and_sort() {
        // Keep the first template (in knowledge-base order) for each
        // (kind, required set, produced object).
        std::set<std::array<uint64_t, 6>> seen;
        std::vector<StepTemplate> unique;
        unique.reserve(templates_.size());
        for (auto& t : templates_) {
            std::array<uint64_t, 6> key{static_cast<uint64_t>(t.step.kind),
                                        t.req[0], t.req[1], t.req[2], t.req[3],
                                        (static_cast<uint64_t>(t.produced_kind) << 32) |
                                            t.produced_bit};
            if (seen.insert(key).second) unique.push_back(std::move(t));
        }
        templates_ = std::move(unique);

        auto order_key = [&](const StepTemplate& t) {
            int goal_first =
                (t.produced_kind == static_cast<int>(Kind::Point) &&
                 (t.produced_bit & goal_.bits[static_cast<int>(Kind::Point)]))
                    ? 0
                    : 1;
            std::vector<int> flat;
            flat.push_back(goal_first);
            flat.push_back(static_cast<int>(t.step.kind));
            for (ObjectId a : t.step.ordered_args()) flat.push_back(a.index);
            flat.push_back(t.step.produced.index);
            return flat;
        };
        std::stable_sort(templates_.begin(), templates_.end(),
                         [&](const StepTemplate& x, const StepTemplate& y) {
                             return order_key(x) < order_key(y);
                         });
    }

    std::vector<StepTemplate> templates_;
    State goal_;
};

// ---------------------------------------------------------------------------
// Step semantics: named precondition checking and application.

/// Returns the name of the first violated precondition, or nullopt when the
/// step is applicable in `state`.
inline std::optional<std::string> step_violation(const State& state, const Step& step,
                                                 const KnowledgeBase& kb,
                                                 const Catalog& catalog) {
    const auto& sig = step_signature(step.kind);
    int want[kNumKinds] = {0, 0, 0, 0};
    for (Kind k : sig.args) ++want[static_cast<int>(k)];
    for (int k = 0; k < kNumKinds; ++k) {
        if (static_cast<int>(step.args_of(static_cast<Kind>(k)).size()) != want[k])
            return "argument arity";
    }
    if (step.produced.kind != sig.produced) return "argument arity";
    for (int k = 0; k < kNumKinds; ++k) {
        auto kind = static_cast<Kind>(k);
        for (int idx : step.args_of(kind)) {
            if (idx < 0 || idx >= catalog.count(kind)) return "argument arity";
            if (!state.contains(ObjectId{kind, idx})) return "arguments known";
        }
    }
    if (step.produced.index < 0 || step.produced.index >= catalog.count(sig.produced))
        return "argument arity";

    const auto& pa = step.point_args;
    const auto& la = step.line_args;
    const auto& ca = step.circle_args;
    const auto& aa = step.angle_args;
    const int prod = step.produced.index;

    switch (step.kind) {
        case StepKind::LineThroughPoints:
            if (pa[0] == pa[1]) return "arguments distinct";
            if (!kb.incident_line(pa[0], prod) || !kb.incident_line(pa[1], prod))
                return "incidence";
            break;
        case StepKind::LineIntersect:
            if (la[0] == la[1]) return "arguments distinct";
            if (kb.parallel(la[0], la[1])) return "lines not parallel";
            if (!kb.incident_line(prod, la[0]) || !kb.incident_line(prod, la[1]))
                return "incidence";
            break;
        case StepKind::CircleCenterPoint:
            if (pa[0] == pa[1]) return "arguments distinct";
            if (kb.circle_center[static_cast<size_t>(prod)] != pa[0]) return "circle center";
            if (!kb.incident_circle(pa[1], prod)) return "incidence";
            break;
        case StepKind::CircleFromDiameter: {
            if (pa[0] == pa[1]) return "arguments distinct";
            const auto& d = kb.circle_diameter[static_cast<size_t>(prod)];
            if (!d || !((d->first == pa[0] && d->second == pa[1]) ||
                        (d->first == pa[1] && d->second == pa[0])))
                return "circle diameter";
            break;
        }
        case StepKind::LineCircleIntersect:
            if (!kb.incident_line(prod, la[0])) return "incidence";
            if (!kb.incident_circle(prod, ca[0])) return "incidence";
            break;
        case StepKind::CircleCircleIntersect:
            if (ca[0] == ca[1]) return "arguments distinct";
            if (!kb.incident_circle(prod, ca[0]) || !kb.incident_circle(prod, ca[1]))
                return "incidence";
            break;
        case StepKind::PerpendicularThrough:
            if (la[0] == prod) return "arguments distinct";
            if (!kb.perpendicular(la[0], prod)) return "perpendicularity";
            if (!kb.incident_line(pa[0], prod)) return "incidence";
            break;
        case StepKind::ParallelThrough:
            if (la[0] == prod) return "arguments distinct";
            if (!kb.parallel(la[0], prod)) return "parallelism";
            if (!kb.incident_line(pa[0], prod)) return "incidence";
            break;
        case StepKind::PerpBisector: {
            if (pa[0] == pa[1]) return "arguments distinct";
            bool found = false;
            for (const auto& b : kb.perp_bisectors)
                if (((b[0] == pa[0] && b[1] == pa[1]) || (b[0] == pa[1] && b[1] == pa[0])) &&
                    b[2] == prod)
                    found = true;
            if (!found) return "perpendicular bisector relation";
            break;
        }
        case StepKind::RatioPoint3: {
            bool found = false;
            for (const auto& r : kb.ratio_triplets)
                if (r[0] == pa[0] && r[1] == pa[1] && r[2] == prod) found = true;
            if (!found) return "known ratio triplet";
            break;
        }
        case StepKind::RatioPoint4: {
            bool found = false;
            for (const auto& r : kb.ratio_quadruplets)
                if (r[0] == pa[0] && r[1] == pa[1] && r[2] == pa[2] && r[3] == prod) found = true;
            if (!found) return "known ratio quadruplet";
            break;
        }
        case StepKind::AngleFromLines: {
            if (la[0] == la[1]) return "arguments distinct";
            bool found = false;
            for (const auto& d : kb.angle_defs)
                if (d.p == la[0] && d.q == la[1] && d.angle == prod) found = true;
            if (!found) return "angle relation";
            break;
        }
        case StepKind::LineFromAngle: {
            if (la[0] == prod) return "arguments distinct";
            bool found = false;
            for (const auto& d : kb.angle_defs)
                if (d.p == la[0] && d.q == prod && d.angle == aa[0]) found = true;
            if (!found) return "angle relation";
            if (!kb.incident_line(pa[0], la[0]) || !kb.incident_line(pa[0], prod))
                return "incidence";
            break;
        }
        case StepKind::HarmonicPoint: {
            bool found = false;
            for (const auto& h : kb.harmonic_quadruplets)
                if (h[0] == pa[0] && h[1] == pa[1] && h[2] == pa[2] && h[3] == prod) found = true;
            if (!found) return "harmonic relation";
            break;
        }
        case StepKind::LocusCircle: {
            if (pa[0] == pa[1]) return "arguments distinct";
            bool found = false;
            for (const auto& d : kb.locus_defs)
                if (d.x == pa[0] && d.y == pa[1] && d.angle == aa[0] && d.circle == prod)
                    found = true;
            if (!found) return "locus relation";
            break;
        }
        case StepKind::HomotheticLine: {
            bool found = false;
            for (const auto& h : kb.homothety_triplets)
                if (h[0] == pa[0] && h[1] == la[0] && h[2] == prod) found = true;
            if (!found) return "homothety relation";
            break;
        }
        case StepKind::TangentFromPoint:
            if (!kb.tangent(ca[0], prod)) return "tangency";
            if (!kb.incident_line(pa[0], prod)) return "incidence";
            break;
        case StepKind::CenterOfCircle:
            if (kb.circle_center[static_cast<size_t>(ca[0])] != prod) return "circle center";
            break;
    }
    if (state.contains(step.produced)) return "produced not known";
    return std::nullopt;
}

/// All steps applicable in `state`, in canonical operator order.
inline std::vector<Step> enumerate_applicable(const State& state, const StepTable& table) {
    std::vector<Step> out;
    for (const auto& t : table.templates()) {
        if (t.applicable(state)) out.push_back(t.step);
    }
    return out;
}

inline std::vector<Step> enumerate_applicable(const State& state, const KnowledgeBase& kb,
                                              const Catalog& catalog) {
    return enumerate_applicable(state, StepTable(kb, catalog));
}

/// Applies a step, adding exactly the produced object. Throws
/// PreconditionError naming the first failed condition if inapplicable.
inline State apply_step(const State& state, const Step& step, const KnowledgeBase& kb,
                        const Catalog& catalog) {
    if (auto bad = step_violation(state, step, kb, catalog)) throw PreconditionError(*bad);
    State next = state;
    next.add(step.produced);
    return next;
}

// ---------------------------------------------------------------------------
// Search.

struct SearchStats {
    std::vector<uint64_t> nodes_per_depth;
    uint64_t nodes = 0;
    double elapsed_sec = 0.0;

    void count(int depth) {
        if (static_cast<size_t>(depth) >= nodes_per_depth.size())
            nodes_per_depth.resize(static_cast<size_t>(depth) + 1, 0);
        ++nodes_per_depth[static_cast<size_t>(depth)];
        ++nodes;
    }
};

enum class SolveOutcome { Found, Exhausted, Timeout };

struct SolveResult {
    std::optional<Plan> plan;
    SolveOutcome outcome = SolveOutcome::Exhausted;
    SearchStats stats;
};

namespace detail {

struct TimeoutSignal {};

using Clock = std::chrono::steady_clock;

/// Depth-first search over the monotone state space with duplicate-state
/// pruning. Children are explored in canonical template order, so the first
/// plan found at the minimal depth is the lexicographically smallest one; the
/// depth-dominance memo only ever prunes paths whose state was reached at
/// most as deep through a lexicographically smaller prefix.
struct Searcher {
    const StepTable& table;
    SearchStats& stats;
    std::optional<Clock::time_point> deadline;
    std::unordered_map<State, int, StateHash> best_depth;
    std::vector<const StepTemplate*> path;
    uint64_t tick = 0;

    void check_deadline() {
        if (deadline && (++tick & 0xFFF) == 0 && Clock::now() > *deadline) throw TimeoutSignal{};
    }

    bool seen_shallower(const State& s, int depth) {
        auto [it, inserted] = best_depth.try_emplace(s, depth);
        if (inserted) return false;
        if (it->second <= depth) return true;
        it->second = depth;
        return false;
    }

    /// First (lexicographically least) plan of length <= limit, if any.
    bool dfs_first(const State& s, int depth, int limit) {
        check_deadline();
        stats.count(depth);
        if ((s.bits[0] & table.goal().bits[0]) == table.goal().bits[0]) return true;
        if (depth == limit) return false;
        for (const auto& t : table.templates()) {
            if (!t.applicable(s)) continue;
            State next = s;
            next.add(t.step.produced);
            if (seen_shallower(next, depth + 1)) continue;
            path.push_back(&t);
            if (dfs_first(next, depth + 1, limit)) return true;
            path.pop_back();
        }
        return false;
    }

    /// Branch-and-bound over plan lengths in 1..best_len-1; leaves the
    /// incumbent (lexicographically least among minimum-length plans) in
    /// `best`.
    std::optional<std::vector<const StepTemplate*>> best;
    int best_len = 0;

    void dfs_bnb(const State& s, int depth) {
        check_deadline();
        stats.count(depth);
        if ((s.bits[0] & table.goal().bits[0]) == table.goal().bits[0]) {
            if (depth < best_len) {
                best = path;
                best_len = depth;
            }
            return;
        }
        for (const auto& t : table.templates()) {
            if (depth + 1 >= best_len) return; // cannot improve on incumbent
            if (!t.applicable(s)) continue;
            State next = s;
            next.add(t.step.produced);
            if (seen_shallower(next, depth + 1)) continue;
            path.push_back(&t);
            dfs_bnb(next, depth + 1);
            path.pop_back();
        }
    }
};

inline Plan materialize(const std::vector<const StepTemplate*>& path) {
    Plan plan;
    for (const auto* t : path) plan.steps.push_back(t->step);
    return plan;
}

} // namespace detail

/// Searches for a minimal-length plan with the configured strategy. All
/// strategies return a plan of minimal length (the same canonical plan); they
/// differ in how the search is bounded and iterated, which the statistics
/// reflect.
inline SolveResult solve(const Problem& problem, const StepTable& table,
                         const PlannerConfig& config,
                         std::optional<double> timeout_sec = std::nullopt) {
    auto start = detail::Clock::now();
    SolveResult result;
    std::optional<detail::Clock::time_point> deadline;
    if (timeout_sec)
        deadline = start + std::chrono::duration_cast<detail::Clock::duration>(
                               std::chrono::duration<double>(*timeout_sec));

    State s0 = problem.initial_state();
    auto finish = [&](SolveResult& r) {
        r.stats.elapsed_sec = std::chrono::duration<double>(detail::Clock::now() - start).count();
        return r;
    };

    if ((s0.bits[0] & table.goal().bits[0]) == table.goal().bits[0]) {
        result.plan = Plan{};
        result.outcome = SolveOutcome::Found;
        return finish(result);
    }

    try {
        switch (config.strategy) {
            case Strategy::Linear: {
                for (int n = 1; n <= config.max_steps; ++n) {
                    detail::Searcher sr{table, result.stats, deadline};
                    if (sr.dfs_first(s0, 0, n)) {
                        result.plan = detail::materialize(sr.path);
                        result.outcome = SolveOutcome::Found;
                        return finish(result);
                    }
                }
                result.outcome = SolveOutcome::Exhausted;
                return finish(result);
            }
            case Strategy::Minimization: {
                detail::Searcher sr{table, result.stats, deadline};
                sr.best_len = config.max_steps + 1;
                sr.dfs_bnb(s0, 0);
                if (sr.best) {
                    result.plan = detail::materialize(*sr.best);
                    result.outcome = SolveOutcome::Found;
                } else {
                    result.outcome = SolveOutcome::Exhausted;
                }
                return finish(result);
            }
            case Strategy::Incremental: {
                for (int lo = 1; lo <= config.max_steps; lo += config.window) {
                    int hi = std::min(lo + config.window - 1, config.max_steps);
                    detail::Searcher sr{table, result.stats, deadline};
                    sr.best_len = hi + 1;
                    sr.dfs_bnb(s0, 0);
                    if (sr.best) {
                        result.plan = detail::materialize(*sr.best);
                        result.outcome = SolveOutcome::Found;
                        return finish(result);
                    }
                }
                result.outcome = SolveOutcome::Exhausted;
                return finish(result);
            }
        }
    } catch (const detail::TimeoutSignal&) {
        result.plan.reset();
        result.outcome = SolveOutcome::Timeout;
    }
    return finish(result);
}

inline SolveResult solve(const Problem& problem, const KnowledgeBase& kb, const Catalog& catalog,
                         const PlannerConfig& config,
                         std::optional<double> timeout_sec = std::nullopt) {
    return solve(problem, StepTable(kb, catalog), config, timeout_sec);
}

/// Exhaustive breadth-first search: provably minimal plan length up to
/// depth_limit, or nullopt when no plan of that length exists. Independent of
/// the strategy search above (level-order exploration, no bounding).
inline std::optional<Plan> brute_force_min_plan(const Problem& problem, const StepTable& table,
                                                int depth_limit,
                                                uint64_t state_limit = 30'000'000) {
    State s0 = problem.initial_state();
    const State& goal = table.goal();
    auto reaches_goal = [&](const State& s) {
        return (s.bits[0] & goal.bits[0]) == goal.bits[0];
    };
    if (reaches_goal(s0)) return Plan{};

    struct Edge {
        int parent = -1;
        const StepTemplate* via = nullptr;
    };
    std::vector<State> states{s0};
    std::vector<Edge> edges{Edge{}};
    std::unordered_map<State, int, StateHash> index{{s0, 0}};
    size_t level_begin = 0, level_end = 1;

    for (int depth = 1; depth <= depth_limit; ++depth) {
        for (size_t i = level_begin; i < level_end; ++i) {
            State s = states[i];
            for (const auto& t : table.templates()) {
                if (!t.applicable(s)) continue;
                State next = s;
                next.add(t.step.produced);
                if (index.count(next)) continue;
                if (states.size() >= state_limit)
                    throw OracleLimitError("brute-force state limit exceeded");
                index.emplace(next, static_cast<int>(states.size()));
                states.push_back(next);
                edges.push_back(Edge{static_cast<int>(i), &t});
                if (reaches_goal(next)) {
                    Plan plan;
                    int at = static_cast<int>(states.size()) - 1;
                    while (edges[static_cast<size_t>(at)].via) {
                        plan.steps.push_back(edges[static_cast<size_t>(at)].via->step);
                        at = edges[static_cast<size_t>(at)].parent;
                    }
                    std::reverse(plan.steps.begin(), plan.steps.end());
                    return plan;
                }
            }
        }
        level_begin = level_end;
        level_end = states.size();
        if (level_begin == level_end) return std::nullopt; // frontier empty
    }
    return std::nullopt;
}

inline std::optional<Plan> brute_force_min_plan(const Problem& problem, const KnowledgeBase& kb,
                                                const Catalog& catalog, int depth_limit,
                                                uint64_t state_limit = 30'000'000) {
    return brute_force_min_plan(problem, StepTable(kb, catalog), depth_limit, state_limit);
}

// ---------------------------------------------------------------------------
// Plan text form: one step per line, `kind(arg,...) -> produced`.

inline std::string format_step(const Step& step, const Catalog& catalog) {
    std::ostringstream os;
    os << step_kind_name(step.kind) << "(";
    bool first = true;
    for (ObjectId a : step.ordered_args()) {
        if (!first) os << ",";
        os << catalog.name(a);
        first = false;
    }
    os << ") -> " << catalog.name(step.produced);
    return os.str();
}

inline std::string format_plan(const Plan& plan, const Catalog& catalog) {
    std::string out;
    for (const auto& s : plan.steps) out += format_step(s, catalog) + "\n";
    return out;
}

inline Plan parse_plan(const std::string& text, const Catalog& catalog) {
    Plan plan;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    auto trim = [](std::string s) {
        size_t b = s.find_first_not_of(" \t\r");
        size_t e = s.find_last_not_of(" \t\r");
        if (b == std::string::npos) return std::string();
        return s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto where = [&] { return " at plan line " + std::to_string(line_no); };
        size_t open = t.find('(');
        size_t close = t.find(')', open == std::string::npos ? 0 : open);
        size_t arrow = t.find("->");
        if (open == std::string::npos || close == std::string::npos || arrow == std::string::npos ||
            arrow < close)
            throw std::invalid_argument("malformed plan step" + where());
        Step step;
        step.kind = parse_step_kind(trim(t.substr(0, open)));
        const auto& sig = step_signature(step.kind);
        std::vector<std::string> arg_names;
        std::string inside = t.substr(open + 1, close - open - 1);
        std::string cur;
        for (char ch : inside) {
            if (ch == ',') {
                arg_names.push_back(trim(cur));
                cur.clear();
            } else {
                cur += ch;
            }
        }
        if (!trim(cur).empty()) arg_names.push_back(trim(cur));
        if (arg_names.size() != sig.args.size())
            throw std::invalid_argument("wrong argument count for " +
                                        std::string(step_kind_name(step.kind)) + where());
        for (size_t i = 0; i < arg_names.size(); ++i) {
            ObjectId id = catalog.id(arg_names[i]);
            if (id.kind != sig.args[i])
                throw std::invalid_argument("argument " + arg_names[i] + " has wrong kind" +
                                            where());
            step.args_of(sig.args[i]).push_back(id.index);
        }
        ObjectId prod = catalog.id(trim(t.substr(arrow + 2)));
        if (prod.kind != sig.produced)
            throw std::invalid_argument("produced object has wrong kind" + where());
        step.produced = prod;
        plan.steps.push_back(std::move(step));
    }
    return plan;
}

} // namespace tricons
