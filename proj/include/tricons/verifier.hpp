#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "tricons/catalog.hpp"
#include "tricons/geometry.hpp"
#include "tricons/instantiate.hpp"
#include "tricons/knowledge_base.hpp"
#include "tricons/planner.hpp"
#include "tricons/sampling.hpp"

namespace tricons {

struct VerificationFailure {
    int step_index = 0; // 1-based; 0 marks a whole-plan condition (goal)
    std::string condition;
    std::optional<double> residual;
};

struct VerificationReport {
    bool accepted = false;
    std::vector<VerificationFailure> failures;
    int triangles_checked = 0;
};

/// Replays the plan from the problem's initial state: every step must be
/// applicable in its pre-state and the final state must contain {A, B, C}.
inline VerificationReport check_plan_symbolic(const Plan& plan, const Problem& problem,
                                              const KnowledgeBase& kb, const Catalog& catalog) {
    VerificationReport report;
    State state = problem.initial_state();
    for (size_t i = 0; i < plan.steps.size(); ++i) {
        if (auto bad = step_violation(state, plan.steps[i], kb, catalog)) {
            report.failures.push_back(
                VerificationFailure{static_cast<int>(i) + 1, *bad, std::nullopt});
            report.accepted = false;
            return report;
        }
        state.add(plan.steps[i].produced);
    }
    State goal = goal_state(catalog);
    if ((state.bits[0] & goal.bits[0]) != goal.bits[0]) {
        report.failures.push_back(VerificationFailure{0, "goal {A,B,C} reached", std::nullopt});
    }
    report.accepted = report.failures.empty();
    return report;
}

namespace detail {

/// Distance between two realized objects of the same kind, relative to the
/// instantiation scale.
inline double point_residual(Vec2 a, Vec2 b, double scale) { return dist(a, b) / scale; }

inline double line_residual(const Line& a, const Line& b, double scale) {
    Vec2 p0 = a.base_point();
    Vec2 p1 = p0 + scale * a.direction();
    return (point_line_dist(p0, b) + point_line_dist(p1, b)) / scale;
}

inline double circle_residual(const Circle& a, const Circle& b, double scale) {
    return (dist(a.center, b.center) + std::fabs(a.r - b.r)) / scale;
}

/// Scalar ratio witnesses are re-measured on an independent reference
/// triangle; the knowledge base certifies they are triangle-independent, so a
/// bogus tuple shows up as a mismatch on the sample triangle.
struct ReplayContext {
    const Instantiation& inst;     // sample triangle realizations
    const Instantiation& ref;      // reference triangle for scalar witnesses
    const KnowledgeBase& kb;
};

/// Executes one step numerically from its arguments' realized coordinates and
/// returns the smallest residual between a determined candidate for the
/// produced object and its catalog realization.
inline double execute_step_residual(const ReplayContext& ctx, const Step& step) {
    const Instantiation& in = ctx.inst;
    const double scale = in.scale;
    const auto& pa = step.point_args;
    const auto& la = step.line_args;
    const auto& ca = step.circle_args;
    const auto& aa = step.angle_args;
    const int prod = step.produced.index;
    const double kInf = 1e100;

    auto best_point = [&](const std::vector<Vec2>& cands) {
        double best = kInf;
        for (Vec2 c : cands) best = std::min(best, point_residual(c, in.points[prod], scale));
        return best;
    };
    auto best_line = [&](const std::vector<Line>& cands) {
        double best = kInf;
        for (const Line& c : cands) best = std::min(best, line_residual(c, in.lines[prod], scale));
        return best;
    };
    auto best_circle = [&](const std::vector<Circle>& cands) {
        double best = kInf;
        for (const Circle& c : cands)
            best = std::min(best, circle_residual(c, in.circles[prod], scale));
        return best;
    };

    switch (step.kind) {
        case StepKind::LineThroughPoints:
            return best_line({line_through(in.points[pa[0]], in.points[pa[1]])});
        case StepKind::LineIntersect: {
            auto hit = intersect_lines(in.lines[la[0]], in.lines[la[1]]);
            if (!hit) return kInf;
            return best_point({*hit});
        }
        case StepKind::CircleCenterPoint: {
            Vec2 ctr = in.points[pa[0]];
            return best_circle({Circle{ctr, dist(ctr, in.points[pa[1]])}});
        }
        case StepKind::CircleFromDiameter: {
            Vec2 m = midpoint(in.points[pa[0]], in.points[pa[1]]);
            return best_circle({Circle{m, dist(in.points[pa[0]], in.points[pa[1]]) / 2.0}});
        }
        case StepKind::LineCircleIntersect:
            return best_point(intersect_line_circle(in.lines[la[0]], in.circles[ca[0]]));
        case StepKind::CircleCircleIntersect:
            return best_point(intersect_circles(in.circles[ca[0]], in.circles[ca[1]]));
        case StepKind::PerpendicularThrough:
            return best_line({line_point_normal(in.points[pa[0]], in.lines[la[0]].direction())});
        case StepKind::ParallelThrough:
            return best_line({line_point_normal(in.points[pa[0]], in.lines[la[0]].n)});
        case StepKind::PerpBisector: {
            Vec2 p = in.points[pa[0]], q = in.points[pa[1]];
            return best_line({line_point_normal(midpoint(p, q), q - p)});
        }
        case StepKind::RatioPoint3: {
            // r = XY/YZ from the reference triangle; Z = Y + (Y - X)/r.
            double r = collinear_ratio(ctx.ref.points[pa[0]], ctx.ref.points[pa[1]],
                                       ctx.ref.points[prod]);
            if (r == 0.0) return kInf;
            Vec2 x = in.points[pa[0]], y = in.points[pa[1]];
            return best_point({y + (y - x) / r, y - (y - x) / r});
        }
        case StepKind::RatioPoint4: {
            // r = XY/ZW from the reference triangle; W = Z + (Y - X)/r.
            double r = vector_ratio(ctx.ref.points[pa[0]], ctx.ref.points[pa[1]],
                                    ctx.ref.points[pa[2]], ctx.ref.points[prod]);
            if (r == 0.0) return kInf;
            Vec2 x = in.points[pa[0]], y = in.points[pa[1]], z = in.points[pa[2]];
            return best_point({z + (y - x) / r, z - (y - x) / r});
        }
        case StepKind::AngleFromLines: {
            double theta = angle_between_lines(in.lines[la[0]], in.lines[la[1]]);
            // Invert every form consistent with the stored relation.
            std::vector<double> cands;
            for (const auto& d : ctx.kb.angle_defs) {
                if (!((d.p == la[0] && d.q == la[1]) || (d.p == la[1] && d.q == la[0])) ||
                    d.angle != prod)
                    continue;
                for (double t : {theta, kPi - theta}) {
                    double phi = 0;
                    switch (d.form) {
                        case AngleForm::Phi: phi = t; break;
                        case AngleForm::PiMinusPhi: phi = kPi - t; break;
                        case AngleForm::HalfPhi: phi = 2.0 * t; break;
                        case AngleForm::HalfPiMinusHalfPhi: phi = kPi - 2.0 * t; break;
                        case AngleForm::HalfPiMinusPhi: phi = kPi / 2.0 - t; break;
                        case AngleForm::HalfPiPlusHalfPhi: phi = 2.0 * t - kPi; break;
                    }
                    phi = fold_mod_pi(phi);
                    cands.push_back(phi);
                }
            }
            double best = kInf;
            for (double c : cands) best = std::min(best, std::fabs(c - in.angles[prod]));
            return best;
        }
        case StepKind::LineFromAngle: {
            // Rotate the known line's direction by +-f(phi) around the pivot.
            std::vector<Line> cands;
            for (const auto& d : ctx.kb.angle_defs) {
                if (d.p != la[0] || d.q != prod || d.angle != aa[0]) continue;
                double f = eval_angle_form(d.form, in.angles[aa[0]]);
                Vec2 dir = in.lines[la[0]].direction();
                for (double s : {f, -f}) {
                    Vec2 rot{dir.x * std::cos(s) - dir.y * std::sin(s),
                             dir.x * std::sin(s) + dir.y * std::cos(s)};
                    cands.push_back(line_point_direction(in.points[pa[0]], rot));
                }
            }
            return best_line(cands);
        }
        case StepKind::HarmonicPoint: {
            // (X,Y;Z,W) = -1 determines W from X,Y,Z uniquely.
            Vec2 x = in.points[pa[0]], y = in.points[pa[1]], z = in.points[pa[2]];
            Vec2 u = y - x;
            double L = norm(u);
            if (L == 0.0) return kInf;
            u = u / L;
            double tx = dot(x, u), ty = dot(y, u), tz = dot(z, u);
            double m = -(tz - tx) / (tz - ty);
            if (m == 1.0) return kInf;
            double tw = (tx - m * ty) / (1.0 - m);
            Vec2 w = x + (tw - tx) * u;
            return best_point({w});
        }
        case StepKind::LocusCircle: {
            // Chord XY subtending f(phi): center on the chord bisector at
            // distance h/tan(f), radius h/sin(f); both sides are candidates.
            Vec2 x = in.points[pa[0]], y = in.points[pa[1]];
            double phi = in.angles[aa[0]];
            Vec2 mid = midpoint(x, y);
            double h = dist(x, y) / 2.0;
            Vec2 n = unit(perp(y - x));
            std::vector<Circle> cands;
            for (AngleForm form : kAllAngleForms) {
                double f = eval_angle_form(form, phi);
                double s = std::sin(f);
                if (std::fabs(s) < 1e-12) continue;
                double radius = std::fabs(h / s);
                double off = h * std::cos(f) / s;
                cands.push_back(Circle{mid + off * n, radius});
                cands.push_back(Circle{mid - off * n, radius});
            }
            return best_circle(cands);
        }
        case StepKind::HomotheticLine: {
            // Coefficient from the reference triangle, image line on the
            // sample triangle.
            const Line& rp = ctx.ref.lines[la[0]];
            const Line& rq = ctx.ref.lines[prod];
            Vec2 rx = ctx.ref.points[pa[0]];
            double dp = dot(rp.n, rx) - rp.d;
            double dq = dot(rp.n, rx) - dot(rp.n, rq.base_point());
            if (dp == 0.0) return kInf;
            double k = dq / dp;
            const Line& p = in.lines[la[0]];
            Vec2 cx = in.points[pa[0]];
            double d0 = dot(p.n, cx) - p.d;
            // Image line: same normal, signed distance from X scaled by k.
            double dd = dot(p.n, cx) - k * d0;
            return best_line({make_line_normal_offset(p.n, dd)});
        }
        case StepKind::TangentFromPoint:
            return best_line(tangents_from_point(in.points[pa[0]], in.circles[ca[0]]));
        case StepKind::CenterOfCircle:
            return best_point({in.circles[ca[0]].center});
    }
    return kInf;
}

} // namespace detail

/// Re-executes every step numerically on `samples` fresh triangles and checks
/// that a determined candidate for the produced object coincides with its
/// catalog realization within `tolerance` (relative to the circumradius).
inline VerificationReport check_plan_numeric(const Plan& plan, const Problem& problem,
                                             const Catalog& catalog, int samples,
                                             double tolerance, uint64_t seed,
                                             const KnowledgeBase& kb,
                                             const SamplingPolicy& policy = {}) {
    (void)problem;
    VerificationReport report;
    Instantiation ref =
        instantiate_catalog(sample_triangle(seed ^ 0x5bf0'3635'0aef'7d1dULL, policy), catalog);
    for (int s = 0; s < samples; ++s) {
        Instantiation inst =
            instantiate_catalog(sample_triangle(seed + static_cast<uint64_t>(s), policy), catalog);
        detail::ReplayContext ctx{inst, ref, kb};
        for (size_t i = 0; i < plan.steps.size(); ++i) {
            double residual;
            try {
                residual = detail::execute_step_residual(ctx, plan.steps[i]);
            } catch (const MeasureError&) {
                residual = 1e100; // degenerate execution counts as undetermined
            }
            if (!(residual <= tolerance)) {
                report.failures.push_back(VerificationFailure{
                    static_cast<int>(i) + 1, "produced object determined by arguments",
                    residual});
            }
        }
        ++report.triangles_checked;
    }
    report.accepted = report.failures.empty();
    return report;
}

inline nlohmann::ordered_json report_to_json(const VerificationReport& r) {
    nlohmann::ordered_json j;
    j["verdict"] = r.accepted ? "accepted" : "rejected";
    j["triangles_checked"] = r.triangles_checked;
    nlohmann::ordered_json fails = nlohmann::ordered_json::array();
    for (const auto& f : r.failures) {
        nlohmann::ordered_json o;
        o["step"] = f.step_index;
        o["condition"] = f.condition;
        if (f.residual) o["residual"] = *f.residual;
        fails.push_back(std::move(o));
    }
    j["failures"] = std::move(fails);
    return j;
}

} // namespace tricons
