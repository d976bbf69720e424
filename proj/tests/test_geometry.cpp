#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "tricons/instantiate.hpp"
#include "tricons/sampling.hpp"
#include "test_support.hpp"

using namespace tricons;
using tricons::testing::test_catalog;

namespace {

TriangleInstance right_triangle(double bx, double cy) {
    return TriangleInstance{{0, 0}, {bx, 0}, {0, cy}, 0};
}

} // namespace

TEST_CASE("sample_triangle is deterministic per seed and policy") {
    SamplingPolicy policy;
    for (uint64_t seed : {0ULL, 1ULL, 7ULL, 123456789ULL}) {
        TriangleInstance t1 = sample_triangle(seed, policy);
        TriangleInstance t2 = sample_triangle(seed, policy);
        REQUIRE(t1.a == t2.a);
        REQUIRE(t1.b == t2.b);
        REQUIRE(t1.c == t2.c);
    }
}

TEST_CASE("sampled triangles satisfy the policy over 1000 seeds") {
    SamplingPolicy policy;
    for (uint64_t seed = 0; seed < 1000; ++seed) {
        TriangleInstance t = sample_triangle(seed, policy);
        double angles[3] = {corner_angle(t.a, t.b, t.c), corner_angle(t.b, t.c, t.a),
                            corner_angle(t.c, t.a, t.b)};
        for (double ang : angles) {
            REQUIRE(ang >= policy.min_angle_rad);
            REQUIRE(ang <= policy.max_angle_rad);
        }
        double sides[3] = {dist(t.b, t.c), dist(t.c, t.a), dist(t.a, t.b)};
        for (int i = 0; i < 3; ++i)
            for (int j = i + 1; j < 3; ++j) {
                double hi = std::max(sides[i], sides[j]), lo = std::min(sides[i], sides[j]);
                REQUIRE(hi / lo >= 1.0 + policy.scalene_margin);
            }
        // Non-degenerate by construction; collinear candidates are rejected
        // internally.
        REQUIRE(std::fabs(cross(t.b - t.a, t.c - t.a)) > 0.0);
    }
}

TEST_CASE("unsatisfiable sampling policy raises a sampling failure") {
    SamplingPolicy policy;
    policy.min_angle_rad = 59.99 * kPi / 180.0;
    policy.max_angle_rad = 60.01 * kPi / 180.0; // forces near-equilateral
    policy.scalene_margin = 0.05;               // but demands scalene sides
    policy.max_attempts = 2000;
    REQUIRE_THROWS_AS(sample_triangle(3, policy), SamplingError);
}

TEST_CASE("characteristic points on axis-aligned right triangles") {
    const Catalog& cat = test_catalog();

    SECTION("centroid of (0,0),(3,0),(0,3) is (1,1)") {
        Instantiation inst = instantiate_catalog(right_triangle(3, 3), cat);
        Vec2 g = inst.point(cat.point("G"));
        REQUIRE(g.x == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(g.y == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("circumcenter of (0,0),(2,0),(0,2) is the hypotenuse midpoint (1,1)") {
        Instantiation inst = instantiate_catalog(right_triangle(2, 2), cat);
        Vec2 o = inst.point(cat.point("O"));
        REQUIRE(o.x == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(o.y == Catch::Approx(1.0).margin(1e-12));
    }
    SECTION("incenter of (0,0),(4,0),(0,3) is (1,1)") {
        Instantiation inst = instantiate_catalog(right_triangle(4, 3), cat);
        Vec2 i = inst.point(cat.point("I"));
        REQUIRE(i.x == Catch::Approx(1.0).margin(1e-12));
        REQUIRE(i.y == Catch::Approx(1.0).margin(1e-12));
    }
}

TEST_CASE("instantiation is deterministic and finite") {
    const Catalog& cat = test_catalog();
    for (uint64_t seed : {2ULL, 17ULL, 99ULL}) {
        TriangleInstance t = sample_triangle(seed);
        Instantiation a = instantiate_catalog(t, cat);
        Instantiation b = instantiate_catalog(t, cat);
        REQUIRE(a.points == b.points);
        REQUIRE(a.angles == b.angles);
        for (const Vec2& p : a.points) {
            REQUIRE(std::isfinite(p.x));
            REQUIRE(std::isfinite(p.y));
        }
        for (const Line& l : a.lines) {
            REQUIRE(norm(l.n) == Catch::Approx(1.0).margin(1e-12));
            // canonical sign: first nonzero normal component positive
            REQUIRE((l.n.x > 0.0 || (l.n.x == 0.0 && l.n.y > 0.0)));
        }
        for (const Circle& c : a.circles) REQUIRE(c.r > 0.0);
    }
}

TEST_CASE("relabeling the vertices permutes vertex-indexed objects") {
    const Catalog& cat = test_catalog();
    TriangleInstance t = sample_triangle(5);
    // New labels: A' = B, B' = C, C' = A.
    TriangleInstance rotated{t.b, t.c, t.a, t.seed};
    Instantiation base = instantiate_catalog(t, cat);
    Instantiation rot = instantiate_catalog(rotated, cat);

    auto close = [&](Vec2 p, Vec2 q) { return dist(p, q) <= 1e-9 * base.scale; };

    const char* fixed[] = {"O", "I", "H", "G", "N"};
    for (const char* name : fixed)
        REQUIRE(close(rot.point(cat.point(name)), base.point(cat.point(name))));

    // Vertex-indexed families map a -> b -> c -> a under the relabeling.
    const char* families[][3] = {{"Ma", "Mb", "Mc"}, {"Ha", "Hb", "Hc"}, {"Ta", "Tb", "Tc"},
                                 {"Ea", "Eb", "Ec"}, {"Da", "Db", "Dc"}, {"Wa", "Wb", "Wc"}};
    for (auto& fam : families) {
        REQUIRE(close(rot.point(cat.point(fam[0])), base.point(cat.point(fam[1]))));
        REQUIRE(close(rot.point(cat.point(fam[1])), base.point(cat.point(fam[2]))));
        REQUIRE(close(rot.point(cat.point(fam[2])), base.point(cat.point(fam[0]))));
    }

    REQUIRE(rot.angle(cat.angle("alpha")) ==
            Catch::Approx(base.angle(cat.angle("beta"))).margin(1e-12));

    // The relabeled b/i/c circle is the original one through C, I, A.
    const Circle& bic = rot.circle(cat.circle("bic"));
    Vec2 wb = base.point(cat.point("Wb"));
    REQUIRE(close(bic.center, wb));
    REQUIRE(std::fabs(bic.r - dist(wb, base.point(cat.point("I")))) <= 1e-9 * base.scale);
}

TEST_CASE("definitional closure holds on sampled triangles") {
    const Catalog& cat = test_catalog();
    for (uint64_t seed = 0; seed < 50; ++seed) {
        TriangleInstance t = sample_triangle(seed);
        Instantiation inst = instantiate_catalog(t, cat);
        double tol = 1e-9 * inst.scale;

        Vec2 ma = inst.point(cat.point("Ma"));
        REQUIRE(dist(ma, midpoint(t.b, t.c)) <= tol);

        Vec2 o = inst.point(cat.point("O"));
        double ra = dist(o, t.a), rb = dist(o, t.b), rc = dist(o, t.c);
        REQUIRE(std::fabs(ra - rb) <= tol);
        REQUIRE(std::fabs(ra - rc) <= tol);

        Vec2 h = inst.point(cat.point("H"));
        for (const char* alt : {"ha", "hb", "hc"})
            REQUIRE(point_line_dist(h, inst.line(cat.line(alt))) <= tol);
    }
}

TEST_CASE("measurement queries") {
    const Catalog& cat = test_catalog();
    Instantiation inst = instantiate_catalog(sample_triangle(11), cat);

    SECTION("angle between the coordinate axes is pi/2") {
        Line x_axis = line_through({0, 0}, {1, 0});
        Line y_axis = line_through({0, 0}, {0, 1});
        REQUIRE(angle_between_lines(x_axis, y_axis) == Catch::Approx(kPi / 2).margin(1e-12));
    }
    SECTION("collinear ratio XY/YZ for abscissas 0, 1, 3 is 0.5") {
        REQUIRE(collinear_ratio({0, 0}, {1, 0}, {3, 0}) == Catch::Approx(0.5).margin(1e-12));
    }
    SECTION("cross-ratio of abscissas 0, 3, 1, -3 is -1") {
        REQUIRE(cross_ratio({0, 0}, {3, 0}, {1, 0}, {-3, 0}) ==
                Catch::Approx(-1.0).margin(1e-12));
    }
    SECTION("ratio with coincident denominator endpoints is an error") {
        REQUIRE_THROWS_AS(collinear_ratio({0, 0}, {1, 0}, {1, 0}), MeasureError);
        MeasurementQuery q{QueryKind::CollinearRatio,
                           {cat.point("A"), cat.point("B"), cat.point("B"), cat.point("A")}};
        REQUIRE_THROWS_AS(measure(inst, q), MeasureError);
    }
    SECTION("incidence and perpendicularity residuals") {
        MeasurementQuery on_line{QueryKind::PointLineIncidence,
                                 {cat.point("Ma"), cat.line("a"), {}, {}}};
        REQUIRE(measure(inst, on_line) <= 1e-9 * inst.scale);
        MeasurementQuery perp{QueryKind::LinesPerpendicular,
                              {cat.line("a"), cat.line("ha"), {}, {}}};
        REQUIRE(measure(inst, perp) <= 1e-12);
    }
}

TEST_CASE("line-angle measurement agrees with the interior angle on 100 triangles") {
    const Catalog& cat = test_catalog();
    for (uint64_t seed = 100; seed < 200; ++seed) {
        Instantiation inst = instantiate_catalog(sample_triangle(seed), cat);
        MeasurementQuery q{QueryKind::AngleBetweenLines, {cat.line("b"), cat.line("c"), {}, {}}};
        double measured = measure(inst, q);
        double alpha = inst.angle(cat.angle("alpha"));
        // A pair of lines determines the angle only up to the fold t -> pi-t.
        REQUIRE(angle_mod_pi_dist(measured, alpha) <= 1e-9);
    }
}
