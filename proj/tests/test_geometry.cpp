#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <vector>

#include "knotscope/geometry.hpp"
#include "knotscope/knot.hpp"
#include "knotscope/sampler.hpp"
#include "oracle.hpp"

using namespace knotscope;

namespace {

Vec3 rotated(const Vec3& p, const Vec3& axis, double ang, const Vec3& shift) {
    return rotate_about(p, axis, ang) + shift;
}

KnotEmbedding random_walk_polygon(std::size_t n, std::uint64_t seed) {
    SamplerConfig cfg;
    cfg.length = n;
    cfg.n_samples = 1;
    cfg.seed = seed;
    return sample_polygons(cfg)[0];
}

}  // namespace

TEST_CASE("enclosing sphere of simple solids") {
    // unit cube corners: center at the middle, radius sqrt(3)/2
    std::vector<Vec3> cube;
    for (int i = 0; i < 8; ++i)
        cube.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
    const Sphere s = min_enclosing_sphere(cube);
    CHECK(s.radius == Catch::Approx(std::sqrt(3.0) / 2.0).margin(1e-12));
    CHECK(dist(s.center, Vec3{0.5, 0.5, 0.5}) < 1e-12);

    // regular tetrahedron with edge sqrt(2): circumradius sqrt(3)/... use the
    // four alternating cube corners, all at distance sqrt(3)/2 from center
    const std::vector<Vec3> tetra{{0, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
    const Sphere st = min_enclosing_sphere(tetra);
    CHECK(st.radius == Catch::Approx(std::sqrt(3.0) / 2.0).margin(1e-12));

    // collinear points: the two extremes span the diameter
    const std::vector<Vec3> line{{0, 0, 0}, {1, 0, 0}, {3, 0, 0}, {0.5, 0, 0}};
    const Sphere sl = min_enclosing_sphere(line);
    CHECK(sl.radius == Catch::Approx(1.5).margin(1e-12));

    const std::vector<Vec3> one{{2, 3, 4}};
    CHECK(min_enclosing_sphere(one).radius == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("enclosing sphere agrees with exhaustive support search") {
    std::mt19937_64 seeds(404);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 4 + seeds() % 9;
        const auto pts = oracle::random_box_points(n, seeds());
        const Sphere got = min_enclosing_sphere(pts);
        const oracle::SphereRef want = oracle::min_sphere_reference(pts);
        REQUIRE(want.radius >= 0.0);
        CHECK(got.radius == Catch::Approx(want.radius).margin(1e-9));
        // and it actually contains the set
        for (const Vec3& p : pts) {
            CHECK(dist(p, got.center) <= got.radius * (1.0 + 1e-9) + 1e-12);
        }
    }
}

TEST_CASE("hull volume of reference solids") {
    std::vector<Vec3> cube;
    for (int i = 0; i < 8; ++i)
        cube.push_back({double(i & 1), double((i >> 1) & 1), double((i >> 2) & 1)});
    CHECK(convex_hull_volume(cube) == Catch::Approx(1.0).margin(1e-12));

    // interior points change nothing
    cube.push_back({0.5, 0.5, 0.5});
    cube.push_back({0.25, 0.75, 0.5});
    CHECK(convex_hull_volume(cube) == Catch::Approx(1.0).margin(1e-12));

    // alternating cube corners form a tetrahedron of volume 1/3
    const std::vector<Vec3> tetra{{0, 0, 0}, {1, 1, 0}, {1, 0, 1}, {0, 1, 1}};
    CHECK(convex_hull_volume(tetra) == Catch::Approx(1.0 / 3.0).margin(1e-12));

    // degenerate inputs are flat
    const std::vector<Vec3> planar{{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {1, 1, 0}, {0.3, 0.4, 0}};
    CHECK(convex_hull_volume(planar) == Catch::Approx(0.0).margin(1e-12));
    const std::vector<Vec3> segment{{0, 0, 0}, {1, 2, 3}, {2, 4, 6}};
    CHECK(convex_hull_volume(segment) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("hull volume agrees with facet enumeration on random sets") {
    std::mt19937_64 seeds(505);
    for (int rep = 0; rep < 40; ++rep) {
        const std::size_t n = 5 + seeds() % 16;
        const auto pts = oracle::random_box_points(n, seeds());
        const double want = oracle::hull_volume_reference(pts);
        const double got = convex_hull_volume(pts);
        CHECK(got == Catch::Approx(want).epsilon(1e-9).margin(1e-12));
    }
}

TEST_CASE("hull volume is rigid motion invariant") {
    const auto pts = oracle::random_box_points(30, 8181);
    const double base = convex_hull_volume(pts);
    const Vec3 axis = normalized(Vec3{1.0, -2.0, 0.5});
    const Vec3 shift{10.0, -3.0, 2.5};
    std::vector<Vec3> moved;
    for (const Vec3& p : pts) moved.push_back(rotated(p, axis, 1.234, shift));
    CHECK(convex_hull_volume(moved) == Catch::Approx(base).epsilon(1e-9));
}

TEST_CASE("radius of gyration of centered configurations") {
    // two opposite points: every point is one unit from the mean
    const std::vector<Vec3> pair{{1, 0, 0}, {-1, 0, 0}};
    CHECK(radius_of_gyration(pair) == Catch::Approx(1.0).margin(1e-14));

    // vertices of a regular polygon sit on their circumcircle
    for (const std::size_t n : {5ul, 8ul, 12ul}) {
        const KnotEmbedding k = regular_polygon(n);
        const double R = 0.5 / std::sin(M_PI / static_cast<double>(n));
        CHECK(radius_of_gyration(k.vertices) == Catch::Approx(R).margin(1e-9));
    }
}

TEST_CASE("total curvature of planar convex polygons is one full turn") {
    for (const std::size_t n : {3ul, 4ul, 7ul, 30ul}) {
        const KnotEmbedding k = regular_polygon(n);
        CHECK(total_curvature(k) == Catch::Approx(2.0 * M_PI).margin(1e-10));
    }
}

TEST_CASE("planar polygons have zero torsion and zero crossing number") {
    for (const std::size_t n : {4ul, 9ul, 16ul}) {
        const KnotEmbedding k = regular_polygon(n);
        CHECK(total_torsion(k) == Catch::Approx(0.0).margin(1e-10));
        CHECK(average_crossing_number(k) < 1e-9);
    }

    // non-convex planar polygons too: the osculating planes all coincide,
    // even where the turn direction flips
    KnotEmbedding ell;
    ell.id = "planar-L";
    ell.vertices = {{0, 0, 0}, {1, 0, 0}, {2, 0, 0}, {2, 1, 0},
                    {1, 1, 0}, {1, 2, 0}, {0, 2, 0}, {0, 1, 0}};
    CHECK(total_torsion(ell) == Catch::Approx(0.0).margin(1e-10));
}

TEST_CASE("torsion matches a per-vertex dihedral oracle") {
    for (const std::uint64_t seed : {901ul, 902ul, 903ul}) {
        const KnotEmbedding k = random_walk_polygon(20, seed);
        CHECK(total_torsion(k) ==
              Catch::Approx(oracle::total_torsion_reference(k)).margin(1e-9));
    }
}

TEST_CASE("torsion and curvature are rigid motion invariant") {
    const KnotEmbedding k = random_walk_polygon(24, 3131);
    const double curv = total_curvature(k);
    const double tors = total_torsion(k);
    KnotEmbedding moved = k;
    const Vec3 axis = normalized(Vec3{0.3, 0.9, -0.1});
    for (auto& v : moved.vertices) v = rotated(v, axis, 2.2, {5, 5, 5});
    CHECK(total_curvature(moved) == Catch::Approx(curv).margin(1e-9));
    CHECK(total_torsion(moved) == Catch::Approx(tors).margin(1e-9));
}

TEST_CASE("solid angle of a segment pair matches direction sampling") {
    std::mt19937_64 seeds(606);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    int tested = 0;
    while (tested < 6) {
        const Vec3 p1{u(seeds), u(seeds), u(seeds)};
        const Vec3 p2{u(seeds), u(seeds), u(seeds)};
        const Vec3 q1{u(seeds), u(seeds), u(seeds) + 2.5};
        const Vec3 q2{u(seeds), u(seeds), u(seeds) + 2.5};
        if (dist(p1, p2) < 0.3 || dist(q1, q2) < 0.3) continue;
        const double exact = segment_pair_solid_angle(p1, p2, q1, q2);
        const double mc = oracle::segment_pair_solid_angle_mc(p1, p2, q1, q2,
                                                              200000, seeds());
        CHECK(exact == Catch::Approx(mc).margin(0.05));
        ++tested;
    }

    // coplanar pairs subtend nothing
    const double flat = segment_pair_solid_angle({0, 0, 0}, {1, 0, 0},
                                                 {0, 1, 0}, {1, 1, 0});
    CHECK(flat == 0.0);

    // touching segments are rejected
    CHECK_THROWS_AS(segment_pair_solid_angle({0, 0, 0}, {1, 0, 0}, {0.5, 0, 0},
                                             {0.5, 1, 0}),
                    ValidationError);
}

TEST_CASE("average crossing number matches projection counting") {
    for (const std::uint64_t seed : {11ull, 22ull, 33ull}) {
        const KnotEmbedding k = random_walk_polygon(20, seed);
        const double exact = average_crossing_number(k);
        const double mc = oracle::acn_monte_carlo(k, 20000, seed * 7 + 1);
        CHECK(exact == Catch::Approx(mc).epsilon(0.05));
    }
}

TEST_CASE("average crossing number is rigid motion invariant") {
    const KnotEmbedding k = random_walk_polygon(18, 9090);
    const double base = average_crossing_number(k);
    KnotEmbedding moved = k;
    const Vec3 axis = normalized(Vec3{-1.0, 0.4, 0.2});
    for (auto& v : moved.vertices) v = rotated(v, axis, 0.77, {-2, 8, 1});
    CHECK(average_crossing_number(moved) == Catch::Approx(base).margin(1e-9));
}

TEST_CASE("measure bundles consistent quantities") {
    const KnotEmbedding k = random_walk_polygon(30, 616);
    const GeometryRecord rec = measure(k);
    CHECK(rec.rs_volume ==
          Catch::Approx(4.0 / 3.0 * M_PI * std::pow(rec.rs_radius, 3)));
    CHECK(rec.hull_volume <= rec.rs_volume + 1e-9);
    CHECK(rec.hull_volume >= 0.0);
    CHECK(rec.rg > 0.0);
    CHECK(rec.rg <= rec.rs_radius + 1e-9);
    CHECK(rec.curvature >= 2.0 * M_PI - 1e-9);
    CHECK(rec.torsion >= 0.0);
    CHECK(rec.acn >= 0.0);
    CHECK(std::isfinite(rec.acn));
}
