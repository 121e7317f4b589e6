#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "cssplines/geometry.hpp"
#include "doctest.h"

using namespace css;

namespace {

MultiPatchDomain from_json(const std::string& text) {
    std::istringstream in(text);
    return load_geometry(in);
}

const char* kTwoSquares = R"({"patches": [
  {"corners": [[-1,0],[0,0],[-1,1],[0,1]]},
  {"corners": [[0,0],[1,0],[0,1],[1,1]]}]})";

std::string fan_json() {
    // 3-patch fan around the origin with outer ring at angles 90/210/330 deg
    double c = std::cos(2 * M_PI / 3), s = std::sin(2 * M_PI / 3);
    std::ostringstream os;
    os.precision(17);
    os << R"({"patches": [)";
    os << "{\"corners\": [[0,0],[0,1],[" << c << "," << -std::abs(s) << "],[-1.0825318,0.625]]},";
    os << "{\"corners\": [[0,0],[" << c << "," << -std::abs(s)
       << "],[0.8227241,-0.475],[0,-1.15]]},";
    os << "{\"corners\": [[0,0],[0.8227241,-0.475],[0,1],[1.0392305,0.6]]}]}";
    return os.str();
}

}  // namespace

TEST_CASE("square symmetry composition table") {
    // exhaustive functional check of compose used implicitly via edge frames:
    // all 8 symmetries are involutions or order-4 maps of the unit square
    for (const auto& m : SquareSymmetry::all()) {
        auto inv = m.inverse();
        for (double z1 : {0.0, 0.3, 1.0})
            for (double z2 : {0.0, 0.7, 1.0}) {
                auto w = m(z1, z2);
                auto back = inv(w[0], w[1]);
                CHECK(back[0] == doctest::Approx(z1).epsilon(1e-15));
                CHECK(back[1] == doctest::Approx(z2).epsilon(1e-15));
            }
    }
}

TEST_CASE("load_geometry accepts valid domains and rejects bad ones") {
    auto two = from_json(kTwoSquares);
    CHECK(two.patches.size() == 2);

    auto fan = from_json(fan_json());
    CHECK(fan.patches.size() == 3);

    // coincident corners -> degenerate
    CHECK_THROWS_AS(from_json(R"({"patches":[{"corners":[[0,0],[0,0],[0,1],[1,1]]}]})"),
                    GeometryError);
    // malformed documents
    CHECK_THROWS_AS(from_json("{"), GeometryError);
    CHECK_THROWS_AS(from_json(R"({"patches": []})"), GeometryError);
    CHECK_THROWS_AS(from_json(R"({"patches": [{"corners": [[0,0],[1,0],[0,1]]}]})"), GeometryError);
    // duplicate patch
    CHECK_THROWS_AS(from_json(R"({"patches":[
        {"corners":[[0,0],[1,0],[0,1],[1,1]]},
        {"corners":[[0,0],[1,0],[0,1],[1,1]]}]})"),
                    GeometryError);
}

TEST_CASE("evaluation, jacobian and inversion") {
    BilinearPatch unit{{0, 0}, {1, 0}, {0, 1}, {1, 1}};
    CHECK((unit.eval(0.5, 0.5) - Vec2(0.5, 0.5)).norm() == 0.0);
    CHECK((unit.jacobian(0.3, 0.9) - Eigen::Matrix2d::Identity()).norm() == 0.0);
    CHECK((unit.invert({0.3, 0.7}) - Vec2(0.3, 0.7)).norm() <= 1e-12);

    BilinearPatch skew{{0.1, -0.2}, {1.3, 0.15}, {-0.25, 1.1}, {1.05, 1.4}};
    SUBCASE("jacobian matches central finite differences") {
        const double dx = 1e-6;
        for (double z1 : {0.2, 0.8})
            for (double z2 : {0.35, 0.6}) {
                Eigen::Matrix2d J = skew.jacobian(z1, z2);
                Eigen::Matrix2d Jfd;
                Jfd.col(0) = (skew.eval(z1 + dx, z2) - skew.eval(z1 - dx, z2)) / (2 * dx);
                Jfd.col(1) = (skew.eval(z1, z2 + dx) - skew.eval(z1, z2 - dx)) / (2 * dx);
                CHECK((J - Jfd).norm() <= 1e-8);
            }
    }
    SUBCASE("inversion round trip on random points") {
        std::mt19937 rng(11);
        std::uniform_real_distribution<double> dist(0, 1);
        for (int i = 0; i < 100; ++i) {
            Vec2 z(dist(rng), dist(rng));
            Vec2 back = skew.invert(skew.eval(z[0], z[1]));
            CHECK((z - back).norm() <= 1e-10);
        }
    }
    SUBCASE("point outside the patch") {
        CHECK_THROWS_AS(unit.invert({2.5, 0.5}), GeometryError);
    }
}

TEST_CASE("topology of a single patch") {
    auto d = from_json(R"({"patches": [{"corners": [[0,0],[1,0],[0,1],[1,1]]}]})");
    auto t = extract_topology(d);
    CHECK(t.inner_edges.size() == 0);
    CHECK(t.boundary_edges.size() == 4);
    REQUIRE(t.vertices.size() == 4);
    for (const auto& v : t.vertices) {
        CHECK(v.valency == 1);
        CHECK(v.boundary);
    }
}

TEST_CASE("topology of two squares") {
    auto d = from_json(kTwoSquares);
    auto t = extract_topology(d);
    CHECK(t.inner_edges.size() == 1);
    CHECK(t.boundary_edges.size() == 6);
    int v1 = 0, v2 = 0;
    for (const auto& v : t.vertices) {
        if (v.valency == 1) ++v1;
        if (v.valency == 2) ++v2;
        CHECK(v.boundary);
    }
    CHECK(v1 == 4);
    CHECK(v2 == 2);
}

TEST_CASE("topology of the three-patch fan") {
    auto d = from_json(fan_json());
    auto t = extract_topology(d);
    CHECK(t.inner_edges.size() == 3);
    CHECK(t.boundary_edges.size() == 6);
    int inner = 0, v2 = 0, v1 = 0;
    for (const auto& v : t.vertices) {
        if (!v.boundary) {
            ++inner;
            CHECK(v.valency == 3);
            CHECK(v.edges.size() == 3);
            CHECK(v.patches.size() == 3);
            // traversal around the vertex returns to the start in v steps
            for (size_t q = 0; q < v.patches.size(); ++q) {
                int e_lo = v.edges[q], e_hi = v.edges[(q + 1) % v.edges.size()];
                bool lo = false, hi = false;
                for (const auto& s : t.edges[e_lo].sides) lo |= (s.patch == v.patches[q]);
                for (const auto& s : t.edges[e_hi].sides) hi |= (s.patch == v.patches[q]);
                CHECK(lo);
                CHECK(hi);
            }
            CHECK(v.patches[0] == *std::min_element(v.patches.begin(), v.patches.end()));
        } else if (v.valency == 2) {
            ++v2;
            CHECK(v.edges.size() == 3);
        } else {
            ++v1;
        }
    }
    CHECK(inner == 1);
    CHECK(v2 == 3);
    CHECK(v1 == 3);
}

TEST_CASE("T junction is rejected") {
    // right column split into two half-height patches against one full square
    auto doc = R"({"patches": [
      {"corners": [[-1,0],[0,0],[-1,1],[0,1]]},
      {"corners": [[0,0],[1,0],[0,0.5],[1,0.5]]},
      {"corners": [[0,0.5],[1,0.5],[0,1],[1,1]]}]})";
    auto d = from_json(doc);
    CHECK_THROWS_AS(extract_topology(d), GeometryError);
}

TEST_CASE("edge frames satisfy the interface identity") {
    for (const char* which : {"squares", "fan", "skew"}) {
        MultiPatchDomain d;
        if (std::string(which) == "squares")
            d = from_json(kTwoSquares);
        else if (std::string(which) == "fan")
            d = from_json(fan_json());
        else
            d = from_json(R"({"patches": [
              {"corners": [[-1.05,-0.08],[0,0],[-0.9,1.1],[0.15,1.05]]},
              {"corners": [[0,0],[1.1,0.1],[0.15,1.05],[1.25,1.15]]}]})");
        auto t = extract_topology(d);
        for (int e : t.inner_edges) {
            EdgeFrame f = edge_frame(d, t, e);
            auto g0 = f.framed_patch(d, 0);
            auto g1 = f.framed_patch(d, 1);
            // side 0 carries the negative determinant, side 1 the positive one
            CHECK(g0.jacobian(0.4, 0.3).determinant() < 0);
            CHECK(g1.jacobian(0.4, 0.3).determinant() > 0);
            double worst = 0;
            for (int i = 0; i <= 32; ++i) {
                double u = i / 32.0;
                worst = std::max(worst, (g0.eval(0, u) - g1.eval(0, u)).norm());
            }
            CHECK(worst <= 1e-12);
            // vertex-anchored variants put the requested endpoint at u = 0
            for (int vtx : {t.edges[e].v0, t.edges[e].v1}) {
                EdgeFrame fv = edge_frame_at_vertex(d, t, e, vtx);
                auto h0 = fv.framed_patch(d, 0);
                CHECK((h0.eval(0, 0) - t.vertices[vtx].position).norm() <= 1e-12);
                auto h1 = fv.framed_patch(d, 1);
                CHECK((h1.eval(0, 0) - t.vertices[vtx].position).norm() <= 1e-12);
                CHECK(h0.jacobian(0.4, 0.3).determinant() < 0);
            }
        }
    }
}

TEST_CASE("rotated corner lists produce the same interface") {
    // same two squares, but the left patch's corner list given in a different
    // (still valid) order: frame must compose the inverse relabeling
    auto d = from_json(R"({"patches": [
      {"corners": [[0,0],[-1,0],[0,1],[-1,1]]},
      {"corners": [[0,0],[1,0],[0,1],[1,1]]}]})");
    auto t = extract_topology(d);
    REQUIRE(t.inner_edges.size() == 1);
    EdgeFrame f = edge_frame(d, t, t.inner_edges[0]);
    auto g0 = f.framed_patch(d, 0);
    auto g1 = f.framed_patch(d, 1);
    for (double u : {0.0, 0.5, 1.0}) CHECK((g0.eval(0, u) - g1.eval(0, u)).norm() <= 1e-12);
}

TEST_CASE("topology counts are invariant under patch relabeling") {
    auto base = fan_json();
    auto d1 = from_json(base);
    auto t1 = extract_topology(d1);
    MultiPatchDomain d2 = d1;
    std::rotate(d2.patches.begin(), d2.patches.begin() + 1, d2.patches.end());
    auto t2 = extract_topology(d2);
    int iv1 = 0, iv2 = 0;
    for (const auto& v : t1.vertices) iv1 += v.boundary ? 0 : 1;
    for (const auto& v : t2.vertices) iv2 += v.boundary ? 0 : 1;
    CHECK(t1.inner_edges.size() == t2.inner_edges.size());
    CHECK(t1.vertices.size() == t2.vertices.size());
    CHECK(iv1 == iv2);
    int euler1 = int(d1.patches.size()) - int(t1.inner_edges.size()) + iv1;
    int euler2 = int(d2.patches.size()) - int(t2.inner_edges.size()) + iv2;
    CHECK(euler1 == euler2);
}
