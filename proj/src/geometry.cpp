#include "cssplines/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <set>

#include "json.hpp"

namespace css {

namespace {
constexpr double kMatchTol = 1e-9;  // corner/edge matching (decimal geometry files)
constexpr double kRegEps = 1e-10;
}  // namespace

// ------------------------------------------------------------ symmetries

const std::array<SquareSymmetry, 8>& SquareSymmetry::all() {
    static const std::array<SquareSymmetry, 8> table = {{
        {false, false, false},
        {false, true, false},
        {false, false, true},
        {false, true, true},
        {true, false, false},
        {true, true, false},
        {true, false, true},
        {true, true, true},
    }};
    return table;
}

static SquareSymmetry compose(const SquareSymmetry& a, const SquareSymmetry& b) {
    // (a o b)(z) = a(b(z)); verified exhaustively in the test suite.
    auto pick = [](const SquareSymmetry& s, int i) {  // source index of component i
        return s.swap ? 1 - i : i;
    };
    auto flip = [](const SquareSymmetry& s, int i) { return i == 0 ? s.flip1 : s.flip2; };
    SquareSymmetry r;
    r.swap = a.swap != b.swap;
    bool f[2];
    for (int j = 0; j < 2; ++j) {
        int src_in_b = pick(a, j);
        f[j] = flip(a, j) != flip(b, src_in_b);
    }
    r.flip1 = f[0];
    r.flip2 = f[1];
    return r;
}

// --------------------------------------------------------- BilinearPatch

Vec2 BilinearPatch::eval(double z1, double z2) const {
    return c00 * (1 - z1) * (1 - z2) + c10 * z1 * (1 - z2) + c01 * (1 - z1) * z2 + c11 * z1 * z2;
}

Eigen::Matrix2d BilinearPatch::jacobian(double z1, double z2) const {
    Vec2 d1 = coef_b() + coef_d() * z2;
    Vec2 d2 = coef_c() + coef_d() * z1;
    Eigen::Matrix2d J;
    J.col(0) = d1;
    J.col(1) = d2;
    return J;
}

Vec2 BilinearPatch::corner(int c1, int c2) const {
    if (c1 == 0) return c2 == 0 ? c00 : c01;
    return c2 == 0 ? c10 : c11;
}

Vec2 BilinearPatch::invert(const Vec2& x) const {
    const double scale = std::max({1.0, (c10 - c00).norm(), (c01 - c00).norm(), (c11 - c00).norm()});
    Vec2 z(0.5, 0.5);
    for (int it = 0; it < 50; ++it) {
        Vec2 res = eval(z[0], z[1]) - x;
        if (res.norm() <= 1e-12 * scale) {
            if (z[0] < -1e-9 || z[0] > 1 + 1e-9 || z[1] < -1e-9 || z[1] > 1 + 1e-9)
                throw GeometryError("point lies outside the patch image");
            return {std::clamp(z[0], 0.0, 1.0), std::clamp(z[1], 0.0, 1.0)};
        }
        z -= jacobian(z[0], z[1]).partialPivLu().solve(res);
        // keep the iterate in a sane box so Newton cannot run away
        z[0] = std::clamp(z[0], -0.5, 1.5);
        z[1] = std::clamp(z[1], -0.5, 1.5);
    }
    throw GeometryError("geometry inversion did not converge");
}

bool BilinearPatch::contains(const Vec2& x, double tol) const {
    try {
        Vec2 z = invert(x);
        return z[0] >= -tol && z[0] <= 1 + tol && z[1] >= -tol && z[1] <= 1 + tol;
    } catch (const GeometryError&) {
        return false;
    }
}

BilinearPatch BilinearPatch::transformed(const SquareSymmetry& m) const {
    BilinearPatch g;
    auto at = [&](double a, double b) {
        auto w = m(a, b);
        return eval(w[0], w[1]);
    };
    g.c00 = at(0, 0);
    g.c10 = at(1, 0);
    g.c01 = at(0, 1);
    g.c11 = at(1, 1);
    return g;
}

double MultiPatchDomain::diameter() const {
    double d = 0.0;
    std::vector<Vec2> pts;
    for (const auto& p : patches) {
        pts.push_back(p.c00);
        pts.push_back(p.c10);
        pts.push_back(p.c01);
        pts.push_back(p.c11);
    }
    for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) d = std::max(d, (pts[i] - pts[j]).norm());
    return d;
}

// --------------------------------------------------------- load_geometry

static void check_regular(const BilinearPatch& p, size_t index) {
    double ref = 0.0;
    auto probe = [&](double z1, double z2) {
        double det = p.jacobian(z1, z2).determinant();
        if (std::abs(det) < kRegEps)
            throw GeometryError("patch " + std::to_string(index) +
                                " is degenerate (vanishing Jacobian determinant)");
        if (ref == 0.0) ref = det;
        if (det * ref < 0.0)
            throw GeometryError("patch " + std::to_string(index) +
                                " is irregular (Jacobian determinant changes sign)");
    };
    for (int c1 : {0, 1})
        for (int c2 : {0, 1}) probe(c1, c2);
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) probe((i + 0.5) / 20.0, (j + 0.5) / 20.0);
}

MultiPatchDomain load_geometry(std::istream& in) {
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw GeometryError(std::string("malformed geometry document: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("patches") || !doc["patches"].is_array() ||
        doc["patches"].empty())
        throw GeometryError("geometry document must contain a non-empty 'patches' array");

    MultiPatchDomain domain;
    for (const auto& jp : doc["patches"]) {
        if (!jp.is_object() || !jp.contains("corners") || !jp["corners"].is_array() ||
            jp["corners"].size() != 4)
            throw GeometryError("each patch needs a 'corners' array of 4 points");
        std::array<Vec2, 4> c;
        for (int i = 0; i < 4; ++i) {
            const auto& pt = jp["corners"][i];
            if (!pt.is_array() || pt.size() != 2 || !pt[0].is_number() || !pt[1].is_number())
                throw GeometryError("corner entries must be [x, y] number pairs");
            c[i] = Vec2(pt[0].get<double>(), pt[1].get<double>());
        }
        BilinearPatch p{c[0], c[1], c[2], c[3]};
        check_regular(p, domain.patches.size());
        domain.patches.push_back(p);
    }
    // duplicate patches (same corner set)
    for (size_t i = 0; i < domain.patches.size(); ++i)
        for (size_t j = i + 1; j < domain.patches.size(); ++j) {
            const auto& a = domain.patches[i];
            const auto& b = domain.patches[j];
            auto corners = [](const BilinearPatch& p) {
                return std::array<Vec2, 4>{p.c00, p.c10, p.c01, p.c11};
            };
            int matched = 0;
            for (const auto& ca : corners(a))
                for (const auto& cb : corners(b))
                    if ((ca - cb).norm() <= kMatchTol) {
                        ++matched;
                        break;
                    }
            if (matched == 4) throw GeometryError("duplicate patch detected");
        }
    return domain;
}

MultiPatchDomain load_geometry_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw GeometryError("cannot open geometry file: " + path);
    return load_geometry(in);
}

// ------------------------------------------------------ extract_topology

int Topology::vertex_at(const Vec2& x, double tol) const {
    for (size_t i = 0; i < vertices.size(); ++i)
        if ((vertices[i].position - x).norm() <= tol) return int(i);
    return -1;
}

namespace {

struct SideRef {
    int patch;
    int side;  // 0: z1=0, 1: z1=1, 2: z2=0, 3: z2=1
};

// corner indices (c1,c2) of a side's start/end, in increasing edge parameter
std::pair<std::array<int, 2>, std::array<int, 2>> side_corners(int side) {
    switch (side) {
        case 0: return {{0, 0}, {0, 1}};
        case 1: return {{1, 0}, {1, 1}};
        case 2: return {{0, 0}, {1, 0}};
        default: return {{0, 1}, {1, 1}};
    }
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    Vec2 ab = b - a;
    double t = ab.squaredNorm() > 0 ? (p - a).dot(ab) / ab.squaredNorm() : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

SquareSymmetry find_side_symmetry(const BilinearPatch& patch, const Vec2& start, const Vec2& end) {
    for (const auto& m : SquareSymmetry::all()) {
        BilinearPatch g = patch.transformed(m);
        if ((g.eval(0, 0) - start).norm() <= kMatchTol && (g.eval(0, 1) - end).norm() <= kMatchTol)
            return m;
    }
    throw GeometryError("no square symmetry maps the patch side onto the requested edge");
}

}  // namespace

Topology extract_topology(const MultiPatchDomain& domain) {
    Topology topo;

    // vertices from unified corners
    for (const auto& p : domain.patches)
        for (int c1 : {0, 1})
            for (int c2 : {0, 1}) {
                Vec2 x = p.corner(c1, c2);
                if (topo.vertex_at(x, kMatchTol) < 0) {
                    Vertex v;
                    v.position = x;
                    topo.vertices.push_back(v);
                }
            }

    // T-junction guard: no vertex may lie strictly inside another patch side
    for (const auto& v : topo.vertices)
        for (size_t pi = 0; pi < domain.patches.size(); ++pi)
            for (int side = 0; side < 4; ++side) {
                auto [ca, cb] = side_corners(side);
                Vec2 a = domain.patches[pi].corner(ca[0], ca[1]);
                Vec2 b = domain.patches[pi].corner(cb[0], cb[1]);
                if ((v.position - a).norm() <= kMatchTol || (v.position - b).norm() <= kMatchTol)
                    continue;
                if (point_segment_distance(v.position, a, b) <= kMatchTol)
                    throw GeometryError("T-junction: a patch corner lies inside another patch edge");
            }

    // group sides into edges by endpoint vertex pair
    std::map<std::pair<int, int>, int> edge_of;
    for (size_t pi = 0; pi < domain.patches.size(); ++pi) {
        for (int side = 0; side < 4; ++side) {
            auto [ca, cb] = side_corners(side);
            Vec2 a = domain.patches[pi].corner(ca[0], ca[1]);
            Vec2 b = domain.patches[pi].corner(cb[0], cb[1]);
            int va = topo.vertex_at(a), vb = topo.vertex_at(b);
            auto key = std::minmax(va, vb);
            auto it = edge_of.find({key.first, key.second});
            int eid;
            if (it == edge_of.end()) {
                Edge e;
                e.v0 = key.first;
                e.v1 = key.second;
                topo.edges.push_back(e);
                eid = int(topo.edges.size()) - 1;
                edge_of[{key.first, key.second}] = eid;
            } else {
                eid = it->second;
            }
            Edge& e = topo.edges[eid];
            if (e.sides.size() >= 2)
                throw GeometryError("an edge is shared by more than two patches");
            Edge::Side s;
            s.patch = int(pi);
            s.sym = find_side_symmetry(domain.patches[pi], topo.vertices[e.v0].position,
                                       topo.vertices[e.v1].position);
            e.sides.push_back(s);
        }
    }

    for (size_t ei = 0; ei < topo.edges.size(); ++ei) {
        const Edge& e = topo.edges[ei];
        if (e.inner()) {
            // G0 match of the two reindexed sides at 0, 1/2, 1
            BilinearPatch g0 = domain.patches[e.sides[0].patch].transformed(e.sides[0].sym);
            BilinearPatch g1 = domain.patches[e.sides[1].patch].transformed(e.sides[1].sym);
            for (double t : {0.0, 0.5, 1.0})
                if ((g0.eval(0, t) - g1.eval(0, t)).norm() > kMatchTol)
                    throw GeometryError("shared edge mismatch beyond tolerance");
            topo.inner_edges.push_back(int(ei));
        } else {
            topo.boundary_edges.push_back(int(ei));
        }
    }

    // vertex incidences and fan orders
    for (size_t vi = 0; vi < topo.vertices.size(); ++vi) {
        Vertex& v = topo.vertices[vi];
        std::vector<int> inc_edges;
        for (size_t ei = 0; ei < topo.edges.size(); ++ei)
            if (topo.edges[ei].v0 == int(vi) || topo.edges[ei].v1 == int(vi))
                inc_edges.push_back(int(ei));
        std::set<int> inc_patches;
        for (int ei : inc_edges)
            for (const auto& s : topo.edges[ei].sides) {
                const auto& p = domain.patches[s.patch];
                for (int c1 : {0, 1})
                    for (int c2 : {0, 1})
                        if ((p.corner(c1, c2) - v.position).norm() <= kMatchTol)
                            inc_patches.insert(s.patch);
            }
        v.valency = int(inc_patches.size());
        v.boundary = false;
        for (int ei : inc_edges)
            if (!topo.edges[ei].inner()) v.boundary = true;

        // sort incident edges counterclockwise by direction
        std::vector<std::pair<double, int>> by_angle;
        for (int ei : inc_edges) {
            const Edge& e = topo.edges[ei];
            int other = (e.v0 == int(vi)) ? e.v1 : e.v0;
            Vec2 dir = topo.vertices[other].position - v.position;
            by_angle.push_back({std::atan2(dir[1], dir[0]), ei});
        }
        std::sort(by_angle.begin(), by_angle.end());

        double min_len = std::numeric_limits<double>::max();
        for (int ei : inc_edges) {
            const Edge& e = topo.edges[ei];
            min_len = std::min(
                min_len, (topo.vertices[e.v0].position - topo.vertices[e.v1].position).norm());
        }

        const int m = int(by_angle.size());
        std::vector<int> sector_patch(m);  // patch between edge q and edge q+1 (mod m)
        int gaps = 0, gap_at = -1;
        for (int q = 0; q < m; ++q) {
            // probe a point just inside the angular sector's bisector
            double a0 = by_angle[q].first;
            double a1 = by_angle[(q + 1) % m].first;
            if (a1 <= a0) a1 += 2 * M_PI;
            double mid = 0.5 * (a0 + a1);
            Vec2 probe = v.position + 1e-3 * min_len * Vec2(std::cos(mid), std::sin(mid));
            sector_patch[q] = -1;
            for (int pj : inc_patches)
                if (domain.patches[pj].contains(probe, 1e-9)) {
                    sector_patch[q] = pj;
                    break;
                }
            if (sector_patch[q] < 0) {
                ++gaps;
                gap_at = q;
            }
        }
        if (!v.boundary) {
            if (gaps != 0 || m != v.valency)
                throw GeometryError("inconsistent patch fan around an inner vertex");
            // rotate so patches[0] has the lowest patch index
            int best = 0;
            for (int q = 1; q < m; ++q)
                if (sector_patch[q] < sector_patch[best]) best = q;
            for (int q = 0; q < m; ++q) {
                v.edges.push_back(by_angle[(best + q) % m].second);
                v.patches.push_back(sector_patch[(best + q) % m]);
            }
        } else {
            if (gaps != 1 || m != v.valency + 1)
                throw GeometryError("inconsistent patch fan around a boundary vertex");
            for (int q = 0; q < m; ++q) v.edges.push_back(by_angle[(gap_at + 1 + q) % m].second);
            for (int q = 0; q < m - 1; ++q) v.patches.push_back(sector_patch[(gap_at + 1 + q) % m]);
        }
    }
    return topo;
}

// ------------------------------------------------------------ edge frames

EdgeFrame edge_frame(const MultiPatchDomain& domain, const Topology& topo, int edge) {
    const Edge& e = topo.edges.at(edge);
    if (!e.inner()) throw ParameterError("edge_frame requires an inner edge");
    EdgeFrame f;
    f.edge = edge;
    f.from_v1 = false;
    double det[2];
    for (int s = 0; s < 2; ++s) {
        BilinearPatch g = domain.patches[e.sides[s].patch].transformed(e.sides[s].sym);
        det[s] = g.jacobian(0.5, 0.5).determinant();
    }
    if (det[0] * det[1] >= 0)
        throw GeometryError("inner edge sides do not lie on opposite sides of the interface");
    int neg = det[0] < 0 ? 0 : 1;
    for (int s = 0; s < 2; ++s) {
        int side = (s == 0) ? neg : 1 - neg;
        f.patch[s] = e.sides[side].patch;
        f.sym[s] = e.sides[side].sym;
    }
    return f;
}

EdgeFrame edge_frame_at_vertex(const MultiPatchDomain& domain, const Topology& topo, int edge,
                               int vertex) {
    const Edge& e = topo.edges.at(edge);
    EdgeFrame f = edge_frame(domain, topo, edge);
    if (vertex == e.v0) return f;
    if (vertex != e.v1) throw ParameterError("vertex is not an endpoint of the edge");
    // reverse the edge parameter; sides swap their determinant signs
    SquareSymmetry rev{false, false, true};
    EdgeFrame g;
    g.edge = edge;
    g.from_v1 = true;
    g.patch = {f.patch[1], f.patch[0]};
    g.sym = {compose(f.sym[1], rev), compose(f.sym[0], rev)};
    // composition order: framed patch is F((sym o rev)(z)) = G(rev(z))
    double d0 = g.framed_patch(domain, 0).jacobian(0.5, 0.5).determinant();
    if (d0 >= 0) throw GeometryError("internal frame orientation error");
    return g;
}

}  // namespace css
