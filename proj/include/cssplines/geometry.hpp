#pragma once

#include <Eigen/Dense>
#include <array>
#include <iosfwd>
#include <string>
#include <vector>

#include "cssplines/common.hpp"

namespace css {

using Vec2 = Eigen::Vector2d;

/// One of the eight axis-aligned symmetries of the unit square,
/// m(z)_i = flip_i ? 1 - z_{perm_i} : z_{perm_i} with perm = (swap ? (2,1) : (1,2)).
struct SquareSymmetry {
    bool swap = false;
    bool flip1 = false;
    bool flip2 = false;

    std::array<double, 2> operator()(double z1, double z2) const {
        double t1 = swap ? z2 : z1;
        double t2 = swap ? z1 : z2;
        return {flip1 ? 1.0 - t1 : t1, flip2 ? 1.0 - t2 : t2};
    }
    SquareSymmetry inverse() const {
        if (!swap) return *this;
        return {true, flip2, flip1};
    }
    static const std::array<SquareSymmetry, 8>& all();
};

/// Bilinear patch spanned by four corners; F(z1,z2) interpolates
/// c00 (1-z1)(1-z2) + c10 z1(1-z2) + c01 (1-z1)z2 + c11 z1 z2.
struct BilinearPatch {
    Vec2 c00, c10, c01, c11;

    Vec2 eval(double z1, double z2) const;
    Eigen::Matrix2d jacobian(double z1, double z2) const;
    /// Newton inversion; throws GeometryError when x is outside the image.
    Vec2 invert(const Vec2& x) const;
    bool contains(const Vec2& x, double tol = 1e-9) const;

    /// Same patch precomposed with a square symmetry.
    BilinearPatch transformed(const SquareSymmetry& m) const;

    Vec2 corner(int c1, int c2) const;  // c1, c2 in {0, 1}
    // F = a + b z1 + c z2 + d z1 z2
    Vec2 coef_a() const { return c00; }
    Vec2 coef_b() const { return c10 - c00; }
    Vec2 coef_c() const { return c01 - c00; }
    Vec2 coef_d() const { return c11 - c10 - c01 + c00; }
};

struct MultiPatchDomain {
    std::vector<BilinearPatch> patches;
    double diameter() const;
};

/// Parse and validate a geometry config document (JSON:
/// {"patches": [{"corners": [[x,y], ...4]}, ...]}, corner order c00,c10,c01,c11).
MultiPatchDomain load_geometry(std::istream& in);
MultiPatchDomain load_geometry_file(const std::string& path);

struct Edge {
    int v0 = -1, v1 = -1;  // topology vertex ids; canonical direction v0 -> v1
    struct Side {
        int patch = -1;
        SquareSymmetry sym;  // F(sym(.)) maps {0}x[0,1] onto the edge, 0 at v0
    };
    std::vector<Side> sides;  // size 1 (boundary) or 2 (inner)
    bool inner() const { return sides.size() == 2; }
};

struct Vertex {
    Vec2 position;
    bool boundary = false;
    int valency = 0;            // patch valency
    std::vector<int> patches;   // fan order; patches[q] sits between edges[q] and edges[q+1 mod]
    std::vector<int> edges;     // inner vertex: size v (cyclic); boundary: size v+1
};

struct Topology {
    std::vector<Edge> edges;
    std::vector<Vertex> vertices;
    std::vector<int> inner_edges;   // ids into edges
    std::vector<int> boundary_edges;
    int vertex_at(const Vec2& x, double tol = 1e-9) const;
};

/// Classify edges and vertices of a validated domain; throws GeometryError on
/// T-junctions or mismatched shared edges.
Topology extract_topology(const MultiPatchDomain& domain);

/// Reindexing frame for one inner edge: both patches reparameterized so that
/// F(0, u) traces the edge, side 0 carrying the negative Jacobian determinant.
struct EdgeFrame {
    int edge = -1;
    bool from_v1 = false;              // true when u = 0 sits at the edge's v1 end
    std::array<int, 2> patch{-1, -1};  // side 0 / side 1 patch ids
    std::array<SquareSymmetry, 2> sym;

    BilinearPatch framed_patch(const MultiPatchDomain& d, int side) const {
        return d.patches[patch[side]].transformed(sym[side]);
    }
};

/// Frame with u = 0 at the edge's canonical v0 end.
EdgeFrame edge_frame(const MultiPatchDomain& domain, const Topology& topo, int edge);
/// Frame with u = 0 at the given vertex (one of the edge's endpoints).
EdgeFrame edge_frame_at_vertex(const MultiPatchDomain& domain, const Topology& topo, int edge,
                               int vertex);

}  // namespace css
