#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cssplines/gluing.hpp"

namespace css {

/// Transversal profile splines M_0..M_s with unit corner jets,
/// d^l M_i(0) = delta_{il} for 0 <= i, l <= s.
struct TransversalProfiles {
    int p = 0, r = 0, k = 0, s = 0;
    Eigen::MatrixXd weights;  // (s+1) x (s+1); M_i = sum_j weights(i,j) N_j
};
TransversalProfiles build_transversal_profiles(int p, int r, int k, int s);

/// Rectangular coefficient block inside an n x n tensor coefficient matrix.
struct CoefBlock {
    int row0 = 0, col0 = 0;
    Eigen::MatrixXd values;

    int rows() const { return int(values.rows()); }
    int cols() const { return int(values.cols()); }
    double at(int m1, int m2) const {  // global indices
        int a = m1 - row0, b = m2 - col0;
        if (a < 0 || b < 0 || a >= rows() || b >= cols()) return 0.0;
        return values(a, b);
    }
    void add(const CoefBlock& o);
    static CoefBlock from_dense(const Eigen::MatrixXd& dense, double drop_tol = 0.0);
};

/// Coefficients of z -> g(m(z)) given the coefficients of g (n x n tensor
/// B-spline indices; the basis is symmetric under coordinate reversal).
CoefBlock compose_with_symmetry(const CoefBlock& g, const SquareSymmetry& m, int n);
std::pair<int, int> map_index(const SquareSymmetry& m_inverse, int a, int b, int n);

enum class VertexStrategy { nullspace, interpolation };

struct SpaceParams {
    int p = 3, r = 1, s = 1, k = 0;
    VertexStrategy strategy = VertexStrategy::interpolation;

    double mesh_size() const { return 1.0 / (k + 1); }
    /// Mesh-size bound below which all index ranges are disjoint.
    double refinable_mesh_bound() const {
        return double(p - r - s) / double(3 * s - r + 1);
    }
};
void validate_params(const SpaceParams& prm);

struct IsogeometricFunction {
    enum class Tag { patch, edge, vertex };
    Tag tag = Tag::patch;
    int owner = -1;            // patch / edge / vertex id
    int index1 = 0, index2 = 0;
    std::map<int, CoefBlock> parts;  // patch id -> block, global patch frame

    double eval(const SplineSpace1D& sp, int patch, double z1, double z2, int d1 = 0,
                int d2 = 0) const;
    Eigen::MatrixXd dense_on(int n, int patch) const;
    double coefficient_norm2() const;
};

struct SubspaceDim {
    char kind = 'P';  // 'P' patch, 'E' edge, 'V' vertex
    int owner = -1;
    int count = 0;
};
int total_dim(const std::vector<SubspaceDim>& dims);

struct SmoothSpace {
    SpaceParams params;
    MultiPatchDomain domain;
    Topology topology;
    bool two_patch_layout = false;
    std::vector<IsogeometricFunction> basis;
    std::vector<SubspaceDim> subspaces;
    int prune_dropped = 0;  // independence-restoring drops on coarse meshes
    std::vector<std::string> warnings;

    int dim() const { return int(basis.size()); }
    const SplineSpace1D& line_space() const;
};

/// Build the smooth space over the domain. Two-patch domains use the
/// dedicated two-patch layout; everything else uses the patch/edge/vertex
/// decomposition with coarse-mesh deduplication.
SmoothSpace assemble_space(const MultiPatchDomain& domain, const SpaceParams& params);

/// Subspace dimensions from index-range bookkeeping alone (no coefficient
/// instantiation); vertex kernel dimensions come from the vertex systems.
std::vector<SubspaceDim> predicted_dims(const MultiPatchDomain& domain, const SpaceParams& params);

/// Kernel basis of the vertex smoothness system, as raw unknown vectors
/// (columns, orthonormal). Exposed for the strategy-containment check.
struct VertexSystem {
    Eigen::MatrixXd matrix;         // row-scaled system
    Eigen::MatrixXd kernel;         // columns: orthonormal kernel basis
    int edge_coeff_count = 0;       // per fan edge
    int patch_coeff_count = 0;      // per fan patch
    std::vector<std::string> warnings;
};
VertexSystem vertex_nullspace_system(const MultiPatchDomain& domain, const Topology& topo,
                                     const SpaceParams& prm, int vertex);
/// Unknown vectors of the interpolation-strategy functions (columns, one per
/// prescribed vertex jet), in the same unknown layout as the vertex system.
Eigen::MatrixXd vertex_interpolation_vectors(const MultiPatchDomain& domain, const Topology& topo,
                                             const SpaceParams& prm, int vertex);

/// Stable text dump of the basis (provenance + nonzero blocks, 17 significant
/// digits) and its inverse.
void export_basis(const SmoothSpace& space, std::ostream& out);
SmoothSpace import_basis(std::istream& in);

}  // namespace css
