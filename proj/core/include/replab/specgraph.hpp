#pragma once

#include <cstddef>
#include <set>
#include <utility>
#include <vector>

#include "replab/algebra.hpp"
#include "replab/repbuild.hpp"

namespace replab {

/// Directed graph of a matrix: edge (i, j) iff W_ij != 0. Vertices are 0-based.
struct Digraph {
    std::size_t vertex_count = 0;
    std::set<std::pair<std::size_t, std::size_t>> edges;
};

enum class ComponentKind { loop, string, other };
const char* to_string(ComponentKind kind);

struct Component {
    std::vector<std::size_t> vertices;
    ComponentKind kind = ComponentKind::other;
};

Digraph digraph_of(const CMatrix& W, double threshold);
/// Threshold 1e-8 ||W||_F.
Digraph digraph_of(const CMatrix& W);

struct TransmittersReceivers {
    std::vector<std::size_t> transmitters;  ///< no incoming edge
    std::vector<std::size_t> receivers;     ///< no outgoing edge
};
TransmittersReceivers transmitters_receivers(const Digraph& g);

/// Tarjan's algorithm; components are returned with sorted vertex lists.
std::vector<std::vector<std::size_t>> strongly_connected_components(const Digraph& g);
bool strongly_connected(const Digraph& g);

/// Per weakly-connected component: a single directed cycle, a single directed path, or other.
std::vector<Component> classify(const Digraph& g);

struct JointDiagonalization {
    /// Unitary with U (W W^dagger) U^dagger = diag(d) and U (W^dagger W) U^dagger = diag(dt).
    CMatrix U;
    Eigen::VectorXd d;
    Eigen::VectorXd dt;
};

/// Throws NotARepresentationError when ||[W W^dagger, W^dagger W]||_F >= tol (1 + ||W||_F^2)^2.
JointDiagonalization simultaneous_diagonalize(const CMatrix& W, double tol = 1e-8);

struct DecomposedBlock {
    Representation rep;
    std::vector<SpectrumPoint> spectrum;
    RelationResidual residual;
};

struct DecompositionReport {
    std::vector<DecomposedBlock> blocks;
    /// T with T W T^dagger block diagonal in canonical loop/string form.
    CMatrix transform;
    /// Frobenius norm of T W T^dagger outside the claimed block pattern.
    double offdiag_leakage = 0.0;
    /// ||T W T^dagger - canonical blocks||_F.
    double reconstruction_error = 0.0;
};

/// Splits a locally injective hermitian representation into irreducible loop and string
/// blocks. Throws NotARepresentationError, UnsupportedRepresentationError (not locally
/// injective) or DecompositionFailedError (leakage above tol (1 + ||W||_F)).
DecompositionReport decompose(const Representation& rep, const AlgebraParams& p, double tol = 1e-8);

} // namespace replab
