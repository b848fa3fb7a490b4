#pragma once

#include "qgdirac/graph.hpp"

#include <Eigen/Core>

#include <array>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace qgdirac {

using Index = Eigen::Index;

/// One edge of the mesh. Integer nodes sit at x_j = j*step (j = 0..intervals),
/// half-nodes at x_{k+1/2} = (k+1/2)*step (k = 0..intervals-1). A truncated
/// half-line keeps its natural orientation and ends in a Dirichlet node at
/// x = length.
struct MeshEdge {
    std::string id;
    bool halfline = false;
    double length = 0.0;
    Index intervals = 0;
    double step = 0.0;
    std::size_t tail_vertex = 0;
    std::optional<std::size_t> head_vertex;  ///< empty for truncated half-lines
    std::vector<Index> nodes;                ///< global integer-node ids, size intervals+1
    Index half_offset = 0;                   ///< global id of half-node k is half_offset+k

    double x(Index j) const { return static_cast<double>(j) * step; }
    double x_half(Index k) const { return (static_cast<double>(k) + 0.5) * step; }
    Index half(Index k) const { return half_offset + k; }
};

/// A half-node adjacent to an integer node, with the half-cell length it
/// contributes to the node's trapezoid weight.
struct HalfNeighbor {
    Index half = 0;
    double share = 0.0;
};

struct MeshOptions {
    double step = 0.05;
    double truncation = 30.0;
    /// Vertices whose node carries a homogeneous Dirichlet condition
    /// (besides the truncation nodes, which always do).
    std::vector<std::string> dirichlet_vertices;
};

/// Discretization of a MetricGraph. Immutable after construction.
struct Mesh {
    MetricGraph graph;
    double target_step = 0.0;
    double truncation = 0.0;
    std::vector<MeshEdge> edges;

    Index num_nodes = 0;
    Index num_half_nodes = 0;
    Index num_free = 0;

    std::vector<Index> vertex_node;            ///< graph vertex -> shared integer node
    std::vector<bool> dirichlet;               ///< per integer node
    std::vector<Index> free_index;             ///< per integer node, -1 when Dirichlet
    std::vector<Index> free_to_node;           ///< inverse of free_index
    Eigen::VectorXd node_weight;               ///< trapezoid weight of each integer node
    Eigen::VectorXd half_weight;               ///< cell length of each half-node
    std::vector<std::vector<HalfNeighbor>> node_halves;
    std::vector<std::array<Index, 2>> half_nodes;  ///< integer nodes left/right of a half-node

    const MeshEdge& edge(std::string_view id) const;
    Index edge_index(std::string_view id) const;
    bool has_dirichlet_nodes() const;
};

using MeshPtr = std::shared_ptr<const Mesh>;

/// Bounded edges get round(l/h) intervals (ties to even), truncated half-lines
/// round(L/h). Throws std::invalid_argument when h <= 0, L < 10h, or an edge
/// would have fewer than 4 interior nodes.
MeshPtr build_mesh(const MetricGraph& graph, const MeshOptions& options);
MeshPtr build_mesh(const MetricGraph& graph, double step, double truncation);

/// Graph distance of every integer node from vertex `source`.
Eigen::VectorXd node_distances(const Mesh& mesh, std::size_t source);

/// Vertex of maximal degree (first one on ties).
std::size_t max_degree_vertex(const MetricGraph& graph);

}  // namespace qgdirac
