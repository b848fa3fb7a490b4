#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace qgdirac {

/// Raised for malformed graph documents. Carries the 1-based line number
/// when the problem can be attributed to a single line (0 otherwise).
class GraphError : public std::runtime_error {
public:
    GraphError(const std::string& what, std::size_t line = 0);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

/// Bounded edge identified with [0, length]; coordinate 0 sits at `tail`.
struct BoundedEdge {
    std::string id;
    std::size_t tail = 0;
    std::size_t head = 0;
    double length = 0.0;
};

/// Half-line identified with [0, +inf); coordinate 0 sits at `anchor`.
struct HalfLine {
    std::string id;
    std::size_t anchor = 0;
};

/// Connected metric multigraph with finitely many bounded edges and half-lines.
/// Self-loops and parallel edges are allowed.
struct MetricGraph {
    std::string name;
    std::vector<std::string> vertices;
    std::vector<BoundedEdge> edges;
    std::vector<HalfLine> halflines;

    bool noncompact() const noexcept { return !halflines.empty(); }
    std::size_t vertex_index(std::string_view id) const;
    std::optional<std::size_t> find_vertex(std::string_view id) const;
    /// Number of edge ends at v (a self-loop counts twice).
    std::size_t degree(std::size_t v) const;
};

/// Checks the structural invariants: declared endpoints, positive finite
/// lengths, unique ids, at least one edge and connectivity.
void validate(const MetricGraph& graph);

/// Parses the line-oriented graph description format:
///
///     # comment
///     graph <name>
///     vertex <id>
///     edge <id> <vertex_a> <vertex_b> <length>
///     halfline <id> <anchor_vertex>
///
/// Directives may appear in any order. Throws GraphError.
MetricGraph parse_graph(std::string_view text);

MetricGraph read_graph(const std::filesystem::path& path);

/// Inverse of parse_graph; lengths are written with 17 significant digits.
std::string format_graph(const MetricGraph& graph);

/// Subgraph of all bounded edges and its total length.
struct CompactCore {
    std::vector<BoundedEdge> edges;
    double total_length = 0.0;
};

CompactCore compact_core(const MetricGraph& graph);

/// Shortest-path distances from `source` to every vertex along bounded edges.
std::vector<double> vertex_distances(const MetricGraph& graph, std::size_t source);

}  // namespace qgdirac
