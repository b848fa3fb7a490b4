#include "qgdirac/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace qgdirac {

const MeshEdge& Mesh::edge(std::string_view id) const
{
    return edges[static_cast<std::size_t>(edge_index(id))];
}

Index Mesh::edge_index(std::string_view id) const
{
    for (std::size_t e = 0; e < edges.size(); ++e)
        if (edges[e].id == id) return static_cast<Index>(e);
    throw std::invalid_argument("mesh has no edge '" + std::string(id) + "'");
}

bool Mesh::has_dirichlet_nodes() const
{
    return std::find(dirichlet.begin(), dirichlet.end(), true) != dirichlet.end();
}

namespace {

Index interval_count(double length, double step)
{
    return static_cast<Index>(std::nearbyint(length / step));
}

}  // namespace

MeshPtr build_mesh(const MetricGraph& graph, const MeshOptions& options)
{
    const double h = options.step;
    const double L = options.truncation;
    if (!(h > 0.0) || !std::isfinite(h)) throw std::invalid_argument("build_mesh: step must be positive");
    if (graph.noncompact() && !(L >= 10.0 * h))
        throw std::invalid_argument("build_mesh: truncation length must be at least 10 steps");
    validate(graph);

    auto mesh = std::make_shared<Mesh>();
    mesh->graph = graph;
    mesh->target_step = h;
    mesh->truncation = graph.noncompact() ? L : 0.0;

    // Vertex nodes come first so that their ids are stable.
    Index next_node = static_cast<Index>(graph.vertices.size());
    mesh->vertex_node.resize(graph.vertices.size());
    for (std::size_t v = 0; v < graph.vertices.size(); ++v) mesh->vertex_node[v] = static_cast<Index>(v);

    Index next_half = 0;
    auto add_edge = [&](MeshEdge edge, std::optional<std::size_t> head) {
        if (edge.intervals < 5)
            throw std::invalid_argument("build_mesh: step too coarse for edge '" + edge.id +
                                        "' (needs at least 4 interior nodes)");
        edge.step = edge.length / static_cast<double>(edge.intervals);
        edge.head_vertex = head;
        edge.nodes.resize(static_cast<std::size_t>(edge.intervals + 1));
        edge.nodes.front() = mesh->vertex_node[edge.tail_vertex];
        for (Index j = 1; j < edge.intervals; ++j) edge.nodes[static_cast<std::size_t>(j)] = next_node++;
        edge.nodes.back() = head ? mesh->vertex_node[*head] : next_node++;
        edge.half_offset = next_half;
        next_half += edge.intervals;
        mesh->edges.push_back(std::move(edge));
    };

    for (const auto& e : graph.edges) {
        MeshEdge edge;
        edge.id = e.id;
        edge.length = e.length;
        edge.intervals = interval_count(e.length, h);
        edge.tail_vertex = e.tail;
        add_edge(std::move(edge), e.head);
    }
    for (const auto& hl : graph.halflines) {
        MeshEdge edge;
        edge.id = hl.id;
        edge.halfline = true;
        edge.length = L;
        edge.intervals = interval_count(L, h);
        edge.tail_vertex = hl.anchor;
        add_edge(std::move(edge), std::nullopt);
    }

    mesh->num_nodes = next_node;
    mesh->num_half_nodes = next_half;
    mesh->dirichlet.assign(static_cast<std::size_t>(next_node), false);
    mesh->node_weight = Eigen::VectorXd::Zero(next_node);
    mesh->half_weight = Eigen::VectorXd::Zero(next_half);
    mesh->node_halves.assign(static_cast<std::size_t>(next_node), {});
    mesh->half_nodes.resize(static_cast<std::size_t>(next_half));

    for (const auto& edge : mesh->edges) {
        const double half_cell = 0.5 * edge.step;
        for (Index k = 0; k < edge.intervals; ++k) {
            const Index left = edge.nodes[static_cast<std::size_t>(k)];
            const Index right = edge.nodes[static_cast<std::size_t>(k + 1)];
            const Index half = edge.half(k);
            mesh->half_weight[half] = edge.step;
            mesh->half_nodes[static_cast<std::size_t>(half)] = {left, right};
            mesh->node_weight[left] += half_cell;
            mesh->node_weight[right] += half_cell;
            mesh->node_halves[static_cast<std::size_t>(left)].push_back({half, half_cell});
            mesh->node_halves[static_cast<std::size_t>(right)].push_back({half, half_cell});
        }
        if (edge.halfline) mesh->dirichlet[static_cast<std::size_t>(edge.nodes.back())] = true;
    }
    for (const auto& id : options.dirichlet_vertices)
        mesh->dirichlet[static_cast<std::size_t>(mesh->vertex_node[graph.vertex_index(id)])] = true;

    mesh->free_index.assign(static_cast<std::size_t>(next_node), -1);
    for (Index n = 0; n < next_node; ++n) {
        if (mesh->dirichlet[static_cast<std::size_t>(n)]) continue;
        mesh->free_index[static_cast<std::size_t>(n)] = mesh->num_free++;
        mesh->free_to_node.push_back(n);
    }
    return mesh;
}

MeshPtr build_mesh(const MetricGraph& graph, double step, double truncation)
{
    MeshOptions options;
    options.step = step;
    options.truncation = truncation;
    return build_mesh(graph, options);
}

Eigen::VectorXd node_distances(const Mesh& mesh, std::size_t source)
{
    const auto vdist = vertex_distances(mesh.graph, source);
    Eigen::VectorXd dist = Eigen::VectorXd::Constant(mesh.num_nodes, std::numeric_limits<double>::infinity());
    for (const auto& edge : mesh.edges) {
        const double from_tail = vdist[edge.tail_vertex];
        const double from_head = edge.head_vertex ? vdist[*edge.head_vertex]
                                                  : std::numeric_limits<double>::infinity();
        for (Index j = 0; j <= edge.intervals; ++j) {
            const double d = std::min(from_tail + edge.x(j), from_head + (edge.length - edge.x(j)));
            Index n = edge.nodes[static_cast<std::size_t>(j)];
            dist[n] = std::min(dist[n], d);
        }
    }
    return dist;
}

std::size_t max_degree_vertex(const MetricGraph& graph)
{
    std::size_t best = 0;
    for (std::size_t v = 1; v < graph.vertices.size(); ++v)
        if (graph.degree(v) > graph.degree(best)) best = v;
    return best;
}

}  // namespace qgdirac
