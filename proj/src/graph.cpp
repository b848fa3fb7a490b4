#include "qgdirac/graph.hpp"

#include "qgdirac/csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

namespace qgdirac {

GraphError::GraphError(const std::string& what, std::size_t line)
    : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{
}

std::optional<std::size_t> MetricGraph::find_vertex(std::string_view id) const
{
    auto it = std::find(vertices.begin(), vertices.end(), id);
    if (it == vertices.end()) return std::nullopt;
    return static_cast<std::size_t>(it - vertices.begin());
}

std::size_t MetricGraph::vertex_index(std::string_view id) const
{
    if (auto v = find_vertex(id)) return *v;
    throw GraphError("unknown vertex '" + std::string(id) + "'");
}

std::size_t MetricGraph::degree(std::size_t v) const
{
    std::size_t d = 0;
    for (const auto& e : edges) d += (e.tail == v) + (e.head == v);
    for (const auto& h : halflines) d += (h.anchor == v);
    return d;
}

namespace {

bool valid_id(std::string_view token)
{
    return !token.empty() && std::all_of(token.begin(), token.end(), [](unsigned char ch) {
        return std::isalnum(ch) || ch == '_';
    });
}

std::vector<std::string_view> split_tokens(std::string_view line)
{
    std::vector<std::string_view> tokens;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        std::size_t start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
        if (i > start) tokens.push_back(line.substr(start, i - start));
    }
    return tokens;
}

// Connected components over vertices; half-lines do not join vertices.
std::size_t count_components(const MetricGraph& g)
{
    std::vector<std::size_t> parent(g.vertices.size());
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    for (const auto& e : g.edges) parent[find(e.tail)] = find(e.head);
    std::size_t n = 0;
    for (std::size_t v = 0; v < parent.size(); ++v) n += (find(v) == v);
    return n;
}

}  // namespace

void validate(const MetricGraph& g)
{
    if (g.vertices.empty()) throw GraphError("graph has no vertices");
    if (g.edges.empty() && g.halflines.empty()) throw GraphError("graph has no edges");

    std::set<std::string> seen;
    for (const auto& v : g.vertices) {
        if (!seen.insert(v).second) throw GraphError("duplicate vertex id '" + v + "'");
    }
    std::set<std::string> edge_ids;
    for (const auto& e : g.edges) {
        if (!edge_ids.insert(e.id).second) throw GraphError("duplicate edge id '" + e.id + "'");
        if (e.tail >= g.vertices.size() || e.head >= g.vertices.size())
            throw GraphError("edge '" + e.id + "' references an undeclared vertex");
        if (!(e.length > 0.0) || !std::isfinite(e.length))
            throw GraphError("edge '" + e.id + "' must have a positive finite length");
    }
    for (const auto& h : g.halflines) {
        if (!edge_ids.insert(h.id).second) throw GraphError("duplicate edge id '" + h.id + "'");
        if (h.anchor >= g.vertices.size())
            throw GraphError("half-line '" + h.id + "' references an undeclared vertex");
    }
    if (count_components(g) != 1) throw GraphError("graph is not connected");
}

MetricGraph parse_graph(std::string_view text)
{
    struct PendingEdge {
        std::string id, a, b;
        double length;
        std::size_t line;
    };
    struct PendingHalfLine {
        std::string id, anchor;
        std::size_t line;
    };

    MetricGraph g;
    bool named = false;
    std::vector<PendingEdge> edges;
    std::vector<PendingHalfLine> halflines;
    std::set<std::string> vertex_ids, edge_ids;

    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos) eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        auto tok = split_tokens(line);
        if (tok.empty()) continue;

        auto require_ids = [&](std::size_t count) {
            if (tok.size() != count)
                throw GraphError("'" + std::string(tok[0]) + "' expects " +
                                     std::to_string(count - 1) + " arguments",
                                 line_no);
            for (std::size_t i = 1; i < count; ++i) {
                if (tok[0] == "edge" && i == 4) continue;
                if (!valid_id(tok[i]))
                    throw GraphError("invalid identifier '" + std::string(tok[i]) + "'", line_no);
            }
        };

        if (tok[0] == "graph") {
            require_ids(2);
            if (named) throw GraphError("duplicate 'graph' directive", line_no);
            g.name = tok[1];
            named = true;
        } else if (tok[0] == "vertex") {
            require_ids(2);
            if (!vertex_ids.insert(std::string(tok[1])).second)
                throw GraphError("duplicate vertex id '" + std::string(tok[1]) + "'", line_no);
            g.vertices.emplace_back(tok[1]);
        } else if (tok[0] == "edge") {
            require_ids(5);
            double length = 0.0;
            const char* first = tok[4].data();
            const char* last = first + tok[4].size();
            auto [ptr, ec] = std::from_chars(first, last, length, std::chars_format::fixed |
                                                                      std::chars_format::scientific);
            if (ec != std::errc{} || ptr != last || !std::isfinite(length))
                throw GraphError("invalid length '" + std::string(tok[4]) + "'", line_no);
            if (!(length > 0.0))
                throw GraphError("edge '" + std::string(tok[1]) + "' has nonpositive length",
                                 line_no);
            if (!edge_ids.insert(std::string(tok[1])).second)
                throw GraphError("duplicate edge id '" + std::string(tok[1]) + "'", line_no);
            edges.push_back({std::string(tok[1]), std::string(tok[2]), std::string(tok[3]), length,
                             line_no});
        } else if (tok[0] == "halfline") {
            require_ids(3);
            if (!edge_ids.insert(std::string(tok[1])).second)
                throw GraphError("duplicate edge id '" + std::string(tok[1]) + "'", line_no);
            halflines.push_back({std::string(tok[1]), std::string(tok[2]), line_no});
        } else {
            throw GraphError("unknown directive '" + std::string(tok[0]) + "'", line_no);
        }
    }

    for (const auto& e : edges) {
        auto a = g.find_vertex(e.a);
        auto b = g.find_vertex(e.b);
        if (!a) throw GraphError("dangling reference to vertex '" + e.a + "'", e.line);
        if (!b) throw GraphError("dangling reference to vertex '" + e.b + "'", e.line);
        g.edges.push_back({e.id, *a, *b, e.length});
    }
    for (const auto& h : halflines) {
        auto a = g.find_vertex(h.anchor);
        if (!a) throw GraphError("dangling reference to vertex '" + h.anchor + "'", h.line);
        g.halflines.push_back({h.id, *a});
    }
    if (!named) g.name = "unnamed";
    validate(g);
    return g;
}

MetricGraph read_graph(const std::filesystem::path& path)
{
    return parse_graph(read_text_file(path));
}

std::string format_graph(const MetricGraph& g)
{
    std::ostringstream out;
    out << "graph " << g.name << '\n';
    for (const auto& v : g.vertices) out << "vertex " << v << '\n';
    for (const auto& e : g.edges)
        out << "edge " << e.id << ' ' << g.vertices[e.tail] << ' ' << g.vertices[e.head] << ' '
            << format_real(e.length) << '\n';
    for (const auto& h : g.halflines) out << "halfline " << h.id << ' ' << g.vertices[h.anchor] << '\n';
    return out.str();
}

CompactCore compact_core(const MetricGraph& g)
{
    CompactCore core;
    core.edges = g.edges;
    for (const auto& e : g.edges) core.total_length += e.length;
    return core;
}

std::vector<double> vertex_distances(const MetricGraph& g, std::size_t source)
{
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(g.vertices.size(), inf);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    dist.at(source) = 0.0;
    queue.push({0.0, source});
    while (!queue.empty()) {
        auto [d, v] = queue.top();
        queue.pop();
        if (d > dist[v]) continue;
        for (const auto& e : g.edges) {
            if (e.tail != v && e.head != v) continue;
            std::size_t w = (e.tail == v) ? e.head : e.tail;
            if (d + e.length < dist[w]) {
                dist[w] = d + e.length;
                queue.push({dist[w], w});
            }
        }
    }
    return dist;
}

}  // namespace qgdirac
