#include "glauber/graph.hpp"

#include <algorithm>
#include <deque>
#include <stdexcept>

namespace glauber {

VertexSet::VertexSet(std::initializer_list<Vertex> ids) : VertexSet(std::vector<Vertex>(ids)) {}

VertexSet::VertexSet(std::vector<Vertex> ids) : members_(std::move(ids)) {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

bool VertexSet::contains(Vertex v) const {
    return std::binary_search(members_.begin(), members_.end(), v);
}

VertexSet set_union(const VertexSet& a, const VertexSet& b) {
    std::vector<Vertex> out;
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return VertexSet(std::move(out));
}

VertexSet set_difference(const VertexSet& a, const VertexSet& b) {
    std::vector<Vertex> out;
    std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return VertexSet(std::move(out));
}

bool is_subset(const VertexSet& a, const VertexSet& b) {
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

Graph::Graph(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges) : adjacency_(n) {
    if (n == 0) {
        throw std::invalid_argument("graph must have at least one vertex");
    }
    for (const auto& [u, v] : edges) {
        if (!valid(u) || !valid(v)) {
            throw std::invalid_argument("edge endpoint out of range: {" + std::to_string(u) + "," +
                                        std::to_string(v) + "}");
        }
        if (u == v) {
            throw std::invalid_argument("self-loop at vertex " + std::to_string(u));
        }
        adjacency_[static_cast<std::size_t>(u)].push_back(v);
        adjacency_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nb : adjacency_) {
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        edge_count_ += nb.size();
        max_degree_ = std::max(max_degree_, nb.size());
    }
    edge_count_ /= 2;
}

bool Graph::adjacent(Vertex u, Vertex v) const {
    const auto& nb = neighbors(u);
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::pair<Vertex, Vertex>> Graph::edges() const {
    std::vector<std::pair<Vertex, Vertex>> out;
    out.reserve(edge_count_);
    for (std::size_t u = 0; u < adjacency_.size(); ++u) {
        for (Vertex v : adjacency_[u]) {
            if (static_cast<Vertex>(u) < v) out.emplace_back(static_cast<Vertex>(u), v);
        }
    }
    return out;
}

class GraphFactory {
public:
    static GraphPtr make(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges,
                         std::string description, GraphPtr base = nullptr) {
        auto g = std::make_shared<Graph>(n, edges);
        g->description_ = std::move(description);
        g->base_ = std::move(base);
        return g;
    }
};

namespace {

void require_positive(std::size_t n, const char* what) {
    if (n == 0) throw std::invalid_argument(std::string(what) + " requires n >= 1");
}

}  // namespace

GraphPtr empty_graph(std::size_t n) {
    require_positive(n, "empty graph");
    return GraphFactory::make(n, {}, "empty(" + std::to_string(n) + ")");
}

GraphPtr path_graph(std::size_t n) {
    require_positive(n, "path");
    std::vector<std::pair<Vertex, Vertex>> e;
    for (std::size_t i = 0; i + 1 < n; ++i) e.emplace_back(Vertex(i), Vertex(i + 1));
    return GraphFactory::make(n, e, "path(" + std::to_string(n) + ")");
}

GraphPtr cycle_graph(std::size_t n) {
    if (n < 3) throw std::invalid_argument("cycle requires n >= 3");
    std::vector<std::pair<Vertex, Vertex>> e;
    for (std::size_t i = 0; i < n; ++i) e.emplace_back(Vertex(i), Vertex((i + 1) % n));
    return GraphFactory::make(n, e, "cycle(" + std::to_string(n) + ")");
}

GraphPtr complete_graph(std::size_t n) {
    require_positive(n, "complete graph");
    std::vector<std::pair<Vertex, Vertex>> e;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) e.emplace_back(Vertex(i), Vertex(j));
    return GraphFactory::make(n, e, "complete(" + std::to_string(n) + ")");
}

GraphPtr grid_graph(std::size_t rows, std::size_t cols) {
    if (rows == 0 || cols == 0) throw std::invalid_argument("grid requires rows, cols >= 1");
    std::vector<std::pair<Vertex, Vertex>> e;
    auto id = [cols](std::size_t r, std::size_t c) { return Vertex(r * cols + c); };
    for (std::size_t r = 0; r < rows; ++r) {
        for (std::size_t c = 0; c < cols; ++c) {
            if (c + 1 < cols) e.emplace_back(id(r, c), id(r, c + 1));
            if (r + 1 < rows) e.emplace_back(id(r, c), id(r + 1, c));
        }
    }
    return GraphFactory::make(rows * cols, e,
                              "grid(" + std::to_string(rows) + "x" + std::to_string(cols) + ")");
}

GraphPtr tree_graph(std::size_t branching, std::size_t height) {
    if (branching < 1) throw std::invalid_argument("tree requires branching >= 1");
    std::size_t n = 1;
    std::size_t level = 1;
    for (std::size_t h = 0; h < height; ++h) {
        level *= branching;
        n += level;
        if (n > (std::size_t{1} << 26)) throw std::invalid_argument("tree too large");
    }
    std::vector<std::pair<Vertex, Vertex>> e;
    for (std::size_t v = 1; v < n; ++v) e.emplace_back(Vertex((v - 1) / branching), Vertex(v));
    return GraphFactory::make(
        n, e, "tree(b=" + std::to_string(branching) + ",h=" + std::to_string(height) + ")");
}

GraphPtr edge_list_graph(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges) {
    require_positive(n, "edge list graph");
    return GraphFactory::make(n, std::vector<std::pair<Vertex, Vertex>>(edges.begin(), edges.end()),
                              "edges(" + std::to_string(n) + ")");
}

GraphPtr graph_square(GraphPtr base) {
    if (!base) throw std::invalid_argument("graph square requires a base graph");
    std::vector<std::pair<Vertex, Vertex>> e;
    const auto n = base->vertex_count();
    for (std::size_t u = 0; u < n; ++u) {
        for (Vertex w : base->neighbors(Vertex(u))) {
            if (static_cast<Vertex>(u) < w) e.emplace_back(Vertex(u), w);
            for (Vertex z : base->neighbors(w)) {
                if (static_cast<Vertex>(u) < z) e.emplace_back(Vertex(u), z);
            }
        }
    }
    auto desc = "square(" + base->description() + ")";
    return GraphFactory::make(n, e, std::move(desc), std::move(base));
}

std::vector<int> bfs_distances(const Graph& g, std::span<const Vertex> sources) {
    std::vector<int> dist(g.vertex_count(), -1);
    std::deque<Vertex> queue;
    for (Vertex s : sources) {
        if (!g.valid(s)) throw std::invalid_argument("invalid vertex " + std::to_string(s));
        if (dist[std::size_t(s)] != 0) {
            dist[std::size_t(s)] = 0;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        Vertex u = queue.front();
        queue.pop_front();
        for (Vertex w : g.neighbors(u)) {
            if (dist[std::size_t(w)] < 0) {
                dist[std::size_t(w)] = dist[std::size_t(u)] + 1;
                queue.push_back(w);
            }
        }
    }
    return dist;
}

VertexSet ball(const Graph& g, Vertex v, int r) {
    if (!g.valid(v)) throw std::invalid_argument("invalid vertex " + std::to_string(v));
    if (r < 0) throw std::invalid_argument("ball radius must be nonnegative");
    // Bounded BFS so small balls in large graphs stay cheap.
    std::vector<Vertex> members{v};
    std::vector<Vertex> frontier{v};
    for (int d = 0; d < r && !frontier.empty(); ++d) {
        std::vector<Vertex> next;
        for (Vertex u : frontier) {
            for (Vertex w : g.neighbors(u)) {
                if (std::find(members.begin(), members.end(), w) == members.end() &&
                    std::find(next.begin(), next.end(), w) == next.end()) {
                    next.push_back(w);
                }
            }
        }
        members.insert(members.end(), next.begin(), next.end());
        frontier = std::move(next);
        if (members.size() > 4096) {
            // Large balls: fall back to a full BFS.
            const Vertex src[] = {v};
            auto dist = bfs_distances(g, src);
            std::vector<Vertex> out;
            for (std::size_t i = 0; i < dist.size(); ++i)
                if (dist[i] >= 0 && dist[i] <= r) out.push_back(Vertex(i));
            return VertexSet(std::move(out));
        }
    }
    return VertexSet(std::move(members));
}

VertexSet boundary(const Graph& g, const VertexSet& s, BoundaryMode mode) {
    for (Vertex v : s) {
        if (!g.valid(v)) throw std::invalid_argument("invalid vertex " + std::to_string(v));
    }
    std::vector<Vertex> out;
    if (mode == BoundaryMode::external) {
        for (Vertex v : s)
            for (Vertex w : g.neighbors(v))
                if (!s.contains(w)) out.push_back(w);
    } else {
        for (Vertex v : s) {
            const auto& nb = g.neighbors(v);
            if (std::any_of(nb.begin(), nb.end(), [&](Vertex w) { return !s.contains(w); }))
                out.push_back(v);
        }
    }
    return VertexSet(std::move(out));
}

std::optional<int> distance(const Graph& g, Vertex u, Vertex v) {
    if (!g.valid(u) || !g.valid(v)) throw std::invalid_argument("invalid vertex id");
    const Vertex src[] = {u};
    int d = bfs_distances(g, src)[std::size_t(v)];
    if (d < 0) return std::nullopt;
    return d;
}

std::optional<int> distance(const Graph& g, const VertexSet& a, const VertexSet& b) {
    if (a.empty() || b.empty()) return std::nullopt;
    auto dist = bfs_distances(g, a.members());
    std::optional<int> best;
    for (Vertex v : b) {
        int d = dist[std::size_t(v)];
        if (d >= 0 && (!best || d < *best)) best = d;
    }
    return best;
}

std::vector<Vertex> pack_centers(const Graph& g, int min_dist) {
    if (min_dist < 1) throw std::invalid_argument("pack_centers requires min_dist >= 1");
    const auto n = g.vertex_count();
    std::vector<char> removed(n, 0);
    std::vector<Vertex> centers;
    std::vector<int> seen(n, -1);
    for (std::size_t v = 0; v < n; ++v) {
        if (removed[v]) continue;
        centers.push_back(Vertex(v));
        // Remove everything within min_dist - 1 of the new center.
        std::vector<Vertex> frontier{Vertex(v)};
        removed[v] = 1;
        seen[v] = int(v);
        for (int d = 0; d < min_dist - 1 && !frontier.empty(); ++d) {
            std::vector<Vertex> next;
            for (Vertex u : frontier) {
                for (Vertex w : g.neighbors(u)) {
                    if (seen[std::size_t(w)] != int(v)) {
                        seen[std::size_t(w)] = int(v);
                        removed[std::size_t(w)] = 1;
                        next.push_back(w);
                    }
                }
            }
            frontier = std::move(next);
        }
    }
    return centers;
}

VertexSet all_vertices(const Graph& g) {
    std::vector<Vertex> ids(g.vertex_count());
    for (std::size_t i = 0; i < ids.size(); ++i) ids[i] = Vertex(i);
    return VertexSet(std::move(ids));
}

}  // namespace glauber
