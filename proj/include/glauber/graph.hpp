#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace glauber {

using Vertex = std::int32_t;

/// Sorted, duplicate-free set of vertex ids.
class VertexSet {
public:
    VertexSet() = default;
    VertexSet(std::initializer_list<Vertex> ids);
    explicit VertexSet(std::vector<Vertex> ids);

    bool contains(Vertex v) const;
    bool empty() const { return members_.empty(); }
    std::size_t size() const { return members_.size(); }

    const std::vector<Vertex>& members() const { return members_; }
    auto begin() const { return members_.begin(); }
    auto end() const { return members_.end(); }

    friend bool operator==(const VertexSet&, const VertexSet&) = default;

private:
    std::vector<Vertex> members_;
};

VertexSet set_union(const VertexSet& a, const VertexSet& b);
VertexSet set_difference(const VertexSet& a, const VertexSet& b);
bool is_subset(const VertexSet& a, const VertexSet& b);

/// Finite undirected simple graph on vertices 0..n-1. Immutable once built.
class Graph {
public:
    /// Builds from an edge list. Rejects self-loops and out-of-range ids;
    /// duplicate edges are merged.
    Graph(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges);

    std::size_t vertex_count() const { return adjacency_.size(); }
    std::size_t edge_count() const { return edge_count_; }
    std::size_t max_degree() const { return max_degree_; }
    std::size_t degree(Vertex v) const { return adjacency_[static_cast<std::size_t>(v)].size(); }

    const std::vector<Vertex>& neighbors(Vertex v) const {
        return adjacency_[static_cast<std::size_t>(v)];
    }
    bool adjacent(Vertex u, Vertex v) const;
    bool valid(Vertex v) const { return v >= 0 && static_cast<std::size_t>(v) < vertex_count(); }

    std::vector<std::pair<Vertex, Vertex>> edges() const;

    /// For graph squares: the graph whose distance-1/2 pairs form this one.
    const std::shared_ptr<const Graph>& base() const { return base_; }

    /// Human-readable family tag, e.g. "cycle(8)".
    const std::string& description() const { return description_; }

private:
    friend std::shared_ptr<const Graph> graph_square(std::shared_ptr<const Graph> base);
    friend class GraphFactory;

    std::vector<std::vector<Vertex>> adjacency_;
    std::size_t edge_count_ = 0;
    std::size_t max_degree_ = 0;
    std::shared_ptr<const Graph> base_;
    std::string description_;
};

using GraphPtr = std::shared_ptr<const Graph>;

// Families. All throw std::invalid_argument on bad parameters.
GraphPtr empty_graph(std::size_t n);
GraphPtr path_graph(std::size_t n);
GraphPtr cycle_graph(std::size_t n);
GraphPtr complete_graph(std::size_t n);
GraphPtr grid_graph(std::size_t rows, std::size_t cols);
/// Complete b-ary tree of the given height (height 0 is a single vertex).
/// Vertices are in BFS order: root 0, children of v are b*v+1 .. b*v+b.
GraphPtr tree_graph(std::size_t branching, std::size_t height);
GraphPtr edge_list_graph(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges);
/// All pairs at distance 1 or 2 in base; keeps a handle to base.
GraphPtr graph_square(GraphPtr base);

enum class BoundaryMode { external, internal };

/// Vertices within distance r of v.
VertexSet ball(const Graph& g, Vertex v, int r);
/// external: outside s and adjacent to s. internal: inside s and adjacent to V \ s.
VertexSet boundary(const Graph& g, const VertexSet& s, BoundaryMode mode);
/// Shortest-path length, or nullopt when the vertices lie in different components.
std::optional<int> distance(const Graph& g, Vertex u, Vertex v);
/// min over pairs; nullopt when no pair is connected or a set is empty.
std::optional<int> distance(const Graph& g, const VertexSet& a, const VertexSet& b);
/// BFS distances from a set of sources; -1 marks unreachable vertices.
std::vector<int> bfs_distances(const Graph& g, std::span<const Vertex> sources);

/// Greedy lowest-id-first packing: every returned pair is at distance >= min_dist
/// (or disconnected) and every other vertex is within min_dist-1 of a center.
std::vector<Vertex> pack_centers(const Graph& g, int min_dist);

VertexSet all_vertices(const Graph& g);

}  // namespace glauber
