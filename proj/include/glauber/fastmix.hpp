#pragma once

#include <Eigen/Sparse>
#include <cstddef>
#include <optional>
#include <vector>

#include "glauber/dynamics.hpp"
#include "glauber/exact.hpp"

namespace glauber {

/// Row-stochastic walk on the vertices of a base graph.
using WalkMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

struct BiasedTreeWalk {
    GraphPtr tree;
    WalkMatrix walk;
    std::size_t branching = 0;
    std::size_t height = 0;
};

/// Complete b-ary tree of height h (root 0, BFS order). up_prob to the parent,
/// (1 - up_prob)/b to each child; leftover mass at the root and leaves stays put.
BiasedTreeWalk biased_tree_walk(std::size_t branching, std::size_t height, double up_prob);

/// Stationary law of a reversible walk; throws std::invalid_argument naming the
/// first pair that violates detailed balance, or on non-stochastic rows, support
/// off the graph, or a disconnected walk.
std::vector<double> reversible_stationary(const Graph& g0, const WalkMatrix& a);

/// Discrete chain of the walk itself (states encode the vertex id in two spins).
ExactChain walk_chain(const WalkMatrix& a, const std::vector<double>& pi0);

enum class EmbeddingStateKind { vertex, edge, loop };

struct EmbeddingState {
    EmbeddingStateKind kind = EmbeddingStateKind::vertex;
    Vertex u = 0;
    /// Equal to u for vertex and loop states; u < w for edge states.
    Vertex w = 0;
};

/// Walk simulated by single-site dynamics with spins {0,1,2} on the square of
/// the base graph.
struct EmbeddingDynamics {
    GraphPtr base;
    GraphPtr square;
    WalkMatrix walk;
    std::vector<double> pi0;
    SystemPtr system;
    DynamicsPtr dynamics;
    /// Feasible configurations in lexicographic order and their labels.
    std::vector<Configuration> configurations;
    std::vector<EmbeddingState> labels;

    Configuration encode(const EmbeddingState& s) const;
    EmbeddingState decode(const Configuration& sigma) const;
    /// pi = (pi^V + pi^E)/2 for the given state.
    double target_weight(const EmbeddingState& s) const;
};

/// Builds system, kernel and dynamics. The selector defaults to uniform.
EmbeddingDynamics build_embedding_dynamics(GraphPtr g0, WalkMatrix a,
                                           std::optional<SiteSelector> selector = {});

struct EmbeddingAudit {
    /// Sum of spins stays in {1, 2} under every kernel row.
    bool sum_preserved = false;
    bool bijection_ok = false;
    std::size_t expected_states = 0;
    /// max over states |Pr(success) - 1/n|.
    double max_success_error = 0.0;
    /// max |chain pi - (pi^V + pi^E)/2|.
    double max_stationary_error = 0.0;
    /// max |J^2 restricted to vertex states - (I + A)/2|, J the jump chain.
    double max_skeleton_error = 0.0;
};

EmbeddingAudit audit_embedding(const EmbeddingDynamics& emb, const ExactChain& chain);

/// Metropolis dynamics for the hard-core model on K_n with activity 1/n.
DynamicsPtr kn_hardcore_dynamics(std::size_t n);

/// Discrete mixing time of the K_n chain through its exact 3-state lumping
/// {empty, starting singleton, other singletons}; worst of the two start types.
MixingResult kn_hardcore_lumped_mixing(std::size_t n);

/// Complete tree selector with weight (d-1)^{k/2} at height k (leaves k = 0).
SiteSelector nonuniform_tree_selector(const Graph& tree);
/// c = (1 - (d-1)^{-1/2}) / (1 - (d-1)^{-(h+1)/2}).
double nonuniform_selector_constant(std::size_t d, std::size_t h);

/// Heights (distance to the deepest level) of a complete tree rooted at 0;
/// throws for non-trees or incomplete trees.
std::vector<std::size_t> tree_heights(const Graph& tree);

}  // namespace glauber
