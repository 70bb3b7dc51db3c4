#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace glauber {

enum class ScalingFamily {
    /// Empty graph coins, closed form; tau counts discrete steps (n * t*).
    hypercube,
    /// Metropolis hard-core on K_n, activity 1/n.
    kn_hardcore,
    /// Embedding of the biased walk on a complete b-ary tree, uniform selector.
    embedding_tree,
    /// Same with weights (d-1)^{k/2} by height.
    nonuniform_tree,
};

std::string to_string(ScalingFamily f);
ScalingFamily scaling_family_from_string(const std::string& s);

struct ScalingStudy {
    ScalingFamily family = ScalingFamily::hypercube;
    /// Vertex counts (hypercube, K_n) or tree sizes; tree sizes must be complete.
    std::vector<std::size_t> sizes;
    double flip_prob = 0.5;
    std::size_t branching = 4;
    double up_prob = 2.0 / 3.0;
    /// Tree families: also measure from every vertex state when the base tree
    /// has at most this many vertices.
    std::size_t cross_check_limit = 512;
};

struct ScalingRow {
    std::string family;
    std::size_t n = 0;
    std::size_t delta = 0;
    std::string method;
    double tau = 0.0;
    double ref_nlogn = 0.0;
    double ref_nlogn_over_logdelta = 0.0;
    double ref_n = 0.0;
    /// Independent second measurement where one was made.
    std::optional<double> cross_check_tau;
    /// Non-empty when the instance failed; the other fields are then partial.
    std::string error;
};

std::vector<ScalingRow> scaling_study(const ScalingStudy& study);

/// Height of a complete b-ary tree with n vertices; throws if n is not such a size.
std::size_t tree_height_for_size(std::size_t branching, std::size_t n);

}  // namespace glauber
