#include "glauber/scaling.hpp"

#include <cmath>
#include <stdexcept>

#include "glauber/exact.hpp"
#include "glauber/fastmix.hpp"

namespace glauber {

std::string to_string(ScalingFamily f) {
    switch (f) {
    case ScalingFamily::hypercube: return "hypercube";
    case ScalingFamily::kn_hardcore: return "kn_hardcore";
    case ScalingFamily::embedding_tree: return "embedding_tree";
    case ScalingFamily::nonuniform_tree: return "nonuniform_tree";
    }
    return "unknown";
}

ScalingFamily scaling_family_from_string(const std::string& s) {
    for (auto f : {ScalingFamily::hypercube, ScalingFamily::kn_hardcore,
                   ScalingFamily::embedding_tree, ScalingFamily::nonuniform_tree})
        if (to_string(f) == s) return f;
    throw std::invalid_argument("unknown scaling family: " + s);
}

std::size_t tree_height_for_size(std::size_t branching, std::size_t n) {
    if (branching < 2) throw std::invalid_argument("tree branching must be >= 2");
    std::size_t total = 1, level = 1, h = 0;
    while (total < n) {
        level *= branching;
        total += level;
        ++h;
    }
    if (total != n || h == 0)
        throw std::invalid_argument(std::to_string(n) + " is not the size of a complete " +
                                    std::to_string(branching) + "-ary tree");
    return h;
}

namespace {

void measure_tree(const ScalingStudy& st, std::size_t n, ScalingRow& row, bool nonuniform) {
    const std::size_t h = tree_height_for_size(st.branching, n);
    BiasedTreeWalk w = biased_tree_walk(st.branching, h, st.up_prob);
    std::optional<SiteSelector> sel;
    if (nonuniform) sel = nonuniform_tree_selector(*w.tree);
    EmbeddingDynamics emb = build_embedding_dynamics(w.tree, w.walk, sel);
    row.delta = emb.square->max_degree();
    ExactChain chain = build_exact_chain(*emb.dynamics);
    if (nonuniform) {
        MixingResult m = mixing_time(chain, TimeKind::discrete);
        row.tau = m.tau;
        row.method = m.method;
        return;
    }
    const std::size_t leaf = *chain.index_of(emb.encode({EmbeddingStateKind::vertex, Vertex(n - 1), Vertex(n - 1)}));
    std::vector<std::size_t> cand{leaf};
    MixingResult m = mixing_time(chain, TimeKind::discrete, cand);
    row.tau = m.tau;
    row.method = "exact-candidate-start";
    if (n <= st.cross_check_limit) {
        std::vector<std::size_t> all;
        for (std::size_t i = 0; i < emb.labels.size(); ++i)
            if (emb.labels[i].kind == EmbeddingStateKind::vertex) all.push_back(i);
        row.cross_check_tau = mixing_time(chain, TimeKind::discrete, all).tau;
    }
}

}  // namespace

std::vector<ScalingRow> scaling_study(const ScalingStudy& st) {
    std::vector<ScalingRow> rows;
    for (std::size_t n : st.sizes) {
        ScalingRow row;
        row.family = to_string(st.family);
        row.n = n;
        row.ref_n = double(n);
        row.ref_nlogn = double(n) * std::log(double(n));
        try {
            switch (st.family) {
            case ScalingFamily::hypercube:
                row.delta = 0;
                row.tau = double(n) * hypercube_crossing_time(n, st.flip_prob);
                row.method = "closed-form";
                break;
            case ScalingFamily::kn_hardcore: {
                row.delta = n - 1;
                MixingResult lumped = kn_hardcore_lumped_mixing(n);
                row.tau = lumped.tau;
                row.method = lumped.method;
                if (n <= 200) {
                    ExactChain chain = build_exact_chain(*kn_hardcore_dynamics(n));
                    row.cross_check_tau = mixing_time(chain, TimeKind::discrete).tau;
                }
                break;
            }
            case ScalingFamily::embedding_tree: measure_tree(st, n, row, false); break;
            case ScalingFamily::nonuniform_tree: measure_tree(st, n, row, true); break;
            }
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        if (row.delta >= 2) row.ref_nlogn_over_logdelta = row.ref_nlogn / std::log(double(row.delta));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace glauber
