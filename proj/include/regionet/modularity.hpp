#pragma once

#include <span>

#include "regionet/graph.hpp"
#include "regionet/partition.hpp"

namespace regionet {

// Directed weighted modularity with self-loops:
//   Q = sum_c [ w_in(c)/W - (s_out(c)/W) * (s_in(c)/W) ]
// Equivalent to the dense double sum of q_ij over same-community pairs.
// Invariant under community relabeling and weight rescaling. Throws when
// the partition does not cover exactly g's nodes or W = 0.
double modularity(const WeightedDigraph& g, const Partition& p);

// Share of total weight on arcs joining different communities, in [0, 1].
double cross_weight_fraction(const WeightedDigraph& g, const Partition& p);

// Edge scores against the configuration null model:
//   q_ij = w_ij/W - s_out(i) * s_in(j) / W^2
// Sparse over arcs with w_ij > 0; the null-model term is available for any
// pair. The graph must outlive this view.
class EdgeScores {
public:
    explicit EdgeScores(const WeightedDigraph& g);

    double score(NodeId i, NodeId j) const {
        return g_->weight(i, j) / w_ - null_term(i, j);
    }
    double null_term(NodeId i, NodeId j) const {
        return g_->s_out(i) * g_->s_in(j) / (w_ * w_);
    }

    template <typename Fn>
    void for_each_scored(Fn&& fn) const {
        g_->for_each_arc([&](NodeId i, NodeId j, double w) {
            fn(i, j, w / w_ - null_term(i, j));
        });
    }

private:
    const WeightedDigraph* g_;
    double w_;
};

// Exact modularity change of moving `movers` (all in one community of p)
// to `target`, an existing label or kNewCommunity. Matches a full
// recomputation to 1e-12 at desk scale.
double gain(const WeightedDigraph& g, const Partition& p, std::span<const NodeId> movers,
            std::uint32_t target);

} // namespace regionet
