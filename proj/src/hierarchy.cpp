#include "regionet/hierarchy.hpp"

#include <stdexcept>

#include "regionet/modularity.hpp"

namespace regionet {

std::size_t HierarchicalPartition::total_subcommunities() const {
    std::size_t total = 0;
    for (std::uint32_t c : sub_counts) total += c;
    return total;
}

Partition HierarchicalPartition::flatten() const {
    // Offset sublabels by the cumulative count of earlier communities so every
    // (l1, l2) cell gets its own flat label.
    std::vector<std::uint32_t> offset(sub_counts.size(), 0);
    std::uint32_t running = 0;
    for (std::size_t c = 0; c < sub_counts.size(); ++c) {
        offset[c] = running;
        running += sub_counts[c];
    }
    std::vector<std::uint32_t> flat(level1.n());
    for (NodeId v = 0; v < level1.n(); ++v) flat[v] = offset[level1.label(v)] + sublabel[v];
    Partition p(std::move(flat));
    p.canonicalize();
    return p;
}

HierarchicalPartition subpartition(const WeightedDigraph& g, const Partition& level1,
                                   const OptimizerConfig& cfg) {
    if (level1.n() != g.n())
        throw std::invalid_argument("subpartition: level-1 partition does not cover the graph");

    HierarchicalPartition h;
    h.level1 = level1.canonicalized();
    h.sublabel.assign(g.n(), 0);
    const auto comms = h.level1.communities();
    h.sub_q.assign(comms.size(), 0.0);
    h.sub_counts.assign(comms.size(), 1);

    // Per-community subproblems are independent; processing order is by
    // level-1 label, which fixes the assembled output.
    for (std::uint32_t c = 0; c < comms.size(); ++c) {
        const auto& members = comms[c];
        if (members.size() < 2) continue;
        const WeightedDigraph sub = induced_subgraph(g, members);
        if (!(sub.total_weight() > 0.0)) continue; // no internal weight: one cell
        try {
            Partition p = optimize(sub, cfg);
            for (NodeId local = 0; local < members.size(); ++local)
                h.sublabel[members[local]] = p.label(local);
            h.sub_counts[c] = p.community_count();
            h.sub_q[c] = p.q.value_or(0.0);
        } catch (const std::exception& e) {
            throw std::runtime_error("subpartition of community " + std::to_string(c) + ": " +
                                     e.what());
        }
    }
    return h;
}

} // namespace regionet
