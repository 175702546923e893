#pragma once

#include <cstdint>
#include <vector>

#include "regionet/combo.hpp"
#include "regionet/graph.hpp"
#include "regionet/partition.hpp"

namespace regionet {

// Two-level nested labeling: level2 refines level1 by construction, and
// sublabels are dense 0..k_c-1 within each level-1 community.
struct HierarchicalPartition {
    Partition level1;                    // canonical
    std::vector<std::uint32_t> sublabel; // per node, dense within its level-1 community
    std::vector<double> sub_q;           // per level-1 community: Q of its subpartition
    std::vector<std::uint32_t> sub_counts; // per level-1 community: number of subcommunities

    std::size_t total_subcommunities() const;

    // Level-2 cells as a flat partition (one distinct label per (l1, l2) cell).
    Partition flatten() const;
};

// Re-runs the optimizer on the subnetwork induced by each level-1 community.
// Communities with a single node or zero internal weight get one
// subcommunity. Errors from a per-community run are annotated with the
// community label.
HierarchicalPartition subpartition(const WeightedDigraph& g, const Partition& level1,
                                   const OptimizerConfig& cfg = {});

} // namespace regionet
