#pragma once

#include <cstdint>
#include <optional>

#include "regionet/graph.hpp"
#include "regionet/partition.hpp"

namespace regionet {

struct OptimizerConfig {
    // Hard cap on community count; unbounded when empty. The optimizer never
    // opens a new community once the cap is reached.
    std::optional<std::uint32_t> max_communities;
    double gain_tolerance = 1e-9; // minimal absolute Q improvement to accept a move
    std::uint64_t seed = 0;
    int kl_sweeps = 20; // refinement sweeps per subproblem
    int restarts = 1;   // independent runs, best Q kept
    int threads = 1;    // parallel subproblem evaluation; result independent of N
};

// Iterative modularity maximization starting from a single community, using
// three move kinds per step: splitting a community in two, merging two
// communities, and shifting part of one community into another. Each
// (source, destination) candidate is refined Kernighan-Lin style; the best
// move is accepted while it improves Q by more than gain_tolerance.
//
// Returns a canonicalized partition with the final Q attached. Deterministic
// for a fixed seed and config regardless of thread count.
Partition optimize(const WeightedDigraph& g, const OptimizerConfig& cfg = {});

// optimize constrained to at most two communities: the "breaking line" mode.
// Yields exactly two communities whenever the refinement finds a bisection
// with positive Q, otherwise one.
Partition bisect(const WeightedDigraph& g, OptimizerConfig cfg = {});

// Agglomerative best-merge-first baseline: from singletons, repeatedly merge
// the linked community pair with the highest non-negative gain. A quality
// floor for optimize, not a production path.
Partition greedy_baseline(const WeightedDigraph& g);

} // namespace regionet
