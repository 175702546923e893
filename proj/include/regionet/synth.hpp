#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "regionet/combo.hpp"
#include "regionet/graph.hpp"
#include "regionet/partition.hpp"
#include "regionet/spatial.hpp"

namespace regionet {

// Gravity-model country with planted regions: region centers scattered in
// the unit square, nodes clustered around them, pair weight
// p_i * p_j / d^gamma boosted by beta inside a region. The desk-scale
// substitute for proprietary call-detail data.
struct SynthConfig {
    std::uint32_t region_count = 4;
    std::uint32_t nodes_per_region = 50;
    double gravity_exponent = 2.0;  // gamma > 0
    double intra_boost = 10.0;      // beta > 1
    double population_spread = 0.0; // lognormal sigma of node masses
    std::uint64_t seed = 0;
    // 0 = complete graph. Otherwise keep pair (i, j) only when one endpoint
    // is among the other's `neighbor_limit` nearest nodes; controls edge
    // count at country scale.
    std::uint32_t neighbor_limit = 0;
};

struct SynthCountry {
    WeightedDigraph graph;
    SpatialLayout layout; // planar (geographic = false)
    Partition planted;
    double planted_cross_fraction = 0.0; // share of W on cross-region arcs
};

// Deterministic per seed. The planted partition is contiguous under Gabriel
// adjacency by construction (geometry is resampled otherwise, up to a
// bounded number of attempts).
SynthCountry generate_country(const SynthConfig& cfg);

// Two-level planted structure for hierarchy tests: supers contain subs.
// Pair weight = base * super_boost (same super) * sub_boost (same sub),
// optionally distance-decayed and jittered.
struct NestedSynthConfig {
    std::uint32_t super_count = 2;
    std::uint32_t subs_per_super = 3;
    std::uint32_t nodes_per_sub = 20;
    double gravity_exponent = 0.0; // 0 = flat base weight
    double super_boost = 10.0;
    double sub_boost = 2.0;
    double weight_jitter = 0.05; // relative uniform jitter per pair
    std::uint64_t seed = 0;
};

struct NestedSynthCountry {
    WeightedDigraph graph;
    SpatialLayout layout;
    Partition planted_level1;
    Partition planted_level2; // one distinct label per sub-block
};

NestedSynthCountry generate_nested_country(const NestedSynthConfig& cfg);

// Multiplicative uniform noise: w' = w * (1 + eps * u), u ~ U(-1, 1) per
// directed arc; negatives clamp to zero. eps = 0 is the exact identity.
struct NoiseConfig {
    double epsilon = 0.0;
    std::uint64_t seed = 0;
};

struct PerturbStats {
    std::size_t arcs = 0;
    std::size_t clamped = 0; // arcs clamped to zero; nonzero clamping biases W upward
};

WeightedDigraph perturb(const WeightedDigraph& g, const NoiseConfig& noise,
                        PerturbStats* stats = nullptr);

// Mean and spread of rand_index between the noiseless partition of g and
// partitions of perturbed copies, per noise level.
struct StabilityPoint {
    double epsilon = 0.0;
    double mean_r = 0.0;
    double std_r = 0.0;
    std::size_t runs = 0;
};

std::vector<StabilityPoint> stability_curve(const WeightedDigraph& g,
                                            std::span<const double> epsilons, std::size_t runs,
                                            std::uint64_t seed, const OptimizerConfig& optimizer);

std::string stability_csv(std::span<const StabilityPoint> points); // epsilon,mean_R,std_R,runs

} // namespace regionet
