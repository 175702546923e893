#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "regionet/partition.hpp"

namespace regionet {

// Rand criterion R in [0, 1]: fraction of node pairs on which the two
// partitions agree (together-together or apart-apart). Contingency-table
// implementation, O(n + k1*k2). Requires the same node count, n >= 2.
double rand_index(const Partition& p1, const Partition& p2);

// Fowlkes-Mallows F = a / sqrt((a+b)(a+c)) over co-clustered pairs. Throws
// std::invalid_argument when either partition has no co-clustered pair
// (all singletons): the denominator is zero and silence would mask bad input.
double fowlkes_mallows(const Partition& p1, const Partition& p2);

// Variation of information in bits: H(p1) + H(p2) - 2 I(p1; p2), in
// [0, log2 n]. Zero iff the partitions are identical up to relabeling.
double variation_of_information(const Partition& p1, const Partition& p2);

struct ReshuffleBaseline {
    double rand_mean = 0.0;
    double fm_mean = 0.0;       // NaN when every sample was degenerate
    std::size_t samples = 0;
    std::size_t fm_skipped = 0; // samples where F was undefined
};

// Mean R and F between `detected` and size-preserving random permutations of
// the reference label vector: the chance floor for the indices. Deterministic
// for a fixed seed; per-sample seeds are derived splitmix-style.
ReshuffleBaseline reshuffle_baseline(const Partition& detected, const Partition& reference,
                                     std::size_t samples, std::uint64_t seed);

// The full comparison row: R and F with their reshuffle baselines, VI with
// its log2(n) bound.
struct OverlapReport {
    double rand_baseline = 0.0;
    double rand = 0.0;
    double fm_baseline = 0.0;
    double fm = 0.0;
    double vi_bound = 0.0; // log2 n
    double vi = 0.0;
    std::size_t n = 0;
    std::size_t sample_count = 0;
    std::size_t fm_skipped = 0;
};

OverlapReport overlap_report(const Partition& detected, const Partition& reference,
                             std::size_t samples, std::uint64_t seed);

// CSV rendering in report column order; values at 6 significant digits.
std::string overlap_csv_header();
std::string overlap_csv_row(const OverlapReport& r);
// Multi-line human-readable block.
std::string overlap_text(const OverlapReport& r);

} // namespace regionet
