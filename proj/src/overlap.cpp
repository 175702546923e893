#include "regionet/overlap.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <stdexcept>

#include "regionet/rng.hpp"

namespace regionet {

namespace {

struct PairCounts {
    // Over all unordered node pairs:
    std::uint64_t same_both = 0;   // a: together in both partitions
    std::uint64_t same_p1 = 0;     // a + b: together in the first
    std::uint64_t same_p2 = 0;     // a + c: together in the second
    std::uint64_t total_pairs = 0; // C(n, 2)
};

std::uint64_t choose2(std::uint64_t x) { return x * (x - 1) / 2; }

// Cells of the contingency table in (label1, label2) order plus margins.
struct Contingency {
    std::vector<std::uint64_t> rows, cols;
    std::vector<std::pair<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t>> cells;
    std::size_t n = 0;
};

Contingency contingency(const std::vector<std::uint32_t>& l1,
                        const std::vector<std::uint32_t>& l2, std::uint32_t k1,
                        std::uint32_t k2) {
    Contingency t;
    t.n = l1.size();
    t.rows.assign(k1, 0);
    t.cols.assign(k2, 0);
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint64_t> cells;
    for (std::size_t v = 0; v < l1.size(); ++v) {
        ++t.rows[l1[v]];
        ++t.cols[l2[v]];
        ++cells[{l1[v], l2[v]}];
    }
    t.cells.assign(cells.begin(), cells.end());
    return t;
}

PairCounts pair_counts(const Contingency& t) {
    PairCounts pc;
    pc.total_pairs = choose2(t.n);
    for (std::uint64_t r : t.rows) pc.same_p1 += choose2(r);
    for (std::uint64_t c : t.cols) pc.same_p2 += choose2(c);
    for (const auto& [cell, count] : t.cells) pc.same_both += choose2(count);
    return pc;
}

void check_same_universe(const Partition& p1, const Partition& p2) {
    if (p1.n() != p2.n())
        throw std::invalid_argument("partition comparison: node sets differ in size");
    if (p1.n() == 0) throw std::invalid_argument("partition comparison: empty partitions");
}

Contingency make_table(const Partition& p1, const Partition& p2) {
    const Partition c1 = p1.canonicalized();
    const Partition c2 = p2.canonicalized();
    return contingency(c1.labels(), c2.labels(), c1.community_count(), c2.community_count());
}

double rand_from_counts(const PairCounts& pc) {
    const std::uint64_t disagree = (pc.same_p1 - pc.same_both) + (pc.same_p2 - pc.same_both);
    const std::uint64_t agree = pc.total_pairs - disagree;
    return static_cast<double>(agree) / static_cast<double>(pc.total_pairs);
}

double fm_from_counts(const PairCounts& pc) {
    if (pc.same_p1 == 0 || pc.same_p2 == 0)
        throw std::invalid_argument(
            "Fowlkes-Mallows undefined: a partition has no co-clustered pair");
    return static_cast<double>(pc.same_both) /
           std::sqrt(static_cast<double>(pc.same_p1) * static_cast<double>(pc.same_p2));
}

// VI = sum_u (r_u/n) log2 r_u + sum_v (c_v/n) log2 c_v - 2 sum_uv (n_uv/n) log2 n_uv.
// Grouped, pre-divided terms keep the boundary cases exact: identical
// partitions accumulate three bitwise-equal sums (VI = 0), and singletons
// against one block leave the single term (n/n) * log2 n = log2 n.
double vi_from_table(const Contingency& t) {
    const double n = static_cast<double>(t.n);
    auto term = [n](std::uint64_t count) {
        return count == 0 ? 0.0
                          : (static_cast<double>(count) / n) *
                                std::log2(static_cast<double>(count));
    };
    double rows = 0.0, cols = 0.0, joint = 0.0;
    for (std::uint64_t r : t.rows) rows += term(r);
    for (std::uint64_t c : t.cols) cols += term(c);
    for (const auto& [cell, count] : t.cells) joint += term(count);
    return std::max(0.0, rows + cols - 2.0 * joint);
}

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

} // namespace

double rand_index(const Partition& p1, const Partition& p2) {
    check_same_universe(p1, p2);
    if (p1.n() < 2) throw std::invalid_argument("rand_index: need at least 2 nodes");
    return rand_from_counts(pair_counts(make_table(p1, p2)));
}

double fowlkes_mallows(const Partition& p1, const Partition& p2) {
    check_same_universe(p1, p2);
    if (p1.n() < 2) throw std::invalid_argument("fowlkes_mallows: need at least 2 nodes");
    return fm_from_counts(pair_counts(make_table(p1, p2)));
}

double variation_of_information(const Partition& p1, const Partition& p2) {
    check_same_universe(p1, p2);
    return vi_from_table(make_table(p1, p2));
}

ReshuffleBaseline reshuffle_baseline(const Partition& detected, const Partition& reference,
                                     std::size_t samples, std::uint64_t seed) {
    check_same_universe(detected, reference);
    if (samples < 1) throw std::invalid_argument("reshuffle_baseline: samples must be >= 1");

    const Partition det = detected.canonicalized();
    const Partition ref = reference.canonicalized();
    const std::size_t n = det.n();

    ReshuffleBaseline out;
    out.samples = samples;
    double rand_sum = 0.0, fm_sum = 0.0;
    std::vector<std::uint32_t> shuffled;
    for (std::size_t s = 0; s < samples; ++s) {
        shuffled = ref.labels();
        SplitMix64 rng(derive_seed(seed, s));
        // Fisher-Yates over the reference label vector: group sizes survive.
        for (std::size_t i = n - 1; i > 0; --i) {
            const std::size_t j = rng.next_below(i + 1);
            std::swap(shuffled[i], shuffled[j]);
        }
        const auto table = contingency(det.labels(), shuffled, det.community_count(),
                                       ref.community_count());
        const PairCounts pc = pair_counts(table);
        rand_sum += rand_from_counts(pc);
        if (pc.same_p1 == 0 || pc.same_p2 == 0) ++out.fm_skipped;
        else fm_sum += fm_from_counts(pc);
    }
    out.rand_mean = rand_sum / static_cast<double>(samples);
    const std::size_t fm_valid = samples - out.fm_skipped;
    out.fm_mean = fm_valid == 0 ? std::numeric_limits<double>::quiet_NaN()
                                : fm_sum / static_cast<double>(fm_valid);
    return out;
}

OverlapReport overlap_report(const Partition& detected, const Partition& reference,
                             std::size_t samples, std::uint64_t seed) {
    OverlapReport r;
    r.n = detected.n();
    r.rand = rand_index(detected, reference);
    r.fm = fowlkes_mallows(detected, reference);
    r.vi = variation_of_information(detected, reference);
    r.vi_bound = std::log2(static_cast<double>(detected.n()));
    const ReshuffleBaseline base = reshuffle_baseline(detected, reference, samples, seed);
    r.rand_baseline = base.rand_mean;
    r.fm_baseline = base.fm_mean;
    r.sample_count = base.samples;
    r.fm_skipped = base.fm_skipped;
    return r;
}

std::string overlap_csv_header() { return "rand_baseline,rand,fm_baseline,fm,log2_n,vi"; }

std::string overlap_csv_row(const OverlapReport& r) {
    return fmt6(r.rand_baseline) + "," + fmt6(r.rand) + "," + fmt6(r.fm_baseline) + "," +
           fmt6(r.fm) + "," + fmt6(r.vi_bound) + "," + fmt6(r.vi);
}

std::string overlap_text(const OverlapReport& r) {
    std::string s;
    s += "nodes:                 " + std::to_string(r.n) + "\n";
    s += "Rand R:                " + fmt6(r.rand) + "  (reshuffle baseline " +
         fmt6(r.rand_baseline) + ")\n";
    s += "Fowlkes-Mallows F:     " + fmt6(r.fm) + "  (reshuffle baseline " + fmt6(r.fm_baseline) +
         ")\n";
    s += "Variation of info VI:  " + fmt6(r.vi) + " bits  (upper limit log2 n = " +
         fmt6(r.vi_bound) + ")\n";
    s += "reshuffle samples:     " + std::to_string(r.sample_count);
    if (r.fm_skipped > 0)
        s += "  (" + std::to_string(r.fm_skipped) + " skipped as degenerate for F)";
    s += "\n";
    return s;
}

} // namespace regionet
