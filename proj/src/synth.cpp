#include "regionet/synth.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "regionet/io.hpp"
#include "regionet/overlap.hpp"
#include "regionet/modularity.hpp"
#include "regionet/rng.hpp"

namespace regionet {

namespace {

std::string padded_id(std::size_t index, std::size_t n) {
    std::size_t width = 1;
    for (std::size_t v = n > 0 ? n - 1 : 0; v >= 10; v /= 10) ++width;
    std::string digits = std::to_string(index);
    return "n" + std::string(width - digits.size(), '0') + digits;
}

// Region centers in the unit square with a minimum mutual separation; the
// separation shrinks with sqrt(k) so k regions always fit.
std::vector<Point2> scatter_centers(std::uint32_t k, SplitMix64& rng) {
    const double min_dist = 0.5 / std::sqrt(static_cast<double>(k));
    std::vector<Point2> centers;
    for (std::uint32_t r = 0; r < k; ++r) {
        bool placed = false;
        for (int attempt = 0; attempt < 2000 && !placed; ++attempt) {
            const Point2 c = {0.15 + 0.7 * rng.next_double(), 0.15 + 0.7 * rng.next_double()};
            placed = true;
            for (const Point2& o : centers) {
                const double dx = c[0] - o[0], dy = c[1] - o[1];
                if (dx * dx + dy * dy < min_dist * min_dist) {
                    placed = false;
                    break;
                }
            }
            if (placed) centers.push_back(c);
        }
        if (!placed) return {};
    }
    return centers;
}

bool planted_is_contiguous(const SpatialLayout& layout, const Partition& planted) {
    const AdjacencyGraph adj = build_adjacency(layout, AdjacencyMethod::Gabriel);
    const CohesionReport rep = cohesion_report(planted, adj);
    return rep.non_cohesive == 0;
}

std::vector<NodeRecord> make_records(const std::vector<Point2>& pos,
                                     const std::vector<std::uint32_t>& region) {
    std::vector<NodeRecord> records(pos.size());
    for (std::size_t i = 0; i < pos.size(); ++i) {
        records[i].id = padded_id(i, pos.size());
        records[i].longitude = pos[i][0];
        records[i].latitude = pos[i][1];
        records[i].region_labels.push_back({1, "r" + std::to_string(region[i])});
    }
    return records;
}

// Keep pair (i, j) when either endpoint ranks among the other's `limit`
// nearest nodes; 0 keeps everything.
std::vector<char> knn_pair_mask(const std::vector<Point2>& pos, std::uint32_t limit) {
    const std::size_t n = pos.size();
    std::vector<char> keep(n * n, limit == 0 ? 1 : 0);
    if (limit == 0) return keep;
    std::vector<std::pair<double, std::uint32_t>> dist(n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
            dist[j] = {dx * dx + dy * dy, static_cast<std::uint32_t>(j)};
        }
        dist[i].first = std::numeric_limits<double>::infinity();
        const std::size_t m = std::min<std::size_t>(limit, n - 1);
        std::partial_sort(dist.begin(), dist.begin() + static_cast<std::ptrdiff_t>(m),
                          dist.end());
        for (std::size_t e = 0; e < m; ++e) {
            keep[i * n + dist[e].second] = 1;
            keep[dist[e].second * n + i] = 1;
        }
    }
    return keep;
}

} // namespace

SynthCountry generate_country(const SynthConfig& cfg) {
    if (cfg.region_count < 1) throw std::invalid_argument("synth: region_count must be >= 1");
    if (cfg.nodes_per_region < 1)
        throw std::invalid_argument("synth: nodes_per_region must be >= 1");
    if (!(cfg.gravity_exponent > 0.0))
        throw std::invalid_argument("synth: gravity_exponent must be > 0");
    if (!(cfg.intra_boost > 1.0)) throw std::invalid_argument("synth: intra_boost must be > 1");
    if (cfg.population_spread < 0.0)
        throw std::invalid_argument("synth: population_spread must be >= 0");

    const std::size_t n =
        static_cast<std::size_t>(cfg.region_count) * static_cast<std::size_t>(cfg.nodes_per_region);
    const double sigma = 0.10 / std::sqrt(static_cast<double>(cfg.region_count));

    constexpr int kMaxAttempts = 50;
    for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
        SplitMix64 rng(derive_seed(cfg.seed, 1, static_cast<std::uint64_t>(attempt)));
        const std::vector<Point2> centers = scatter_centers(cfg.region_count, rng);
        if (centers.empty()) continue;

        // A hard minimum spacing between nodes keeps the gravity kernel
        // 1/d^gamma from blowing up on near-coincident pairs; without it a
        // single ultra-close dyad can outweigh the planted structure. Half
        // the typical nearest-neighbor distance keeps dense regions packable.
        const double min_spacing = sigma / std::sqrt(static_cast<double>(cfg.nodes_per_region));
        std::vector<Point2> pos(n);
        std::vector<std::uint32_t> region(n);
        std::vector<double> mass(n, 1.0);
        bool placed_all = true;
        for (std::size_t i = 0; i < n && placed_all; ++i) {
            region[i] = static_cast<std::uint32_t>(i / cfg.nodes_per_region);
            bool ok = false;
            for (int tries = 0; tries < 200 && !ok; ++tries) {
                pos[i] = {centers[region[i]][0] + sigma * rng.next_normal(),
                          centers[region[i]][1] + sigma * rng.next_normal()};
                ok = true;
                for (std::size_t j = 0; j < i; ++j) {
                    const double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
                    if (dx * dx + dy * dy < min_spacing * min_spacing) {
                        ok = false;
                        break;
                    }
                }
            }
            placed_all = ok;
            if (cfg.population_spread > 0.0)
                mass[i] = std::exp(cfg.population_spread * rng.next_normal());
        }
        if (!placed_all) continue;

        SynthCountry country;
        country.layout.geographic = false;
        country.layout.ids.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            country.layout.ids.push_back(padded_id(i, n));
            country.layout.x.push_back(pos[i][0]);
            country.layout.y.push_back(pos[i][1]);
        }
        country.planted = Partition(std::vector<std::uint32_t>(region));

        if (cfg.region_count > 1 && !planted_is_contiguous(country.layout, country.planted))
            continue;

        // The kernel saturates below a quarter of the cluster scale: a pair
        // closer than that interacts as if at the floor distance, which keeps
        // single dyads from rivaling whole-region aggregates.
        const double distance_floor = 0.25 * sigma;
        const std::vector<char> keep = knn_pair_mask(pos, cfg.neighbor_limit);
        std::vector<Arc> arcs;
        arcs.reserve(2 * n * 8 + n);
        for (std::uint32_t i = 0; i < n; ++i) {
            arcs.push_back({i, i, mass[i] * mass[i]});
            for (std::uint32_t j = i + 1; j < n; ++j) {
                if (!keep[static_cast<std::size_t>(i) * n + j]) continue;
                const double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
                const double d = std::max(std::sqrt(dx * dx + dy * dy), distance_floor);
                double w = mass[i] * mass[j] / std::pow(d, cfg.gravity_exponent);
                if (region[i] == region[j]) w *= cfg.intra_boost;
                arcs.push_back({i, j, w});
                arcs.push_back({j, i, w});
            }
        }
        country.graph = WeightedDigraph::from_arcs(make_records(pos, region), std::move(arcs));
        country.planted_cross_fraction = cross_weight_fraction(country.graph, country.planted);
        return country;
    }
    throw std::runtime_error("synth: no contiguous planted geometry found after " +
                             std::to_string(kMaxAttempts) + " attempts");
}

NestedSynthCountry generate_nested_country(const NestedSynthConfig& cfg) {
    if (cfg.super_count < 1 || cfg.subs_per_super < 1 || cfg.nodes_per_sub < 1)
        throw std::invalid_argument("nested synth: counts must be >= 1");
    if (cfg.gravity_exponent < 0.0)
        throw std::invalid_argument("nested synth: gravity_exponent must be >= 0");
    if (!(cfg.super_boost > 1.0) || !(cfg.sub_boost > 1.0))
        throw std::invalid_argument("nested synth: boosts must be > 1");

    const std::size_t subs_total =
        static_cast<std::size_t>(cfg.super_count) * cfg.subs_per_super;
    const std::size_t n = subs_total * cfg.nodes_per_sub;

    SplitMix64 rng(derive_seed(cfg.seed, 2));
    std::vector<Point2> super_centers = scatter_centers(cfg.super_count, rng);
    if (super_centers.empty())
        throw std::runtime_error("nested synth: could not scatter super centers");

    const double sub_radius = 0.12 / std::sqrt(static_cast<double>(cfg.super_count));
    const double sigma = 0.3 * sub_radius;
    std::vector<Point2> pos(n);
    std::vector<std::uint32_t> super_of(n), sub_of(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::uint32_t sub = static_cast<std::uint32_t>(i / cfg.nodes_per_sub);
        const std::uint32_t sup = sub / cfg.subs_per_super;
        super_of[i] = sup;
        sub_of[i] = sub;
        // Sub centers sit on a small circle around their super center.
        const double angle = 6.283185307179586 * (sub % cfg.subs_per_super) /
                             static_cast<double>(cfg.subs_per_super);
        const Point2 sub_center = {super_centers[sup][0] + sub_radius * std::cos(angle),
                                   super_centers[sup][1] + sub_radius * std::sin(angle)};
        pos[i] = {sub_center[0] + sigma * rng.next_normal(),
                  sub_center[1] + sigma * rng.next_normal()};
    }

    std::vector<Arc> arcs;
    arcs.reserve(n * n);
    for (std::uint32_t i = 0; i < n; ++i) {
        arcs.push_back({i, i, 1.0});
        for (std::uint32_t j = i + 1; j < n; ++j) {
            double w = 1.0;
            if (cfg.gravity_exponent > 0.0) {
                const double dx = pos[i][0] - pos[j][0], dy = pos[i][1] - pos[j][1];
                w /= std::pow(std::sqrt(dx * dx + dy * dy), cfg.gravity_exponent);
            }
            if (super_of[i] == super_of[j]) {
                w *= cfg.super_boost;
                if (sub_of[i] == sub_of[j]) w *= cfg.sub_boost;
            }
            if (cfg.weight_jitter > 0.0) w *= 1.0 + cfg.weight_jitter * rng.next_signed();
            arcs.push_back({i, j, w});
            arcs.push_back({j, i, w});
        }
    }

    NestedSynthCountry country;
    std::vector<NodeRecord> records = make_records(pos, super_of);
    for (std::size_t i = 0; i < n; ++i)
        records[i].region_labels.push_back({2, "s" + std::to_string(sub_of[i])});
    country.graph = WeightedDigraph::from_arcs(std::move(records), std::move(arcs));
    country.layout.geographic = false;
    for (std::size_t i = 0; i < n; ++i) {
        country.layout.ids.push_back(padded_id(i, n));
        country.layout.x.push_back(pos[i][0]);
        country.layout.y.push_back(pos[i][1]);
    }
    country.planted_level1 = Partition(std::move(super_of));
    country.planted_level2 = Partition(std::move(sub_of));
    return country;
}

WeightedDigraph perturb(const WeightedDigraph& g, const NoiseConfig& noise,
                        PerturbStats* stats) {
    if (noise.epsilon < 0.0) throw std::invalid_argument("perturb: epsilon must be >= 0");
    if (stats) *stats = PerturbStats{.arcs = g.arc_count(), .clamped = 0};
    if (noise.epsilon == 0.0) return g; // exact identity

    SplitMix64 rng(derive_seed(noise.seed, 3));
    std::vector<Arc> arcs;
    arcs.reserve(g.arc_count());
    g.for_each_arc([&](NodeId u, NodeId v, double w) {
        double scaled = w * (1.0 + noise.epsilon * rng.next_signed());
        if (scaled < 0.0) {
            scaled = 0.0;
            if (stats) ++stats->clamped;
        }
        arcs.push_back({u, v, scaled});
    });
    return WeightedDigraph::from_arcs(g.nodes(), std::move(arcs));
}

std::vector<StabilityPoint> stability_curve(const WeightedDigraph& g,
                                            std::span<const double> epsilons, std::size_t runs,
                                            std::uint64_t seed,
                                            const OptimizerConfig& optimizer) {
    if (runs < 1) throw std::invalid_argument("stability_curve: runs must be >= 1");
    const Partition base = optimize(g, optimizer);

    std::vector<StabilityPoint> points;
    points.reserve(epsilons.size());
    for (std::size_t e = 0; e < epsilons.size(); ++e) {
        StabilityPoint pt;
        pt.epsilon = epsilons[e];
        pt.runs = runs;
        std::vector<double> values(runs);
        for (std::size_t r = 0; r < runs; ++r) {
            const NoiseConfig noise{epsilons[e], derive_seed(seed, e, r)};
            const WeightedDigraph noisy = perturb(g, noise);
            const Partition part = optimize(noisy, optimizer);
            values[r] = rand_index(base, part);
        }
        double mean = 0.0;
        for (double v : values) mean += v;
        mean /= static_cast<double>(runs);
        double var = 0.0;
        for (double v : values) var += (v - mean) * (v - mean);
        pt.mean_r = mean;
        pt.std_r = std::sqrt(var / static_cast<double>(runs));
        points.push_back(pt);
    }
    return points;
}

std::string stability_csv(std::span<const StabilityPoint> points) {
    std::string out = "epsilon,mean_R,std_R,runs\n";
    for (const StabilityPoint& pt : points) {
        out += format_double(pt.epsilon) + "," + format_double(pt.mean_r) + "," +
               format_double(pt.std_r) + "," + std::to_string(pt.runs) + "\n";
    }
    return out;
}

} // namespace regionet
