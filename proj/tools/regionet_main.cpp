// regionet: partition weighted directed interaction networks into regions by
// modularity optimization, compare them against reference regions, check
// geographic cohesion, and generate synthetic gravity-model countries.
//
// One job per invocation; stages compose through files. Every run writes a
// JSON manifest echoing its full configuration so outputs can be reproduced
// byte for byte.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "regionet/combo.hpp"
#include "regionet/errors.hpp"
#include "regionet/hierarchy.hpp"
#include "regionet/io.hpp"
#include "regionet/modularity.hpp"
#include "regionet/overlap.hpp"
#include "regionet/spatial.hpp"
#include "regionet/synth.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using nlohmann::ordered_json;
using namespace regionet;

std::string fmt6(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

int default_threads() {
    if (const char* env = std::getenv("REGIONET_THREADS")) {
        const int value = std::atoi(env);
        if (value >= 1) return value;
    }
    return 1;
}

// Collects the config echo and output list; written once per run.
class Manifest {
public:
    Manifest(std::string command, std::string manifest_path)
        : start_(std::chrono::steady_clock::now()), path_(std::move(manifest_path)) {
        json_["command"] = std::move(command);
        json_["version"] = kVersion;
        json_["inputs"] = ordered_json::object();
        json_["params"] = ordered_json::object();
        json_["outputs"] = ordered_json::array();
    }

    void input(const std::string& name, const std::string& path) {
        if (!path.empty()) json_["inputs"][name] = path;
    }
    template <typename T>
    void param(const std::string& name, const T& value) {
        json_["params"][name] = value;
    }
    void output(const std::string& path) {
        json_["outputs"].push_back(path);
        if (path_.empty()) path_ = path + ".manifest.json";
    }

    void write() {
        const auto elapsed = std::chrono::steady_clock::now() - start_;
        json_["duration_seconds"] =
            std::chrono::duration_cast<std::chrono::duration<double>>(elapsed).count();
        std::ofstream out(path_, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write manifest '" + path_ + "'");
        out << json_.dump(2) << "\n";
    }

private:
    ordered_json json_;
    std::chrono::steady_clock::time_point start_;
    std::string path_;
};

struct OptimizerFlags {
    std::uint64_t seed = 0;
    int restarts = 1;
    int kl_sweeps = 20;
    double gain_tolerance = 1e-9;
    int threads = default_threads();

    void attach(CLI::App* cmd) {
        cmd->add_option("--seed", seed, "random seed (default 0)");
        cmd->add_option("--restarts", restarts, "independent runs keeping the best Q")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--kl-sweeps", kl_sweeps, "max refinement sweeps per subproblem")
            ->check(CLI::PositiveNumber);
        cmd->add_option("--gain-tol", gain_tolerance, "minimal Q improvement per move");
        cmd->add_option("--threads", threads, "optimizer threads (output identical for any N)")
            ->check(CLI::PositiveNumber);
    }

    OptimizerConfig config(std::optional<std::uint32_t> max_communities = std::nullopt) const {
        OptimizerConfig cfg;
        cfg.max_communities = max_communities;
        cfg.seed = seed;
        cfg.restarts = restarts;
        cfg.kl_sweeps = kl_sweeps;
        cfg.gain_tolerance = gain_tolerance;
        cfg.threads = threads;
        return cfg;
    }

    void echo(Manifest& m) const {
        m.param("seed", seed);
        m.param("restarts", restarts);
        m.param("kl_sweeps", kl_sweeps);
        m.param("gain_tolerance", gain_tolerance);
        m.param("threads", threads);
    }
};

WeightedDigraph load_graph(const std::string& edges, const std::string& nodes,
                           bool normalize_shares) {
    WeightedDigraph g = nodes.empty() ? load_edge_list(edges)
                                      : load_edge_list(edges, load_nodes(nodes));
    if (normalize_shares) g = normalize_market_share(g);
    return g;
}

void warn_graph(const WeightedDigraph& g) {
    if (const std::size_t zeros = g.zero_activity_count(); zeros > 0)
        std::cerr << "note: " << zeros << " node(s) have zero activity\n";
    if (g.n() > 0 && !g.is_connected_ignoring_direction())
        std::cerr << "note: graph is disconnected; components never merge\n";
}

MultiPolygonGeom parse_multipolygon(const ordered_json& geometry) {
    const std::string type = geometry.at("type").get<std::string>();
    auto ring_from = [](const ordered_json& arr) {
        Ring ring;
        for (const auto& pt : arr) ring.push_back({pt.at(0).get<double>(), pt.at(1).get<double>()});
        return ring;
    };
    MultiPolygonGeom geom;
    if (type == "Polygon") {
        PolygonGeom poly;
        for (const auto& ring : geometry.at("coordinates")) poly.push_back(ring_from(ring));
        geom.push_back(std::move(poly));
    } else if (type == "MultiPolygon") {
        for (const auto& poly_json : geometry.at("coordinates")) {
            PolygonGeom poly;
            for (const auto& ring : poly_json) poly.push_back(ring_from(ring));
            geom.push_back(std::move(poly));
        }
    } else {
        throw FormatError("geometry file: unsupported geometry type '" + type + "'");
    }
    return geom;
}

void load_geometry(SpatialLayout& layout, const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    ordered_json doc;
    try {
        doc = ordered_json::parse(in);
    } catch (const std::exception& e) {
        throw FormatError("geometry file '" + path + "': " + e.what());
    }
    if (doc.value("type", "") != "FeatureCollection")
        throw FormatError("geometry file '" + path + "' is not a FeatureCollection");
    try {
        for (const auto& feature : doc.at("features")) {
            std::string key;
            if (feature.contains("properties") && feature["properties"].is_object()) {
                const auto& props = feature["properties"];
                if (props.contains("id")) key = props["id"].get<std::string>();
                else if (props.contains("node_id")) key = props["node_id"].get<std::string>();
            }
            if (key.empty() && feature.contains("id")) key = feature["id"].get<std::string>();
            if (key.empty())
                throw FormatError("geometry file '" + path +
                                  "': feature without an id/node_id property");
            layout.polygons[key] = parse_multipolygon(feature.at("geometry"));
        }
    } catch (const nlohmann::json::exception& e) {
        throw FormatError("geometry file '" + path + "': " + e.what());
    }
}

// --- subcommand drivers -----------------------------------------------------

struct CommonIo {
    std::string edges, nodes, out, manifest;
    bool normalize = false;
};

int run_partition(const CommonIo& io, const OptimizerFlags& flags,
                  std::optional<std::uint32_t> max_communities, bool is_bisect) {
    Manifest manifest(is_bisect ? "bisect" : "partition", io.manifest);
    manifest.input("edges", io.edges);
    manifest.input("nodes", io.nodes);
    manifest.param("normalize_market_share", io.normalize);
    if (max_communities) manifest.param("max_communities", *max_communities);
    flags.echo(manifest);

    const WeightedDigraph g = load_graph(io.edges, io.nodes, io.normalize);
    warn_graph(g);
    const Partition p = is_bisect ? bisect(g, flags.config(2))
                                  : optimize(g, flags.config(max_communities));
    write_partition(g, p, io.out);
    manifest.output(io.out);

    std::cout << "communities: " << p.community_count() << "\n";
    std::cout << "modularity: " << fmt6(p.q.value_or(0.0)) << "\n";
    if (is_bisect || (max_communities && p.community_count() > 1)) {
        std::cout << "cross weight fraction: " << fmt6(cross_weight_fraction(g, p)) << "\n";
    }
    if (is_bisect && p.community_count() == 2) {
        // Internal weight share of each side, so the balance of the split is visible.
        const auto& labels = p.labels();
        double internal[2] = {0.0, 0.0};
        g.for_each_arc([&](NodeId u, NodeId v, double w) {
            if (labels[u] == labels[v]) internal[labels[u]] += w;
        });
        std::cout << "internal weight shares: " << fmt6(internal[0] / g.total_weight()) << " / "
                  << fmt6(internal[1] / g.total_weight()) << "\n";
    }
    manifest.write();
    return 0;
}

int run_hierarchy(const CommonIo& io, const OptimizerFlags& flags, const std::string& level1) {
    Manifest manifest("hierarchy", io.manifest);
    manifest.input("edges", io.edges);
    manifest.input("nodes", io.nodes);
    manifest.input("level1", level1);
    manifest.param("normalize_market_share", io.normalize);
    flags.echo(manifest);

    const WeightedDigraph g = load_graph(io.edges, io.nodes, io.normalize);
    warn_graph(g);
    const Partition l1 =
        level1.empty() ? optimize(g, flags.config()) : load_partition_for(g, level1);
    const HierarchicalPartition h = subpartition(g, l1, flags.config());
    write_hierarchy(g, h, io.out);
    manifest.output(io.out);

    std::cout << "level-1 communities: " << h.level1.community_count() << "\n";
    std::cout << "level-2 subcommunities: " << h.total_subcommunities() << "\n";
    manifest.write();
    return 0;
}

int run_compare(const std::string& detected, const std::string& reference, std::size_t samples,
                std::uint64_t seed, const std::string& edges, const std::string& out,
                const std::string& manifest_path) {
    Manifest manifest("compare", manifest_path.empty() && out.empty() ? "compare.manifest.json"
                                                                      : manifest_path);
    manifest.input("detected", detected);
    manifest.input("reference", reference);
    manifest.input("edges", edges);
    manifest.param("samples", samples);
    manifest.param("seed", seed);

    const auto pairs_detected = load_partition_pairs(detected);
    const auto pairs_reference = load_partition_pairs(reference);
    const auto [p_detected, p_reference] = align_partitions(pairs_detected, pairs_reference);
    const OverlapReport report = overlap_report(p_detected, p_reference, samples, seed);

    std::string row = overlap_csv_row(report);
    std::string header = overlap_csv_header();
    header += ",modularity";
    row += ",";
    if (!edges.empty()) {
        const WeightedDigraph g = load_edge_list(edges);
        const Partition aligned = load_partition_for(g, detected);
        row += fmt6(modularity(g, aligned));
    }

    std::cout << overlap_text(report);
    std::cout << header << "\n" << row << "\n";
    if (!out.empty()) {
        std::ofstream f(out, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + out + "' for writing");
        f << header << "\n" << row << "\n";
        manifest.output(out);
    }
    manifest.write();
    return 0;
}

int run_cohesion(const std::string& nodes_path, const std::string& partition_path,
                 const std::string& adjacency, const std::string& geometry, bool planar,
                 const std::string& out, const std::string& manifest_path) {
    Manifest manifest("cohesion", manifest_path);
    manifest.input("nodes", nodes_path);
    manifest.input("partition", partition_path);
    manifest.input("geometry", geometry);
    manifest.param("adjacency", adjacency);
    manifest.param("planar", planar);

    const auto records = load_nodes(nodes_path);
    const AdjacencyMethod method = adjacency_method_from_string(adjacency);
    SpatialLayout layout;
    if (method == AdjacencyMethod::PolygonTouch) {
        layout.geographic = !planar;
        for (const NodeRecord& rec : records) {
            layout.ids.push_back(rec.id);
            layout.x.push_back(rec.longitude.value_or(0.0));
            layout.y.push_back(rec.latitude.value_or(0.0));
            layout.polygon_keys.push_back(rec.polygon_ref.value_or(""));
        }
    } else {
        layout = layout_from_records(records, !planar);
    }
    if (!geometry.empty()) load_geometry(layout, geometry);

    // Align the partition file with the node file order.
    const auto pairs = load_partition_pairs(partition_path);
    if (pairs.size() != records.size())
        throw FormatError("partition covers " + std::to_string(pairs.size()) +
                          " nodes, node file has " + std::to_string(records.size()));
    std::unordered_map<std::string, std::uint32_t> by_id;
    for (const auto& [id, label] : pairs) by_id.emplace(id, label);
    std::vector<std::uint32_t> labels(records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        const auto it = by_id.find(records[i].id);
        if (it == by_id.end())
            throw FormatError("partition is missing node '" + records[i].id + "'");
        labels[i] = it->second;
    }

    const AdjacencyGraph adj = build_adjacency(layout, method);
    const CohesionReport report = cohesion_report(Partition(std::move(labels)), adj);

    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + out + "' for writing");
    f << report.to_csv();
    f.close();
    manifest.output(out);

    std::cout << "communities: " << report.rows.size() << "\n";
    std::cout << "non-cohesive: " << report.non_cohesive << "\n";
    manifest.write();
    return 0;
}

int run_synth(const SynthConfig& cfg, const std::string& prefix,
              const std::string& manifest_path) {
    Manifest manifest("synth", manifest_path.empty() ? prefix + ".manifest.json"
                                                     : manifest_path);
    manifest.param("regions", cfg.region_count);
    manifest.param("nodes_per_region", cfg.nodes_per_region);
    manifest.param("gamma", cfg.gravity_exponent);
    manifest.param("beta", cfg.intra_boost);
    manifest.param("spread", cfg.population_spread);
    manifest.param("neighbor_limit", cfg.neighbor_limit);
    manifest.param("seed", cfg.seed);

    const SynthCountry country = generate_country(cfg);
    const std::string edges = prefix + ".edges.csv";
    const std::string nodes = prefix + ".nodes.csv";
    const std::string planted = prefix + ".planted.csv";
    write_edge_list(country.graph, edges);
    write_nodes(country.graph.nodes(), nodes);
    write_partition(country.graph, country.planted, planted);
    manifest.output(edges);
    manifest.output(nodes);
    manifest.output(planted);

    std::cout << "nodes: " << country.graph.n() << "\n";
    std::cout << "arcs: " << country.graph.arc_count() << "\n";
    std::cout << "planted cross fraction: " << fmt6(country.planted_cross_fraction) << "\n";
    manifest.write();
    return 0;
}

int run_perturb(const std::string& edges, double epsilon, std::uint64_t seed,
                const std::string& out, const std::string& manifest_path) {
    Manifest manifest("perturb", manifest_path);
    manifest.input("edges", edges);
    manifest.param("epsilon", epsilon);
    manifest.param("seed", seed);

    const WeightedDigraph g = load_edge_list(edges);
    PerturbStats stats;
    const WeightedDigraph noisy = perturb(g, NoiseConfig{epsilon, seed}, &stats);
    write_edge_list(noisy, out);
    manifest.output(out);

    std::cout << "arcs: " << stats.arcs << "\n";
    std::cout << "clamped to zero: " << stats.clamped << "\n";
    manifest.write();
    return 0;
}

int run_stability(const std::string& edges, const std::string& epsilons_text, std::size_t runs,
                  const OptimizerFlags& flags, const std::string& out,
                  const std::string& manifest_path) {
    Manifest manifest("stability", manifest_path);
    manifest.input("edges", edges);
    manifest.param("epsilons", epsilons_text);
    manifest.param("runs", runs);
    flags.echo(manifest);

    std::vector<double> epsilons;
    std::stringstream ss(epsilons_text);
    std::string token;
    while (std::getline(ss, token, ',')) {
        try {
            epsilons.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw FormatError("--epsilons: not a number: '" + token + "'");
        }
    }
    if (epsilons.empty()) throw FormatError("--epsilons: empty list");

    const WeightedDigraph g = load_edge_list(edges);
    const auto points = stability_curve(g, epsilons, runs, flags.seed, flags.config());
    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + out + "' for writing");
    f << stability_csv(points);
    f.close();
    manifest.output(out);

    for (const StabilityPoint& pt : points)
        std::cout << "epsilon " << fmt6(pt.epsilon) << ": mean R " << fmt6(pt.mean_r)
                  << " (std " << fmt6(pt.std_r) << ", " << pt.runs << " runs)\n";
    manifest.write();
    return 0;
}

int run_export_geojson(const std::string& nodes_path, const std::string& partition_path,
                       const std::string& hierarchy_path, const std::string& geometry,
                       const std::string& out, const std::string& manifest_path) {
    Manifest manifest("export-geojson", manifest_path);
    manifest.input("nodes", nodes_path);
    manifest.input("partition", partition_path);
    manifest.input("hierarchy", hierarchy_path);
    manifest.input("geometry", geometry);

    const auto records = load_nodes(nodes_path);
    SpatialLayout layout = layout_from_records(records);
    if (!geometry.empty()) load_geometry(layout, geometry);

    std::unordered_map<std::string, std::size_t> row_of;
    for (std::size_t i = 0; i < records.size(); ++i) row_of.emplace(records[i].id, i);

    std::ofstream f(out, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open '" + out + "' for writing");

    if (!hierarchy_path.empty()) {
        const auto rows = load_hierarchy_pairs(hierarchy_path);
        if (rows.size() != records.size())
            throw FormatError("hierarchy covers " + std::to_string(rows.size()) +
                              " nodes, node file has " + std::to_string(records.size()));
        HierarchicalPartition h;
        std::vector<std::uint32_t> l1(records.size());
        h.sublabel.assign(records.size(), 0);
        for (const HierarchyRow& row : rows) {
            const auto it = row_of.find(row.id);
            if (it == row_of.end())
                throw FormatError("hierarchy has unknown node '" + row.id + "'");
            l1[it->second] = row.l1;
            h.sublabel[it->second] = row.l2;
        }
        h.level1 = Partition(std::move(l1)).canonicalized();
        export_geojson(h, layout, f);
    } else {
        const auto pairs = load_partition_pairs(partition_path);
        if (pairs.size() != records.size())
            throw FormatError("partition covers " + std::to_string(pairs.size()) +
                              " nodes, node file has " + std::to_string(records.size()));
        std::vector<std::uint32_t> labels(records.size());
        for (const auto& [id, label] : pairs) {
            const auto it = row_of.find(id);
            if (it == row_of.end()) throw FormatError("partition has unknown node '" + id + "'");
            labels[it->second] = label;
        }
        export_geojson(Partition(std::move(labels)), layout, f);
    }
    f.close();
    manifest.output(out);
    manifest.write();
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"regionet: community detection toolkit for spatial interaction networks"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    // partition / bisect
    CommonIo part_io, bis_io, hier_io;
    OptimizerFlags part_flags, bis_flags, hier_flags, stab_flags;
    std::uint32_t max_communities = 0;

    CLI::App* partition_cmd = app.add_subcommand("partition", "unconstrained modularity partition");
    partition_cmd->add_option("--edges", part_io.edges, "edge-list CSV")->required();
    partition_cmd->add_option("--nodes", part_io.nodes, "node attribute CSV");
    partition_cmd->add_flag("--normalize-market-share", part_io.normalize,
                            "divide weights by both endpoints' market shares");
    partition_cmd->add_option("--out", part_io.out, "partition CSV to write")->required();
    partition_cmd->add_option("--max-communities", max_communities,
                              "cap on community count (0 = unbounded)");
    partition_cmd->add_option("--manifest", part_io.manifest, "manifest path");
    part_flags.attach(partition_cmd);

    CLI::App* bisect_cmd = app.add_subcommand("bisect", "breaking line: at most two communities");
    bisect_cmd->add_option("--edges", bis_io.edges, "edge-list CSV")->required();
    bisect_cmd->add_option("--nodes", bis_io.nodes, "node attribute CSV");
    bisect_cmd->add_flag("--normalize-market-share", bis_io.normalize,
                         "divide weights by both endpoints' market shares");
    bisect_cmd->add_option("--out", bis_io.out, "partition CSV to write")->required();
    bisect_cmd->add_option("--manifest", bis_io.manifest, "manifest path");
    bis_flags.attach(bisect_cmd);

    std::string hier_level1;
    CLI::App* hierarchy_cmd =
        app.add_subcommand("hierarchy", "second-level partition inside each community");
    hierarchy_cmd->add_option("--edges", hier_io.edges, "edge-list CSV")->required();
    hierarchy_cmd->add_option("--nodes", hier_io.nodes, "node attribute CSV");
    hierarchy_cmd->add_flag("--normalize-market-share", hier_io.normalize,
                            "divide weights by both endpoints' market shares");
    hierarchy_cmd->add_option("--level1", hier_level1,
                              "precomputed level-1 partition (computed when absent)");
    hierarchy_cmd->add_option("--out", hier_io.out, "hierarchy CSV to write")->required();
    hierarchy_cmd->add_option("--manifest", hier_io.manifest, "manifest path");
    hier_flags.attach(hierarchy_cmd);

    std::string cmp_detected, cmp_reference, cmp_edges, cmp_out, cmp_manifest;
    std::size_t cmp_samples = 1000;
    std::uint64_t cmp_seed = 0;
    CLI::App* compare_cmd =
        app.add_subcommand("compare", "overlap indices between two partitions");
    compare_cmd->add_option("--detected", cmp_detected, "detected partition CSV")->required();
    compare_cmd->add_option("--reference", cmp_reference, "reference partition CSV")->required();
    compare_cmd->add_option("--samples", cmp_samples, "reshuffle samples for the baselines");
    compare_cmd->add_option("--seed", cmp_seed, "reshuffle seed");
    compare_cmd->add_option("--edges", cmp_edges,
                            "edge-list CSV; adds the modularity column when given");
    compare_cmd->add_option("--out", cmp_out, "write the CSV row here as well");
    compare_cmd->add_option("--manifest", cmp_manifest, "manifest path");

    std::string coh_nodes, coh_partition, coh_adjacency = "gabriel", coh_geometry, coh_out,
                coh_manifest;
    bool coh_planar = false;
    CLI::App* cohesion_cmd =
        app.add_subcommand("cohesion", "connected components of communities in space");
    cohesion_cmd->add_option("--nodes", coh_nodes, "node attribute CSV")->required();
    cohesion_cmd->add_option("--partition", coh_partition, "partition CSV")->required();
    cohesion_cmd->add_option("--adjacency", coh_adjacency, "gabriel|delaunay|polygon");
    cohesion_cmd->add_option("--geometry", coh_geometry,
                             "GeoJSON FeatureCollection with per-node polygons");
    cohesion_cmd->add_flag("--planar", coh_planar,
                           "treat coordinates as planar (skip the cos-latitude scaling)");
    cohesion_cmd->add_option("--out", coh_out, "cohesion CSV to write")->required();
    cohesion_cmd->add_option("--manifest", coh_manifest, "manifest path");

    SynthConfig synth_cfg;
    std::string synth_prefix, synth_manifest;
    CLI::App* synth_cmd = app.add_subcommand("synth", "gravity-model synthetic country");
    synth_cmd->add_option("--regions", synth_cfg.region_count, "planted region count")
        ->required();
    synth_cmd->add_option("--nodes-per-region", synth_cfg.nodes_per_region, "nodes per region")
        ->required();
    synth_cmd->add_option("--gamma", synth_cfg.gravity_exponent, "gravity distance exponent");
    synth_cmd->add_option("--beta", synth_cfg.intra_boost, "within-region weight boost");
    synth_cmd->add_option("--spread", synth_cfg.population_spread,
                          "lognormal sigma of node masses");
    synth_cmd->add_option("--neighbor-limit", synth_cfg.neighbor_limit,
                          "keep only nearest-neighbor pairs (0 = complete)");
    synth_cmd->add_option("--seed", synth_cfg.seed, "generator seed");
    synth_cmd->add_option("--out-prefix", synth_prefix, "prefix for .edges/.nodes/.planted CSVs")
        ->required();
    synth_cmd->add_option("--manifest", synth_manifest, "manifest path");

    std::string pert_edges, pert_out, pert_manifest;
    double pert_epsilon = 0.0;
    std::uint64_t pert_seed = 0;
    CLI::App* perturb_cmd = app.add_subcommand("perturb", "multiplicative uniform noise");
    perturb_cmd->add_option("--edges", pert_edges, "edge-list CSV")->required();
    perturb_cmd->add_option("--epsilon", pert_epsilon, "relative noise amplitude")->required();
    perturb_cmd->add_option("--seed", pert_seed, "noise seed");
    perturb_cmd->add_option("--out", pert_out, "edge-list CSV to write")->required();
    perturb_cmd->add_option("--manifest", pert_manifest, "manifest path");

    std::string stab_edges, stab_epsilons, stab_out, stab_manifest;
    std::size_t stab_runs = 20;
    CLI::App* stability_cmd =
        app.add_subcommand("stability", "partition stability under noise levels");
    stability_cmd->add_option("--edges", stab_edges, "edge-list CSV")->required();
    stability_cmd->add_option("--epsilons", stab_epsilons, "comma-separated noise levels")
        ->required();
    stability_cmd->add_option("--runs", stab_runs, "perturbed runs per level");
    stability_cmd->add_option("--out", stab_out, "stability CSV to write")->required();
    stability_cmd->add_option("--manifest", stab_manifest, "manifest path");
    stab_flags.attach(stability_cmd);

    std::string geo_nodes, geo_partition, geo_hierarchy, geo_geometry, geo_out, geo_manifest;
    CLI::App* geojson_cmd = app.add_subcommand("export-geojson", "GeoJSON FeatureCollection");
    geojson_cmd->add_option("--nodes", geo_nodes, "node attribute CSV")->required();
    geojson_cmd->add_option("--partition", geo_partition, "partition CSV");
    geojson_cmd->add_option("--hierarchy", geo_hierarchy, "hierarchy CSV");
    geojson_cmd->add_option("--geometry", geo_geometry,
                            "GeoJSON FeatureCollection with per-node polygons to pass through");
    geojson_cmd->add_option("--out", geo_out, "GeoJSON file to write")->required();
    geojson_cmd->add_option("--manifest", geo_manifest, "manifest path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);
        app.exit(e);
        return 2;
    }

    try {
        if (partition_cmd->parsed()) {
            std::optional<std::uint32_t> cap;
            if (max_communities > 0) cap = max_communities;
            return run_partition(part_io, part_flags, cap, false);
        }
        if (bisect_cmd->parsed()) return run_partition(bis_io, bis_flags, 2, true);
        if (hierarchy_cmd->parsed()) return run_hierarchy(hier_io, hier_flags, hier_level1);
        if (compare_cmd->parsed())
            return run_compare(cmp_detected, cmp_reference, cmp_samples, cmp_seed, cmp_edges,
                               cmp_out, cmp_manifest);
        if (cohesion_cmd->parsed())
            return run_cohesion(coh_nodes, coh_partition, coh_adjacency, coh_geometry,
                                coh_planar, coh_out, coh_manifest);
        if (synth_cmd->parsed()) return run_synth(synth_cfg, synth_prefix, synth_manifest);
        if (perturb_cmd->parsed())
            return run_perturb(pert_edges, pert_epsilon, pert_seed, pert_out, pert_manifest);
        if (stability_cmd->parsed())
            return run_stability(stab_edges, stab_epsilons, stab_runs, stab_flags, stab_out,
                                 stab_manifest);
        if (geojson_cmd->parsed()) {
            if (geo_partition.empty() == geo_hierarchy.empty())
                throw FormatError("export-geojson needs exactly one of --partition/--hierarchy");
            return run_export_geojson(geo_nodes, geo_partition, geo_hierarchy, geo_geometry,
                                      geo_out, geo_manifest);
        }
        std::cerr << "no subcommand selected\n";
        return 2;
    } catch (const IoError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const FormatError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
