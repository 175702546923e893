#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "regionet/graph.hpp"
#include "regionet/hierarchy.hpp"
#include "regionet/partition.hpp"

namespace regionet {

// File formats (bit-exact contracts, UTF-8, '.' decimal point, '\n' endings):
//   edge list:  header "src,dst,weight", one row per directed arc
//   node file:  header "id,lon,lat,market_share,region_l1,region_l2",
//               fields after id may be empty
//   partition:  header "node_id,community", canonical labels, rows by node id
//   hierarchy:  header "node_id,community_l1,community_l2"
// Weights round-trip exactly: written as shortest decimal that parses back
// to the same double.

std::string format_double(double v); // shortest round-trip decimal

// Nodes inferred from the arcs, ordered lexicographically by id.
WeightedDigraph load_edge_list(const std::filesystem::path& path);
// Arcs resolved against declared nodes; unknown endpoints are format errors.
WeightedDigraph load_edge_list(const std::filesystem::path& path, std::vector<NodeRecord> nodes);

// Canonical arc order (src then dst ascending by node order).
void write_edge_list(const WeightedDigraph& g, const std::filesystem::path& path);

std::vector<NodeRecord> load_nodes(const std::filesystem::path& path);
void write_nodes(const std::vector<NodeRecord>& records, const std::filesystem::path& path);

void write_partition(const WeightedDigraph& g, const Partition& p,
                     const std::filesystem::path& path);
std::string partition_to_string(const WeightedDigraph& g, const Partition& p);

// Partition aligned to g's nodes; must cover them exactly.
Partition load_partition_for(const WeightedDigraph& g, const std::filesystem::path& path);

// Standalone (id, label) rows for graph-free comparison.
std::vector<std::pair<std::string, std::uint32_t>> load_partition_pairs(
    const std::filesystem::path& path);

// Joins two label maps over the identical id set (error otherwise) and
// returns dense partitions over the ids sorted lexicographically.
std::pair<Partition, Partition> align_partitions(
    const std::vector<std::pair<std::string, std::uint32_t>>& a,
    const std::vector<std::pair<std::string, std::uint32_t>>& b);

void write_hierarchy(const WeightedDigraph& g, const HierarchicalPartition& h,
                     const std::filesystem::path& path);

struct HierarchyRow {
    std::string id;
    std::uint32_t l1 = 0;
    std::uint32_t l2 = 0;
};
std::vector<HierarchyRow> load_hierarchy_pairs(const std::filesystem::path& path);

// Reference partition from the records' region labels at `level`; every
// record must carry one.
Partition partition_from_region_labels(const std::vector<NodeRecord>& records, int level);

} // namespace regionet
