#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "regionet/graph.hpp"
#include "regionet/hierarchy.hpp"
#include "regionet/partition.hpp"

namespace regionet {

using Point2 = std::array<double, 2>;          // x (lon), y (lat)
using Ring = std::vector<Point2>;              // closed: first == last
using PolygonGeom = std::vector<Ring>;         // outer ring + holes
using MultiPolygonGeom = std::vector<PolygonGeom>;

// Node coordinates (and optional polygons) aligned with a graph's node
// order. `geographic` selects the equirectangular treatment: x is scaled by
// cos(mean latitude) before planar triangulation. Planar layouts (synthetic
// data) are used as-is, which keeps adjacency invariant under translation
// and uniform scaling.
struct SpatialLayout {
    std::vector<std::string> ids;
    std::vector<double> x, y;
    bool geographic = true;
    std::vector<std::string> polygon_keys; // per node; empty entry falls back to the id
    std::unordered_map<std::string, MultiPolygonGeom> polygons; // keyed by polygon ref

    std::size_t n() const { return ids.size(); }
    const MultiPolygonGeom* polygon_for(std::size_t i) const;
};

// Layout from node records; every record must carry coordinates.
SpatialLayout layout_from_records(const std::vector<NodeRecord>& records, bool geographic = true);

enum class AdjacencyMethod { PolygonTouch, Delaunay, Gabriel };

AdjacencyMethod adjacency_method_from_string(const std::string& name);

// Undirected contiguity graph over the layout's nodes.
struct AdjacencyGraph {
    std::size_t n = 0;
    AdjacencyMethod method = AdjacencyMethod::Gabriel;
    std::vector<std::pair<NodeId, NodeId>> edges; // u < v, sorted, unique
};

// delaunay: edges of the Delaunay triangulation of the node points.
// gabriel: Delaunay edges whose open diametral disc contains no other point
//          (drops the long hull edges that would fake contiguity across gulfs).
// polygon-touch: pairs of polygons sharing at least one boundary segment.
// Throws on missing geometry, duplicate points, or fewer than 3
// non-collinear points for the triangulation methods.
AdjacencyGraph build_adjacency(const SpatialLayout& layout, AdjacencyMethod method);

struct CommunityCohesion {
    std::uint32_t community = 0;
    std::size_t size = 0;
    std::size_t components = 0;  // connected components within the community
    double largest_share = 0.0;  // nodes in the largest component / community size
};

struct CohesionReport {
    std::vector<CommunityCohesion> rows; // by community label
    std::size_t non_cohesive = 0;        // communities with more than one component

    std::string to_csv() const; // community,components,largest_share
};

// Connected components of each community in the adjacency graph restricted
// to that community. Multi-component communities (offshore islands) are
// flagged, not failed.
CohesionReport cohesion_report(const Partition& p, const AdjacencyGraph& adj);

// GeoJSON FeatureCollection: one feature per node carrying community_l1 (and
// community_l2 for hierarchical input). Point geometry from the layout
// coordinates; polygon passthrough when the layout has one for the node.
void export_geojson(const Partition& p, const SpatialLayout& layout, std::ostream& out);
void export_geojson(const HierarchicalPartition& h, const SpatialLayout& layout, std::ostream& out);

} // namespace regionet
