#include "regionet/spatial.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "regionet/io.hpp"

namespace regionet {

namespace {

struct UnionFind {
    std::vector<std::uint32_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        for (std::size_t i = 0; i < n; ++i) parent[i] = static_cast<std::uint32_t>(i);
    }
    std::uint32_t find(std::uint32_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    }
    void unite(std::uint32_t a, std::uint32_t b) { parent[find(a)] = find(b); }
};

double orient(const Point2& a, const Point2& b, const Point2& c) {
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0]);
}

// > 0 when d lies strictly inside the circumcircle of the CCW triangle abc.
double incircle(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    const double adx = a[0] - d[0], ady = a[1] - d[1];
    const double bdx = b[0] - d[0], bdy = b[1] - d[1];
    const double cdx = c[0] - d[0], cdy = c[1] - d[1];
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    return adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
           ad * (bdx * cdy - bdy * cdx);
}

struct Tri {
    std::uint32_t a, b, c;
};

// Bowyer-Watson over the (scaled) node points. Returns unique undirected
// edges with u < v. Insertion order is the node order, so output is
// deterministic even at cocircular ties.
std::vector<std::pair<NodeId, NodeId>> delaunay_edges(std::vector<Point2> pts) {
    const std::size_t n = pts.size();
    if (n < 3) throw std::invalid_argument("triangulation needs at least 3 points");

    {
        std::vector<Point2> sorted = pts;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw std::invalid_argument("triangulation: duplicate coordinates");
    }

    // Center on the centroid so predicates see translation-sized values only.
    double cx = 0, cy = 0;
    for (const auto& p : pts) {
        cx += p[0];
        cy += p[1];
    }
    cx /= static_cast<double>(n);
    cy /= static_cast<double>(n);
    double span = 0;
    for (auto& p : pts) {
        p[0] -= cx;
        p[1] -= cy;
        span = std::max({span, std::abs(p[0]), std::abs(p[1])});
    }
    if (span == 0) throw std::invalid_argument("triangulation: all points coincide");

    const double big = 1024.0 * span;
    pts.push_back({-big, -big});
    pts.push_back({big, -big});
    pts.push_back({0.0, big});
    const std::uint32_t s0 = static_cast<std::uint32_t>(n), s1 = s0 + 1, s2 = s0 + 2;

    std::vector<Tri> tris{{s0, s1, s2}};
    const double eps = 1e-12 * span * span * span * span;

    std::vector<std::size_t> bad;
    std::map<std::pair<std::uint32_t, std::uint32_t>, int> edge_count;
    for (std::uint32_t p = 0; p < n; ++p) {
        bad.clear();
        for (std::size_t t = 0; t < tris.size(); ++t)
            if (incircle(pts[tris[t].a], pts[tris[t].b], pts[tris[t].c], pts[p]) > 0.0)
                bad.push_back(t);
        if (bad.empty()) {
            // Point exactly on an edge or cocircular boundary: loosen the test.
            for (std::size_t t = 0; t < tris.size(); ++t)
                if (incircle(pts[tris[t].a], pts[tris[t].b], pts[tris[t].c], pts[p]) > -eps)
                    bad.push_back(t);
        }
        if (bad.empty()) throw std::runtime_error("triangulation failed to locate a point");

        edge_count.clear();
        auto count = [&](std::uint32_t u, std::uint32_t v) {
            if (u > v) std::swap(u, v);
            ++edge_count[{u, v}];
        };
        for (std::size_t t : bad) {
            count(tris[t].a, tris[t].b);
            count(tris[t].b, tris[t].c);
            count(tris[t].c, tris[t].a);
        }
        for (auto it = bad.rbegin(); it != bad.rend(); ++it) {
            tris[*it] = tris.back();
            tris.pop_back();
        }
        for (const auto& [edge, cnt] : edge_count) {
            if (cnt != 1) continue; // interior to the cavity
            Tri t{p, edge.first, edge.second};
            if (orient(pts[t.a], pts[t.b], pts[t.c]) < 0.0) std::swap(t.b, t.c);
            tris.push_back(t);
        }
    }

    std::set<std::pair<NodeId, NodeId>> edges;
    auto keep = [&](std::uint32_t u, std::uint32_t v) {
        if (u >= n || v >= n) return;
        if (u > v) std::swap(u, v);
        edges.insert({u, v});
    };
    bool any_finite = false;
    for (const Tri& t : tris) {
        if (t.a < n && t.b < n && t.c < n) any_finite = true;
        keep(t.a, t.b);
        keep(t.b, t.c);
        keep(t.c, t.a);
    }
    if (!any_finite)
        throw std::invalid_argument("triangulation needs at least 3 non-collinear points");
    return {edges.begin(), edges.end()};
}

std::vector<Point2> planar_points(const SpatialLayout& layout) {
    std::vector<Point2> pts(layout.n());
    double scale = 1.0;
    if (layout.geographic) {
        double mean_lat = 0;
        for (double lat : layout.y) mean_lat += lat;
        mean_lat /= static_cast<double>(layout.n());
        scale = std::cos(mean_lat * 0.017453292519943295);
    }
    for (std::size_t i = 0; i < layout.n(); ++i) pts[i] = {layout.x[i] * scale, layout.y[i]};
    return pts;
}

std::vector<std::pair<NodeId, NodeId>> gabriel_filter(
    const std::vector<Point2>& pts, const std::vector<std::pair<NodeId, NodeId>>& delaunay) {
    std::vector<std::pair<NodeId, NodeId>> kept;
    kept.reserve(delaunay.size());
    for (const auto& [u, v] : delaunay) {
        const double mx = 0.5 * (pts[u][0] + pts[v][0]);
        const double my = 0.5 * (pts[u][1] + pts[v][1]);
        const double dx = pts[u][0] - pts[v][0];
        const double dy = pts[u][1] - pts[v][1];
        const double r2 = 0.25 * (dx * dx + dy * dy);
        bool open_disc_empty = true;
        for (std::size_t w = 0; w < pts.size(); ++w) {
            if (w == u || w == v) continue;
            const double wx = pts[w][0] - mx;
            const double wy = pts[w][1] - my;
            if (wx * wx + wy * wy < r2) {
                open_disc_empty = false;
                break;
            }
        }
        if (open_disc_empty) kept.push_back({u, v});
    }
    return kept;
}

std::vector<std::pair<NodeId, NodeId>> polygon_touch_edges(const SpatialLayout& layout) {
    // Segment-sharing test over exactly matching boundary vertices; inputs
    // must be topologically clean (shared borders digitized identically).
    std::map<std::array<double, 4>, std::vector<NodeId>> owners;
    for (std::size_t i = 0; i < layout.n(); ++i) {
        const MultiPolygonGeom* geom = layout.polygon_for(i);
        if (!geom)
            throw std::invalid_argument("polygon-touch adjacency: node '" + layout.ids[i] +
                                        "' has no polygon");
        for (const PolygonGeom& poly : *geom)
            for (const Ring& ring : poly)
                for (std::size_t s = 0; s + 1 < ring.size(); ++s) {
                    Point2 p = ring[s], q = ring[s + 1];
                    if (q < p) std::swap(p, q);
                    auto& list = owners[{p[0], p[1], q[0], q[1]}];
                    if (list.empty() || list.back() != i) list.push_back(static_cast<NodeId>(i));
                }
    }
    std::set<std::pair<NodeId, NodeId>> edges;
    for (const auto& [segment, nodes] : owners)
        for (std::size_t a = 0; a < nodes.size(); ++a)
            for (std::size_t b = a + 1; b < nodes.size(); ++b)
                edges.insert({std::min(nodes[a], nodes[b]), std::max(nodes[a], nodes[b])});
    return {edges.begin(), edges.end()};
}

} // namespace

const MultiPolygonGeom* SpatialLayout::polygon_for(std::size_t i) const {
    const std::string& key =
        (i < polygon_keys.size() && !polygon_keys[i].empty()) ? polygon_keys[i] : ids[i];
    const auto it = polygons.find(key);
    return it == polygons.end() ? nullptr : &it->second;
}

SpatialLayout layout_from_records(const std::vector<NodeRecord>& records, bool geographic) {
    SpatialLayout layout;
    layout.geographic = geographic;
    layout.ids.reserve(records.size());
    for (const NodeRecord& rec : records) {
        if (!rec.longitude || !rec.latitude)
            throw std::invalid_argument("node '" + rec.id + "' has no coordinates");
        layout.ids.push_back(rec.id);
        layout.x.push_back(*rec.longitude);
        layout.y.push_back(*rec.latitude);
        layout.polygon_keys.push_back(rec.polygon_ref.value_or(""));
    }
    return layout;
}

AdjacencyMethod adjacency_method_from_string(const std::string& name) {
    if (name == "gabriel") return AdjacencyMethod::Gabriel;
    if (name == "delaunay") return AdjacencyMethod::Delaunay;
    if (name == "polygon") return AdjacencyMethod::PolygonTouch;
    throw std::invalid_argument("unknown adjacency method '" + name +
                                "' (expected gabriel, delaunay, or polygon)");
}

AdjacencyGraph build_adjacency(const SpatialLayout& layout, AdjacencyMethod method) {
    AdjacencyGraph adj;
    adj.n = layout.n();
    adj.method = method;
    switch (method) {
    case AdjacencyMethod::PolygonTouch:
        adj.edges = polygon_touch_edges(layout);
        break;
    case AdjacencyMethod::Delaunay:
        adj.edges = delaunay_edges(planar_points(layout));
        break;
    case AdjacencyMethod::Gabriel: {
        const auto pts = planar_points(layout);
        adj.edges = gabriel_filter(pts, delaunay_edges(pts));
        break;
    }
    }
    return adj;
}

CohesionReport cohesion_report(const Partition& p, const AdjacencyGraph& adj) {
    if (p.n() != adj.n)
        throw std::invalid_argument("cohesion_report: partition and adjacency node sets differ");
    const Partition canon = p.canonicalized();
    const auto& labels = canon.labels();

    UnionFind uf(adj.n);
    for (const auto& [u, v] : adj.edges)
        if (labels[u] == labels[v]) uf.unite(u, v);

    const std::uint32_t k = canon.community_count();
    CohesionReport report;
    report.rows.resize(k);
    std::vector<std::map<std::uint32_t, std::size_t>> comp_sizes(k);
    for (std::uint32_t c = 0; c < k; ++c) report.rows[c].community = c;
    for (NodeId v = 0; v < adj.n; ++v) {
        ++report.rows[labels[v]].size;
        ++comp_sizes[labels[v]][uf.find(v)];
    }
    for (std::uint32_t c = 0; c < k; ++c) {
        std::size_t largest = 0;
        for (const auto& [root, size] : comp_sizes[c]) largest = std::max(largest, size);
        report.rows[c].components = comp_sizes[c].size();
        report.rows[c].largest_share =
            static_cast<double>(largest) / static_cast<double>(report.rows[c].size);
        if (report.rows[c].components > 1) ++report.non_cohesive;
    }
    return report;
}

std::string CohesionReport::to_csv() const {
    std::string out = "community,components,largest_share\n";
    for (const CommunityCohesion& row : rows) {
        out += std::to_string(row.community) + "," + std::to_string(row.components) + "," +
               format_double(row.largest_share) + "\n";
    }
    return out;
}

namespace {

nlohmann::ordered_json geometry_json(const SpatialLayout& layout, std::size_t i) {
    const MultiPolygonGeom* geom = layout.polygon_for(i);
    nlohmann::ordered_json g;
    if (geom && !geom->empty()) {
        auto poly_coords = [](const PolygonGeom& poly) {
            nlohmann::ordered_json rings = nlohmann::ordered_json::array();
            for (const Ring& ring : poly) {
                nlohmann::ordered_json r = nlohmann::ordered_json::array();
                for (const Point2& pt : ring) r.push_back({pt[0], pt[1]});
                rings.push_back(std::move(r));
            }
            return rings;
        };
        if (geom->size() == 1) {
            g["type"] = "Polygon";
            g["coordinates"] = poly_coords((*geom)[0]);
        } else {
            g["type"] = "MultiPolygon";
            nlohmann::ordered_json polys = nlohmann::ordered_json::array();
            for (const PolygonGeom& poly : *geom) polys.push_back(poly_coords(poly));
            g["coordinates"] = std::move(polys);
        }
    } else {
        g["type"] = "Point";
        g["coordinates"] = {layout.x[i], layout.y[i]};
    }
    return g;
}

void export_features(const SpatialLayout& layout, const std::vector<std::uint32_t>& l1,
                     const std::vector<std::uint32_t>* l2, std::ostream& out) {
    if (layout.n() != l1.size())
        throw std::invalid_argument("export_geojson: layout and partition node sets differ");
    nlohmann::ordered_json fc;
    fc["type"] = "FeatureCollection";
    nlohmann::ordered_json features = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < layout.n(); ++i) {
        nlohmann::ordered_json f;
        f["type"] = "Feature";
        f["geometry"] = geometry_json(layout, i);
        nlohmann::ordered_json props;
        props["node_id"] = layout.ids[i];
        props["community_l1"] = l1[i];
        if (l2) props["community_l2"] = (*l2)[i];
        f["properties"] = std::move(props);
        features.push_back(std::move(f));
    }
    fc["features"] = std::move(features);
    out << fc.dump(2) << "\n";
}

} // namespace

void export_geojson(const Partition& p, const SpatialLayout& layout, std::ostream& out) {
    export_features(layout, p.canonicalized().labels(), nullptr, out);
}

void export_geojson(const HierarchicalPartition& h, const SpatialLayout& layout,
                    std::ostream& out) {
    export_features(layout, h.level1.labels(), &h.sublabel, out);
}

} // namespace regionet
