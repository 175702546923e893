#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace regionet {

using NodeId = std::uint32_t;

struct RegionLabel {
    int level = 0;
    std::string label;
};

// A location (cell tower area, exchange area, municipality, ...) with the
// optional attributes the toolkit understands. Only `id` is mandatory.
struct NodeRecord {
    std::string id;
    std::optional<double> longitude;
    std::optional<double> latitude;
    std::optional<std::string> polygon_ref; // key into a geometry file; defaults to id
    std::vector<RegionLabel> region_labels; // reference-region memberships per level
    std::optional<double> market_share;     // in (0,1] when present

    double effective_market_share() const { return market_share.value_or(1.0); }
    std::optional<std::string> region_label(int level) const;
};

struct Arc {
    NodeId src = 0;
    NodeId dst = 0;
    double weight = 0.0;
};

// One aggregation record: total call duration from origin to destination.
struct CallRecord {
    std::string origin;
    std::string destination;
    double duration = 0.0; // seconds
};

// Immutable weighted directed graph with self-loops. Arcs are stored in CSR
// form sorted by (src, dst) with duplicates merged at construction. The total
// weight W and per-node strengths are accumulated with compensated summation
// so country-scale duration totals stay stable.
//
// Safe to share read-only across threads.
class WeightedDigraph {
public:
    WeightedDigraph() = default;

    // Validates node ids (unique, non-empty), market shares, arc endpoints
    // and weights, then builds the CSR representation. Duplicate (src, dst)
    // arcs are summed. Throws FormatError on any violation.
    static WeightedDigraph from_arcs(std::vector<NodeRecord> nodes, std::vector<Arc> arcs);

    std::size_t n() const { return nodes_.size(); }
    std::size_t arc_count() const { return out_dst_.size(); }
    double total_weight() const { return total_weight_; }

    const NodeRecord& node(NodeId v) const { return nodes_[v]; }
    const std::vector<NodeRecord>& nodes() const { return nodes_; }
    std::optional<NodeId> index_of(const std::string& id) const;

    double s_out(NodeId v) const { return s_out_[v]; }
    double s_in(NodeId v) const { return s_in_[v]; }
    const std::vector<double>& out_strengths() const { return s_out_; }
    const std::vector<double>& in_strengths() const { return s_in_; }

    std::span<const NodeId> out_neighbors(NodeId v) const {
        return {out_dst_.data() + out_ptr_[v], out_ptr_[v + 1] - out_ptr_[v]};
    }
    std::span<const double> out_weights(NodeId v) const {
        return {out_w_.data() + out_ptr_[v], out_ptr_[v + 1] - out_ptr_[v]};
    }
    std::span<const NodeId> in_neighbors(NodeId v) const {
        return {in_src_.data() + in_ptr_[v], in_ptr_[v + 1] - in_ptr_[v]};
    }
    std::span<const double> in_weights(NodeId v) const {
        return {in_w_.data() + in_ptr_[v], in_ptr_[v + 1] - in_ptr_[v]};
    }

    // w(src, dst); 0 when the arc is absent.
    double weight(NodeId src, NodeId dst) const;

    // Arcs in canonical (src, dst) order.
    template <typename Fn>
    void for_each_arc(Fn&& fn) const {
        for (NodeId u = 0; u < nodes_.size(); ++u)
            for (std::size_t e = out_ptr_[u]; e < out_ptr_[u + 1]; ++e)
                fn(u, out_dst_[e], out_w_[e]);
    }

    // Nodes with zero in- and out-strength. They stay in the graph (they
    // count toward n) but are reported separately by the CLI.
    std::size_t zero_activity_count() const;

    bool is_connected_ignoring_direction() const;

private:
    std::vector<NodeRecord> nodes_;
    std::unordered_map<std::string, NodeId> index_;
    std::vector<std::size_t> out_ptr_, in_ptr_;
    std::vector<NodeId> out_dst_, in_src_;
    std::vector<double> out_w_, in_w_;
    std::vector<double> s_out_, s_in_;
    double total_weight_ = 0.0;
};

// Aggregates call records into a network over the declared nodes. Unknown
// ids and negative durations are rejected with the 1-based record number.
// Zero-activity nodes are retained with zero strength.
WeightedDigraph build_network(std::vector<NodeRecord> nodes, std::span<const CallRecord> records);

// w'_ij = w_ij / (m_i * m_j), correcting single-operator sampling of both
// endpoints. Every node must carry an explicit market share in (0,1].
WeightedDigraph normalize_market_share(const WeightedDigraph& g);

// Subgraph on `members` keeping exactly the arcs with both endpoints inside
// (self-loops included). Node order is preserved from g.
WeightedDigraph induced_subgraph(const WeightedDigraph& g, std::span<const NodeId> members);

} // namespace regionet
