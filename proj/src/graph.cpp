#include "regionet/graph.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kahan.hpp"
#include "regionet/errors.hpp"

namespace regionet {

namespace {
constexpr NodeId kNoLocal = 0xffffffffu;
}

std::optional<std::string> NodeRecord::region_label(int level) const {
    for (const auto& rl : region_labels)
        if (rl.level == level) return rl.label;
    return std::nullopt;
}

WeightedDigraph WeightedDigraph::from_arcs(std::vector<NodeRecord> nodes, std::vector<Arc> arcs) {
    WeightedDigraph g;
    g.nodes_ = std::move(nodes);
    const std::size_t n = g.nodes_.size();

    g.index_.reserve(n);
    for (NodeId v = 0; v < n; ++v) {
        const NodeRecord& rec = g.nodes_[v];
        if (rec.id.empty()) throw FormatError("node with empty id");
        if (rec.id.find(',') != std::string::npos || rec.id.find('\n') != std::string::npos)
            throw FormatError("node id contains a comma or newline: '" + rec.id + "'");
        if (!g.index_.emplace(rec.id, v).second)
            throw FormatError("duplicate node id '" + rec.id + "'");
        if (rec.market_share) {
            const double m = *rec.market_share;
            if (!(m > 0.0) || m > 1.0)
                throw FormatError("market share of '" + rec.id + "' outside (0,1]");
        }
        if (rec.longitude.has_value() != rec.latitude.has_value())
            throw FormatError("node '" + rec.id + "' has only one coordinate");
    }

    for (const Arc& a : arcs) {
        if (a.src >= n || a.dst >= n) throw FormatError("arc endpoint out of range");
        if (!(a.weight >= 0.0) || !std::isfinite(a.weight))
            throw FormatError("arc weight must be finite and >= 0");
    }

    // Sorting by (src, dst, weight) makes duplicate aggregation independent
    // of the input order, so permuted record streams build identical graphs.
    std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) {
        if (a.src != b.src) return a.src < b.src;
        if (a.dst != b.dst) return a.dst < b.dst;
        return a.weight < b.weight;
    });

    g.out_ptr_.assign(n + 1, 0);
    for (std::size_t i = 0; i < arcs.size();) {
        std::size_t j = i;
        KahanSum w;
        while (j < arcs.size() && arcs[j].src == arcs[i].src && arcs[j].dst == arcs[i].dst)
            w.add(arcs[j++].weight);
        g.out_dst_.push_back(arcs[i].dst);
        g.out_w_.push_back(w.value());
        ++g.out_ptr_[arcs[i].src + 1];
        i = j;
    }
    for (std::size_t v = 0; v < n; ++v) g.out_ptr_[v + 1] += g.out_ptr_[v];

    // Reverse CSR, ordered by (dst, src).
    const std::size_t m = g.out_dst_.size();
    g.in_ptr_.assign(n + 1, 0);
    for (std::size_t e = 0; e < m; ++e) ++g.in_ptr_[g.out_dst_[e] + 1];
    for (std::size_t v = 0; v < n; ++v) g.in_ptr_[v + 1] += g.in_ptr_[v];
    g.in_src_.resize(m);
    g.in_w_.resize(m);
    {
        std::vector<std::size_t> fill(g.in_ptr_.begin(), g.in_ptr_.end() - 1);
        for (NodeId u = 0; u < n; ++u)
            for (std::size_t e = g.out_ptr_[u]; e < g.out_ptr_[u + 1]; ++e) {
                const std::size_t slot = fill[g.out_dst_[e]]++;
                g.in_src_[slot] = u;
                g.in_w_[slot] = g.out_w_[e];
            }
    }

    g.s_out_.assign(n, 0.0);
    g.s_in_.assign(n, 0.0);
    KahanSum total;
    for (NodeId v = 0; v < n; ++v) {
        KahanSum so;
        for (std::size_t e = g.out_ptr_[v]; e < g.out_ptr_[v + 1]; ++e) {
            so.add(g.out_w_[e]);
            total.add(g.out_w_[e]);
        }
        g.s_out_[v] = so.value();
        KahanSum si;
        for (std::size_t e = g.in_ptr_[v]; e < g.in_ptr_[v + 1]; ++e) si.add(g.in_w_[e]);
        g.s_in_[v] = si.value();
    }
    g.total_weight_ = total.value();
    return g;
}

std::optional<NodeId> WeightedDigraph::index_of(const std::string& id) const {
    auto it = index_.find(id);
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

double WeightedDigraph::weight(NodeId src, NodeId dst) const {
    const auto begin = out_dst_.begin() + static_cast<std::ptrdiff_t>(out_ptr_[src]);
    const auto end = out_dst_.begin() + static_cast<std::ptrdiff_t>(out_ptr_[src + 1]);
    const auto it = std::lower_bound(begin, end, dst);
    if (it == end || *it != dst) return 0.0;
    return out_w_[static_cast<std::size_t>(it - out_dst_.begin())];
}

std::size_t WeightedDigraph::zero_activity_count() const {
    std::size_t count = 0;
    for (NodeId v = 0; v < nodes_.size(); ++v)
        if (s_out_[v] == 0.0 && s_in_[v] == 0.0) ++count;
    return count;
}

bool WeightedDigraph::is_connected_ignoring_direction() const {
    const std::size_t n = nodes_.size();
    if (n == 0) return true;
    std::vector<char> seen(n, 0);
    std::vector<NodeId> stack{0};
    seen[0] = 1;
    std::size_t visited = 1;
    while (!stack.empty()) {
        const NodeId v = stack.back();
        stack.pop_back();
        auto push = [&](NodeId u) {
            if (!seen[u]) {
                seen[u] = 1;
                ++visited;
                stack.push_back(u);
            }
        };
        for (NodeId u : out_neighbors(v)) push(u);
        for (NodeId u : in_neighbors(v)) push(u);
    }
    return visited == n;
}

WeightedDigraph build_network(std::vector<NodeRecord> nodes, std::span<const CallRecord> records) {
    std::unordered_map<std::string, NodeId> index;
    index.reserve(nodes.size());
    for (NodeId v = 0; v < nodes.size(); ++v) {
        if (!index.emplace(nodes[v].id, v).second)
            throw FormatError("duplicate node id '" + nodes[v].id + "'");
    }

    std::vector<Arc> arcs;
    arcs.reserve(records.size());
    for (std::size_t line = 0; line < records.size(); ++line) {
        const CallRecord& r = records[line];
        const auto src = index.find(r.origin);
        if (src == index.end())
            throw FormatError("record " + std::to_string(line + 1) + ": unknown node id '" +
                              r.origin + "'");
        const auto dst = index.find(r.destination);
        if (dst == index.end())
            throw FormatError("record " + std::to_string(line + 1) + ": unknown node id '" +
                              r.destination + "'");
        if (!(r.duration >= 0.0) || !std::isfinite(r.duration))
            throw FormatError("record " + std::to_string(line + 1) +
                              ": duration must be finite and >= 0");
        arcs.push_back({src->second, dst->second, r.duration});
    }
    return WeightedDigraph::from_arcs(std::move(nodes), std::move(arcs));
}

WeightedDigraph normalize_market_share(const WeightedDigraph& g) {
    const std::size_t n = g.n();
    std::vector<double> share(n);
    for (NodeId v = 0; v < n; ++v) {
        const auto& m = g.node(v).market_share;
        if (!m)
            throw std::invalid_argument("market-share normalization requested but node '" +
                                        g.node(v).id + "' has no market share");
        if (!(*m > 0.0))
            throw std::invalid_argument("node '" + g.node(v).id + "' has market share <= 0");
        share[v] = *m;
    }
    std::vector<Arc> arcs;
    arcs.reserve(g.arc_count());
    g.for_each_arc([&](NodeId u, NodeId v, double w) {
        arcs.push_back({u, v, w / (share[u] * share[v])});
    });
    return WeightedDigraph::from_arcs(g.nodes(), std::move(arcs));
}

WeightedDigraph induced_subgraph(const WeightedDigraph& g, std::span<const NodeId> members) {
    if (members.empty()) throw std::invalid_argument("induced_subgraph: empty member set");
    std::vector<NodeId> sorted(members.begin(), members.end());
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    if (sorted.back() >= g.n())
        throw std::invalid_argument("induced_subgraph: unknown member index");

    std::vector<NodeId> local(g.n(), kNoLocal);
    std::vector<NodeRecord> nodes;
    nodes.reserve(sorted.size());
    for (NodeId i = 0; i < sorted.size(); ++i) {
        local[sorted[i]] = i;
        nodes.push_back(g.node(sorted[i]));
    }
    std::vector<Arc> arcs;
    for (NodeId u : sorted) {
        const auto dsts = g.out_neighbors(u);
        const auto ws = g.out_weights(u);
        for (std::size_t e = 0; e < dsts.size(); ++e)
            if (local[dsts[e]] != kNoLocal) arcs.push_back({local[u], local[dsts[e]], ws[e]});
    }
    return WeightedDigraph::from_arcs(std::move(nodes), std::move(arcs));
}

} // namespace regionet
