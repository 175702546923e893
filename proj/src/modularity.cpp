#include "regionet/modularity.hpp"

#include <stdexcept>
#include <vector>

#include "kahan.hpp"

namespace regionet {

namespace {

void check_cover(const WeightedDigraph& g, const Partition& p) {
    if (p.n() != g.n())
        throw std::invalid_argument("partition covers " + std::to_string(p.n()) +
                                    " nodes, graph has " + std::to_string(g.n()));
    if (!(g.total_weight() > 0.0))
        throw std::invalid_argument("graph total weight is zero; nothing to score");
}

} // namespace

double modularity(const WeightedDigraph& g, const Partition& p) {
    check_cover(g, p);
    // One community scores zero identically: both terms of Q are exactly 1.
    if (p.community_count() == 1) return 0.0;

    const Partition canon = p.is_canonical() ? p : p.canonicalized();
    const auto& labels = canon.labels();
    const std::uint32_t k = canon.community_count();
    const double w_total = g.total_weight();

    std::vector<KahanSum> w_in(k), s_out_c(k), s_in_c(k);
    g.for_each_arc([&](NodeId u, NodeId v, double w) {
        if (labels[u] == labels[v]) w_in[labels[u]].add(w);
    });
    for (NodeId v = 0; v < g.n(); ++v) {
        s_out_c[labels[v]].add(g.s_out(v));
        s_in_c[labels[v]].add(g.s_in(v));
    }

    KahanSum q;
    for (std::uint32_t c = 0; c < k; ++c)
        q.add(w_in[c].value() / w_total -
              (s_out_c[c].value() / w_total) * (s_in_c[c].value() / w_total));
    return q.value();
}

double cross_weight_fraction(const WeightedDigraph& g, const Partition& p) {
    check_cover(g, p);
    const auto& labels = p.labels();
    KahanSum cross;
    g.for_each_arc([&](NodeId u, NodeId v, double w) {
        if (labels[u] != labels[v]) cross.add(w);
    });
    return cross.value() / g.total_weight();
}

EdgeScores::EdgeScores(const WeightedDigraph& g) : g_(&g), w_(g.total_weight()) {
    if (!(w_ > 0.0)) throw std::invalid_argument("edge scores need total weight > 0");
}

double gain(const WeightedDigraph& g, const Partition& p, std::span<const NodeId> movers,
            std::uint32_t target) {
    check_cover(g, p);
    if (movers.empty()) throw std::invalid_argument("gain: empty mover set");
    const auto& labels = p.labels();
    const std::uint32_t source = labels[movers[0]];
    for (NodeId v : movers) {
        if (v >= g.n()) throw std::invalid_argument("gain: mover out of range");
        if (labels[v] != source)
            throw std::invalid_argument("gain: movers span more than one community");
    }
    if (target == source) throw std::invalid_argument("gain: target equals current community");
    if (target != kNewCommunity) {
        bool exists = false;
        for (std::uint32_t l : labels)
            if (l == target) {
                exists = true;
                break;
            }
        if (!exists) throw std::invalid_argument("gain: target community does not exist");
    }

    std::vector<char> moving(g.n(), 0);
    for (NodeId v : movers) moving[v] = 1;

    const double w_total = g.total_weight();
    KahanSum sa_out, sa_in, sb_out, sb_in, a_out, b_in;
    for (NodeId v = 0; v < g.n(); ++v) {
        if (labels[v] == source) {
            sa_out.add(g.s_out(v));
            sa_in.add(g.s_in(v));
            if (moving[v]) {
                a_out.add(g.s_out(v));
                b_in.add(g.s_in(v));
            }
        } else if (target != kNewCommunity && labels[v] == target) {
            sb_out.add(g.s_out(v));
            sb_in.add(g.s_in(v));
        }
    }

    // cross: arcs between the movers and the target community (both directions);
    // link: arcs between the movers and the rest of their current community.
    KahanSum cross, link;
    for (NodeId v : movers) {
        const auto out_n = g.out_neighbors(v);
        const auto out_w = g.out_weights(v);
        for (std::size_t e = 0; e < out_n.size(); ++e) {
            const NodeId u = out_n[e];
            if (moving[u]) continue;
            if (labels[u] == source) link.add(out_w[e]);
            else if (target != kNewCommunity && labels[u] == target) cross.add(out_w[e]);
        }
        const auto in_n = g.in_neighbors(v);
        const auto in_w = g.in_weights(v);
        for (std::size_t e = 0; e < in_n.size(); ++e) {
            const NodeId u = in_n[e];
            if (moving[u]) continue;
            if (labels[u] == source) link.add(in_w[e]);
            else if (target != kNewCommunity && labels[u] == target) cross.add(in_w[e]);
        }
    }

    const double a = a_out.value();
    const double b = b_in.value();
    const double delta_in = sb_in.value() - sa_in.value();
    const double delta_out = sb_out.value() - sa_out.value();
    return (cross.value() - link.value()) / w_total -
           (a * delta_in + b * delta_out + 2.0 * a * b) / (w_total * w_total);
}

} // namespace regionet
