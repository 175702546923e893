#include "regionet/partition.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

namespace regionet {

Partition::Partition(std::vector<std::uint32_t> assignment) : labels_(std::move(assignment)) {
    for (std::uint32_t l : labels_)
        if (l == kNewCommunity) throw std::invalid_argument("reserved community label");
    recount();
}

Partition Partition::single_community(std::size_t n) {
    return Partition(std::vector<std::uint32_t>(n, 0));
}

Partition Partition::singletons(std::size_t n) {
    std::vector<std::uint32_t> labels(n);
    std::iota(labels.begin(), labels.end(), 0u);
    return Partition(std::move(labels));
}

void Partition::recount() {
    std::unordered_map<std::uint32_t, std::uint32_t> seen;
    for (std::uint32_t l : labels_) seen.emplace(l, 0);
    k_ = static_cast<std::uint32_t>(seen.size());
}

bool Partition::is_canonical() const {
    std::uint32_t next = 0;
    for (std::uint32_t l : labels_) {
        if (l > next) return false;
        if (l == next) ++next;
    }
    return next == k_;
}

void Partition::canonicalize() {
    std::unordered_map<std::uint32_t, std::uint32_t> remap;
    remap.reserve(k_);
    std::uint32_t next = 0;
    for (std::uint32_t& l : labels_) {
        auto [it, fresh] = remap.emplace(l, next);
        if (fresh) ++next;
        l = it->second;
    }
    k_ = next;
}

Partition Partition::canonicalized() const {
    Partition p = *this;
    p.canonicalize();
    return p;
}

std::vector<std::vector<NodeId>> Partition::communities() const {
    if (!is_canonical()) {
        Partition c = canonicalized();
        return c.communities();
    }
    std::vector<std::vector<NodeId>> out(k_);
    for (NodeId v = 0; v < labels_.size(); ++v) out[labels_[v]].push_back(v);
    return out;
}

bool Partition::same_clustering(const Partition& other) const {
    if (labels_.size() != other.labels_.size()) return false;
    return canonicalized().labels() == other.canonicalized().labels();
}

} // namespace regionet
