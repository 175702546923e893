#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "regionet/graph.hpp"

namespace regionet {

// Target label meaning "a community that does not exist yet".
inline constexpr std::uint32_t kNewCommunity = 0xffffffffu;

// Assignment of every node to exactly one community. Labels may be any
// 32-bit values below kNewCommunity; canonicalize() renumbers them densely
// 0..k-1 ordered by smallest member node index, which makes partition files
// reproducible.
class Partition {
public:
    Partition() = default;
    explicit Partition(std::vector<std::uint32_t> assignment);

    static Partition single_community(std::size_t n);
    static Partition singletons(std::size_t n);

    std::size_t n() const { return labels_.size(); }
    std::uint32_t community_count() const { return k_; }
    std::uint32_t label(NodeId v) const { return labels_[v]; }
    const std::vector<std::uint32_t>& labels() const { return labels_; }

    bool is_canonical() const;
    void canonicalize();
    Partition canonicalized() const;

    // Members per community, requires canonical labels.
    std::vector<std::vector<NodeId>> communities() const;

    bool same_clustering(const Partition& other) const; // equal up to relabeling

    // Modularity attached by the optimizer; empty for hand-built partitions.
    std::optional<double> q;

private:
    std::vector<std::uint32_t> labels_;
    std::uint32_t k_ = 0;

    void recount();
};

} // namespace regionet
