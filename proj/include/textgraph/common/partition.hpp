#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace textgraph {

/// Assignment of N nodes to C clusters.
///
/// Cluster ids are always stored in canonical form: contiguous from 0 and
/// numbered by first appearance (node 0 is in cluster 0, the first node not in
/// cluster 0 opens cluster 1, ...). Two partitions that group nodes the same
/// way therefore compare equal, and the lexicographic order on canonical
/// assignments is a total order on partitions.
class Partition {
public:
    using ClusterId = std::uint32_t;

    Partition() = default;

    /// Canonicalizes arbitrary non-negative labels.
    static Partition from_labels(std::span<const std::int64_t> labels);
    static Partition from_labels(std::span<const int> labels);
    static Partition from_labels(std::span<const ClusterId> labels);

    static Partition single_cluster(std::size_t n);
    static Partition singletons(std::size_t n);

    std::size_t size() const noexcept { return assignment_.size(); }
    std::size_t num_clusters() const noexcept { return num_clusters_; }
    ClusterId operator[](std::size_t node) const { return assignment_[node]; }
    const std::vector<ClusterId>& assignment() const noexcept { return assignment_; }

    std::vector<std::size_t> cluster_sizes() const;
    /// Node indices of every cluster, each list ascending.
    std::vector<std::vector<std::size_t>> members() const;

    friend bool operator==(const Partition&, const Partition&) = default;
    friend auto operator<=>(const Partition& a, const Partition& b) {
        return a.assignment_ <=> b.assignment_;
    }

private:
    template <typename T>
    static Partition canonicalize(std::span<const T> labels);

    std::vector<ClusterId> assignment_;
    std::size_t num_clusters_ = 0;
};

}  // namespace textgraph
