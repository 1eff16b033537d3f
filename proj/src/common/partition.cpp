#include "textgraph/common/partition.hpp"

#include <numeric>
#include <unordered_map>

#include "textgraph/common/error.hpp"

namespace textgraph {

template <typename T>
Partition Partition::canonicalize(std::span<const T> labels) {
    Partition p;
    p.assignment_.resize(labels.size());
    std::unordered_map<std::int64_t, ClusterId> relabel;
    relabel.reserve(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const auto label = static_cast<std::int64_t>(labels[i]);
        if (label < 0) throw InvalidArgument("partition labels must be non-negative");
        auto [it, inserted] = relabel.try_emplace(label, static_cast<ClusterId>(relabel.size()));
        p.assignment_[i] = it->second;
    }
    p.num_clusters_ = relabel.size();
    return p;
}

Partition Partition::from_labels(std::span<const std::int64_t> labels) { return canonicalize(labels); }
Partition Partition::from_labels(std::span<const int> labels) { return canonicalize(labels); }
Partition Partition::from_labels(std::span<const ClusterId> labels) { return canonicalize(labels); }

Partition Partition::single_cluster(std::size_t n) {
    Partition p;
    p.assignment_.assign(n, 0);
    p.num_clusters_ = n == 0 ? 0 : 1;
    return p;
}

Partition Partition::singletons(std::size_t n) {
    Partition p;
    p.assignment_.resize(n);
    std::iota(p.assignment_.begin(), p.assignment_.end(), ClusterId{0});
    p.num_clusters_ = n;
    return p;
}

std::vector<std::size_t> Partition::cluster_sizes() const {
    std::vector<std::size_t> sizes(num_clusters_, 0);
    for (const ClusterId c : assignment_) ++sizes[c];
    return sizes;
}

std::vector<std::vector<std::size_t>> Partition::members() const {
    std::vector<std::vector<std::size_t>> out(num_clusters_);
    for (std::size_t i = 0; i < assignment_.size(); ++i) out[assignment_[i]].push_back(i);
    return out;
}

}  // namespace textgraph
