#include "textgraph/mstability/louvain.hpp"

#include <algorithm>
#include <numeric>

#include "textgraph/common/error.hpp"
#include "textgraph/common/random.hpp"

namespace textgraph::mstability {

StabilityProblem::StabilityProblem(Eigen::MatrixXd autocovariance, Eigen::VectorXd pi, double threshold)
    : b_(std::move(autocovariance)), pi_(std::move(pi)) {
    const Eigen::Index n = b_.rows();
    if (b_.cols() != n || pi_.size() != n) throw SizeMismatch("autocovariance and stationary distribution differ in size");
    neighbours_.assign(static_cast<std::size_t>(n), {});
    for (Eigen::Index i = 0; i < n; ++i) {
        auto& list = neighbours_[static_cast<std::size_t>(i)];
        for (Eigen::Index j = 0; j < n; ++j) {
            const double f = b_(i, j) + pi_(i) * pi_(j);
            if (j != i && f >= threshold) list.emplace_back(static_cast<std::uint32_t>(j), f);
        }
    }
}

StabilityProblem::StabilityProblem(const MarkovProcess& process, double t, double threshold)
    : StabilityProblem(process.autocovariance(t), process.pi(), threshold) {}

namespace {

// One level of the hierarchy: nodes carry a mass (sum of pi) and edge lists
// of aggregated flow. Internal flow of a node does not affect move gains.
struct Level {
    std::vector<double> mass;
    std::vector<std::vector<std::pair<std::uint32_t, double>>> edges;
};

// Local moving phase. Returns the cluster of every node and whether any node moved.
bool move_nodes(const Level& level, Rng& rng, std::vector<std::uint32_t>& cluster) {
    const std::size_t n = level.mass.size();
    cluster.resize(n);
    std::iota(cluster.begin(), cluster.end(), 0u);
    std::vector<double> cluster_mass = level.mass;
    std::vector<std::uint32_t> cluster_size(n, 1);
    std::vector<std::uint32_t> empty;  // ids of empty clusters

    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    rng.shuffle(std::span(order));

    std::vector<double> link(n, 0.0);
    std::vector<std::uint32_t> touched;
    std::vector<bool> is_touched(n, false);

    bool any_move = false;
    bool moved = true;
    while (moved) {
        moved = false;
        // fresh sums each sweep so that incremental updates do not drift
        std::fill(cluster_mass.begin(), cluster_mass.end(), 0.0);
        for (std::size_t v = 0; v < n; ++v) cluster_mass[cluster[v]] += level.mass[v];
        for (std::uint32_t i : order) {
            const std::uint32_t home = cluster[i];
            const double m = level.mass[i];
            touched.clear();
            for (const auto& [j, w] : level.edges[i]) {
                const std::uint32_t c = cluster[j];
                if (!is_touched[c]) {
                    is_touched[c] = true;
                    touched.push_back(c);
                }
                link[c] += w;
            }

            cluster_mass[home] -= m;
            --cluster_size[home];
            // gain of joining c from isolation: 2 (flow(i, c) - m * mass(c))
            std::uint32_t best = home;
            double best_gain = 2.0 * (link[home] - m * cluster_mass[home]);
            for (std::uint32_t c : touched) {
                if (c == home) continue;
                const double g = 2.0 * (link[c] - m * cluster_mass[c]);
                if (g > best_gain + kMoveTolerance) {
                    best = c;
                    best_gain = g;
                }
            }
            if (cluster_size[home] > 0) {
                if (0.0 > best_gain + kMoveTolerance) {
                    best = empty.back();
                    empty.pop_back();
                }
            } else if (best == home) {
                // A lone node joins its best neighbour cluster on a near tie.
                // Once the flow has decayed to rounding level this lets the
                // single cluster form instead of singletons. The join margin is
                // half the isolation margin so the two moves cannot cycle.
                for (std::uint32_t c : touched) {
                    if (c == home) continue;
                    const double g = 2.0 * (link[c] - m * cluster_mass[c]);
                    if (g >= -0.5 * kMoveTolerance && (best == home || g > best_gain)) {
                        best = c;
                        best_gain = g;
                    }
                }
            }
            for (std::uint32_t c : touched) {
                link[c] = 0.0;
                is_touched[c] = false;
            }

            if (best != home) {
                moved = true;
                any_move = true;
                if (cluster_size[home] == 0) empty.push_back(home);
            }
            cluster[i] = best;
            cluster_mass[best] += m;
            ++cluster_size[best];
        }
    }
    return any_move;
}

// Renumbers clusters 0..C-1 in order of first appearance and returns C.
std::uint32_t renumber(std::vector<std::uint32_t>& cluster) {
    std::vector<std::uint32_t> id(cluster.size(), UINT32_MAX);
    std::uint32_t next = 0;
    for (auto& c : cluster) {
        if (id[c] == UINT32_MAX) id[c] = next++;
        c = id[c];
    }
    return next;
}

Level aggregate(const Level& level, const std::vector<std::uint32_t>& cluster, std::uint32_t count) {
    Level out;
    out.mass.assign(count, 0.0);
    out.edges.assign(count, {});
    std::vector<std::vector<std::pair<std::uint32_t, double>>> raw(count);
    // Each pair is visited once and fed to both directions in the same order,
    // so the aggregated weights are exactly symmetric.
    for (std::size_t i = 0; i < cluster.size(); ++i) {
        const std::uint32_t a = cluster[i];
        out.mass[a] += level.mass[i];
        for (const auto& [j, w] : level.edges[i]) {
            const std::uint32_t b = cluster[j];
            if (j <= i || b == a) continue;
            raw[a].emplace_back(b, w);
            raw[b].emplace_back(a, w);
        }
    }
    for (std::uint32_t a = 0; a < count; ++a) {
        auto& r = raw[a];
        std::stable_sort(r.begin(), r.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
        for (const auto& [b, w] : r) {
            if (!out.edges[a].empty() && out.edges[a].back().first == b) out.edges[a].back().second += w;
            else out.edges[a].emplace_back(b, w);
        }
    }
    return out;
}

}  // namespace

LouvainResult louvain_optimize(const StabilityProblem& problem, std::uint64_t seed) {
    const std::size_t n = problem.size();
    Rng rng(seed);
    Level level;
    level.mass.resize(n);
    for (std::size_t i = 0; i < n; ++i) level.mass[i] = problem.pi()(static_cast<Eigen::Index>(i));
    level.edges = problem.neighbours();

    std::vector<std::uint32_t> node_cluster(n);
    std::iota(node_cluster.begin(), node_cluster.end(), 0u);
    std::vector<std::uint32_t> cluster;
    while (move_nodes(level, rng, cluster)) {
        const std::uint32_t count = renumber(cluster);
        for (auto& c : node_cluster) c = cluster[c];
        if (count == level.mass.size()) break;
        level = aggregate(level, cluster, count);
    }
    LouvainResult result;
    result.partition = Partition::from_labels(std::span<const std::uint32_t>(node_cluster));
    result.stability = problem.stability(result.partition);
    return result;
}

LouvainResult louvain_optimize(const MarkovProcess& process, double t, std::uint64_t seed) {
    if (!(t > 0.0)) throw InvalidArgument("Markov time must be positive");
    return louvain_optimize(StabilityProblem(process, t), seed);
}

}  // namespace textgraph::mstability
