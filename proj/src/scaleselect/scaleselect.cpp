#include "textgraph/scaleselect/scaleselect.hpp"

#include <algorithm>
#include <cmath>

#include "textgraph/common/error.hpp"

namespace textgraph::scaleselect {

Thresholds resolve(const SelectionConfig& config, std::size_t num_nodes, std::size_t grid_points) {
    const double ln_n = std::log(static_cast<double>(std::max<std::size_t>(num_nodes, 2)));
    Thresholds t;
    t.dip = config.dip_threshold.value_or(0.1 * ln_n);
    t.plateau = config.plateau_threshold.value_or(0.05 * ln_n);
    t.min_points = config.min_plateau_points.value_or(
        std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(0.05 * static_cast<double>(grid_points)))));
    t.exclude_trivial = config.exclude_trivial;
    if (t.dip < 0.0 || t.plateau < 0.0) throw InvalidArgument("selection thresholds must be non-negative");
    if (t.min_points == 0) throw InvalidArgument("min_plateau_points must be at least 1");
    return t;
}

std::vector<std::pair<std::size_t, std::size_t>> maximal_low_blocks(const Eigen::MatrixXd& vi, double threshold,
                                                                    const std::vector<bool>& blocked) {
    const auto k = static_cast<std::size_t>(vi.rows());
    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    std::size_t end = 0;  // one past the last point of the current run from i
    std::size_t last_end = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (blocked[i]) {
            end = std::max(end, i + 1);
            continue;
        }
        end = std::max(end, i);
        // [i, end) is already pairwise low; try to extend it
        while (end < k && !blocked[end]) {
            bool ok = true;
            for (std::size_t a = i; a <= end && ok; ++a)
                ok = vi(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(end)) <= threshold;
            if (!ok) break;
            ++end;
        }
        if (end > i && end > last_end) {
            blocks.emplace_back(i, end - 1);
            last_end = end;
        }
    }
    return blocks;
}

std::vector<double> smoothed_vi(const mstability::ScanResult& scan) {
    const std::size_t k = scan.points.size();
    std::vector<double> out(k, 0.0);
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t lo = i == 0 ? 0 : i - 1;
        const std::size_t hi = std::min(k - 1, i + 1);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += scan.points[j].vi_ensemble;
        out[i] = sum / static_cast<double>(hi - lo + 1);
    }
    return out;
}

std::vector<RobustScale> find_robust_scales(const mstability::ScanResult& scan, const Thresholds& thresholds) {
    const std::size_t k = scan.points.size();
    if (scan.vi_matrix.rows() != static_cast<Eigen::Index>(k) || scan.vi_matrix.cols() != static_cast<Eigen::Index>(k))
        throw SizeMismatch("VI matrix does not match the scan");
    std::vector<bool> blocked(k, false);
    if (thresholds.exclude_trivial) {
        for (std::size_t i = 0; i < k; ++i) {
            const Partition& p = scan.points[i].best;
            blocked[i] = p.num_clusters() <= 1 || p.num_clusters() == p.size();
        }
    }

    std::vector<std::pair<std::size_t, std::size_t>> blocks;
    for (const auto& b : maximal_low_blocks(scan.vi_matrix, thresholds.plateau, blocked))
        if (b.second - b.first + 1 >= thresholds.min_points) blocks.push_back(b);

    // merge overlapping blocks (they arrive sorted by start and by end)
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> groups;
    for (const auto& b : blocks) {
        if (!groups.empty() && b.first <= groups.back().back().second) groups.back().push_back(b);
        else groups.push_back({b});
    }

    const std::vector<double> smooth = smoothed_vi(scan);
    std::vector<RobustScale> out;
    for (const auto& group : groups) {
        RobustScale s;
        s.lo_index = group.front().first;
        s.hi_index = group.back().second;
        s.star_index = s.lo_index;
        for (std::size_t i = s.lo_index; i <= s.hi_index; ++i)
            if (smooth[i] < smooth[s.star_index]) s.star_index = i;
        s.vi_at_dip = smooth[s.star_index];
        if (s.vi_at_dip > thresholds.dip) continue;

        double sum = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = s.lo_index; a <= s.hi_index; ++a) {
            for (std::size_t b = a + 1; b <= s.hi_index; ++b) {
                const bool together = std::any_of(group.begin(), group.end(), [&](const auto& blk) {
                    return blk.first <= a && b <= blk.second;
                });
                if (!together) continue;
                sum += scan.vi_matrix(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
                ++pairs;
            }
        }
        s.plateau_mean_vi = pairs > 0 ? sum / static_cast<double>(pairs) : 0.0;
        s.t_lo = scan.points[s.lo_index].t;
        s.t_hi = scan.points[s.hi_index].t;
        s.t_star = scan.points[s.star_index].t;
        s.partition = scan.points[s.star_index].best;
        out.push_back(std::move(s));
    }
    std::stable_sort(out.begin(), out.end(), [](const RobustScale& x, const RobustScale& y) {
        if (x.width() != y.width()) return x.width() > y.width();
        return x.t_lo < y.t_lo;
    });
    return out;
}

nlohmann::json to_json(const RobustScale& scale, const std::string& partition_file) {
    nlohmann::json j;
    j["t_star"] = scale.t_star;
    j["t_lo"] = scale.t_lo;
    j["t_hi"] = scale.t_hi;
    j["num_clusters"] = scale.partition.num_clusters();
    j["partition_file"] = partition_file;
    j["vi_at_dip"] = scale.vi_at_dip;
    j["plateau_mean_vi"] = scale.plateau_mean_vi;
    j["plateau_points"] = scale.width();
    return j;
}

}  // namespace textgraph::scaleselect
