#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "json.hpp"
#include "textgraph/common/partition.hpp"
#include "textgraph/mstability/scan.hpp"

namespace textgraph::scaleselect {

struct SelectionConfig {
    std::optional<double> dip_threshold;           ///< default 0.1 ln N
    std::optional<double> plateau_threshold;       ///< default 0.05 ln N
    std::optional<std::size_t> min_plateau_points; ///< default 5% of the grid
    bool exclude_trivial = true;                   ///< ignore times whose best partition is 1 or N clusters
};

struct Thresholds {
    double dip = 0.0;
    double plateau = 0.0;
    std::size_t min_points = 1;
    bool exclude_trivial = true;
};

/// Fills unset values from the node count and grid size.
Thresholds resolve(const SelectionConfig& config, std::size_t num_nodes, std::size_t grid_points);

struct RobustScale {
    double t_star = 0.0;
    std::size_t star_index = 0;
    Partition partition;
    double t_lo = 0.0;
    double t_hi = 0.0;
    std::size_t lo_index = 0;
    std::size_t hi_index = 0;
    double vi_at_dip = 0.0;        ///< smoothed VI(t) at t_star
    double plateau_mean_vi = 0.0;  ///< mean VI(t, t') over pairs inside one low block

    std::size_t width() const noexcept { return hi_index - lo_index + 1; }
};

/// Index ranges [lo, hi] of the maximal runs of grid points whose pairwise
/// VI(t, t') are all <= threshold. Points in `blocked` never join a run.
std::vector<std::pair<std::size_t, std::size_t>> maximal_low_blocks(const Eigen::MatrixXd& vi,
                                                                    double threshold,
                                                                    const std::vector<bool>& blocked);

/// VI(t) averaged over each point and its grid neighbours.
std::vector<double> smoothed_vi(const mstability::ScanResult& scan);

/// Plateaus of VI(t, t') with a dip of VI(t) inside. Overlapping blocks are
/// merged, so the returned plateaus are disjoint. Ordered by width in grid
/// points, widest first; equal widths by t_lo. Empty when nothing qualifies.
std::vector<RobustScale> find_robust_scales(const mstability::ScanResult& scan, const Thresholds& thresholds);

nlohmann::json to_json(const RobustScale& scale, const std::string& partition_file);

}  // namespace textgraph::scaleselect
