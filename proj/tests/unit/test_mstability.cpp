#include <cmath>

#include "doctest.h"
#include "oracles.hpp"
#include "textgraph/common/error.hpp"
#include "textgraph/metrics/metrics.hpp"
#include "textgraph/mstability/louvain.hpp"
#include "textgraph/mstability/markov.hpp"
#include "textgraph/mstability/scan.hpp"
#include "textgraph/synth/synth.hpp"

using namespace textgraph;
using namespace textgraph::mstability;

namespace {

Eigen::MatrixXd path3() {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1.0;
    a(1, 2) = a(2, 1) = 3.0;
    return a;
}

// Two cliques of `size` joined by one edge of weight `bridge`.
Eigen::MatrixXd two_cliques(Eigen::Index size, double bridge) {
    const Eigen::Index n = 2 * size;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
            if (i != j && (i < size) == (j < size)) a(i, j) = 1.0;
    a(size - 1, size) = a(size, size - 1) = bridge;
    return a;
}

Partition labels(std::vector<int> v) { return Partition::from_labels(std::span<const int>(v)); }

}  // namespace

TEST_CASE("partition enumeration counts Bell numbers") {
    const std::vector<std::size_t> bell{1, 2, 5, 15, 52, 203, 877, 4140};
    for (std::size_t n = 1; n <= 8; ++n) {
        std::size_t count = 0;
        oracle::for_each_partition(n, [&](const Partition&) { ++count; });
        CHECK(count == bell[n - 1]);
    }
}

TEST_CASE("stationary distribution examples") {
    Eigen::MatrixXd two(2, 2);
    two << 0, 2.5, 2.5, 0;
    CHECK(MarkovProcess(two).pi() == Eigen::Vector2d(0.5, 0.5));

    Eigen::MatrixXd tri = Eigen::MatrixXd::Ones(3, 3) - Eigen::MatrixXd::Identity(3, 3);
    CHECK(MarkovProcess(tri).pi().isApproxToConstant(1.0 / 3.0, 1e-15));

    const MarkovProcess p(path3());
    CHECK(p.pi()(0) == 1.0 / 8.0);
    CHECK(p.pi()(1) == 4.0 / 8.0);
    CHECK(p.pi()(2) == 3.0 / 8.0);

    Eigen::MatrixXd split = Eigen::MatrixXd::Zero(4, 4);
    split(0, 1) = split(1, 0) = split(2, 3) = split(3, 2) = 1.0;
    CHECK_THROWS_AS(MarkovProcess{split}, Disconnected);
}

TEST_CASE("laplacian and stationarity on random graphs") {
    Rng rng(201);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd a = oracle::random_adjacency(rng, 3 + rng.uniform_index(30), 0.2);
        const MarkovProcess p(a);
        const Eigen::MatrixXd l = p.laplacian();
        CHECK(l.rowwise().sum().cwiseAbs().maxCoeff() <= 1e-12);
        CHECK(std::abs(p.pi().sum() - 1.0) <= 1e-12);
        CHECK(p.pi().minCoeff() >= 0.0);
        const Eigen::MatrixXd walk = Eigen::MatrixXd::Identity(a.rows(), a.cols()) - l;
        CHECK((p.pi().transpose() * walk - p.pi().transpose()).cwiseAbs().maxCoeff() <= 1e-12);
    }
}

TEST_CASE("transition kernel examples") {
    Eigen::MatrixXd two(2, 2);
    two << 0, 1, 1, 0;
    const MarkovProcess p(two);
    CHECK(p.transition(0.0) == Eigen::MatrixXd::Identity(2, 2));
    // L = [[1,-1],[-1,1]] has eigenvalues 0 and 2
    const double e = std::exp(-2.0);
    const Eigen::MatrixXd p1 = transition_kernel(p, 1.0);
    CHECK(p1(0, 0) == doctest::Approx(0.5 * (1 + e)).epsilon(1e-14));
    CHECK(p1(0, 1) == doctest::Approx(0.5 * (1 - e)).epsilon(1e-14));
    CHECK(p1(1, 1) == doctest::Approx(0.5 * (1 + e)).epsilon(1e-14));

    const MarkovProcess path(path3());
    const Eigen::MatrixXd far = path.transition(1e6);
    for (Eigen::Index i = 0; i < 3; ++i) CHECK((far.row(i) - path.pi().transpose()).cwiseAbs().maxCoeff() <= 1e-6);
}

TEST_CASE("spectral kernel agrees with scaling and squaring") {
    Rng rng(203);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd a = oracle::random_adjacency(rng, 2 + rng.uniform_index(25), 0.3);
        const MarkovProcess spectral(a);
        const MarkovProcess squaring(a, MarkovProcess::Method::ScalingSquaring);
        REQUIRE(spectral.method() == MarkovProcess::Method::Spectral);
        for (double t : {0.01, 0.5, 3.0, 40.0}) {
            const Eigen::MatrixXd ref = oracle::kernel(a, t);
            CHECK((spectral.transition(t) - ref).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK((squaring.transition(t) - ref).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK((spectral.flow(t) - spectral.pi().asDiagonal() * ref).cwiseAbs().maxCoeff() <= 1e-10);
            const Eigen::MatrixXd b = spectral.pi().asDiagonal() * ref - spectral.pi() * spectral.pi().transpose();
            CHECK((spectral.autocovariance(t) - b).cwiseAbs().maxCoeff() <= 1e-10);
            CHECK((squaring.autocovariance(t) - b).cwiseAbs().maxCoeff() <= 1e-10);
        }
    }
}

TEST_CASE("extreme degree ratios fall back to scaling and squaring") {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(3, 3);
    a(0, 1) = a(1, 0) = 1e-10;
    a(1, 2) = a(2, 1) = 1.0;
    const MarkovProcess p(a);
    CHECK(p.method() == MarkovProcess::Method::ScalingSquaring);
    const Eigen::MatrixXd k = p.transition(2.0);
    CHECK((k.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
    CHECK((p.pi().transpose() * k - p.pi().transpose()).cwiseAbs().maxCoeff() <= 1e-9);
}

TEST_CASE("flow matrix is symmetric and conserves pi") {
    Rng rng(205);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd a = oracle::random_adjacency(rng, 2 + rng.uniform_index(40), 0.15);
        const MarkovProcess p(a);
        for (double t : {0.01, 1.0, 10.0, 100.0}) {
            const Eigen::MatrixXd k = p.transition(t);
            CHECK((k.rowwise().sum().array() - 1.0).abs().maxCoeff() <= 1e-9);
            CHECK(k.minCoeff() >= 0.0);
            CHECK((p.pi().transpose() * k - p.pi().transpose()).cwiseAbs().maxCoeff() <= 1e-9);
            const Eigen::MatrixXd pk = p.pi().asDiagonal() * k;
            CHECK((pk - pk.transpose()).cwiseAbs().maxCoeff() <= 1e-9);
        }
    }
}

TEST_CASE("clustered autocovariance examples") {
    Rng rng(207);
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd a = oracle::random_adjacency(rng, 2 + rng.uniform_index(20), 0.2);
        const MarkovProcess p(a);
        const auto n = p.size();
        for (double t : {0.1, 1.0, 10.0}) {
            const auto view = clustered_autocovariance(p, p.transition(t), Partition::single_cluster(n), t);
            CHECK(view.r.rows() == 1);
            CHECK(std::abs(markov_stability(view)) <= 1e-12);
        }
        const auto at_zero = clustered_autocovariance(p, p.transition(0.0), Partition::singletons(n));
        const Eigen::MatrixXd expected = Eigen::MatrixXd(p.pi().asDiagonal()) - p.pi() * p.pi().transpose();
        CHECK((at_zero.r - expected).cwiseAbs().maxCoeff() <= 1e-15);
        CHECK(markov_stability(at_zero) == doctest::Approx(1.0 - p.pi().squaredNorm()).epsilon(1e-14));
    }

    // barbell: two 2-cliques joined by a weak edge
    Eigen::MatrixXd bar = Eigen::MatrixXd::Zero(4, 4);
    bar(0, 1) = bar(1, 0) = bar(2, 3) = bar(3, 2) = 1.0;
    bar(1, 2) = bar(2, 1) = 0.2;
    const MarkovProcess bp(bar);
    const Partition halves = labels({0, 0, 1, 1});
    const auto view = clustered_autocovariance(bp, bp.transition(1.0), halves, 1.0);
    CHECK((view.r - oracle::autocovariance(bar, 1.0, halves)).cwiseAbs().maxCoeff() <= 1e-13);
    CHECK(view.r.trace() <= 1.0);
}

TEST_CASE("stability is invariant under cluster relabeling") {
    Rng rng(209);
    const Eigen::MatrixXd a = oracle::random_adjacency(rng, 12, 0.3);
    const MarkovProcess p(a);
    const Eigen::MatrixXd k = p.transition(0.7);
    std::vector<int> raw(12);
    for (auto& x : raw) x = static_cast<int>(rng.uniform_index(4));
    std::vector<int> relabelled(raw);
    for (auto& x : relabelled) x = 3 - x;
    CHECK(markov_stability(clustered_autocovariance(p, k, labels(raw))) ==
          doctest::Approx(markov_stability(clustered_autocovariance(p, k, labels(relabelled)))).epsilon(1e-14));
}

TEST_CASE("stability agrees with a random-walk simulation") {
    // r = sum over clusters of P(X_0 in c, X_t in c) - P(X_0 in c)^2 with X_0 ~ pi
    Rng rng(211);
    const Eigen::MatrixXd a = two_cliques(3, 0.3);
    const MarkovProcess p(a);
    const Partition halves = labels({0, 0, 0, 1, 1, 1});
    const auto adj = simgraph::SparseGraph(6, [&] {
        std::vector<simgraph::Edge> e;
        for (std::size_t i = 0; i < 6; ++i)
            for (std::size_t j = i + 1; j < 6; ++j)
                if (a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) > 0)
                    e.push_back({i, j, a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
        return e;
    }()).adjacency_lists();

    for (double t : {0.3, 1.5, 4.0}) {
        const std::size_t samples = 200000;
        std::size_t same = 0;
        for (std::size_t s = 0; s < samples; ++s) {
            double u = rng.uniform01();
            std::size_t v = 0;
            while (v + 1 < 6 && u >= p.pi()(static_cast<Eigen::Index>(v))) u -= p.pi()(static_cast<Eigen::Index>(v++));
            const std::size_t start = v;
            double clock = rng.exponential(1.0);
            while (clock < t) {
                double pick = rng.uniform01() * p.degrees()(static_cast<Eigen::Index>(v));
                std::size_t next = adj[v].back().first;
                for (const auto& [j, w] : adj[v]) {
                    if (pick < w) {
                        next = j;
                        break;
                    }
                    pick -= w;
                }
                v = next;
                clock += rng.exponential(1.0);
            }
            same += halves[start] == halves[v];
        }
        const double q = static_cast<double>(same) / samples;
        const double estimate = q - 0.5;  // cluster masses are 1/2 each
        const double se = std::sqrt(q * (1 - q) / samples);
        const double exact = markov_stability(clustered_autocovariance(p, p.transition(t), halves, t));
        CHECK(std::abs(estimate - exact) <= 3.0 * se);
    }
}

TEST_CASE("planted bipartition is the unique optimum at moderate time") {
    const Eigen::MatrixXd a = two_cliques(4, 0.1);
    const oracle::Optimum best = oracle::best_partition(a, 1.0);
    CHECK(best.partition == labels({0, 0, 0, 0, 1, 1, 1, 1}));
    double runner_up = -1.0;
    oracle::for_each_partition(8, [&](const Partition& p) {
        if (p != best.partition) runner_up = std::max(runner_up, oracle::stability(a, 1.0, p));
    });
    CHECK(best.value > runner_up);
}

TEST_CASE("singletons are optimal at small time") {
    Rng rng(213);
    for (int trial = 0; trial < 10; ++trial) {
        const Eigen::MatrixXd a = oracle::random_adjacency(rng, 3 + rng.uniform_index(5), 0.4);
        const oracle::Optimum best = oracle::best_partition(a, 1e-3);
        CHECK(best.partition == Partition::singletons(static_cast<std::size_t>(a.rows())));
    }
}

TEST_CASE("louvain examples") {
    const Eigen::MatrixXd a = two_cliques(4, 0.1);
    const MarkovProcess p(a);
    const LouvainResult r = louvain_optimize(p, 1.0, 7);
    CHECK(r.partition == labels({0, 0, 0, 0, 1, 1, 1, 1}));
    CHECK(r.stability == doctest::Approx(oracle::stability(a, 1.0, r.partition)).epsilon(1e-12));
    CHECK(std::abs(r.stability - markov_stability(clustered_autocovariance(p, p.transition(1.0), r.partition))) <= 1e-12);

    const LouvainResult again = louvain_optimize(p, 1.0, 7);
    CHECK(again.partition == r.partition);
    CHECK(again.stability == r.stability);
    CHECK_THROWS_AS(louvain_optimize(p, 0.0, 1), InvalidArgument);
}

TEST_CASE("louvain reaches the exhaustive optimum on small graphs") {
    Rng rng(215);
    std::size_t trials = 0, matched = 0;
    for (int g = 0; g < 12; ++g) {
        const std::size_t n = 4 + rng.uniform_index(5);
        const Eigen::MatrixXd a = oracle::random_adjacency(rng, n, 0.35);
        const MarkovProcess p(a);
        for (double t : {0.1, 1.0, 10.0}) {
            const oracle::Optimum best = oracle::best_partition(a, t);
            const StabilityProblem problem(p, t);
            double found = -1.0;
            for (std::uint64_t seed = 0; seed < 100; ++seed) {
                const LouvainResult r = louvain_optimize(problem, seed);
                CHECK(std::abs(r.stability - oracle::stability(a, t, r.partition)) <= 1e-12);
                found = std::max(found, r.stability);
            }
            ++trials;
            CHECK(found <= best.value + 1e-12);
            matched += std::abs(found - best.value) <= 1e-12;
        }
    }
    CHECK(matched * 100 >= trials * 95);
}

TEST_CASE("louvain returns one cluster once the flow has mixed") {
    Rng rng(217);
    for (int g = 0; g < 10; ++g) {
        const Eigen::MatrixXd a = oracle::random_adjacency(rng, 4 + rng.uniform_index(5), 0.6);
        const oracle::Optimum best = oracle::best_partition(a, 100.0);
        if (best.value > 1e-12) continue;  // slow-mixing graph: structure survives at t = 100
        const LouvainResult r = louvain_optimize(MarkovProcess(a), 100.0, 3);
        CHECK(r.partition.num_clusters() == 1);
        CHECK(r.stability >= best.value - 1e-12);
    }
}

TEST_CASE("time grids") {
    const auto g = log_time_grid(0.01, 100.0, 400);
    CHECK(g.size() == 400);
    CHECK(g.front() == 0.01);
    CHECK(g.back() == 100.0);
    CHECK(std::is_sorted(g.begin(), g.end()));
    CHECK(std::log10(g[1] / g[0]) == doctest::Approx(4.0 / 399.0));

    const auto lin = linear_time_grid(0.01, 100.0, 0.01);
    CHECK(lin.size() == 10000);
    CHECK(lin[99] == doctest::Approx(1.0));

    ScanConfig bad;
    bad.times = {1.0, 0.5};
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
    bad.times = {0.5, 1.0};
    bad.keep_top = 600;
    CHECK_THROWS_AS(validate(bad), InvalidArgument);
}

TEST_CASE("scan recovers the planted levels") {
    const auto planted = synth::planted_hierarchy();
    const MarkovProcess p(planted.graph);
    ScanConfig cfg;
    cfg.times = {0.05, 0.3, 0.45, 2.0, 4.0};
    cfg.runs_per_time = 40;
    cfg.keep_top = 10;
    cfg.seed = 5;
    const ScanResult result = scan(p, cfg);
    REQUIRE(result.points.size() == 5);
    CHECK(result.points[0].best == Partition::singletons(64));
    CHECK(result.points[1].best == planted.fine);
    CHECK(result.points[2].best == planted.fine);
    CHECK(result.points[3].best == planted.coarse);
    CHECK(result.points[4].best == planted.coarse);
    for (const ScanPoint& pt : result.points) CHECK(pt.vi_ensemble <= 1e-12);

    CHECK(result.vi_matrix == result.vi_matrix.transpose());
    CHECK(result.vi_matrix.diagonal().isZero(0.0));
    CHECK(result.vi_matrix(1, 2) == 0.0);
    CHECK(result.vi_matrix(1, 3) == doctest::Approx(std::log(4.0)));

    cfg.workers = 3;
    const ScanResult threaded = scan(p, cfg);
    CHECK(format_scan_jsonl(threaded) == format_scan_jsonl(result));
    CHECK(format_matrix(threaded.vi_matrix) == format_matrix(result.vi_matrix));

    const ScanResult back = parse_scan(format_scan_jsonl(result), format_matrix(result.vi_matrix));
    CHECK(format_scan_jsonl(back) == format_scan_jsonl(result));
    CHECK(back.vi_matrix == result.vi_matrix);
}

TEST_CASE("scan on a single clique") {
    const std::size_t n = 10;
    Eigen::MatrixXd a = Eigen::MatrixXd::Ones(n, n) - Eigen::MatrixXd::Identity(n, n);
    const MarkovProcess p(a);
    ScanConfig cfg;
    cfg.times = {1e-3, 40.0, 60.0, 100.0};
    cfg.runs_per_time = 20;
    cfg.keep_top = 5;
    const ScanResult result = scan(p, cfg);
    CHECK(result.points[0].best == Partition::singletons(n));
    for (std::size_t k = 1; k < result.points.size(); ++k) {
        CHECK(result.points[k].best.num_clusters() == 1);
        CHECK(result.points[k].vi_ensemble == 0.0);
    }
}

TEST_CASE("mean pairwise vi") {
    const Partition a = labels({0, 0, 1, 1});
    const Partition b = labels({0, 1, 0, 1});
    CHECK(mean_pairwise_vi({a, a, a}) == 0.0);
    CHECK(mean_pairwise_vi({a}) == 0.0);
    // pairs: (a,a) 0, (a,b) and (a,b) 2 ln 2
    CHECK(mean_pairwise_vi({a, a, b}) == doctest::Approx(2.0 / 3.0 * 2.0 * std::log(2.0)));
}
