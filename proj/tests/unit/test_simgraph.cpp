#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "textgraph/common/error.hpp"
#include "textgraph/common/random.hpp"
#include "textgraph/simgraph/simgraph.hpp"

using namespace textgraph;
using namespace textgraph::simgraph;

namespace {

using EdgeSet = std::set<std::pair<std::size_t, std::size_t>>;

EdgeSet edge_set(const std::vector<Edge>& edges) {
    EdgeSet s;
    for (const Edge& e : edges) s.emplace(e.i, e.j);
    return s;
}

Eigen::MatrixXd random_distances(Rng& rng, std::size_t n, int levels = 0) {
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < d.rows(); ++i) {
        for (Eigen::Index j = i + 1; j < d.rows(); ++j) {
            // levels > 0 draws from a small set so that ties are common
            const double v = levels > 0 ? static_cast<double>(1 + rng.uniform_index(levels)) / levels : rng.uniform01();
            d(i, j) = d(j, i) = v;
        }
    }
    return d;
}

// Textbook Kruskal with union-find over all pairs sorted by (distance, i, j).
std::vector<Edge> kruskal(const Eigen::MatrixXd& d) {
    const auto n = static_cast<std::size_t>(d.rows());
    std::vector<Edge> all;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) all.push_back({i, j, d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j))});
    std::sort(all.begin(), all.end(), [](const Edge& a, const Edge& b) {
        return std::tie(a.weight, a.i, a.j) < std::tie(b.weight, b.i, b.j);
    });
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    };
    std::vector<Edge> tree;
    for (const Edge& e : all) {
        const auto a = find(e.i), b = find(e.j);
        if (a != b) {
            parent[a] = b;
            tree.push_back(e);
        }
    }
    return tree;
}

bool spans(std::size_t n, const std::vector<std::pair<std::size_t, std::size_t>>& edges) {
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](std::size_t x) {
        while (parent[x] != x) x = parent[x];
        return x;
    };
    std::size_t merges = 0;
    for (const auto& [i, j] : edges) {
        const auto a = find(i), b = find(j);
        if (a != b) {
            parent[a] = b;
            ++merges;
        }
    }
    return merges + 1 == n;
}

// Minimum weight over every (N-1)-subset of pairs that spans the graph.
double brute_force_mst_weight(const Eigen::MatrixXd& d, std::size_t* tree_count = nullptr) {
    const auto n = static_cast<std::size_t>(d.rows());
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    double best = std::numeric_limits<double>::infinity();
    std::size_t trees = 0;
    for (std::uint32_t mask = 0; mask < (1u << pairs.size()); ++mask) {
        if (static_cast<std::size_t>(__builtin_popcount(mask)) != n - 1) continue;
        std::vector<std::pair<std::size_t, std::size_t>> chosen;
        double w = 0.0;
        for (std::size_t b = 0; b < pairs.size(); ++b) {
            if (mask & (1u << b)) {
                chosen.push_back(pairs[b]);
                w += d(static_cast<Eigen::Index>(pairs[b].first), static_cast<Eigen::Index>(pairs[b].second));
            }
        }
        if (!spans(n, chosen)) continue;
        ++trees;
        best = std::min(best, w);
    }
    if (tree_count) *tree_count = trees;
    return best;
}

double total(const std::vector<Edge>& edges) {
    double w = 0.0;
    for (const Edge& e : edges) w += e.weight;
    return w;
}

}  // namespace

TEST_CASE("cosine similarity examples") {
    Eigen::MatrixXd rows(4, 2);
    rows << 1, 0, 0, 1, 1, 1, 2, 0;
    const Eigen::MatrixXd s = cosine_similarity_matrix(rows);
    CHECK(s(0, 1) == 0.0);
    CHECK(s(0, 3) == 1.0);
    CHECK(s(2, 0) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-15));
    CHECK(s.diagonal().isOnes());
    CHECK(s == s.transpose());
}

TEST_CASE("normalize_similarity examples") {
    Eigen::MatrixXd s(3, 3);
    s << 1, 0.5, 0.0, 0.5, 1, 0.5, 0.0, 0.5, 1;
    const SimilarityMatrix m = normalize_similarity(s);
    CHECK(m.s_hat(0, 1) == 0.5);
    CHECK(m.s_hat(0, 2) == 0.0);
    CHECK(m.s_hat(1, 2) == 0.5);
    CHECK(m.s_hat.diagonal().isOnes());

    Eigen::MatrixXd uniform = Eigen::MatrixXd::Constant(3, 3, 0.8);
    uniform.diagonal().setOnes();
    const SimilarityMatrix u = normalize_similarity(uniform);
    CHECK(u.d_hat(0, 1) == 1.0);
    CHECK(u.s_hat(0, 1) == 0.0);

    CHECK_THROWS_AS(normalize_similarity(Eigen::MatrixXd::Ones(3, 3)), DegenerateCorpus);

    Eigen::MatrixXd same(3, 2);
    same << 1, 2, 2, 4, 3, 6;
    CHECK_THROWS_AS(normalize_similarity(cosine_similarity_matrix(same)), DegenerateCorpus);
}

TEST_CASE("similarity matrix invariants on random embeddings") {
    Rng rng(17);
    for (int trial = 0; trial < 10; ++trial) {
        Eigen::MatrixXd rows(30, 5);
        for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = rng.normal();
        const SimilarityMatrix m = normalize_similarity(cosine_similarity_matrix(rows));
        CHECK(m.s_hat == m.s_hat.transpose());
        CHECK(m.s_hat.minCoeff() == 0.0);
        CHECK(m.s_hat.maxCoeff() == 1.0);
        CHECK(m.s_hat.diagonal().isOnes());
        CHECK((m.s_hat + m.d_hat - Eigen::MatrixXd::Ones(30, 30)).cwiseAbs().maxCoeff() <= 1e-15);
    }
}

TEST_CASE("minimum spanning tree examples") {
    Eigen::MatrixXd d(3, 3);
    d << 0, 0.1, 0.2, 0.1, 0, 0.9, 0.2, 0.9, 0;
    CHECK(edge_set(minimum_spanning_tree(d)) == EdgeSet{{0, 1}, {0, 2}});

    // path 0-1-2-3 is cheap, every other pair expensive
    Eigen::MatrixXd path(4, 4);
    path << 0, 0.1, 0.8, 0.9, 0.1, 0, 0.2, 0.7, 0.8, 0.2, 0, 0.3, 0.9, 0.7, 0.3, 0;
    std::size_t trees = 0;
    const double best = brute_force_mst_weight(path, &trees);
    CHECK(trees == 16);
    const auto tree = minimum_spanning_tree(path);
    CHECK(edge_set(tree) == EdgeSet{{0, 1}, {1, 2}, {2, 3}});
    CHECK(total(tree) == doctest::Approx(best));

    Eigen::MatrixXd flat = Eigen::MatrixXd::Constant(6, 6, 0.5);
    flat.diagonal().setZero();
    CHECK(edge_set(minimum_spanning_tree(flat)) == EdgeSet{{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}});
}

TEST_CASE("minimum spanning tree matches Kruskal and brute force") {
    Rng rng(23);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng.uniform_index(5);
        const Eigen::MatrixXd d = random_distances(rng, n, trial % 2 == 0 ? 3 : 0);
        const auto tree = minimum_spanning_tree(d);
        REQUIRE(tree.size() == n - 1);
        CHECK(edge_set(tree) == edge_set(kruskal(d)));
        CHECK(total(tree) == doctest::Approx(brute_force_mst_weight(d)).epsilon(1e-12));
    }
    for (int trial = 0; trial < 20; ++trial) {
        const Eigen::MatrixXd d = random_distances(rng, 60, trial % 2 == 0 ? 4 : 0);
        CHECK(edge_set(minimum_spanning_tree(d)) == edge_set(kruskal(d)));
    }
}

TEST_CASE("mst_knn_graph examples") {
    Rng rng(29);
    Eigen::MatrixXd rows(5, 3);
    for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = rng.normal();
    const SimilarityMatrix sim = normalize_similarity(cosine_similarity_matrix(rows));

    const SparseGraph g0 = mst_knn_graph(sim, 0);
    CHECK(g0.edges().size() == 4);
    CHECK(edge_set(g0.edges()) == edge_set(minimum_spanning_tree(sim.d_hat)));

    const SparseGraph full = mst_knn_graph(sim, 4);
    CHECK(full.edges().size() == 10);
    for (const Edge& e : full.edges()) {
        CHECK(e.weight == std::max(sim.s_hat(static_cast<Eigen::Index>(e.i), static_cast<Eigen::Index>(e.j)), kMinEdgeWeight));
    }

    // k = 2 by listing every node's two nearest others
    EdgeSet expected = edge_set(minimum_spanning_tree(sim.d_hat));
    for (std::size_t i = 0; i < 5; ++i) {
        std::vector<std::pair<double, std::size_t>> order;
        for (std::size_t j = 0; j < 5; ++j)
            if (j != i) order.emplace_back(sim.d_hat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)), j);
        std::sort(order.begin(), order.end());
        for (int r = 0; r < 2; ++r) expected.emplace(std::min(i, order[r].second), std::max(i, order[r].second));
    }
    CHECK(edge_set(mst_knn_graph(sim, 2).edges()) == expected);
}

TEST_CASE("knn ties go to the smaller index") {
    Eigen::MatrixXd d = Eigen::MatrixXd::Constant(5, 5, 0.5);
    d.diagonal().setZero();
    const auto nn = nearest_neighbours(d, 2);
    CHECK(nn[0] == std::vector<std::size_t>{1, 2});
    CHECK(nn[3] == std::vector<std::size_t>{0, 1});
}

TEST_CASE("graph properties on random embeddings") {
    Rng rng(31);
    for (int trial = 0; trial < 5; ++trial) {
        Eigen::MatrixXd rows(80, 6);
        for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = rng.normal();
        const SimilarityMatrix sim = normalize_similarity(cosine_similarity_matrix(rows));
        EdgeSet previous;
        for (std::size_t k = 0; k <= 20; ++k) {
            const SparseGraph g = mst_knn_graph(sim, k);
            CHECK(g.is_connected());
            const EdgeSet current = edge_set(g.edges());
            CHECK(std::includes(current.begin(), current.end(), previous.begin(), previous.end()));
            for (const Edge& e : g.edges()) CHECK((e.weight > 0.0 && e.weight <= 1.0));
            previous = current;
        }

        const Eigen::MatrixXd scaled = rows * 37.5;
        const SimilarityMatrix sim2 = normalize_similarity(cosine_similarity_matrix(scaled));
        CHECK(edge_set(mst_knn_graph(sim2, 13).edges()) == edge_set(mst_knn_graph(sim, 13).edges()));
    }
}

TEST_CASE("cosine similarity does not depend on worker count") {
    Rng rng(37);
    Eigen::MatrixXd rows(50, 8);
    for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = rng.normal();
    CHECK(cosine_similarity_matrix(rows, 1) == cosine_similarity_matrix(rows, 4));
}

TEST_CASE("edge list round trip") {
    Rng rng(41);
    Eigen::MatrixXd rows(12, 4);
    for (Eigen::Index i = 0; i < rows.size(); ++i) rows.data()[i] = rng.normal();
    const corpus::EmbeddingMatrix emb(rows, {"a", "b", "c", "d", "e", "f", "g", "h", "i", "j", "k", "l"},
                                      corpus::EmbeddingSource::External);
    const SparseGraph g = build_graph(emb, 3);
    const SparseGraph back = parse_edge_list(format_edge_list(g), g.node_ids());
    CHECK(back.edges() == g.edges());
    CHECK(back.node_ids() == g.node_ids());
    CHECK(back.degrees() == g.degrees());

    CHECK_THROWS_AS(parse_edge_list("0 0 1.0\n"), ParseError);
    CHECK_THROWS_AS(parse_edge_list("0 1\n"), ParseError);
    const SparseGraph dup = parse_edge_list("0 1 0.5\n1 0 0.25\n");
    REQUIRE(dup.edges().size() == 1);
    CHECK(dup.edges()[0].weight == 0.75);
}
