// Acceptance suite: one line per criterion, exit status 1 if any fails.
// Usage: acceptance [criterion numbers...]   (default: all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "oracles.hpp"
#include "textgraph/common/error.hpp"
#include "textgraph/common/io.hpp"
#include "textgraph/common/random.hpp"
#include "textgraph/harmclf/classify.hpp"
#include "textgraph/metrics/metrics.hpp"
#include "textgraph/mstability/louvain.hpp"
#include "textgraph/mstability/markov.hpp"
#include "textgraph/mstability/scan.hpp"
#include "textgraph/pipeline/pipeline.hpp"
#include "textgraph/pipeline/synth_output.hpp"
#include "textgraph/scaleselect/scaleselect.hpp"
#include "textgraph/simgraph/simgraph.hpp"
#include "textgraph/synth/synth.hpp"

using namespace textgraph;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tolerances and budgets.
constexpr double kKernelTolerance = 1e-9;
constexpr double kKernelBudget = 10.0;
constexpr double kOptimumTolerance = 1e-12;
constexpr double kOptimumShare = 0.95;
constexpr double kOptimumBudget = 300.0;
constexpr double kZeroTolerance = 1e-12;
constexpr double kPlateauVi = 0.01;
constexpr double kPlantedBudget = 120.0;
constexpr double kGraphBudget = 30.0;
constexpr double kMetricTolerance = 1e-12;
constexpr double kFloorF1 = 0.95;
constexpr double kChanceF1 = 0.2;
constexpr double kChanceBand = 0.05;
constexpr double kClassifierBudget = 60.0;
constexpr double kAugmentationGain = 0.05;
constexpr int kAugmentationWins = 9;

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("textgraph-acceptance-" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

json read_json(const fs::path& p) { return json::parse(read_text_file(p)); }

// Graphs shared by the kernel and single-cluster checks.
std::vector<simgraph::SparseGraph> kernel_graphs() {
    std::vector<simgraph::SparseGraph> out;
    Rng rng(101);
    for (int g = 0; g < 50; ++g) {
        const std::size_t n = 2 + rng.uniform_index(49);
        out.push_back(synth::random_connected_graph(n, rng.uniform01() * 0.3, derive_seed(101, g)));
    }
    return out;
}

const std::vector<double> kKernelTimes{0.01, 1.0, 10.0, 100.0};
const std::vector<double> kOptimumTimes{0.1, 1.0, 10.0};

Eigen::MatrixXd small_instance(Rng& rng) {
    const std::size_t n = 2 + rng.uniform_index(7);
    return oracle::random_adjacency(rng, n, 0.2 + 0.5 * rng.uniform01());
}

Outcome kernel_correctness() {
    Stopwatch clock;
    double row_error = 0.0, stationary_error = 0.0;
    std::size_t kernels = 0;
    for (const auto& g : kernel_graphs()) {
        for (const auto method : {mstability::MarkovProcess::Method::Spectral,
                                  mstability::MarkovProcess::Method::ScalingSquaring}) {
            const mstability::MarkovProcess process(g, method);
            for (const double t : kKernelTimes) {
                const Eigen::MatrixXd p = process.transition(t);
                row_error = std::max(row_error, (p.rowwise().sum().array() - 1.0).abs().maxCoeff());
                stationary_error = std::max(
                    stationary_error, (process.pi().transpose() * p - process.pi().transpose()).cwiseAbs().maxCoeff());
                ++kernels;
            }
        }
    }
    const double s = clock.seconds();
    return {row_error <= kKernelTolerance && stationary_error <= kKernelTolerance && s < kKernelBudget,
            fmt("%zu kernels on 50 graphs, max |row sum - 1| %.1e, max |pi P - pi| %.1e, %.1f s", kernels, row_error,
                stationary_error, s)};
}

Outcome optimum_oracle() {
    Stopwatch clock;
    Rng rng(202);
    std::size_t trials = 0, matched = 0, exceeded = 0;
    double worst_gap = 0.0;
    for (int instance = 0; instance < 100; ++instance) {
        const Eigen::MatrixXd a = small_instance(rng);
        const mstability::MarkovProcess process(a);
        for (const double t : kOptimumTimes) {
            const oracle::Optimum best = oracle::best_partition(a, t);
            const mstability::StabilityProblem problem(process, t);
            double found = -std::numeric_limits<double>::infinity();
            for (std::uint64_t seed = 0; seed < 500; ++seed)
                found = std::max(found, mstability::louvain_optimize(problem, seed).stability);
            ++trials;
            if (found > best.value + kOptimumTolerance) ++exceeded;
            if (std::abs(found - best.value) <= kOptimumTolerance) ++matched;
            worst_gap = std::max(worst_gap, best.value - found);
        }
    }
    const double s = clock.seconds();
    const double share = static_cast<double>(matched) / static_cast<double>(trials);
    return {share >= kOptimumShare && exceeded == 0 && s < kOptimumBudget,
            fmt("optimum matched in %zu/%zu (instance, t) pairs, exceeded %zu times, largest shortfall %.1e, %.1f s",
                matched, trials, exceeded, worst_gap, s)};
}

Outcome single_cluster_zero() {
    double worst = 0.0;
    std::size_t checks = 0;
    auto check = [&](const mstability::MarkovProcess& process, const std::vector<double>& times) {
        const Partition one = Partition::single_cluster(process.size());
        for (const double t : times) {
            const Eigen::MatrixXd p = process.transition(t);
            worst = std::max(worst, std::abs(mstability::markov_stability(
                                        mstability::clustered_autocovariance(process, p, one, t))));
            worst = std::max(worst, std::abs(mstability::StabilityProblem(process, t).stability(one)));
            ++checks;
        }
    };
    for (const auto& g : kernel_graphs()) check(mstability::MarkovProcess(g), kKernelTimes);
    Rng rng(202);
    for (int instance = 0; instance < 100; ++instance) check(mstability::MarkovProcess(small_instance(rng)), kOptimumTimes);
    return {worst <= kZeroTolerance, fmt("max |r(t, one cluster)| %.1e over %zu (graph, t) pairs", worst, checks)};
}

Outcome planted_recovery() {
    Stopwatch clock;
    const synth::PlantedGraph planted = synth::planted_hierarchy({});
    const mstability::MarkovProcess process(planted.graph);
    mstability::ScanConfig cfg;
    cfg.times = mstability::log_time_grid(0.01, 100.0, 200);
    cfg.runs_per_time = 500;
    cfg.keep_top = 50;
    cfg.seed = 0;
    cfg.workers = 0;
    const mstability::ScanResult scan = mstability::scan(process, cfg);
    const auto scales =
        scaleselect::find_robust_scales(scan, scaleselect::resolve({}, process.size(), cfg.times.size()));
    bool fine = false, coarse = false;
    std::string found;
    for (const auto& s : scales) {
        double plateau_vi = 0.0;
        for (std::size_t i = s.lo_index; i <= s.hi_index; ++i) plateau_vi = std::max(plateau_vi, scan.points[i].vi_ensemble);
        const double nmi_fine = metrics::nmi(s.partition, planted.fine);
        const double nmi_coarse = metrics::nmi(s.partition, planted.coarse);
        fine |= nmi_fine == 1.0 && plateau_vi < kPlateauVi;
        coarse |= nmi_coarse == 1.0 && plateau_vi < kPlateauVi;
        found += fmt(" [%zu clusters, t %.3g..%.3g, NMI fine %.3f coarse %.3f, max VI(t) %.1e]",
                     s.partition.num_clusters(), s.t_lo, s.t_hi, nmi_fine, nmi_coarse, plateau_vi);
    }
    const double s = clock.seconds();
    return {fine && coarse && s < kPlantedBudget, fmt("%zu scale(s):", scales.size()) + found + fmt(", %.1f s", s)};
}

Outcome mst_knn() {
    Stopwatch clock;
    Rng rng(505);
    std::size_t graphs = 0, disconnected = 0, not_nested = 0, bad_tree = 0;
    auto edge_set = [](const simgraph::SparseGraph& g) {
        std::set<std::pair<std::size_t, std::size_t>> out;
        for (const auto& e : g.edges()) out.emplace(std::min(e.i, e.j), std::max(e.i, e.j));
        return out;
    };
    for (int set = 0; set < 20; ++set) {
        const std::size_t n = 20 + rng.uniform_index(481);
        Eigen::MatrixXd x(static_cast<Eigen::Index>(n), 32);
        for (Eigen::Index i = 0; i < x.rows(); ++i)
            for (Eigen::Index j = 0; j < x.cols(); ++j) x(i, j) = rng.normal();
        std::vector<std::string> ids;
        for (std::size_t i = 0; i < n; ++i) ids.push_back("d" + std::to_string(i));
        const corpus::EmbeddingMatrix m(x, ids, corpus::EmbeddingSource::External);
        for (const std::size_t k : {0, 5, 13, 50}) {
            const auto g = simgraph::build_graph(m, k);
            const auto bigger = simgraph::build_graph(m, k + 5);
            graphs += 2;
            disconnected += !g.is_connected() + !bigger.is_connected();
            const auto a = edge_set(g), b = edge_set(bigger);
            not_nested += !std::includes(b.begin(), b.end(), a.begin(), a.end());
            if (k == 0) bad_tree += g.edges().size() != n - 1;
        }
    }
    const double s = clock.seconds();
    return {disconnected == 0 && not_nested == 0 && bad_tree == 0 && s < kGraphBudget,
            fmt("%zu graphs: %zu disconnected, %zu k/k+5 pairs not nested, %zu k=0 graphs without N-1 edges, %.1f s",
                graphs, disconnected, not_nested, bad_tree, s)};
}

// Exact VI and NMI from the integer contingency table, in long double.
struct Reference {
    long double vi = 0, nmi = 0;
};

Reference reference_metrics(const Partition& a, const Partition& b) {
    std::map<std::pair<std::size_t, std::size_t>, long> joint;
    std::map<std::size_t, long> ra, rb;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++joint[{a[i], b[i]}];
        ++ra[a[i]];
        ++rb[b[i]];
    }
    const long double n = static_cast<long double>(a.size());
    long double ha = 0, hb = 0, mi = 0;
    for (const auto& [c, k] : ra) ha -= k / n * std::log(k / n);
    for (const auto& [c, k] : rb) hb -= k / n * std::log(k / n);
    for (const auto& [cd, k] : joint)
        mi += k / n * std::log(k * n / (static_cast<long double>(ra[cd.first]) * rb[cd.second]));
    Reference r;
    r.vi = ha + hb - 2 * mi;
    r.nmi = ha > 0 && hb > 0 ? mi / std::sqrt(ha * hb) : 0;
    return r;
}

Outcome metric_axioms() {
    Rng rng(606);
    const std::size_t n = 100;
    auto random_partition = [&](std::size_t max_clusters) {
        const std::size_t c = 1 + rng.uniform_index(max_clusters);
        std::vector<int> labels(n);
        for (auto& l : labels) l = static_cast<int>(rng.uniform_index(c));
        return Partition::from_labels(std::span<const int>(labels));
    };
    auto relabel = [&](const Partition& p) {
        std::vector<int> perm(p.num_clusters());
        for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = static_cast<int>(i * 7 + 3);
        rng.shuffle(std::span(perm));
        std::vector<int> labels;
        for (std::size_t i = 0; i < p.size(); ++i) labels.push_back(perm[p[i]]);
        return Partition::from_labels(std::span<const int>(labels));
    };
    std::size_t failures = 0, triples = 0;
    double worst_reference = 0.0, worst_triangle = 0.0;
    for (int trial = 0; trial < 1000; ++trial, ++triples) {
        // every tenth triple repeats a partition so the zero and one cases are exercised
        const Partition a = random_partition(8);
        const Partition b = trial % 10 == 0 ? relabel(a) : random_partition(8);
        const Partition c = random_partition(8);
        const double ab = metrics::variation_of_information(a, b), ba = metrics::variation_of_information(b, a);
        const double bc = metrics::variation_of_information(b, c), ac = metrics::variation_of_information(a, c);
        failures += ab != ba;
        failures += metrics::variation_of_information(a, a) != 0.0;
        failures += (a == b) != (ab <= kMetricTolerance);
        worst_triangle = std::max(worst_triangle, ac - (ab + bc));
        failures += ac > ab + bc + kMetricTolerance;
        const Reference ref = reference_metrics(a, b);
        worst_reference = std::max(worst_reference, static_cast<double>(std::abs(ref.vi - ab)));
        if (a.num_clusters() > 1 && b.num_clusters() > 1) {
            const double nmi = metrics::nmi(a, b);
            failures += nmi < 0.0 || nmi > 1.0;
            failures += (a == b) != (std::abs(nmi - 1.0) <= kMetricTolerance);
            worst_reference = std::max(worst_reference, static_cast<double>(std::abs(ref.nmi - nmi)));
        }
    }
    return {failures == 0 && worst_reference <= kMetricTolerance,
            fmt("%zu triples (N=100): %zu axiom violations, max excess in triangle inequality %.1e, max deviation "
                "from exact contingency values %.1e",
                triples, failures, worst_triangle, worst_reference)};
}

Outcome pmi_sanity() {
    synth::TopicCorpusSpec spec;
    spec.topics = 2;
    spec.documents_per_topic = 100;
    spec.leak_rate = 0.05;
    const synth::TopicCorpus tc = synth::topic_corpus(spec, 707);
    const double planted = metrics::pmi_partition(tc.topics, tc.records, 10).pmi_hat;
    Rng rng(708);
    int wins = 0;
    double best_random = -std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<int> labels(tc.records.size());
        do {
            for (auto& l : labels) l = static_cast<int>(rng.uniform_index(2));
        } while (std::count(labels.begin(), labels.end(), 0) == 0 || std::count(labels.begin(), labels.end(), 1) == 0);
        const double v =
            metrics::pmi_partition(Partition::from_labels(std::span<const int>(labels)), tc.records, 10).pmi_hat;
        wins += planted > v;
        best_random = std::max(best_random, v);
    }
    return {wins == 100, fmt("planted PMI-hat %.4f beats %d/100 random 2-way partitions (best random %.4f)", planted,
                             wins, best_random)};
}

// Synthetic topic inputs with the scan shortened for a quick run.
fs::path topic_config(const fs::path& dir, std::uint64_t seed, const std::function<void(json&)>& edit) {
    pipeline::write_synthetic_inputs(dir, seed);
    const fs::path path = dir / "topics" / "config.json";
    json j = read_json(path);
    edit(j);
    write_text_file(path, j.dump(2));
    return path;
}

Outcome source_comparison() {
    const fs::path dir = scratch("comparison");
    const fs::path config = topic_config(dir, 0, [](json& j) {
        j["scan"] = {{"grid", {{"type", "log"}, {"lo", 0.1}, {"hi", 10.0}, {"points", 10}}}, {"runs", 5}, {"keep", 3}};
        j.erase("classify");
    });
    pipeline::Pipeline p(pipeline::load_config(config), false);
    p.run("all");
    const json cmp = read_json(p.root() / "evaluate/comparison.json");
    const auto tfidf = mstability::parse_scan(read_text_file(p.root() / "scan/tfidf/scan.jsonl"),
                                              read_text_file(p.root() / "scan/tfidf/vi_matrix.txt"));
    const auto external = mstability::parse_scan(read_text_file(p.root() / "scan/external/scan.jsonl"),
                                                 read_text_file(p.root() / "scan/external/vi_matrix.txt"));
    bool ok = cmp["sources"] == json({"tfidf", "external"}) && cmp["rows"].size() == tfidf.points.size() &&
              tfidf.points.size() == external.points.size();
    std::size_t complete = 0;
    for (std::size_t i = 0; ok && i < cmp["rows"].size(); ++i) {
        const json& row = cmp["rows"][i];
        bool cells = row["t"].get<double>() == tfidf.points[i].t && row["t"].get<double>() == external.points[i].t;
        for (const char* s : {"tfidf", "external"})
            cells = cells && row.contains(s) && row[s]["nmi"].is_number() && row[s]["pmi_hat"].is_number();
        cells = cells && row["tfidf"]["num_clusters"] == tfidf.points[i].best.num_clusters() &&
                row["external"]["num_clusters"] == external.points[i].best.num_clusters();
        complete += cells;
    }
    const std::string table = read_text_file(p.root() / "evaluate/comparison.txt");
    ok = ok && complete == cmp["rows"].size() && table.find("tfidf:nmi") != std::string::npos &&
         table.find("external:pmi_hat") != std::string::npos;
    fs::remove_all(dir);
    return {ok, fmt("paired table over %zu Markov times, %zu rows with NMI and PMI-hat for both sources",
                    cmp["rows"].size(), complete)};
}

Outcome classifier_floor() {
    Stopwatch clock;
    const synth::Blobs blobs = synth::gaussian_blobs({1016, 1016, 1016, 508, 508}, 10, 6.0, 909);
    harmclf::LabeledDataset data{blobs.features, blobs.labels, {}};
    harmclf::LabeledDataset permuted = data;
    Rng rng(910);
    rng.shuffle(std::span(permuted.labels));
    bool ok = true;
    std::string detail;
    for (const auto kind : {harmclf::ModelKind::Ridge, harmclf::ModelKind::LinearSvm}) {
        harmclf::ModelSpec spec;
        spec.kind = kind;
        spec.svm.seed = 911;
        const double real = harmclf::cross_validate(data, spec, 5, 912, 0).mean_f1;
        const double chance = harmclf::cross_validate(permuted, spec, 5, 912, 0).mean_f1;
        ok = ok && real >= kFloorF1 && std::abs(chance - kChanceF1) <= kChanceBand;
        detail += fmt("%s %.3f (permuted %.3f), ", std::string(harmclf::to_string(kind)).c_str(), real, chance);
    }
    const double s = clock.seconds();
    return {ok && s < kClassifierBudget, "4064 rows, 5-fold mean weighted F1: " + detail + fmt("%.1f s", s)};
}

Outcome feature_augmentation() {
    const fs::path dir = scratch("augmentation");
    std::map<std::string, int> wins;
    std::map<std::string, double> smallest;
    std::string gains;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const fs::path run_dir = dir / std::to_string(seed);
        const fs::path config = topic_config(run_dir, seed, [](json& j) {
            j["graph"]["source"] = "tfidf";
            j["input"].erase("embeddings");
            j["classify"]["features"] = {"tfidf", "tfidf+ms"};
        });
        pipeline::Pipeline p(pipeline::load_config(config), false);
        p.run("all");
        std::map<std::string, std::map<std::string, double>> f1;
        const json report = read_json(p.root() / "classify/report.json");
        for (const json& run : report["runs"])
            f1[run["classifier"].get<std::string>()][run["features"].get<std::string>()] =
                run["report"]["mean_f1"].get<double>();
        gains += seed ? " " : "";
        for (const auto& [model, by_features] : f1) {
            const double gain = by_features.at("tfidf+ms") - by_features.at("tfidf");
            wins[model] += gain >= kAugmentationGain;
            smallest[model] = smallest.contains(model) ? std::min(smallest[model], gain) : gain;
            gains += fmt("%s%+.1f", model == "ridge" ? "" : "/", 100 * gain);
        }
    }
    fs::remove_all(dir);
    bool ok = wins.size() == 2;
    std::string detail;
    for (const auto& [model, w] : wins) {
        ok = ok && w >= kAugmentationWins;
        detail += fmt("%s gains >= 5 points in %d/10 seeds (smallest %+.1f); ", model.c_str(), w, 100 * smallest[model]);
    }
    return {ok, detail + "ridge/svm gains per seed: " + gains};
}

Outcome determinism() {
    const fs::path dir = scratch("determinism");
    const fs::path config = topic_config(dir, 0, [](json&) {});
    const std::vector<std::string> files{
        "scan/tfidf/scan.jsonl",        "scan/tfidf/vi_matrix.txt",    "scan/external/scan.jsonl",
        "scan/external/vi_matrix.txt",  "select/tfidf/scales.json",    "select/external/scales.json",
        "evaluate/comparison.json",     "classify/report.json",        "classify/table.txt"};
    std::vector<std::vector<std::string>> hashes;
    for (const std::size_t workers : {1, 8}) {
        pipeline::PipelineConfig c = pipeline::load_config(config);
        c.workers = workers;
        c.output_dir = dir / ("workers-" + std::to_string(workers));
        pipeline::Pipeline(c, false).run("all");
        std::vector<std::string> h;
        for (const auto& f : files) h.push_back(pipeline::sha256_file(c.output_dir / f));
        for (const auto& entry : fs::directory_iterator(c.output_dir / "select/tfidf/partitions"))
            h.push_back(entry.path().filename().string() + pipeline::sha256_file(entry.path()));
        std::sort(h.begin() + static_cast<std::ptrdiff_t>(files.size()), h.end());
        hashes.push_back(h);
    }
    fs::remove_all(dir);
    std::size_t same = 0;
    const std::size_t total = std::max(hashes[0].size(), hashes[1].size());
    for (std::size_t i = 0; i < std::min(hashes[0].size(), hashes[1].size()); ++i) same += hashes[0][i] == hashes[1][i];
    return {same == total && hashes[0].size() == hashes[1].size(),
            fmt("%zu/%zu scan, selection and report artifacts hash-identical between 1 and 8 workers", same, total)};
}

}  // namespace

int main(int argc, char** argv) {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"kernel correctness", kernel_correctness},
        {"stability optimum oracle", optimum_oracle},
        {"single-cluster zero", single_cluster_zero},
        {"planted multiscale recovery", planted_recovery},
        {"MST-kNN structure", mst_knn},
        {"metric axioms", metric_axioms},
        {"PMI sanity", pmi_sanity},
        {"TF-IDF vs external comparison", source_comparison},
        {"classifier floor", classifier_floor},
        {"feature augmentation", feature_augmentation},
        {"determinism", determinism},
    };
    std::set<std::size_t> selected;
    for (int i = 1; i < argc; ++i) selected.insert(static_cast<std::size_t>(std::atoi(argv[i])));
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        if (!selected.empty() && !selected.contains(i + 1)) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("error: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%-4s %2zu  %-30s %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                    o.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
