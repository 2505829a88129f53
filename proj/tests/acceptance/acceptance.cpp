// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.
// Thresholds are pinned below and never adjusted to make a run pass.

#include <tagcube/bench.hpp>
#include <tagcube/cube.hpp>
#include <tagcube/descriptor.hpp>
#include <tagcube/iceberg.hpp>
#include <tagcube/layout.hpp>
#include <tagcube/pipeline.hpp>
#include <tagcube/service.hpp>
#include <tagcube/similarity.hpp>
#include <tagcube/synth.hpp>
#include <tagcube/tagcloud.hpp>
#include <tagcube/wire.hpp>

#include <json.hpp>

#include "fixtures.hpp"
#include "table1_oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>
#include <sys/wait.h>

using namespace tagcube;

namespace {

// Criterion 1
constexpr int kOracleQueries = 200;
constexpr double kOracleBudgetSeconds = 120;
// Criterion 2
constexpr double kLowEntropy = 0.75;
constexpr double kIndexCeiling = 0.05;
constexpr double kSweepBudgetSeconds = 300;
// Criterion 3
constexpr int kSpeedQueries = 100;
constexpr std::size_t kSpeedLimit = 150;
constexpr double kMinSpeedup = 10.0;
// Criterion 4
constexpr int kDominanceMatrices = 500;
constexpr int kSmallInstances = 200;
constexpr double kMinOptimalRate = 0.90;
constexpr double kCostTolerance = 1e-9;  // relative
// Criterion 5
constexpr double kBigWin = 0.20;
constexpr double kMaxBigWinFraction = 0.15;
// Criterion 6
constexpr double kEntropyTolerance = 1e-9;
constexpr int kTransitivityTriples = 100000;
constexpr int kJaccardPairs = 10000;
constexpr double kSimilarityTolerance = 1e-12;
// Criterion 8
constexpr int kRepeatRuns = 10;
constexpr int kRandomDescriptors = 1000;

struct Outcome {
    bool pass = true;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(double x, int precision = 4) {
    std::ostringstream s;
    s.precision(precision);
    s << x;
    return s.str();
}

std::vector<std::pair<std::string, double>> pairs(const TagCloud& c) {
    std::vector<std::pair<std::string, double>> out;
    for (const auto& t : c.tags) out.emplace_back(t.term, t.weight);
    return out;
}

bool within(double cost, double reference) {
    return cost <= reference + kCostTolerance * std::max(1.0, std::abs(reference));
}

DatasetPtr sweep_dataset() {
    static const DatasetPtr ds = [] {
        SynthOptions o;
        o.dimensions = 4;
        o.cardinalities = {50};
        o.facts = 100000;
        o.zipf_s = 1.2;
        o.seed = 0;
        return synth_dataset(o);
    }();
    return ds;
}

const std::vector<std::string> kFourDims{"d0", "d1", "d2", "d3"};

// ---------------------------------------------------------------------------

Outcome oracle_equivalence() {
    const auto start = Clock::now();
    struct Spec {
        std::size_t dims;
        std::vector<std::size_t> cards;
        std::size_t facts;
        double s;
    };
    const std::vector<Spec> specs{{2, {50}, 20000, 1.2},
                                  {3, {30}, 50000, 0.8},
                                  {4, {50}, 100000, 1.2},
                                  {4, {50, 20, 10, 5}, 80000, 0.5}};
    const std::vector<Aggregator> aggs{Aggregator::Count, Aggregator::Sum, Aggregator::Average, Aggregator::Min,
                                       Aggregator::Max};
    std::mt19937_64 rng(20240101);
    int mismatches = 0, queries = 0, empty = 0;
    std::string first_failure;
    for (std::size_t si = 0; si < specs.size(); ++si) {
        SynthOptions o;
        o.dimensions = specs[si].dims;
        o.cardinalities = specs[si].cards;
        o.facts = specs[si].facts;
        o.zipf_s = specs[si].s;
        o.seed = 100 + si;
        const auto ds = synth_dataset(o);
        const auto& dims = ds->schema().dimensions;
        for (int q = 0; q < kOracleQueries / static_cast<int>(specs.size()); ++q, ++queries) {
            const auto agg = aggs[rng() % aggs.size()];
            const std::optional<std::string> measure =
                agg == Aggregator::Count ? std::nullopt : std::optional<std::string>(kSynthMeasure);
            std::vector<std::string> tags;
            while (tags.empty())
                for (const auto& d : dims)
                    if (rng() % 2) tags.push_back(d);
            Filter filter;
            if (rng() % 3 == 0) {
                const auto& d = dims[rng() % dims.size()];
                const auto& dict = ds->dictionary(d);
                filter.slices[d] = dict[rng() % dict.size()];
            }
            if (rng() % 3 == 0) {
                const auto& d = dims[rng() % dims.size()];
                if (!filter.slices.contains(d)) {
                    const auto& dict = ds->dictionary(d);
                    for (std::size_t i = 0, n = 1 + rng() % 5; i < n; ++i)
                        filter.dices[d].push_back(dict[rng() % dict.size()]);
                }
            }
            std::vector<std::string> remaining;
            for (const auto& t : tags)
                if (!filter.slices.contains(t)) remaining.push_back(t);
            if (remaining.empty()) filter.slices.erase(tags.front());
            const std::size_t k = 1 + rng() % 200;

            const auto restriction = resolve_filter(*ds, filter, {});
            const auto cuboid_dims = similarity_cuboid_dimensions(tags, {}, restriction);
            const auto probe = build_iceberg(ds, cuboid_dims, agg, measure, std::numeric_limits<std::size_t>::max());
            const std::size_t limit = probe.full_cell_count + rng() % 2;
            const auto ice = build_iceberg(ds, cuboid_dims, agg, measure, limit);

            IcebergQuery iq;
            iq.filter = filter;
            iq.k = k;
            iq.dimensions = tags;
            const auto approx = topk_iceberg(ice, iq);
            const auto exact = topk_exact(ds, tags, agg, measure, filter, k);
            bool ok = ice.complete() && pairs(approx) == pairs(exact) && approx.dimensions == exact.dimensions;
            if (ok && !exact.empty()) ok = fp_index(approx, exact) == 0.0 && fn_index(approx, exact) == 0.0;
            if (exact.empty()) ++empty;
            if (!ok) {
                ++mismatches;
                if (first_failure.empty())
                    first_failure = "; first mismatch: dataset " + std::to_string(si) + " query " + std::to_string(q);
            }
        }
    }
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = mismatches == 0 && queries == kOracleQueries && elapsed < kOracleBudgetSeconds;
    out.detail = std::to_string(queries) + " queries, " + std::to_string(mismatches) + " mismatches (" +
                 std::to_string(empty) + " with empty results), " + fmt(elapsed, 3) + " s" + first_failure;
    return out;
}

Outcome low_entropy_quality() {
    const auto start = Clock::now();
    IcebergBenchOptions o;
    o.label = "zipf1.2";
    o.per_dimension = true;
    o.repeats = 1;
    const auto rows = bench_iceberg(sweep_dataset(), kFourDims, o);
    int low = 0, bad = 0;
    double worst_fp = 0, worst_fn = 0;
    for (const auto& r : rows) {
        if (!(r.relative_entropy < kLowEntropy)) continue;
        ++low;
        worst_fp = std::max(worst_fp, r.fp);
        worst_fn = std::max(worst_fn, r.fn);
        if (!(r.fp < kIndexCeiling && r.fn < kIndexCeiling)) ++bad;
    }
    const double elapsed = seconds_since(start);
    Outcome out;
    out.pass = rows.size() == 100 && low > 0 && bad == 0 && elapsed < kSweepBudgetSeconds;
    out.detail = std::to_string(rows.size()) + " sweep cells, " + std::to_string(low) +
                 " with relative entropy < " + fmt(kLowEntropy) + ", " + std::to_string(bad) +
                 " over the index ceiling (max fp " + fmt(worst_fp) + ", max fn " + fmt(worst_fn) + "), " +
                 fmt(elapsed, 3) + " s";
    return out;
}

Outcome iceberg_speedup() {
    const auto ds = sweep_dataset();
    const auto ice = build_iceberg(ds, kFourDims, Aggregator::Count, std::nullopt, kSpeedLimit);
    std::mt19937_64 rng(77);
    std::vector<double> iceberg_ms, exact_ms;
    std::size_t checksum = 0;
    for (int q = 0; q < kSpeedQueries; ++q) {
        std::vector<std::string> tags;
        while (tags.empty())
            for (const auto& d : kFourDims)
                if (rng() % 2) tags.push_back(d);
        const std::size_t k = std::vector<std::size_t>{50, 100, 150, 200}[rng() % 4];
        IcebergQuery iq;
        iq.k = k;
        iq.dimensions = tags;
        auto t0 = Clock::now();
        const auto approx = topk_iceberg(ice, iq);
        auto t1 = Clock::now();
        const auto exact = topk_exact(ds, tags, Aggregator::Count, std::nullopt, {}, k);
        auto t2 = Clock::now();
        checksum += approx.size() + exact.size();
        iceberg_ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
        exact_ms.push_back(std::chrono::duration<double, std::milli>(t2 - t1).count());
    }
    auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return v.size() % 2 ? v[v.size() / 2] : (v[v.size() / 2 - 1] + v[v.size() / 2]) / 2;
    };
    const double mi = median(iceberg_ms), me = median(exact_ms);
    const double speedup = me / mi;
    Outcome out;
    out.pass = checksum > 0 && speedup >= kMinSpeedup;
    out.detail = "median exact " + fmt(me) + " ms vs iceberg " + fmt(mi) + " ms over " +
                 std::to_string(kSpeedQueries) + " queries: " + fmt(speedup, 3) + "x (need >= " +
                 fmt(kMinSpeedup) + "x)";
    return out;
}

SimilarityMatrix random_similarity(std::mt19937_64& rng, std::size_t n) {
    const std::size_t width = 4 + rng() % 20;
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<std::vector<double>> vectors(n, std::vector<double>(width, 0.0));
    for (auto& v : vectors)
        for (auto& x : v)
            if (rng() % 10 < 3) x = u(rng);
    const bool tanimoto_kind = rng() % 2;
    std::vector<double> values(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            values[i * n + j] = tanimoto_kind ? tanimoto(vectors[i], vectors[j]) : cosine(vectors[i], vectors[j]);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) values[j * n + i] = values[i * n + j];
    std::vector<Tag> tags;
    for (std::size_t i = 0; i < n; ++i) {
        const std::string term = "t" + std::to_string(1000 + i);
        tags.push_back(Tag{term, {term}, std::floor(u(rng) * 100)});
    }
    return SimilarityMatrix(std::move(tags), std::move(values),
                            tanimoto_kind ? SimilarityKind::Tanimoto : SimilarityKind::Cosine);
}

Outcome heuristic_dominance() {
    std::mt19937_64 rng(4242);
    int violations = 0, checks = 0;
    for (int m = 0; m < kDominanceMatrices; ++m) {
        const std::size_t n = 10 + rng() % 141;
        const auto matrix = random_similarity(rng, n);
        const double nn = mla_cost(nn_arrange(matrix), matrix);
        for (std::size_t e : {10, 100, 1000}) {
            const std::uint64_t seed = rng();
            checks += 2;
            if (!within(mla_cost(pwmc_arrange(matrix, e, seed), matrix), nn)) ++violations;
            if (!within(mla_cost(mc_block_arrange(matrix, e, seed), matrix), nn)) ++violations;
        }
    }
    int small_violations = 0, optimal = 0;
    for (int m = 0; m < kSmallInstances; ++m) {
        const std::size_t n = 2 + rng() % 7;
        const auto matrix = random_similarity(rng, n);
        const double best = mla_cost(brute_force_arrange(matrix), matrix);
        const double nn = mla_cost(nn_arrange(matrix), matrix);
        const double pwmc = mla_cost(pwmc_arrange(matrix, 1000, rng()), matrix);
        if (!within(best, nn)) ++small_violations;
        if (!within(best, pwmc)) ++small_violations;
        if (within(pwmc, best)) ++optimal;
    }
    const double rate = static_cast<double>(optimal) / kSmallInstances;
    Outcome out;
    out.pass = violations == 0 && small_violations == 0 && rate >= kMinOptimalRate;
    out.detail = std::to_string(violations) + "/" + std::to_string(checks) + " dominance violations on " +
                 std::to_string(kDominanceMatrices) + " matrices (n 10..150); n<=8: " +
                 std::to_string(small_violations) + " brute-force violations, PWMC:1000 optimal on " +
                 std::to_string(optimal) + "/" + std::to_string(kSmallInstances) + " = " + fmt(rate * 100, 3) +
                 "% (need >= " + fmt(kMinOptimalRate * 100, 3) + "%)";
    return out;
}

Outcome layout_reproduction() {
    SynthOptions so;
    so.dimensions = 8;
    so.cardinalities = {50};
    so.facts = 100000;
    so.seed = 0;
    const auto ds = synth_dataset(so);
    LayoutBenchOptions o;
    o.heuristics = {HeuristicSpec::parse("nn"), HeuristicSpec::parse("pwmc:1000")};
    o.repeats = 3;
    const auto rows = bench_layout(ds, o);
    std::map<std::tuple<std::string, std::string, int>, std::pair<const LayoutBenchRow*, const LayoutBenchRow*>> by;
    for (const auto& r : rows) {
        auto& slot = by[{r.display, r.cluster, static_cast<int>(r.similarity)}];
        (r.heuristic.kind == HeuristicSpec::Kind::NearestNeighbor ? slot.first : slot.second) = &r;
    }
    int instances = 0, big = 0, slower = 0, worse = 0;
    double best_gain = 0;
    for (const auto& [key, slot] : by) {
        if (!slot.first || !slot.second) continue;
        ++instances;
        const double nn = slot.first->cost, pw = slot.second->cost;
        const double gain = nn > 0 ? (nn - pw) / nn : 0.0;
        best_gain = std::max(best_gain, gain);
        if (gain > kBigWin) ++big;
        if (!within(pw, nn)) ++worse;
        if (!(slot.first->time_ms < slot.second->time_ms)) ++slower;
    }
    const double fraction = instances ? static_cast<double>(big) / instances : 1.0;
    Outcome out;
    out.pass = instances == 2 * 56 && fraction <= kMaxBigWinFraction && slower == 0 && worse == 0;
    out.detail = std::to_string(instances) + " instances (56 pairs x cosine/tanimoto); PWMC:1000 beats NN by > " +
                 fmt(kBigWin * 100, 3) + "% on " + std::to_string(big) + " = " + fmt(fraction * 100, 3) +
                 "% (max gain " + fmt(best_gain * 100, 3) + "%, allowed <= " + fmt(kMaxBigWinFraction * 100, 3) +
                 "%); NN not faster on " + std::to_string(slower) + "; PWMC worse than NN on " +
                 std::to_string(worse);
    return out;
}

Outcome metric_properties() {
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<double> w(1e-6, 1000.0);
    int failures = 0;
    for (int t = 0; t < 10000; ++t) {
        const std::size_t n = 1 + rng() % 200;
        TagCloud c, uniform;
        for (std::size_t i = 0; i < n; ++i) {
            const std::string term = "t" + std::to_string(i);
            c.tags.push_back(Tag{term, {term}, w(rng)});
            uniform.tags.push_back(Tag{term, {term}, 3.5});
        }
        const double h = entropy(c);
        const double ln = std::log(static_cast<double>(n));
        if (h < -kEntropyTolerance || h > ln + kEntropyTolerance) ++failures;
        if (std::abs(entropy(uniform) - ln) >= kEntropyTolerance) ++failures;
        const double scale = std::exp(std::uniform_real_distribution<double>(-20, 20)(rng));
        auto scaled = c;
        for (auto& tag : scaled.tags) tag.weight *= scale;
        if (std::abs(entropy(scaled) - h) >= kEntropyTolerance) ++failures;
    }
    const int entropy_failures = failures;

    auto random_vector = [&](std::size_t len) {
        std::vector<double> v(len, 0.0);
        for (auto& x : v)
            if (rng() % 3) x = w(rng);
        return v;
    };
    int transitivity = 0;
    for (int t = 0; t < kTransitivityTriples; ++t) {
        const std::size_t len = 1 + rng() % 10;
        const auto u = random_vector(len), v = random_vector(len), x = random_vector(len);
        const double cuv = cosine(u, v);
        if (cosine(u, x) < cosine(v, x) - std::sqrt(std::max(0.0, 1 - cuv * cuv)) - kSimilarityTolerance)
            ++transitivity;
    }
    int jaccard_failures = 0;
    for (int t = 0; t < kJaccardPairs; ++t) {
        const std::size_t len = 1 + rng() % 30;
        const auto u = random_vector(len), v = random_vector(len);
        if (std::abs(jaccard(u, v) - tanimoto(binarize(u), binarize(v))) > kSimilarityTolerance) ++jaccard_failures;
    }
    Outcome out;
    out.pass = entropy_failures == 0 && transitivity == 0 && jaccard_failures == 0;
    out.detail = "entropy bound/uniform/scale failures " + std::to_string(entropy_failures) +
                 " over 10000 clouds; cosine transitivity failures " + std::to_string(transitivity) + "/" +
                 std::to_string(kTransitivityTriples) + "; jaccard vs binarized tanimoto failures " +
                 std::to_string(jaccard_failures) + "/" + std::to_string(kJaccardPairs);
    return out;
}

// --- Table 1 ----------------------------------------------------------------

std::map<oracle::Key, double> cells_of(const Cuboid& c) {
    std::map<oracle::Key, double> out;
    for (const auto& cell : c.cells()) out[cell.address] = cell.measure;
    return out;
}

std::string run_cli(const std::string& args, int* status = nullptr) {
    const std::string command = std::string(TAGCUBE_CLI) + " " + args + " 2>/dev/null";
    FILE* pipe = ::popen(command.c_str(), "r");
    if (!pipe) throw std::runtime_error("cannot run " + command);
    std::string out;
    char buffer[4096];
    std::size_t n;
    while ((n = std::fread(buffer, 1, sizeof buffer, pipe)) > 0) out.append(buffer, n);
    const int raw = ::pclose(pipe);
    if (status) *status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    return out;
}

const std::string kTable1Schema =
    R"({"dimensions":["location","time","salesman","product"],"measures":["cost","profit"]})";

std::string cli_table1_args() {
    return "-i " + std::string(TAGCUBE_DATA_DIR) +
           "/table1.csv --schema-dims location,time,salesman,product --schema-measures cost,profit";
}

Outcome table1_suite() {
    const auto ds = fixtures::table1();
    std::vector<std::pair<std::string, std::function<bool()>>> checks;
    using Cells = std::map<oracle::Key, double>;
    auto is_shoe = [](const oracle::Fact& f) { return f.product == "shoe"; };
    auto country = [](const std::string& c, const std::string& v) {
        return c == "location" ? oracle::city_to_country().at(v) : v;
    };
    GroupingMap countries{"location", "country", oracle::city_to_country()};

    checks.emplace_back("location COUNT", [&] {
        const auto got = cells_of(materialize(ds, {"location"}, Aggregator::Count));
        return got == oracle::group_by({"location"}, "count") && got.size() == 7 && got.at({"Paris"}) == 3 &&
               got.at({"Montreal"}) == 2 && got.at({"New York"}) == 2 && got.at({"Quebec"}) == 1;
    });
    checks.emplace_back("location SUM profit", [&] {
        const auto got = cells_of(materialize(ds, {"location"}, Aggregator::Sum, "profit"));
        return got == oracle::group_by({"location"}, "sum", "profit") &&
               got == Cells{{{"Quebec"}, 45}, {{"Montreal"}, 40}, {{"Paris"}, 35}, {{"New York"}, 20},
                            {{"Ontario"}, 10}, {{"Lyon"}, 10}, {{"Detroit"}, 10}};
    });
    checks.emplace_back("all four dimensions COUNT", [&] {
        const auto got = cells_of(materialize(ds, {"location", "time", "salesman", "product"}, Aggregator::Count));
        return got == oracle::group_by({"location", "time", "salesman", "product"}, "count") && got.size() == 11 &&
               std::all_of(got.begin(), got.end(), [](const auto& kv) { return kv.second == 1; });
    });
    checks.emplace_back("slice product=shoe, SUM cost by location", [&] {
        const auto got = cells_of(slice(materialize(ds, {"location", "product"}, Aggregator::Sum, "cost"), "product", "shoe"));
        return got == oracle::group_by({"location"}, "sum", "cost", is_shoe) &&
               got == Cells{{{"Montreal"}, 250}, {{"Paris"}, 220}};
    });
    checks.emplace_back("slice product=shoe, COUNT over no dimension", [&] {
        const auto got = cells_of(slice(materialize(ds, {"product"}, Aggregator::Count), "product", "shoe"));
        return got == oracle::group_by({}, "count", "", is_shoe) && got == Cells{{{}, 4}};
    });
    checks.emplace_back("dice time in {March, April}, COUNT by location", [&] {
        const auto got = cells_of(dice(materialize(ds, {"location"}, Aggregator::Count), "time", {"March", "April"}));
        return got == oracle::group_by({"location"}, "count", "",
                                       [](const oracle::Fact& f) { return f.time == "March" || f.time == "April"; }) &&
               got == Cells{{{"Montreal"}, 1}, {{"Paris"}, 2}, {{"Ontario"}, 1}, {{"Lyon"}, 1}, {{"Detroit"}, 1}};
    });
    checks.emplace_back("dice time in {January} is empty", [&] {
        return dice(materialize(ds, {"location"}, Aggregator::Count), "time", {"January"}).size() == 0;
    });
    checks.emplace_back("roll-up to country COUNT and SUM profit", [&] {
        const auto count = cells_of(rollup(materialize(ds, {"location"}, Aggregator::Count), countries));
        const auto profit = cells_of(rollup(materialize(ds, {"location"}, Aggregator::Sum, "profit"), countries));
        return count == oracle::group_by({"location"}, "count", "", nullptr, country) &&
               count == Cells{{{"Canada"}, 4}, {{"France"}, 4}, {{"USA"}, 3}} &&
               profit == oracle::group_by({"location"}, "sum", "profit", nullptr, country) &&
               profit == Cells{{{"Canada"}, 95}, {{"France"}, 45}, {{"USA"}, 30}};
    });
    checks.emplace_back("drill-down after slice keeps the slice", [&] {
        const auto rolled = rollup(materialize(ds, {"location", "product"}, Aggregator::Count), countries);
        const auto down = drilldown(slice(rolled, "product", "shoe"), countries);
        return cells_of(down) == oracle::group_by({"location"}, "count", "", is_shoe) &&
               cells_of(down) == Cells{{{"Montreal"}, 2}, {{"Paris"}, 2}} && down.query().groupings.empty();
    });
    checks.emplace_back("iceberg limit 3 and top-2 from it", [&] {
        const auto ice = build_iceberg(ds, {"location"}, Aggregator::Count, std::nullopt, 3);
        std::vector<Address> kept;
        for (const auto& c : ice.cells) kept.push_back(c.address);
        const auto top2 = topk_iceberg(ice, {}, 2);
        const auto exact = topk_exact(ds, {"location"}, Aggregator::Count, std::nullopt, {}, 2);
        return kept == std::vector<Address>{{"Paris"}, {"Montreal"}, {"New York"}} &&
               pairs(top2) == oracle::top_k(oracle::group_by({"location"}, "count"), 2) &&
               fp_index(top2, exact) == 0 && fn_index(top2, exact) == 0;
    });
    checks.emplace_back("exact top-k COUNT k=3 and SUM profit k=2", [&] {
        const auto c3 = topk_exact(ds, {"location"}, Aggregator::Count, std::nullopt, {}, 3);
        const auto p2 = topk_exact(ds, {"location"}, Aggregator::Sum, "profit", {}, 2);
        using P = std::vector<std::pair<std::string, double>>;
        return pairs(c3) == oracle::top_k(oracle::group_by({"location"}, "count"), 3) &&
               pairs(c3) == P{{"Paris", 3}, {"Montreal", 2}, {"New York", 2}} &&
               pairs(p2) == oracle::top_k(oracle::group_by({"location"}, "sum", "profit"), 2) &&
               pairs(p2) == P{{"Quebec", 45}, {"Montreal", 40}};
    });
    checks.emplace_back("cloud of 7, sort and prune", [&] {
        const auto c = from_cuboid(materialize(ds, {"location"}, Aggregator::Count), 7);
        const auto heavy = prune(c, 2.0, std::nullopt);
        std::vector<std::string> heavy_terms;
        for (const auto& t : heavy.tags) heavy_terms.push_back(t.term);
        return c.size() == 7 && c.tags.front().term == "Paris" && c.tags.front().weight == 3 &&
               sort_cloud(c, SortKey::Term, SortDirection::Ascending).tags.front().term == "Detroit" &&
               heavy_terms == std::vector<std::string>{"Paris", "Montreal", "New York"};
    });
    checks.emplace_back("sub-cuboid vectors of shoe and chair over location", [&] {
        const auto cloud = topk_exact(ds, {"product"}, Aggregator::Count, std::nullopt, {}, 10);
        const auto shoe = subcuboid_vector(ds, {"product"}, *cloud.find("shoe"), {"location"}, Aggregator::Count,
                                           std::nullopt);
        const auto chair = subcuboid_vector(ds, {"product"}, *cloud.find("chair"), {"location"}, Aggregator::Count,
                                            std::nullopt);
        const auto by_location = [&](const SubcuboidVector& v, const std::string& product) {
            const auto truth = oracle::group_by({"location"}, "count", "",
                                                [&](const oracle::Fact& f) { return f.product == product; });
            for (std::size_t i = 0; i < v.axis.size(); ++i) {
                auto it = truth.find(v.axis[i]);
                if (v.values[i] != (it == truth.end() ? 0.0 : it->second)) return false;
            }
            return v.axis.size() == 7;
        };
        const auto m = similarity_matrix(ds, cloud, {"location"}, SimilarityKind::Cosine, Aggregator::Count,
                                         std::nullopt, {.exact = true});
        std::size_t is = 0, ic = 0;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m.tags()[i].term == "shoe") is = i;
            if (m.tags()[i].term == "chair") ic = i;
        }
        return by_location(shoe, "shoe") && by_location(chair, "chair") && m(is, ic) == 0.0 &&
               std::count(shoe.values.begin(), shoe.values.end(), 2.0) == 2 &&
               std::count(chair.values.begin(), chair.values.end(), 2.0) == 1;
    });
    checks.emplace_back("service cloud dims=location k=3", [&] {
        Service s;
        const auto id = nlohmann::json::parse(s.upload(fixtures::table1_csv(), {}).body)["id"].get<std::string>();
        if (s.bind(id, kTable1Schema).status != 200) return false;
        const auto r = s.cloud(id, {{"dims", "location"}, {"agg", "count"}, {"k", "3"}});
        const auto entries = nlohmann::json::parse(r.body)["entries"];
        return r.status == 200 && entries.size() == 3 && entries[0]["t"] == "Paris" && entries[0]["w"] == 3 &&
               entries[1]["t"] == "Montreal" && entries[2]["t"] == "New York";
    });
    checks.emplace_back("CLI text dims=location k=3", [&] {
        int status = -1;
        const auto text = run_cli("cloud " + cli_table1_args() + " --dims location --k 3 --format text", &status);
        std::istringstream in(text);
        std::vector<std::string> lines;
        for (std::string line; std::getline(in, line);) lines.push_back(line);
        return status == 0 && lines.size() == 3 && lines[0].rfind("Paris", 0) == 0;
    });

    int failed = 0;
    std::string names;
    for (const auto& [name, check] : checks) {
        bool ok = false;
        try {
            ok = check();
        } catch (const std::exception& e) {
            ok = false;
        }
        if (!ok) {
            ++failed;
            names += (names.empty() ? "; failing: " : ", ") + name;
        }
    }
    Outcome out;
    out.pass = failed == 0;
    out.detail = std::to_string(checks.size() - failed) + "/" + std::to_string(checks.size()) +
                 " examples agree with the brute-force oracle" + names;
    return out;
}

// --- Determinism ------------------------------------------------------------

QueryDescriptor random_descriptor(std::mt19937_64& rng) {
    static const std::vector<std::string> words{"location", "New York", "é", "q\"uote", "a\\b", "x–y", "",
                                                "0", "{}", "time"};
    auto word = [&] { return words[rng() % words.size()]; };
    QueryDescriptor d;
    d.dataset = "ds-" + std::to_string(rng() % 100000);
    for (std::size_t i = 0, n = 1 + rng() % 4; i < n; ++i) d.dims.push_back(word());
    d.agg = static_cast<Aggregator>(rng() % 5);
    if (d.agg != Aggregator::Count) d.measure = word();
    for (std::size_t i = 0, n = rng() % 3; i < n; ++i) d.filter.slices[word()] = word();
    for (std::size_t i = 0, n = rng() % 3; i < n; ++i) {
        auto& values = d.filter.dices[word()];
        for (std::size_t j = 0, m = 1 + rng() % 3; j < m; ++j) values.push_back(word());
    }
    for (std::size_t i = 0, n = rng() % 2; i < n; ++i) d.groupings.push_back(GroupingMap{word(), word(), {{word(), word()}}});
    d.k = 1 + rng() % 1000;
    d.limit = 1 + rng() % 1000000;
    d.exact = rng() % 2;
    for (std::size_t i = 0, n = rng() % 3; i < n; ++i) d.cluster.push_back(word());
    d.sim = static_cast<SimilarityKind>(rng() % 3);
    static const std::vector<std::string> heuristics{"nn", "pwmc:10", "pwmc:1000", "mc:100", "brute"};
    d.heuristic = HeuristicSpec::parse(heuristics[rng() % heuristics.size()]);
    d.seed = rng();
    d.buckets = 1 + static_cast<int>(rng() % 20);
    return d;
}

Outcome determinism() {
    const Params params{{"dims", "salesman"}, {"cluster", "location,time"}, {"heuristic", "pwmc:1000"},
                        {"sim", "tanimoto"}, {"seed", "12345"}, {"limit", "20"}};
    std::string reference;
    int service_diffs = 0, cli_diffs = 0, cli_errors = 0;
    for (int run = 0; run < kRepeatRuns; ++run) {
        Service s;
        const auto id = nlohmann::json::parse(s.upload(fixtures::table1_csv(), {}).body)["id"].get<std::string>();
        s.bind(id, kTable1Schema);
        const auto body = s.cloud(id, params).body;
        if (reference.empty()) reference = body;
        if (body != reference) ++service_diffs;
    }
    for (int run = 0; run < kRepeatRuns; ++run) {
        int status = -1;
        const auto out = run_cli("cloud " + cli_table1_args() +
                                     " --dims salesman --cluster location,time --heuristic pwmc:1000 --sim tanimoto"
                                     " --seed 12345 --limit 20 --format json",
                                 &status);
        if (status != 0) ++cli_errors;
        if (out != reference) ++cli_diffs;
    }
    std::mt19937_64 rng(8);
    int round_trip_failures = 0;
    for (int i = 0; i < kRandomDescriptors; ++i) {
        const auto d = random_descriptor(rng);
        const auto token = encode_permalink(d);
        try {
            const auto back = decode_permalink(token);
            if (!(back == d) || encode_permalink(back) != token) ++round_trip_failures;
        } catch (const std::exception&) {
            ++round_trip_failures;
        }
    }
    const bool ok_reference = reference.find("\"entries\"") != std::string::npos;
    Outcome out;
    out.pass = ok_reference && service_diffs == 0 && cli_diffs == 0 && cli_errors == 0 && round_trip_failures == 0;
    out.detail = std::to_string(kRepeatRuns) + " service runs with " + std::to_string(service_diffs) + " diffs, " +
                 std::to_string(kRepeatRuns) + " CLI runs with " + std::to_string(cli_diffs) +
                 " diffs from the service body (" + std::to_string(cli_errors) + " errors); permalink identity failures " +
                 std::to_string(round_trip_failures) + "/" + std::to_string(kRandomDescriptors);
    return out;
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"oracle equivalence", oracle_equivalence},
        {"low-entropy quality", low_entropy_quality},
        {"iceberg speedup", iceberg_speedup},
        {"heuristic dominance", heuristic_dominance},
        {"layout benchmark reproduction", layout_reproduction},
        {"metric properties", metric_properties},
        {"sales table micro-suite", table1_suite},
        {"determinism", determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome outcome;
        const auto start = Clock::now();
        try {
            outcome = criteria[i].second();
        } catch (const std::exception& e) {
            outcome = Outcome{false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failures;
        std::cout << (outcome.pass ? "PASS" : "FAIL") << " " << (i + 1) << " " << criteria[i].first << ": "
                  << outcome.detail << " [" << fmt(seconds_since(start), 3) << " s]" << std::endl;
    }
    std::cout << (criteria.size() - failures) << "/" << criteria.size() << " criteria passed" << std::endl;
    return failures == 0 ? 0 : 1;
}
