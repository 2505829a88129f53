#include <tagcube/bench.hpp>

#include <tagcube/error.hpp>
#include <tagcube/iceberg.hpp>
#include <tagcube/tagcloud.hpp>
#include <tagcube/wire.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace tagcube {

namespace {

template <typename F>
double best_ms(int repeats, F&& run) {
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < std::max(repeats, 1); ++i) {
        const auto start = std::chrono::steady_clock::now();
        run();
        const auto stop = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(stop - start).count());
    }
    return best;
}

std::string join(const std::vector<std::string>& items, char separator) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) {
            out.push_back(separator);
        }
        out += items[i];
    }
    return out;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n\r") == std::string::npos) {
        return text;
    }
    std::string out = "\"";
    for (char ch : text) {
        out += ch == '"' ? std::string("\"\"") : std::string(1, ch);
    }
    return out + "\"";
}

std::string ms(double value) {
    char buffer[64];
    std::snprintf(buffer, sizeof buffer, "%.3f", value);
    return buffer;
}

}  // namespace

std::vector<IcebergBenchRow> bench_iceberg(DatasetPtr dataset, const std::vector<std::string>& dimensions,
                                           const IcebergBenchOptions& options) {
    std::vector<std::vector<std::string>> tag_sets{dimensions};
    if (options.per_dimension && dimensions.size() > 1) {
        for (const auto& dimension : dimensions) {
            tag_sets.push_back({dimension});
        }
    }
    std::vector<IcebergCuboid> icebergs;
    std::vector<double> build_ms;
    for (auto limit : options.limits) {
        IcebergCuboid ice;
        build_ms.push_back(best_ms(1, [&] {
            ice = build_iceberg(dataset, dimensions, options.aggregator, options.measure, limit);
        }));
        icebergs.push_back(std::move(ice));
    }

    std::vector<IcebergBenchRow> rows;
    for (const auto& tags : tag_sets) {
        for (std::size_t l = 0; l < options.limits.size(); ++l) {
            for (auto size : options.sizes) {
                TagCloud exact;
                TagCloud approx;
                IcebergQuery query;
                query.k = size;
                query.dimensions = tags;
                IcebergBenchRow row;
                row.dataset = options.label;
                row.dimensions = tags;
                row.limit = options.limits[l];
                row.cloud_size = size;
                row.exact_ms = best_ms(options.repeats, [&] {
                    exact = topk_exact(dataset, tags, options.aggregator, options.measure, {}, size);
                });
                row.iceberg_ms = best_ms(options.repeats, [&] { approx = topk_iceberg(icebergs[l], query); });
                row.iceberg_build_ms = build_ms[l];
                row.relative_entropy = exact.size() >= 2 ? relative_entropy(exact)
                                                         : std::numeric_limits<double>::quiet_NaN();
                // An empty iceberg answer misses everything the exact cloud has.
                row.fp = approx.empty() ? 0.0 : fp_index(approx, exact);
                row.fn = exact.empty() ? 0.0 : (approx.empty() ? 1.0 : fn_index(approx, exact));
                rows.push_back(std::move(row));
            }
        }
    }
    return rows;
}

std::string iceberg_csv(const std::vector<IcebergBenchRow>& rows) {
    std::string out =
        "dataset,dims,limit,cloud_size,relative_entropy,fp_index,fn_index,iceberg_ms,exact_ms,iceberg_build_ms\n";
    for (const auto& row : rows) {
        out += csv_field(row.dataset) + "," + csv_field(join(row.dimensions, '+')) + "," +
               std::to_string(row.limit) + "," + std::to_string(row.cloud_size) + "," +
               (std::isnan(row.relative_entropy) ? std::string("nan") : format_number(row.relative_entropy)) +
               "," + format_number(row.fp) + "," + format_number(row.fn) + "," + ms(row.iceberg_ms) + "," +
               ms(row.exact_ms) + "," + ms(row.iceberg_build_ms) + "\n";
    }
    return out;
}

std::vector<HeuristicSpec> default_heuristics() {
    return {HeuristicSpec::parse("nn"), HeuristicSpec::parse("pwmc:10"), HeuristicSpec::parse("pwmc:100"),
            HeuristicSpec::parse("pwmc:1000"), HeuristicSpec::parse("mc:1000")};
}

std::vector<LayoutBenchRow> bench_layout(DatasetPtr dataset, const LayoutBenchOptions& options) {
    const auto dims = options.dimensions.empty() ? dataset->schema().dimensions : options.dimensions;
    const auto heuristics = options.heuristics.empty() ? default_heuristics() : options.heuristics;
    std::vector<LayoutBenchRow> rows;
    for (const auto& display : dims) {
        for (const auto& cluster : dims) {
            if (display == cluster) {
                continue;
            }
            const auto ice = build_iceberg(dataset, {display, cluster}, options.aggregator, options.measure,
                                           options.limit);
            IcebergQuery query;
            query.k = options.k;
            query.dimensions = std::vector<std::string>{display};
            const TagCloud cloud = topk_iceberg(ice, query);
            if (cloud.empty()) {
                continue;
            }
            for (auto kind : options.similarities) {
                const auto matrix = similarity_matrix(ice, cloud, {cluster}, kind, {}, {});
                for (const auto& heuristic : heuristics) {
                    Arrangement arrangement;
                    LayoutBenchRow row;
                    row.display = display;
                    row.cluster = cluster;
                    row.similarity = kind;
                    row.heuristic = heuristic;
                    row.tags = cloud.size();
                    row.time_ms = best_ms(options.repeats,
                                          [&] { arrangement = arrange(matrix, heuristic, options.seed); });
                    row.cost = mla_cost(arrangement, matrix);
                    rows.push_back(std::move(row));
                }
            }
        }
    }
    return rows;
}

std::string layout_csv(const std::vector<LayoutBenchRow>& rows) {
    std::string out = "instance,similarity,heuristic,parameter,tags,mla_cost,time_ms\n";
    for (const auto& row : rows) {
        const auto spec = row.heuristic.to_string();
        const auto name = spec.substr(0, spec.find(':'));
        out += csv_field(row.display + ">" + row.cluster) + "," + std::string(to_string(row.similarity)) + "," +
               name + "," + std::to_string(row.heuristic.parameter) + "," + std::to_string(row.tags) + "," +
               format_number(row.cost) + "," + ms(row.time_ms) + "\n";
    }
    return out;
}

}  // namespace tagcube
