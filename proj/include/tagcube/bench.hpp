#pragma once

#include <tagcube/cube.hpp>
#include <tagcube/layout.hpp>
#include <tagcube/similarity.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tagcube {

struct IcebergBenchOptions {
    std::string label = "dataset";
    std::vector<std::size_t> limits{150, 600, 1200, 4800, 19600};
    std::vector<std::size_t> sizes{50, 100, 150, 200};
    Aggregator aggregator = Aggregator::Count;
    std::optional<std::string> measure;
    /// Also emit 1-tag clouds for each dimension, answered from the same
    /// iceberg.
    bool per_dimension = false;
    /// Timings keep the fastest of this many runs.
    int repeats = 3;
};

struct IcebergBenchRow {
    std::string dataset;
    std::vector<std::string> dimensions;
    std::size_t limit = 0;
    std::size_t cloud_size = 0;
    double relative_entropy = 0.0;  // of the exact cloud
    double fp = 0.0;
    double fn = 0.0;
    double iceberg_ms = 0.0;
    double exact_ms = 0.0;
    double iceberg_build_ms = 0.0;
};

/// One row per (tag dimensions, limit, size), in that nesting order. The
/// iceberg is cut from the cuboid over `dimensions`.
std::vector<IcebergBenchRow> bench_iceberg(DatasetPtr dataset, const std::vector<std::string>& dimensions,
                                           const IcebergBenchOptions& options);

std::string iceberg_csv(const std::vector<IcebergBenchRow>& rows);

struct LayoutBenchOptions {
    std::vector<std::string> dimensions;  // empty: every schema dimension
    std::vector<SimilarityKind> similarities{SimilarityKind::Cosine, SimilarityKind::Tanimoto};
    std::vector<HeuristicSpec> heuristics;  // empty: nn, pwmc:10/100/1000, mc:1000
    std::size_t limit = 150;
    std::size_t k = 150;
    Aggregator aggregator = Aggregator::Count;
    std::optional<std::string> measure;
    std::uint64_t seed = 0;
    int repeats = 3;
};

std::vector<HeuristicSpec> default_heuristics();

struct LayoutBenchRow {
    std::string display;
    std::string cluster;
    SimilarityKind similarity = SimilarityKind::Cosine;
    HeuristicSpec heuristic;
    std::size_t tags = 0;
    double cost = 0.0;
    double time_ms = 0.0;
};

/// Every ordered (display, cluster) pair of distinct dimensions: the 1-tag
/// cloud over `display` and its similarity matrix over `cluster`, both from
/// one iceberg over the two dimensions.
std::vector<LayoutBenchRow> bench_layout(DatasetPtr dataset, const LayoutBenchOptions& options);

std::string layout_csv(const std::vector<LayoutBenchRow>& rows);

}  // namespace tagcube
