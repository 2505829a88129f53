#pragma once

#include <tagcube/cube.hpp>
#include <tagcube/tagcloud.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

namespace tagcube {

/// Identity of the full cuboid an iceberg was cut from.
struct CuboidKey {
    std::string dataset_id;
    std::vector<std::string> dimensions;
    Aggregator aggregator = Aggregator::Count;
    std::optional<std::string> measure;

    bool operator==(const CuboidKey&) const = default;
};

/// The `limit` largest cells of a cuboid over the base facts. Cells are
/// kept in rank order: measure descending, then address ascending.
struct IcebergCuboid {
    DatasetPtr dataset;
    CuboidKey key;
    std::size_t limit = 0;
    std::size_t full_cell_count = 0;
    std::vector<Cell> cells;

    bool complete() const noexcept { return cells.size() == full_cell_count; }
};

/// Ranking used for truncation.
bool ranks_before(const Cell& a, const Cell& b) noexcept;

/// Materializes the full cuboid once and keeps its `limit` top cells.
/// Throws QueryError when limit is 0 or the cuboid query is invalid.
IcebergCuboid build_iceberg(DatasetPtr dataset, std::vector<std::string> dimensions,
                            Aggregator aggregator, std::optional<std::string> measure,
                            std::size_t limit);

struct IcebergQuery {
    Filter filter;
    std::size_t k = kDefaultCloudSize;
    /// Tag dimensions; defaults to the iceberg's dimensions. Sliced
    /// dimensions are always dropped.
    std::optional<std::vector<std::string>> dimensions;
    std::vector<GroupingMap> groupings;
};

/// Filters the retained cells, applies the grouping maps and merges them
/// onto `dimensions`. Only retained cells contribute, so merged measures
/// can under-count the true cuboid. Cells come back sorted by address.
std::vector<Cell> reaggregate(const IcebergCuboid& iceberg, const Restriction& restriction,
                              const std::vector<GroupingMap>& groupings,
                              const std::vector<std::string>& dimensions);

/// Approximate top-k cloud answered from the retained cells only.
TagCloud topk_iceberg(const IcebergCuboid& iceberg, const IcebergQuery& query);
TagCloud topk_iceberg(const IcebergCuboid& iceberg, const Filter& filter, std::size_t k);

/// Ground truth: full group-by over the filtered base facts, ranked like
/// the iceberg answer. Sliced dimensions are dropped from `dimensions`.
TagCloud topk_exact(DatasetPtr dataset, const std::vector<std::string>& dimensions,
                    Aggregator aggregator, const std::optional<std::string>& measure,
                    const Filter& filter, std::size_t k,
                    const std::vector<GroupingMap>& groupings = {});

}  // namespace tagcube
