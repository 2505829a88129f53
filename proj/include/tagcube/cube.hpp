#pragma once

#include <tagcube/fact_store.hpp>

#include <cstddef>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace tagcube {

enum class Aggregator { Count, Sum, Average, Min, Max };

std::string_view to_string(Aggregator aggregator) noexcept;

/// Accepts count, sum, average (or avg), min and max, case-insensitively.
Aggregator parse_aggregator(std::string_view text);

/// Running statistics of one cell. Keeping all four lets any aggregator be
/// re-derived after cells are merged, including AVERAGE.
struct Aggregate {
    std::size_t count = 0;
    double sum = 0.0;
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();

    void add(double value) noexcept;
    void merge(const Aggregate& other) noexcept;
    double value(Aggregator aggregator) const noexcept;
};

using Address = std::vector<std::string>;

struct Cell {
    Address address;
    double measure = 0.0;
    Aggregate stats;
};

/// User-supplied coarsening of one dimension, e.g. city -> country. Values
/// absent from `mapping` stay as they are.
struct GroupingMap {
    std::string dimension;
    std::string level;
    std::map<std::string, std::string> mapping;

    std::string_view apply(std::string_view value) const;

    bool operator==(const GroupingMap&) const = default;
};

/// Slices bind one value, dices keep a set of values. Values are expressed
/// at the granularity produced by the active grouping maps.
struct Filter {
    std::map<std::string, std::string> slices;
    std::map<std::string, std::vector<std::string>> dices;

    bool empty() const noexcept { return slices.empty() && dices.empty(); }
    bool operator==(const Filter&) const = default;
};

/// Allowed base (ungrouped) values per dimension. A fact passes when every
/// restricted dimension holds an allowed value.
using Restriction = std::map<std::string, std::set<std::string>>;

struct Operation {
    enum class Kind { Materialize, Slice, Dice, Rollup, Drilldown };

    Kind kind = Kind::Materialize;
    std::string dimension;
    std::vector<std::string> values;
    std::string level;

    std::string describe() const;
};

/// Everything needed to re-aggregate a cuboid from the base facts.
struct CubeQuery {
    DatasetPtr dataset;
    std::vector<std::string> dimensions;
    Aggregator aggregator = Aggregator::Count;
    std::optional<std::string> measure;
    Restriction restriction;
    std::vector<GroupingMap> groupings;
    std::vector<Operation> provenance;
};

class Cuboid {
public:
    Cuboid(CubeQuery query, std::vector<Cell> cells);

    const CubeQuery& query() const noexcept { return query_; }
    const std::vector<std::string>& dimensions() const noexcept { return query_.dimensions; }
    Aggregator aggregator() const noexcept { return query_.aggregator; }
    const std::optional<std::string>& measure() const noexcept { return query_.measure; }

    /// Cells sorted by address.
    const std::vector<Cell>& cells() const noexcept { return cells_; }
    std::size_t size() const noexcept { return cells_.size(); }

    const Cell* find(const Address& address) const;

private:
    CubeQuery query_;
    std::vector<Cell> cells_;
};

/// Builds a validated query. Throws QueryError for unknown or repeated
/// dimensions and for a missing or unknown measure (required unless COUNT).
/// The measure is dropped for COUNT.
CubeQuery make_query(DatasetPtr dataset, std::vector<std::string> dimensions,
                     Aggregator aggregator, std::optional<std::string> measure = std::nullopt);

/// Group-by over the base facts. Zero dimensions yield a single grand-total
/// cell when at least one fact passes the restriction.
Cuboid materialize(const CubeQuery& query);

/// Entry point for a fresh cuboid; the dimension list must be non-empty.
Cuboid materialize(DatasetPtr dataset, std::vector<std::string> dimensions,
                   Aggregator aggregator, std::optional<std::string> measure = std::nullopt);

CubeQuery slice(CubeQuery query, const std::string& dimension, const std::string& value);
Cuboid slice(const Cuboid& cuboid, const std::string& dimension, const std::string& value);

CubeQuery dice(CubeQuery query, const std::string& dimension, const std::vector<std::string>& values);
Cuboid dice(const Cuboid& cuboid, const std::string& dimension, const std::vector<std::string>& values);

/// Dice on a numeric-valued dimension: keeps the dictionary values that
/// parse as numbers within [low, high].
CubeQuery dice_range(CubeQuery query, const std::string& dimension, double low, double high);

CubeQuery rollup(CubeQuery query, GroupingMap grouping);
Cuboid rollup(const Cuboid& cuboid, GroupingMap grouping);

/// Removes a grouping map previously applied by rollup (matched on
/// dimension and level name). Throws QueryError when it is not present.
CubeQuery drilldown(CubeQuery query, const GroupingMap& grouping);
Cuboid drilldown(const Cuboid& cuboid, const GroupingMap& grouping);

/// Value of `base_value` after every grouping on `dimension` is applied in order.
std::string grouped_value(const std::vector<GroupingMap>& groupings, const std::string& dimension,
                          std::string_view base_value);

/// Sorted distinct values of a dimension at its grouped granularity.
std::vector<std::string> grouped_dictionary(const BoundDataset& dataset, const std::string& dimension,
                                            const std::vector<GroupingMap>& groupings);

/// Translates slices and dices into base-value sets. Throws QueryError on
/// unknown dimensions, unknown slice values and empty dice sets; dice
/// values that never occur select nothing.
Restriction resolve_filter(const BoundDataset& dataset, const Filter& filter,
                           const std::vector<GroupingMap>& groupings);

/// Intersects `extra` into `into`.
void restrict(Restriction& into, const Restriction& extra);

}  // namespace tagcube
