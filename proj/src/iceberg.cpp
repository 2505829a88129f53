#include <tagcube/iceberg.hpp>

#include <tagcube/error.hpp>

#include <algorithm>
#include <map>

namespace tagcube {

bool ranks_before(const Cell& a, const Cell& b) noexcept {
    if (a.measure != b.measure) {
        return a.measure > b.measure;
    }
    return a.address < b.address;
}

IcebergCuboid build_iceberg(DatasetPtr dataset, std::vector<std::string> dimensions,
                            Aggregator aggregator, std::optional<std::string> measure,
                            std::size_t limit) {
    if (limit < 1) {
        throw QueryError("iceberg limit must be at least 1");
    }
    Cuboid full = materialize(dataset, dimensions, aggregator, measure);

    IcebergCuboid iceberg;
    iceberg.dataset = dataset;
    iceberg.key = CuboidKey{dataset->id(), full.dimensions(), aggregator, full.measure()};
    iceberg.limit = limit;
    iceberg.full_cell_count = full.size();
    iceberg.cells = full.cells();
    const auto keep = std::min(limit, iceberg.cells.size());
    std::partial_sort(iceberg.cells.begin(), iceberg.cells.begin() + static_cast<std::ptrdiff_t>(keep),
                      iceberg.cells.end(), ranks_before);
    iceberg.cells.resize(keep);
    iceberg.cells.shrink_to_fit();
    return iceberg;
}

namespace {

std::size_t position_of(const std::vector<std::string>& dimensions, const std::string& name) {
    auto it = std::find(dimensions.begin(), dimensions.end(), name);
    if (it == dimensions.end()) {
        throw QueryError("dimension '" + name + "' is not part of the iceberg cuboid");
    }
    return static_cast<std::size_t>(it - dimensions.begin());
}

std::vector<std::string> without_sliced(std::vector<std::string> dimensions, const Filter& filter) {
    std::erase_if(dimensions, [&](const std::string& d) { return filter.slices.contains(d); });
    return dimensions;
}

}  // namespace

std::vector<Cell> reaggregate(const IcebergCuboid& iceberg, const Restriction& restriction,
                              const std::vector<GroupingMap>& groupings,
                              const std::vector<std::string>& dimensions) {
    const auto& source = iceberg.key.dimensions;

    std::vector<std::pair<std::size_t, const std::set<std::string>*>> checks;
    checks.reserve(restriction.size());
    for (const auto& [dimension, allowed] : restriction) {
        checks.emplace_back(position_of(source, dimension), &allowed);
    }
    std::vector<std::size_t> projection;
    projection.reserve(dimensions.size());
    for (const auto& dimension : dimensions) {
        projection.push_back(position_of(source, dimension));
    }

    std::map<Address, Aggregate> merged;
    Address address(dimensions.size());
    for (const auto& cell : iceberg.cells) {
        const bool passes = std::all_of(checks.begin(), checks.end(), [&](const auto& check) {
            return check.second->contains(cell.address[check.first]);
        });
        if (!passes) {
            continue;
        }
        for (std::size_t i = 0; i < projection.size(); ++i) {
            address[i] = grouped_value(groupings, dimensions[i], cell.address[projection[i]]);
        }
        merged[address].merge(cell.stats);
    }

    std::vector<Cell> cells;
    cells.reserve(merged.size());
    for (auto& [key, stats] : merged) {
        cells.push_back(Cell{key, stats.value(iceberg.key.aggregator), stats});
    }
    return cells;
}

TagCloud topk_iceberg(const IcebergCuboid& iceberg, const IcebergQuery& query) {
    if (!iceberg.dataset) {
        throw QueryError("iceberg has no dataset");
    }
    const auto restriction = resolve_filter(*iceberg.dataset, query.filter, query.groupings);
    auto dimensions =
        without_sliced(query.dimensions.value_or(iceberg.key.dimensions), query.filter);
    auto cells = reaggregate(iceberg, restriction, query.groupings, dimensions);
    return from_cells(std::move(dimensions), cells, query.k);
}

TagCloud topk_iceberg(const IcebergCuboid& iceberg, const Filter& filter, std::size_t k) {
    IcebergQuery query;
    query.filter = filter;
    query.k = k;
    return topk_iceberg(iceberg, query);
}

TagCloud topk_exact(DatasetPtr dataset, const std::vector<std::string>& dimensions,
                    Aggregator aggregator, const std::optional<std::string>& measure,
                    const Filter& filter, std::size_t k, const std::vector<GroupingMap>& groupings) {
    auto query = make_query(dataset, without_sliced(dimensions, filter), aggregator, measure);
    query.groupings = groupings;
    query.restriction = resolve_filter(*dataset, filter, groupings);
    const Cuboid cuboid = materialize(query);
    return from_cuboid(cuboid, k);
}

}  // namespace tagcube
