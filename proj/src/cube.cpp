#include <tagcube/cube.hpp>

#include <tagcube/error.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <iterator>
#include <unordered_map>
#include <utility>

namespace tagcube {

std::string_view to_string(Aggregator aggregator) noexcept {
    switch (aggregator) {
    case Aggregator::Count:
        return "count";
    case Aggregator::Sum:
        return "sum";
    case Aggregator::Average:
        return "average";
    case Aggregator::Min:
        return "min";
    case Aggregator::Max:
        return "max";
    }
    return "count";
}

Aggregator parse_aggregator(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "count") {
        return Aggregator::Count;
    }
    if (lower == "sum") {
        return Aggregator::Sum;
    }
    if (lower == "average" || lower == "avg") {
        return Aggregator::Average;
    }
    if (lower == "min") {
        return Aggregator::Min;
    }
    if (lower == "max") {
        return Aggregator::Max;
    }
    throw QueryError("unknown aggregator '" + std::string(text) + "'");
}

void Aggregate::add(double value) noexcept {
    ++count;
    sum += value;
    min = std::min(min, value);
    max = std::max(max, value);
}

void Aggregate::merge(const Aggregate& other) noexcept {
    count += other.count;
    sum += other.sum;
    min = std::min(min, other.min);
    max = std::max(max, other.max);
}

double Aggregate::value(Aggregator aggregator) const noexcept {
    switch (aggregator) {
    case Aggregator::Count:
        return static_cast<double>(count);
    case Aggregator::Sum:
        return sum;
    case Aggregator::Average:
        return count == 0 ? 0.0 : sum / static_cast<double>(count);
    case Aggregator::Min:
        return min;
    case Aggregator::Max:
        return max;
    }
    return 0.0;
}

std::string_view GroupingMap::apply(std::string_view value) const {
    auto it = mapping.find(std::string(value));
    return it == mapping.end() ? value : std::string_view(it->second);
}

std::string Operation::describe() const {
    auto join = [](const std::vector<std::string>& items) {
        std::string out;
        for (std::size_t i = 0; i < items.size(); ++i) {
            out += (i ? "," : "") + items[i];
        }
        return out;
    };
    switch (kind) {
    case Kind::Materialize:
        return "materialize[" + join(values) + "]";
    case Kind::Slice:
        return "slice " + dimension + "=" + join(values);
    case Kind::Dice:
        return "dice " + dimension + " in {" + join(values) + "}";
    case Kind::Rollup:
        return "rollup " + dimension + " to " + level;
    case Kind::Drilldown:
        return "drilldown " + dimension + " from " + level;
    }
    return {};
}

Cuboid::Cuboid(CubeQuery query, std::vector<Cell> cells)
    : query_(std::move(query)), cells_(std::move(cells)) {}

const Cell* Cuboid::find(const Address& address) const {
    auto it = std::lower_bound(cells_.begin(), cells_.end(), address,
                               [](const Cell& cell, const Address& a) { return cell.address < a; });
    if (it == cells_.end() || it->address != address) {
        return nullptr;
    }
    return &*it;
}

namespace {

void require_dimension(const BoundDataset& dataset, const std::string& dimension) {
    if (!dataset.has_dimension(dimension)) {
        throw QueryError("unknown dimension '" + dimension + "'");
    }
}

void require_dataset(const CubeQuery& query) {
    if (!query.dataset) {
        throw QueryError("query has no dataset");
    }
}

// Output dictionary of one grouped dimension plus the base-code translation.
struct DimensionPlan {
    std::vector<std::string> values;
    std::vector<std::uint32_t> from_base;
    std::span<const std::uint32_t> codes;
};

DimensionPlan plan_dimension(const BoundDataset& dataset, const std::string& dimension,
                             const std::vector<GroupingMap>& groupings) {
    DimensionPlan plan;
    plan.codes = dataset.codes(dimension);
    const auto& dict = dataset.dictionary(dimension);
    std::vector<std::string> mapped;
    mapped.reserve(dict.size());
    for (const auto& value : dict) {
        mapped.push_back(grouped_value(groupings, dimension, value));
    }
    plan.values = mapped;
    std::sort(plan.values.begin(), plan.values.end());
    plan.values.erase(std::unique(plan.values.begin(), plan.values.end()), plan.values.end());
    plan.from_base.reserve(dict.size());
    for (const auto& value : mapped) {
        auto it = std::lower_bound(plan.values.begin(), plan.values.end(), value);
        plan.from_base.push_back(static_cast<std::uint32_t>(it - plan.values.begin()));
    }
    return plan;
}

struct RowFilter {
    std::vector<std::span<const std::uint32_t>> codes;
    std::vector<std::vector<char>> allowed;

    bool passes(std::size_t row) const {
        for (std::size_t i = 0; i < codes.size(); ++i) {
            if (!allowed[i][codes[i][row]]) {
                return false;
            }
        }
        return true;
    }
};

RowFilter plan_filter(const BoundDataset& dataset, const Restriction& restriction) {
    RowFilter filter;
    for (const auto& [dimension, values] : restriction) {
        require_dimension(dataset, dimension);
        const auto& dict = dataset.dictionary(dimension);
        std::vector<char> allowed(dict.size(), 0);
        for (const auto& value : values) {
            if (auto code = dataset.code_of(dimension, value)) {
                allowed[*code] = 1;
            }
        }
        filter.codes.push_back(dataset.codes(dimension));
        filter.allowed.push_back(std::move(allowed));
    }
    return filter;
}

Address decode(const std::vector<DimensionPlan>& plans, const std::vector<std::uint32_t>& codes) {
    Address address;
    address.reserve(codes.size());
    for (std::size_t i = 0; i < codes.size(); ++i) {
        address.push_back(plans[i].values[codes[i]]);
    }
    return address;
}

}  // namespace

std::string grouped_value(const std::vector<GroupingMap>& groupings, const std::string& dimension,
                          std::string_view base_value) {
    std::string value(base_value);
    for (const auto& grouping : groupings) {
        if (grouping.dimension == dimension) {
            value = std::string(grouping.apply(value));
        }
    }
    return value;
}

std::vector<std::string> grouped_dictionary(const BoundDataset& dataset, const std::string& dimension,
                                            const std::vector<GroupingMap>& groupings) {
    return plan_dimension(dataset, dimension, groupings).values;
}

void restrict(Restriction& into, const Restriction& extra) {
    for (const auto& [dimension, values] : extra) {
        auto it = into.find(dimension);
        if (it == into.end()) {
            into.emplace(dimension, values);
            continue;
        }
        std::set<std::string> kept;
        std::set_intersection(it->second.begin(), it->second.end(), values.begin(), values.end(),
                              std::inserter(kept, kept.end()));
        it->second = std::move(kept);
    }
}

namespace {

std::set<std::string> expand_values(const BoundDataset& dataset, const std::string& dimension,
                                    const std::vector<GroupingMap>& groupings,
                                    const std::vector<std::string>& values, bool strict) {
    require_dimension(dataset, dimension);
    if (values.empty()) {
        throw QueryError("empty value set for dimension '" + dimension + "'");
    }
    const auto& dict = dataset.dictionary(dimension);
    std::map<std::string, std::vector<std::string>> by_group;
    for (const auto& base : dict) {
        by_group[grouped_value(groupings, dimension, base)].push_back(base);
    }
    std::set<std::string> expanded;
    for (const auto& value : values) {
        auto it = by_group.find(value);
        if (it == by_group.end()) {
            // A typo in a slice is surfaced; a dice value that never occurs
            // simply selects nothing.
            if (strict) {
                throw QueryError("unknown value '" + value + "' for dimension '" + dimension + "'");
            }
            continue;
        }
        expanded.insert(it->second.begin(), it->second.end());
    }
    return expanded;
}

}  // namespace

Restriction resolve_filter(const BoundDataset& dataset, const Filter& filter,
                           const std::vector<GroupingMap>& groupings) {
    Restriction out;
    for (const auto& [dimension, value] : filter.slices) {
        restrict(out, {{dimension, expand_values(dataset, dimension, groupings, {value}, true)}});
    }
    for (const auto& [dimension, values] : filter.dices) {
        restrict(out, {{dimension, expand_values(dataset, dimension, groupings, values, false)}});
    }
    return out;
}

CubeQuery make_query(DatasetPtr dataset, std::vector<std::string> dimensions,
                     Aggregator aggregator, std::optional<std::string> measure) {
    if (!dataset) {
        throw QueryError("query has no dataset");
    }
    std::set<std::string> seen;
    for (const auto& dimension : dimensions) {
        require_dimension(*dataset, dimension);
        if (!seen.insert(dimension).second) {
            throw QueryError("dimension '" + dimension + "' listed twice");
        }
    }
    if (aggregator == Aggregator::Count) {
        measure.reset();
    } else if (!measure) {
        throw QueryError(std::string(to_string(aggregator)) + " needs a measure");
    } else if (!dataset->has_measure(*measure)) {
        throw QueryError("unknown measure '" + *measure + "'");
    }
    CubeQuery query;
    query.dataset = std::move(dataset);
    query.dimensions = std::move(dimensions);
    query.aggregator = aggregator;
    query.measure = std::move(measure);
    query.provenance.push_back(
        Operation{Operation::Kind::Materialize, {}, query.dimensions, {}});
    return query;
}

Cuboid materialize(const CubeQuery& query) {
    require_dataset(query);
    const auto& dataset = *query.dataset;

    std::vector<DimensionPlan> plans;
    plans.reserve(query.dimensions.size());
    for (const auto& dimension : query.dimensions) {
        require_dimension(dataset, dimension);
        plans.push_back(plan_dimension(dataset, dimension, query.groupings));
    }
    const RowFilter filter = plan_filter(dataset, query.restriction);
    std::span<const double> measures;
    if (query.measure) {
        measures = dataset.measure_values(*query.measure);
    }
    const std::size_t rows = dataset.fact_count();
    auto row_value = [&](std::size_t row) { return measures.empty() ? 0.0 : measures[row]; };

    // Mixed-radix keys keep the hot loop allocation-free; their order equals
    // address order because each dictionary is sorted.
    bool fits = true;
    std::uint64_t space = 1;
    for (const auto& plan : plans) {
        const std::uint64_t radix = std::max<std::size_t>(plan.values.size(), 1);
        if (space > (std::uint64_t{1} << 62) / radix) {
            fits = false;
            break;
        }
        space *= radix;
    }

    std::vector<Cell> cells;
    const std::size_t arity = plans.size();
    if (fits) {
        std::unordered_map<std::uint64_t, Aggregate> groups;
        for (std::size_t row = 0; row < rows; ++row) {
            if (!filter.passes(row)) {
                continue;
            }
            std::uint64_t key = 0;
            for (const auto& plan : plans) {
                key = key * plan.values.size() + plan.from_base[plan.codes[row]];
            }
            groups[key].add(row_value(row));
        }
        std::vector<std::pair<std::uint64_t, Aggregate>> sorted(groups.begin(), groups.end());
        std::sort(sorted.begin(), sorted.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        cells.reserve(sorted.size());
        std::vector<std::uint32_t> codes(arity);
        for (const auto& [key, stats] : sorted) {
            std::uint64_t rest = key;
            for (std::size_t i = arity; i-- > 0;) {
                codes[i] = static_cast<std::uint32_t>(rest % plans[i].values.size());
                rest /= plans[i].values.size();
            }
            cells.push_back(Cell{decode(plans, codes), stats.value(query.aggregator), stats});
        }
    } else {
        std::map<std::vector<std::uint32_t>, Aggregate> groups;
        std::vector<std::uint32_t> key(arity);
        for (std::size_t row = 0; row < rows; ++row) {
            if (!filter.passes(row)) {
                continue;
            }
            for (std::size_t i = 0; i < arity; ++i) {
                key[i] = plans[i].from_base[plans[i].codes[row]];
            }
            groups[key].add(row_value(row));
        }
        cells.reserve(groups.size());
        for (const auto& [codes, stats] : groups) {
            cells.push_back(Cell{decode(plans, codes), stats.value(query.aggregator), stats});
        }
    }
    return Cuboid(query, std::move(cells));
}

Cuboid materialize(DatasetPtr dataset, std::vector<std::string> dimensions, Aggregator aggregator,
                   std::optional<std::string> measure) {
    if (dimensions.empty()) {
        throw QueryError("materialize needs at least one dimension");
    }
    return materialize(make_query(std::move(dataset), std::move(dimensions), aggregator,
                                  std::move(measure)));
}

CubeQuery slice(CubeQuery query, const std::string& dimension, const std::string& value) {
    require_dataset(query);
    restrict(query.restriction,
             {{dimension, expand_values(*query.dataset, dimension, query.groupings, {value}, true)}});
    std::erase(query.dimensions, dimension);
    query.provenance.push_back(Operation{Operation::Kind::Slice, dimension, {value}, {}});
    return query;
}

Cuboid slice(const Cuboid& cuboid, const std::string& dimension, const std::string& value) {
    return materialize(slice(cuboid.query(), dimension, value));
}

CubeQuery dice(CubeQuery query, const std::string& dimension, const std::vector<std::string>& values) {
    require_dataset(query);
    restrict(query.restriction,
             {{dimension, expand_values(*query.dataset, dimension, query.groupings, values, false)}});
    query.provenance.push_back(Operation{Operation::Kind::Dice, dimension, values, {}});
    return query;
}

Cuboid dice(const Cuboid& cuboid, const std::string& dimension, const std::vector<std::string>& values) {
    return materialize(dice(cuboid.query(), dimension, values));
}

CubeQuery dice_range(CubeQuery query, const std::string& dimension, double low, double high) {
    require_dataset(query);
    require_dimension(*query.dataset, dimension);
    std::vector<std::string> selected;
    for (const auto& value : grouped_dictionary(*query.dataset, dimension, query.groupings)) {
        if (auto number = parse_measure(value); number && *number >= low && *number <= high) {
            selected.push_back(value);
        }
    }
    if (selected.empty()) {
        restrict(query.restriction, {{dimension, {}}});
        query.provenance.push_back(Operation{Operation::Kind::Dice, dimension, {}, {}});
        return query;
    }
    return dice(std::move(query), dimension, selected);
}

CubeQuery rollup(CubeQuery query, GroupingMap grouping) {
    require_dataset(query);
    require_dimension(*query.dataset, grouping.dimension);
    if (std::find(query.dimensions.begin(), query.dimensions.end(), grouping.dimension) ==
        query.dimensions.end()) {
        throw QueryError("cannot roll up '" + grouping.dimension + "': not a cuboid dimension");
    }
    query.provenance.push_back(
        Operation{Operation::Kind::Rollup, grouping.dimension, {}, grouping.level});
    query.groupings.push_back(std::move(grouping));
    return query;
}

Cuboid rollup(const Cuboid& cuboid, GroupingMap grouping) {
    return materialize(rollup(cuboid.query(), std::move(grouping)));
}

CubeQuery drilldown(CubeQuery query, const GroupingMap& grouping) {
    auto it = std::find_if(query.groupings.begin(), query.groupings.end(), [&](const GroupingMap& g) {
        return g.dimension == grouping.dimension && g.level == grouping.level;
    });
    if (it == query.groupings.end()) {
        throw QueryError("no roll-up of '" + grouping.dimension + "' to '" + grouping.level +
                         "' to drill down from");
    }
    query.groupings.erase(it);
    query.provenance.push_back(
        Operation{Operation::Kind::Drilldown, grouping.dimension, {}, grouping.level});
    return query;
}

Cuboid drilldown(const Cuboid& cuboid, const GroupingMap& grouping) {
    return materialize(drilldown(cuboid.query(), grouping));
}

}  // namespace tagcube
