#include <tagcube/pipeline.hpp>

#include <tagcube/error.hpp>
#include <tagcube/similarity.hpp>

#include <algorithm>
#include <set>

namespace tagcube {

IcebergPtr IcebergCache::get(const DatasetPtr& dataset, const std::vector<std::string>& dimensions,
                             Aggregator aggregator, const std::optional<std::string>& measure,
                             std::size_t limit) {
    Key key{dataset->id(), dataset.get(), dimensions, static_cast<int>(aggregator),
            measure.value_or(""), limit};
    std::promise<IcebergPtr> promise;
    std::shared_future<IcebergPtr> future;
    bool builder = false;
    {
        std::lock_guard lock(mutex_);
        auto it = entries_.find(key);
        if (it == entries_.end()) {
            future = promise.get_future().share();
            entries_.emplace(key, future);
            builder = true;
        } else {
            future = it->second;
        }
    }
    if (builder) {
        try {
            promise.set_value(std::make_shared<const IcebergCuboid>(
                build_iceberg(dataset, dimensions, aggregator, measure, limit)));
        } catch (...) {
            // Failed builds are not cached; waiters see the same error.
            promise.set_exception(std::current_exception());
            std::lock_guard lock(mutex_);
            entries_.erase(key);
        }
    }
    return future.get();
}

void IcebergCache::evict(const std::string& id) {
    std::lock_guard lock(mutex_);
    std::erase_if(entries_, [&](const auto& entry) { return std::get<0>(entry.first) == id; });
}

std::size_t IcebergCache::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

namespace {

void require_dimension(const BoundDataset& dataset, const std::string& name, std::string_view role) {
    if (!dataset.has_dimension(name)) {
        throw QueryError(std::string(role) + " '" + name + "' is not a dimension of dataset " + dataset.id());
    }
}

void require_distinct(const std::vector<std::string>& names, std::string_view role) {
    std::set<std::string> seen;
    for (const auto& name : names) {
        if (!seen.insert(name).second) {
            throw QueryError(std::string(role) + " '" + name + "' is listed twice");
        }
    }
}

std::vector<std::string> tag_dimensions(const QueryDescriptor& d) {
    std::vector<std::string> out;
    for (const auto& dimension : d.dims) {
        if (!d.filter.slices.contains(dimension)) {
            out.push_back(dimension);
        }
    }
    return out;
}

}  // namespace

void validate(const BoundDataset& dataset, const QueryDescriptor& d, const QueryLimits& limits) {
    if (d.dataset != dataset.id()) {
        throw QueryError("descriptor names dataset " + d.dataset + ", not " + dataset.id());
    }
    if (d.dims.empty()) {
        throw QueryError("at least one tag dimension is required");
    }
    for (const auto& dimension : d.dims) {
        require_dimension(dataset, dimension, "tag dimension");
    }
    require_distinct(d.dims, "tag dimension");
    if (d.agg != Aggregator::Count) {
        if (!d.measure) {
            throw QueryError(std::string(to_string(d.agg)) + " needs a measure");
        }
        if (!dataset.has_measure(*d.measure)) {
            throw QueryError("'" + *d.measure + "' is not a measure of dataset " + dataset.id());
        }
    }
    for (const auto& [dimension, value] : d.filter.slices) {
        require_dimension(dataset, dimension, "sliced dimension");
    }
    for (const auto& [dimension, values] : d.filter.dices) {
        require_dimension(dataset, dimension, "diced dimension");
    }
    for (const auto& grouping : d.groupings) {
        require_dimension(dataset, grouping.dimension, "grouped dimension");
    }
    const auto tags = tag_dimensions(d);
    if (tags.empty()) {
        throw QueryError("every tag dimension is sliced away");
    }
    for (const auto& dimension : d.cluster) {
        require_dimension(dataset, dimension, "clustering dimension");
        if (std::find(tags.begin(), tags.end(), dimension) != tags.end()) {
            throw QueryError("clustering dimension '" + dimension + "' is also a tag dimension");
        }
    }
    require_distinct(d.cluster, "clustering dimension");
    if (d.k < 1 || d.k > limits.max_k) {
        throw QueryError("k must lie in [1, " + std::to_string(limits.max_k) + "]");
    }
    if (d.limit < 1) {
        throw QueryError("iceberg limit must be at least 1");
    }
    if (d.buckets < 1 || d.buckets > 1000) {
        throw QueryError("font bucket count must lie in [1, 1000]");
    }
    // Fails early on unknown values and empty dice sets.
    resolve_filter(dataset, d.filter, d.groupings);
}

CloudResult run_query(const DatasetPtr& dataset, const QueryDescriptor& descriptor, IcebergCache* cache,
                      const QueryLimits& limits) {
    CloudResult result;
    result.query = descriptor;
    if (result.query.agg == Aggregator::Count) {
        result.query.measure.reset();
    }
    const QueryDescriptor& d = result.query;
    validate(*dataset, d, limits);
    result.permalink = encode_permalink(d);

    auto iceberg = [&](const std::vector<std::string>& dimensions) -> IcebergPtr {
        if (cache != nullptr) {
            return cache->get(dataset, dimensions, d.agg, d.measure, d.limit);
        }
        return std::make_shared<const IcebergCuboid>(
            build_iceberg(dataset, dimensions, d.agg, d.measure, d.limit));
    };

    const auto tags = tag_dimensions(d);
    const Restriction restriction = resolve_filter(*dataset, d.filter, d.groupings);
    if (d.exact) {
        result.cloud = topk_exact(dataset, tags, d.agg, d.measure, d.filter, d.k, d.groupings);
    } else {
        const auto ice = iceberg(similarity_cuboid_dimensions(tags, {}, restriction));
        IcebergQuery query;
        query.filter = d.filter;
        query.k = d.k;
        query.dimensions = tags;
        query.groupings = d.groupings;
        result.cloud = topk_iceberg(*ice, query);
    }

    const auto buckets = font_buckets(result.cloud, d.buckets);
    if (result.cloud.empty() || d.cluster.empty()) {
        result.layout = plain_layout(result.cloud, buckets);
        return result;
    }

    const SimilarityMatrix matrix = [&] {
        if (d.exact) {
            SimilarityOptions options;
            options.exact = true;
            options.restriction = restriction;
            options.groupings = d.groupings;
            return similarity_matrix(dataset, result.cloud, d.cluster, d.sim, d.agg, d.measure, options);
        }
        const auto ice = iceberg(similarity_cuboid_dimensions(tags, d.cluster, restriction));
        return similarity_matrix(*ice, result.cloud, d.cluster, d.sim, restriction, d.groupings);
    }();
    const Arrangement arrangement = arrange(matrix, d.heuristic, d.seed);
    result.layout = insert_hints(arrangement, matrix, buckets, limits.hints);
    return result;
}

}  // namespace tagcube
