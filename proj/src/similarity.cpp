#include <tagcube/similarity.hpp>

#include <tagcube/error.hpp>

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <utility>

namespace tagcube {

std::string_view to_string(SimilarityKind kind) noexcept {
    switch (kind) {
    case SimilarityKind::Cosine:
        return "cosine";
    case SimilarityKind::Tanimoto:
        return "tanimoto";
    case SimilarityKind::Jaccard:
        return "jaccard";
    }
    return "cosine";
}

SimilarityKind parse_similarity(std::string_view text) {
    std::string lower(text);
    std::transform(lower.begin(), lower.end(), lower.begin(),
                   [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
    if (lower == "cosine") {
        return SimilarityKind::Cosine;
    }
    if (lower == "tanimoto") {
        return SimilarityKind::Tanimoto;
    }
    if (lower == "jaccard") {
        return SimilarityKind::Jaccard;
    }
    throw QueryError("unknown similarity measure '" + std::string(text) + "'");
}

namespace {

void require_same_axis(std::span<const double> u, std::span<const double> v) {
    if (u.size() != v.size()) {
        throw QueryError("vectors do not share an axis");
    }
}

struct Moments {
    double dot = 0.0;
    double uu = 0.0;
    double vv = 0.0;
};

Moments moments(std::span<const double> u, std::span<const double> v) {
    Moments m;
    for (std::size_t i = 0; i < u.size(); ++i) {
        m.dot += u[i] * v[i];
        m.uu += u[i] * u[i];
        m.vv += v[i] * v[i];
    }
    return m;
}

double cosine_of(const Moments& m) {
    if (m.uu == 0.0 || m.vv == 0.0) {
        return 0.0;
    }
    return std::clamp(m.dot / std::sqrt(m.uu * m.vv), -1.0, 1.0);
}

double tanimoto_of(const Moments& m) {
    const double denominator = m.uu + m.vv - m.dot;
    if (denominator == 0.0) {
        return 0.0;
    }
    return std::clamp(m.dot / denominator, -1.0, 1.0);
}

double jaccard_of(std::size_t common, std::size_t either) {
    return either == 0 ? 0.0 : static_cast<double>(common) / static_cast<double>(either);
}

}  // namespace

double cosine(std::span<const double> u, std::span<const double> v) {
    require_same_axis(u, v);
    return cosine_of(moments(u, v));
}

double tanimoto(std::span<const double> u, std::span<const double> v) {
    require_same_axis(u, v);
    return tanimoto_of(moments(u, v));
}

double jaccard(std::span<const double> u, std::span<const double> v) {
    require_same_axis(u, v);
    std::size_t common = 0;
    std::size_t either = 0;
    for (std::size_t i = 0; i < u.size(); ++i) {
        const bool a = u[i] > 0.0;
        const bool b = v[i] > 0.0;
        common += (a && b) ? 1 : 0;
        either += (a || b) ? 1 : 0;
    }
    return jaccard_of(common, either);
}

std::vector<double> binarize(std::span<const double> values) {
    std::vector<double> out;
    out.reserve(values.size());
    for (double value : values) {
        out.push_back(value > 0.0 ? 1.0 : 0.0);
    }
    return out;
}

namespace {

void require_disjoint(const std::vector<std::string>& tag_dimensions,
                      const std::vector<std::string>& cluster_dimensions) {
    if (cluster_dimensions.empty()) {
        throw QueryError("at least one clustering dimension is required");
    }
    for (const auto& dimension : cluster_dimensions) {
        if (std::find(tag_dimensions.begin(), tag_dimensions.end(), dimension) != tag_dimensions.end()) {
            throw QueryError("clustering dimension '" + dimension + "' is also a tag dimension");
        }
    }
}

std::vector<std::string> concat(const std::vector<std::string>& a, const std::vector<std::string>& b) {
    std::vector<std::string> out = a;
    out.insert(out.end(), b.begin(), b.end());
    return out;
}

Address split_tail(const Address& address, std::size_t from) {
    return Address(address.begin() + static_cast<std::ptrdiff_t>(from), address.end());
}

Address split_head(const Address& address, std::size_t count) {
    return Address(address.begin(), address.begin() + static_cast<std::ptrdiff_t>(count));
}

using SparseVector = std::vector<std::pair<std::size_t, double>>;

}  // namespace

SubcuboidVector subcuboid_vector(DatasetPtr dataset, const std::vector<std::string>& tag_dimensions,
                                 const Tag& tag, const std::vector<std::string>& cluster_dimensions,
                                 Aggregator aggregator, const std::optional<std::string>& measure,
                                 const Restriction& restriction,
                                 const std::vector<GroupingMap>& groupings) {
    require_disjoint(tag_dimensions, cluster_dimensions);
    if (tag.object.size() != tag_dimensions.size()) {
        throw QueryError("tag '" + tag.term + "' does not match the tag dimensions");
    }
    auto query = make_query(dataset, concat(tag_dimensions, cluster_dimensions), aggregator, measure);
    query.restriction = restriction;
    query.groupings = groupings;
    const Cuboid cuboid = materialize(query);

    const std::size_t arity = tag_dimensions.size();
    std::map<Address, double> slice;
    std::vector<Address> axis;
    for (const auto& cell : cuboid.cells()) {
        Address cluster = split_tail(cell.address, arity);
        if (split_head(cell.address, arity) == tag.object) {
            slice[cluster] = cell.measure;
        }
        axis.push_back(std::move(cluster));
    }
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());

    SubcuboidVector out;
    out.tag = tag.object;
    out.values.reserve(axis.size());
    for (const auto& point : axis) {
        auto it = slice.find(point);
        out.values.push_back(it == slice.end() ? 0.0 : it->second);
    }
    out.axis = std::move(axis);
    return out;
}

SimilarityMatrix::SimilarityMatrix(std::vector<Tag> tags, std::vector<double> values, SimilarityKind kind)
    : tags_(std::move(tags)), values_(std::move(values)), kind_(kind) {
    const std::size_t n = tags_.size();
    if (values_.size() != n * n) {
        throw QueryError("similarity matrix is not square");
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double value = values_[i * n + j];
            if (!(value >= -1.0 && value <= 1.0)) {
                throw QueryError("similarity outside [-1, 1]");
            }
            if (value != values_[j * n + i]) {
                throw QueryError("similarity matrix is not symmetric");
            }
        }
    }
}

SimilarityMatrix similarity_matrix_from_cells(const std::vector<Tag>& tags, std::size_t tag_arity,
                                              const std::vector<Cell>& cells, SimilarityKind kind) {
    std::map<Address, std::size_t> tag_index;
    for (std::size_t i = 0; i < tags.size(); ++i) {
        if (tags[i].object.size() != tag_arity) {
            throw QueryError("tag '" + tags[i].term + "' does not match the tag dimensions");
        }
        tag_index.emplace(tags[i].object, i);
    }

    // Shared axis: every clustering cell seen under one of the tags.
    std::vector<std::pair<std::size_t, const Cell*>> owned;
    std::vector<Address> axis;
    for (const auto& cell : cells) {
        auto it = tag_index.find(split_head(cell.address, tag_arity));
        if (it == tag_index.end()) {
            continue;
        }
        owned.emplace_back(it->second, &cell);
        axis.push_back(split_tail(cell.address, tag_arity));
    }
    std::sort(axis.begin(), axis.end());
    axis.erase(std::unique(axis.begin(), axis.end()), axis.end());

    const std::size_t n = tags.size();
    std::vector<SparseVector> vectors(n);
    for (const auto& [index, cell] : owned) {
        const auto point = split_tail(cell->address, tag_arity);
        const auto position = static_cast<std::size_t>(
            std::lower_bound(axis.begin(), axis.end(), point) - axis.begin());
        vectors[index].emplace_back(position, cell->measure);
    }
    std::vector<double> norms(n, 0.0);
    std::vector<std::size_t> support(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        std::sort(vectors[i].begin(), vectors[i].end());
        for (const auto& [position, value] : vectors[i]) {
            norms[i] += value * value;
            support[i] += value > 0.0 ? 1 : 0;
        }
    }

    std::vector<double> values(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        values[i * n + i] = kind == SimilarityKind::Jaccard ? (support[i] > 0 ? 1.0 : 0.0)
                                                            : (norms[i] > 0.0 ? 1.0 : 0.0);
        for (std::size_t j = i + 1; j < n; ++j) {
            double dot = 0.0;
            std::size_t common = 0;
            auto a = vectors[i].begin();
            auto b = vectors[j].begin();
            while (a != vectors[i].end() && b != vectors[j].end()) {
                if (a->first < b->first) {
                    ++a;
                } else if (b->first < a->first) {
                    ++b;
                } else {
                    dot += a->second * b->second;
                    common += (a->second > 0.0 && b->second > 0.0) ? 1 : 0;
                    ++a;
                    ++b;
                }
            }
            double value = 0.0;
            switch (kind) {
            case SimilarityKind::Cosine:
                value = cosine_of(Moments{dot, norms[i], norms[j]});
                break;
            case SimilarityKind::Tanimoto:
                value = tanimoto_of(Moments{dot, norms[i], norms[j]});
                break;
            case SimilarityKind::Jaccard:
                value = jaccard_of(common, support[i] + support[j] - common);
                break;
            }
            values[i * n + j] = value;
            values[j * n + i] = value;
        }
    }
    return SimilarityMatrix(tags, std::move(values), kind);
}

std::vector<std::string> similarity_cuboid_dimensions(const std::vector<std::string>& tag_dimensions,
                                                      const std::vector<std::string>& cluster_dimensions,
                                                      const Restriction& restriction) {
    auto dimensions = concat(tag_dimensions, cluster_dimensions);
    for (const auto& [dimension, values] : restriction) {
        if (std::find(dimensions.begin(), dimensions.end(), dimension) == dimensions.end()) {
            dimensions.push_back(dimension);
        }
    }
    return dimensions;
}

SimilarityMatrix similarity_matrix(DatasetPtr dataset, const TagCloud& cloud,
                                   const std::vector<std::string>& cluster_dimensions,
                                   SimilarityKind kind, Aggregator aggregator,
                                   const std::optional<std::string>& measure,
                                   const SimilarityOptions& options) {
    if (cloud.empty()) {
        throw QueryError("similarity of an empty tag cloud");
    }
    require_disjoint(cloud.dimensions, cluster_dimensions);
    if (!options.exact) {
        const auto iceberg = build_iceberg(
            dataset, similarity_cuboid_dimensions(cloud.dimensions, cluster_dimensions, options.restriction),
            aggregator, measure, options.iceberg_limit);
        return similarity_matrix(iceberg, cloud, cluster_dimensions, kind, options.restriction,
                                 options.groupings);
    }
    auto query = make_query(dataset, concat(cloud.dimensions, cluster_dimensions), aggregator, measure);
    query.restriction = options.restriction;
    query.groupings = options.groupings;
    const Cuboid cuboid = materialize(query);
    return similarity_matrix_from_cells(cloud.tags, cloud.dimensions.size(), cuboid.cells(), kind);
}

SimilarityMatrix similarity_matrix(const IcebergCuboid& iceberg, const TagCloud& cloud,
                                   const std::vector<std::string>& cluster_dimensions,
                                   SimilarityKind kind, const Restriction& restriction,
                                   const std::vector<GroupingMap>& groupings) {
    if (cloud.empty()) {
        throw QueryError("similarity of an empty tag cloud");
    }
    require_disjoint(cloud.dimensions, cluster_dimensions);
    const auto cells =
        reaggregate(iceberg, restriction, groupings, concat(cloud.dimensions, cluster_dimensions));
    return similarity_matrix_from_cells(cloud.tags, cloud.dimensions.size(), cells, kind);
}

}  // namespace tagcube
