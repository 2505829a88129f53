#pragma once

#include <tagcube/cube.hpp>
#include <tagcube/iceberg.hpp>
#include <tagcube/tagcloud.hpp>

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tagcube {

enum class SimilarityKind { Cosine, Tanimoto, Jaccard };

std::string_view to_string(SimilarityKind kind) noexcept;
SimilarityKind parse_similarity(std::string_view text);

// Vector measures. Both arguments must share an axis (equal length). An
// all-zero argument makes every measure 0, so Jaccard stays equal to
// Tanimoto of the binarized vectors.
double cosine(std::span<const double> u, std::span<const double> v);
double tanimoto(std::span<const double> u, std::span<const double> v);
double jaccard(std::span<const double> u, std::span<const double> v);

std::vector<double> binarize(std::span<const double> values);

/// One tag's slice of the cuboid over tag dimensions plus clustering
/// dimensions, flattened onto `axis` (cluster-dimension addresses in
/// lexicographic order; absent cells are 0).
struct SubcuboidVector {
    Address tag;
    std::vector<Address> axis;
    std::vector<double> values;
};

/// The axis spans every clustering cell present in the restricted facts.
/// Throws QueryError when the two dimension sets overlap.
SubcuboidVector subcuboid_vector(DatasetPtr dataset, const std::vector<std::string>& tag_dimensions,
                                 const Tag& tag, const std::vector<std::string>& cluster_dimensions,
                                 Aggregator aggregator, const std::optional<std::string>& measure,
                                 const Restriction& restriction = {},
                                 const std::vector<GroupingMap>& groupings = {});

/// Dense symmetric matrix indexed like `tags()`.
class SimilarityMatrix {
public:
    SimilarityMatrix() = default;

    /// `values` is row-major n x n. Throws QueryError unless it is square,
    /// symmetric and within [-1, 1].
    SimilarityMatrix(std::vector<Tag> tags, std::vector<double> values,
                     SimilarityKind kind = SimilarityKind::Cosine);

    const std::vector<Tag>& tags() const noexcept { return tags_; }
    SimilarityKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return tags_.size(); }
    bool empty() const noexcept { return tags_.empty(); }

    double operator()(std::size_t i, std::size_t j) const noexcept { return values_[i * tags_.size() + j]; }

private:
    std::vector<Tag> tags_;
    std::vector<double> values_;
    SimilarityKind kind_ = SimilarityKind::Cosine;
};

/// Pairwise similarity of `tags` from cells over (tag dimensions ++
/// cluster dimensions); the first `tag_arity` address values locate the tag.
SimilarityMatrix similarity_matrix_from_cells(const std::vector<Tag>& tags, std::size_t tag_arity,
                                              const std::vector<Cell>& cells, SimilarityKind kind);

struct SimilarityOptions {
    /// Re-aggregate the base facts instead of an iceberg cuboid.
    bool exact = false;
    std::size_t iceberg_limit = 150;
    Restriction restriction;
    std::vector<GroupingMap> groupings;
};

/// Dimensions of the iceberg cuboid backing a similarity computation: tag
/// dimensions, cluster dimensions, then any restricted dimension not yet listed.
std::vector<std::string> similarity_cuboid_dimensions(const std::vector<std::string>& tag_dimensions,
                                                      const std::vector<std::string>& cluster_dimensions,
                                                      const Restriction& restriction);

SimilarityMatrix similarity_matrix(DatasetPtr dataset, const TagCloud& cloud,
                                   const std::vector<std::string>& cluster_dimensions,
                                   SimilarityKind kind, Aggregator aggregator,
                                   const std::optional<std::string>& measure,
                                   const SimilarityOptions& options = {});

/// Same computation over an iceberg built on similarity_cuboid_dimensions().
SimilarityMatrix similarity_matrix(const IcebergCuboid& iceberg, const TagCloud& cloud,
                                   const std::vector<std::string>& cluster_dimensions,
                                   SimilarityKind kind, const Restriction& restriction = {},
                                   const std::vector<GroupingMap>& groupings = {});

}  // namespace tagcube
