#pragma once

#include <tagcube/cube.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tagcube {

/// Joins the attribute values of a k-tag, e.g. "Canada–March".
inline constexpr std::string_view kTermSeparator = "–";

/// Default upper bound on the number of tags shown at once.
inline constexpr std::size_t kDefaultCloudSize = 150;

/// (term, object, weight) triplet. The object is the cell address the tag
/// describes; the term is its values joined with kTermSeparator.
struct Tag {
    std::string term;
    Address object;
    double weight = 0.0;

    std::size_t arity() const noexcept { return object.size(); }
    bool operator==(const Tag&) const = default;
};

std::string make_term(const Address& address);

struct TagCloud {
    std::vector<Tag> tags;
    std::vector<std::string> dimensions;
    std::size_t size_bound = kDefaultCloudSize;

    std::size_t size() const noexcept { return tags.size(); }
    bool empty() const noexcept { return tags.empty(); }
    const Tag* find(std::string_view term) const;
};

/// Strict weak order used everywhere tags are ranked: heavier first, then
/// by term.
bool heavier(const Tag& a, const Tag& b) noexcept;

/// Top-k cells as tags ranked by `heavier`. Throws QueryError when k is 0,
/// a cell measure is negative, or two cells produce the same term.
TagCloud from_cells(std::vector<std::string> dimensions, const std::vector<Cell>& cells,
                    std::size_t k = kDefaultCloudSize);

TagCloud from_cuboid(const Cuboid& cuboid, std::size_t k = kDefaultCloudSize);

/// Shannon entropy (natural log) of the normalized weights. Throws
/// QueryError when the total weight is zero.
double entropy(const TagCloud& cloud);

/// entropy / ln(tag count), in [0, 1]. Needs at least two tags.
double relative_entropy(const TagCloud& cloud);

/// Heaviest tag of `approx` missing from `exact`, relative to the heaviest
/// tag of `approx`. Tags are matched by term. Throws when `approx` is empty.
double fp_index(const TagCloud& approx, const TagCloud& exact);

/// Heaviest tag of `exact` missing from `approx`, relative to the heaviest
/// tag of `exact`. Throws when `exact` is empty.
double fn_index(const TagCloud& approx, const TagCloud& exact);

enum class SortKey { Weight, Term };
enum class SortDirection { Ascending, Descending };

/// Stable sort; ties on the key are ordered by the other key ascending.
TagCloud sort_cloud(TagCloud cloud, SortKey key, SortDirection direction);

/// Drops tags lighter than `min_weight`, then keeps the `top_n` heaviest.
/// At least one criterion is required.
TagCloud prune(TagCloud cloud, std::optional<double> min_weight, std::optional<std::size_t> top_n);

/// Font size class per tag, aligned with `cloud.tags`, each in 1..levels.
std::vector<int> font_buckets(const TagCloud& cloud, int levels);

}  // namespace tagcube
