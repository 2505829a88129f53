#include <tagcube/tagcloud.hpp>

#include <tagcube/error.hpp>

#include <algorithm>
#include <cmath>
#include <unordered_set>

namespace tagcube {

std::string make_term(const Address& address) {
    std::string term;
    for (std::size_t i = 0; i < address.size(); ++i) {
        if (i > 0) {
            term += kTermSeparator;
        }
        term += address[i];
    }
    return term;
}

const Tag* TagCloud::find(std::string_view term) const {
    for (const auto& tag : tags) {
        if (tag.term == term) {
            return &tag;
        }
    }
    return nullptr;
}

bool heavier(const Tag& a, const Tag& b) noexcept {
    if (a.weight != b.weight) {
        return a.weight > b.weight;
    }
    return a.term < b.term;
}

TagCloud from_cells(std::vector<std::string> dimensions, const std::vector<Cell>& cells,
                    std::size_t k) {
    if (k == 0) {
        throw QueryError("tag cloud size must be at least 1");
    }
    TagCloud cloud;
    cloud.dimensions = std::move(dimensions);
    cloud.size_bound = k;
    cloud.tags.reserve(cells.size());
    std::unordered_set<std::string> terms;
    for (const auto& cell : cells) {
        if (cell.measure < 0.0 || std::isnan(cell.measure)) {
            throw QueryError("negative aggregate for '" + make_term(cell.address) +
                             "': tag weights must be non-negative");
        }
        Tag tag{make_term(cell.address), cell.address, cell.measure};
        if (!terms.insert(tag.term).second) {
            throw QueryError("two cells share the term '" + tag.term + "'");
        }
        cloud.tags.push_back(std::move(tag));
    }
    const auto keep = std::min(k, cloud.tags.size());
    std::partial_sort(cloud.tags.begin(), cloud.tags.begin() + static_cast<std::ptrdiff_t>(keep),
                      cloud.tags.end(), heavier);
    cloud.tags.resize(keep);
    return cloud;
}

TagCloud from_cuboid(const Cuboid& cuboid, std::size_t k) {
    return from_cells(cuboid.dimensions(), cuboid.cells(), k);
}

double entropy(const TagCloud& cloud) {
    double total = 0.0;
    for (const auto& tag : cloud.tags) {
        total += tag.weight;
    }
    if (!(total > 0.0)) {
        throw QueryError("entropy of a cloud with zero total weight");
    }
    double h = 0.0;
    for (const auto& tag : cloud.tags) {
        if (tag.weight > 0.0) {
            const double p = tag.weight / total;
            h -= p * std::log(p);
        }
    }
    return std::max(h, 0.0);
}

double relative_entropy(const TagCloud& cloud) {
    if (cloud.size() < 2) {
        throw QueryError("relative entropy needs at least two tags");
    }
    return entropy(cloud) / std::log(static_cast<double>(cloud.size()));
}

namespace {

double max_weight(const TagCloud& cloud) {
    double best = 0.0;
    for (const auto& tag : cloud.tags) {
        best = std::max(best, tag.weight);
    }
    return best;
}

// Heaviest tag of `from` whose term is absent in `other`, over the heaviest
// tag of `from`; a maximum over no tags counts as 0.
double missing_ratio(const TagCloud& from, const TagCloud& other) {
    std::unordered_set<std::string_view> present;
    for (const auto& tag : other.tags) {
        present.insert(tag.term);
    }
    double missing = 0.0;
    for (const auto& tag : from.tags) {
        if (!present.contains(tag.term)) {
            missing = std::max(missing, tag.weight);
        }
    }
    const double top = max_weight(from);
    return top > 0.0 ? missing / top : 0.0;
}

}  // namespace

double fp_index(const TagCloud& approx, const TagCloud& exact) {
    if (approx.empty()) {
        throw QueryError("false-positive index of an empty approximate cloud");
    }
    return missing_ratio(approx, exact);
}

double fn_index(const TagCloud& approx, const TagCloud& exact) {
    if (exact.empty()) {
        throw QueryError("false-negative index against an empty exact cloud");
    }
    return missing_ratio(exact, approx);
}

TagCloud sort_cloud(TagCloud cloud, SortKey key, SortDirection direction) {
    const bool descending = direction == SortDirection::Descending;
    auto less = [&](const Tag& a, const Tag& b) {
        if (key == SortKey::Weight) {
            if (a.weight != b.weight) {
                return descending ? a.weight > b.weight : a.weight < b.weight;
            }
            return a.term < b.term;
        }
        if (a.term != b.term) {
            return descending ? a.term > b.term : a.term < b.term;
        }
        return a.weight < b.weight;
    };
    std::stable_sort(cloud.tags.begin(), cloud.tags.end(), less);
    return cloud;
}

TagCloud prune(TagCloud cloud, std::optional<double> min_weight, std::optional<std::size_t> top_n) {
    if (!min_weight && !top_n) {
        throw QueryError("prune needs a minimum weight or a tag count");
    }
    if (min_weight) {
        std::erase_if(cloud.tags, [&](const Tag& tag) { return tag.weight < *min_weight; });
    }
    if (top_n && *top_n < cloud.tags.size()) {
        // Keep the survivors in their current order.
        std::vector<Tag> ranked = cloud.tags;
        std::sort(ranked.begin(), ranked.end(), heavier);
        ranked.resize(*top_n);
        std::unordered_set<std::string> kept;
        for (const auto& tag : ranked) {
            kept.insert(tag.term);
        }
        std::erase_if(cloud.tags, [&](const Tag& tag) { return !kept.contains(tag.term); });
    }
    return cloud;
}

std::vector<int> font_buckets(const TagCloud& cloud, int levels) {
    if (levels < 1) {
        throw QueryError("font bucket count must be at least 1");
    }
    std::vector<int> buckets;
    if (cloud.empty()) {
        return buckets;
    }
    const auto [lo, hi] = std::minmax_element(
        cloud.tags.begin(), cloud.tags.end(),
        [](const Tag& a, const Tag& b) { return a.weight < b.weight; });
    const double wmin = lo->weight;
    const double wmax = hi->weight;
    buckets.reserve(cloud.size());
    for (const auto& tag : cloud.tags) {
        if (wmax == wmin) {
            buckets.push_back((levels + 1) / 2);
            continue;
        }
        const double scaled = std::ceil(levels * (tag.weight - wmin) / (wmax - wmin));
        buckets.push_back(std::clamp(static_cast<int>(scaled), 1, levels));
    }
    return buckets;
}

}  // namespace tagcube
