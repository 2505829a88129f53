#pragma once

#include <tagcube/cube.hpp>
#include <tagcube/layout.hpp>
#include <tagcube/similarity.hpp>
#include <tagcube/tagcloud.hpp>

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tagcube {

/// Complete, self-contained description of one tag-cloud request. Its
/// canonical JSON is what permalinks carry.
struct QueryDescriptor {
    std::string dataset;
    std::vector<std::string> dims;
    Aggregator agg = Aggregator::Count;
    std::optional<std::string> measure;
    Filter filter;
    std::vector<GroupingMap> groupings;
    std::size_t k = kDefaultCloudSize;
    std::size_t limit = 150;
    bool exact = false;
    std::vector<std::string> cluster;
    SimilarityKind sim = SimilarityKind::Cosine;
    HeuristicSpec heuristic;
    std::uint64_t seed = 0;
    int buckets = 7;

    bool operator==(const QueryDescriptor&) const = default;
};

/// Canonical form: every field present, keys sorted.
nlohmann::json to_json(const QueryDescriptor& descriptor);

/// Strict inverse of to_json: unknown keys, missing keys and wrong types
/// raise QueryError.
QueryDescriptor descriptor_from_json(const nlohmann::json& json);

std::string canonical_json(const QueryDescriptor& descriptor);

std::string base64url_encode(std::string_view bytes);
/// Unpadded URL-safe alphabet only; nullopt on any other input.
std::optional<std::string> base64url_decode(std::string_view text);

std::string encode_permalink(const QueryDescriptor& descriptor);

/// Throws NotFoundError unless `token` is exactly the permalink of some
/// descriptor.
QueryDescriptor decode_permalink(std::string_view token);

}  // namespace tagcube
