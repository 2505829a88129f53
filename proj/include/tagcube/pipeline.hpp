#pragma once

#include <tagcube/descriptor.hpp>
#include <tagcube/iceberg.hpp>
#include <tagcube/layout.hpp>

#include <cstddef>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <tuple>
#include <vector>

namespace tagcube {

using IcebergPtr = std::shared_ptr<const IcebergCuboid>;

/// Lazily built icebergs shared between concurrent queries. A build in
/// flight blocks only the requests asking for the same key.
class IcebergCache {
public:
    IcebergPtr get(const DatasetPtr& dataset, const std::vector<std::string>& dimensions,
                   Aggregator aggregator, const std::optional<std::string>& measure,
                   std::size_t limit);

    /// Drops every entry built from dataset `id`.
    void evict(const std::string& id);
    std::size_t size() const;

private:
    // Keyed on the dataset object too, so a rebound dataset never sees
    // icebergs cut from its previous schema.
    using Key = std::tuple<std::string, const BoundDataset*, std::vector<std::string>, int,
                           std::string, std::size_t>;

    mutable std::mutex mutex_;
    std::map<Key, std::shared_future<IcebergPtr>> entries_;
};

struct QueryLimits {
    std::size_t max_k = kDefaultCloudSize;
    HintThresholds hints;
};

struct CloudResult {
    QueryDescriptor query;
    std::string permalink;
    TagCloud cloud;
    HintedLayout layout;
};

/// Checks the descriptor against the dataset schema. Throws QueryError.
void validate(const BoundDataset& dataset, const QueryDescriptor& descriptor, const QueryLimits& limits = {});

/// Top-k cloud (iceberg or exact), optional similarity layout and hints.
/// Without a cache the icebergs are built for this call only.
CloudResult run_query(const DatasetPtr& dataset, const QueryDescriptor& descriptor,
                      IcebergCache* cache = nullptr, const QueryLimits& limits = {});

}  // namespace tagcube
