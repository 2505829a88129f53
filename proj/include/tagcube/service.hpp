#pragma once

#include <tagcube/fact_store.hpp>
#include <tagcube/pipeline.hpp>

#include <map>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>

namespace tagcube {

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// Repeated keys are allowed (slice, dice, group).
using Params = std::multimap<std::string, std::string>;

/// Builds a descriptor from cloud-endpoint query parameters:
/// dims=a,b  agg  measure  k  limit  exact  cluster=c,d  sim  heuristic
/// seed  buckets  slice=dim:value  dice=dim:v1|v2  group={json grouping}.
/// Throws QueryError on unknown or malformed parameters.
QueryDescriptor descriptor_from_params(const std::string& dataset_id, const Params& params);

/// Inverse of descriptor_from_params, for building cloud URLs.
Params params_from_descriptor(const QueryDescriptor& descriptor);

struct ServiceOptions {
    QueryLimits limits;
    std::string cors_origin = "*";
};

/// Transport-independent request handlers; the HTTP layer only routes.
/// Safe to call from many threads.
class Service {
public:
    explicit Service(ServiceOptions options = {});

    Response upload(std::string_view body, const Params& params);
    Response bind(const std::string& id, std::string_view body);
    Response dimensions(const std::string& id) const;
    Response cloud(const std::string& id, const Params& params);
    Response permalink(const std::string& token);
    Response embed(const std::string& token);
    Response remove(const std::string& id);

    const ServiceOptions& options() const noexcept { return options_; }
    IcebergCache& cache() noexcept { return cache_; }

private:
    struct Entry {
        std::shared_ptr<const RawTable> table;
        DatasetPtr bound;
    };

    DatasetPtr bound_dataset(const std::string& id) const;
    Response run(const QueryDescriptor& descriptor, bool html);

    ServiceOptions options_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, Entry> datasets_;
    IcebergCache cache_;
};

/// HTTP/1.1 front end routing to a Service, with permissive CORS.
class HttpServer {
public:
    explicit HttpServer(Service& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Port 0 picks a free port. Returns the bound port, or -1.
    int bind(const std::string& host, int port);
    /// Serves until stop(); call after bind().
    void listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Port from TAGCUBE_PORT, else `fallback`.
int port_from_environment(int fallback);

}  // namespace tagcube
