#include <tagcube/service.hpp>

#include <tagcube/error.hpp>
#include <tagcube/wire.hpp>

#include <httplib.h>
#include <json.hpp>

#include <charconv>
#include <cstdlib>
#include <mutex>
#include <set>

namespace tagcube {

using nlohmann::json;

namespace {

const std::set<std::string> kCloudParams = {"dims", "agg",  "measure", "k",       "limit",
                                            "exact", "cluster", "sim", "heuristic", "seed",
                                            "buckets", "slice", "dice", "group"};
const std::set<std::string> kRepeatable = {"slice", "dice", "group"};

std::vector<std::string> split(std::string_view text, char separator) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto end = text.find(separator, start);
        out.emplace_back(text.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (end == std::string_view::npos) {
            return out;
        }
        start = end + 1;
    }
}

std::vector<std::string> name_list(const std::string& text, const std::string& param) {
    auto names = split(text, ',');
    for (const auto& name : names) {
        if (name.empty()) {
            throw QueryError("empty name in '" + param + "'");
        }
    }
    return names;
}

std::uint64_t parse_unsigned(const std::string& text, const std::string& param) {
    std::uint64_t value = 0;
    const auto* end = text.data() + text.size();
    const auto [ptr, ec] = std::from_chars(text.data(), end, value);
    if (text.empty() || ec != std::errc() || ptr != end) {
        throw QueryError("parameter '" + param + "' must be a non-negative integer, got '" + text + "'");
    }
    return value;
}

bool parse_flag(const std::string& text, const std::string& param) {
    if (text == "true" || text == "1") {
        return true;
    }
    if (text == "false" || text == "0") {
        return false;
    }
    throw QueryError("parameter '" + param + "' must be true or false");
}

std::pair<std::string, std::string> split_binding(const std::string& text, const std::string& param) {
    const auto colon = text.find(':');
    if (colon == std::string::npos || colon == 0) {
        throw QueryError("parameter '" + param + "' must look like dimension:value");
    }
    return {text.substr(0, colon), text.substr(colon + 1)};
}

GroupingMap parse_grouping(const std::string& text) {
    const auto parsed = json::parse(text, nullptr, false);
    if (parsed.is_discarded() || !parsed.is_object()) {
        throw QueryError("parameter 'group' must be a JSON object");
    }
    // Reuse the strict descriptor reader on a minimal shell.
    QueryDescriptor shell;
    auto wrapped = to_json(shell);
    wrapped["group"] = json::array({parsed});
    return descriptor_from_json(wrapped).groupings.front();
}

Response json_response(int status, const json& body) {
    return Response{status, "application/json", body.dump(-1, ' ', false, json::error_handler_t::replace)};
}

Response error_response(int status, const std::string& message) {
    return json_response(status, json{{"error", message}});
}

template <typename F>
Response guarded(F&& handler) {
    try {
        return handler();
    } catch (const NotFoundError& error) {
        return error_response(404, error.what());
    } catch (const ParseError& error) {
        return error_response(400, error.what());
    } catch (const SchemaError& error) {
        return error_response(422, error.what());
    } catch (const QueryError& error) {
        return error_response(422, error.what());
    } catch (const std::exception& error) {
        return error_response(500, error.what());
    }
}

char parse_delimiter(const Params& params) {
    auto it = params.find("delimiter");
    if (it == params.end()) {
        return ',';
    }
    const std::string& text = it->second;
    if (text == "tab" || text == "\\t" || text == "\t") {
        return '\t';
    }
    if (text.size() != 1 || text == "\"" || text == "\n" || text == "\r") {
        throw ParseError("delimiter must be a single character other than a quote or newline", 0);
    }
    return text[0];
}

}  // namespace

QueryDescriptor descriptor_from_params(const std::string& dataset_id, const Params& params) {
    QueryDescriptor d;
    d.dataset = dataset_id;
    std::set<std::string> seen;
    for (const auto& [key, value] : params) {
        if (!kCloudParams.contains(key)) {
            throw QueryError("unknown parameter '" + key + "'");
        }
        if (!kRepeatable.contains(key) && !seen.insert(key).second) {
            throw QueryError("parameter '" + key + "' given twice");
        }
        if (key == "dims") {
            d.dims = name_list(value, key);
        } else if (key == "agg") {
            d.agg = parse_aggregator(value);
        } else if (key == "measure") {
            if (value.empty()) {
                throw QueryError("parameter 'measure' is empty");
            }
            d.measure = value;
        } else if (key == "k") {
            d.k = parse_unsigned(value, key);
        } else if (key == "limit") {
            d.limit = parse_unsigned(value, key);
        } else if (key == "exact") {
            d.exact = parse_flag(value, key);
        } else if (key == "cluster") {
            d.cluster = value.empty() ? std::vector<std::string>{} : name_list(value, key);
        } else if (key == "sim") {
            d.sim = parse_similarity(value);
        } else if (key == "heuristic") {
            d.heuristic = HeuristicSpec::parse(value);
        } else if (key == "seed") {
            d.seed = parse_unsigned(value, key);
        } else if (key == "buckets") {
            const auto buckets = parse_unsigned(value, key);
            if (buckets > 1000) {
                throw QueryError("parameter 'buckets' is out of range");
            }
            d.buckets = static_cast<int>(buckets);
        } else if (key == "slice") {
            auto [dimension, bound] = split_binding(value, key);
            if (!d.filter.slices.emplace(dimension, bound).second) {
                throw QueryError("dimension '" + dimension + "' is sliced twice");
            }
        } else if (key == "dice") {
            auto [dimension, values] = split_binding(value, key);
            if (!d.filter.dices.emplace(dimension, split(values, '|')).second) {
                throw QueryError("dimension '" + dimension + "' is diced twice");
            }
        } else if (key == "group") {
            d.groupings.push_back(parse_grouping(value));
        }
    }
    if (d.dims.empty()) {
        throw QueryError("parameter 'dims' is required");
    }
    return d;
}

Params params_from_descriptor(const QueryDescriptor& d) {
    auto join = [](const std::vector<std::string>& items, char separator) {
        std::string out;
        for (std::size_t i = 0; i < items.size(); ++i) {
            out += (i ? std::string(1, separator) : std::string()) + items[i];
        }
        return out;
    };
    Params params;
    params.emplace("dims", join(d.dims, ','));
    params.emplace("agg", std::string(to_string(d.agg)));
    if (d.measure) {
        params.emplace("measure", *d.measure);
    }
    params.emplace("k", std::to_string(d.k));
    params.emplace("limit", std::to_string(d.limit));
    params.emplace("exact", d.exact ? "true" : "false");
    if (!d.cluster.empty()) {
        params.emplace("cluster", join(d.cluster, ','));
    }
    params.emplace("sim", std::string(to_string(d.sim)));
    params.emplace("heuristic", d.heuristic.to_string());
    params.emplace("seed", std::to_string(d.seed));
    params.emplace("buckets", std::to_string(d.buckets));
    for (const auto& [dimension, value] : d.filter.slices) {
        params.emplace("slice", dimension + ":" + value);
    }
    for (const auto& [dimension, values] : d.filter.dices) {
        params.emplace("dice", dimension + ":" + join(values, '|'));
    }
    for (const auto& grouping : d.groupings) {
        params.emplace("group", json{{"dimension", grouping.dimension},
                                     {"level", grouping.level},
                                     {"map", grouping.mapping}}
                                    .dump());
    }
    return params;
}

Service::Service(ServiceOptions options) : options_(std::move(options)) {}

Response Service::upload(std::string_view body, const Params& params) {
    return guarded([&] {
        const char delimiter = parse_delimiter(params);
        bool header = true;
        if (auto it = params.find("header"); it != params.end()) {
            try {
                header = parse_flag(it->second, "header");
            } catch (const QueryError& error) {
                throw ParseError(error.what(), 0);
            }
        }
        auto table = std::make_shared<const RawTable>(parse_table(body, delimiter, header));
        const std::string id = dataset_id_for(body, delimiter, header);
        {
            std::unique_lock lock(mutex_);
            auto& entry = datasets_[id];
            if (!entry.table || !(*entry.table == *table)) {
                entry = Entry{table, nullptr};
                cache_.evict(id);
            }
        }
        json out = json::object();
        out["id"] = id;
        if (auto it = params.find("name"); it != params.end()) {
            out["name"] = it->second;
        }
        out["columns"] = table->columns;
        out["rows"] = table->rows.size();
        return json_response(201, out);
    });
}

Response Service::bind(const std::string& id, std::string_view body) {
    return guarded([&] {
        const auto parsed = json::parse(body, nullptr, false);
        std::shared_ptr<const RawTable> table;
        {
            std::shared_lock lock(mutex_);
            auto it = datasets_.find(id);
            if (it == datasets_.end()) {
                throw NotFoundError("no dataset " + id);
            }
            table = it->second.table;
        }
        if (parsed.is_discarded() || !parsed.is_object()) {
            return error_response(400, "schema body must be a JSON object");
        }
        auto names = [&](const char* key) {
            std::vector<std::string> out;
            auto it = parsed.find(key);
            if (it == parsed.end()) {
                return out;
            }
            if (!it->is_array()) {
                throw SchemaError(std::string("'") + key + "' must be an array of column names");
            }
            for (const auto& item : *it) {
                if (!item.is_string()) {
                    throw SchemaError(std::string("'") + key + "' must be an array of column names");
                }
                out.push_back(item.get<std::string>());
            }
            return out;
        };
        for (const auto& [key, value] : parsed.items()) {
            if (key != "dimensions" && key != "measures") {
                throw SchemaError("unknown schema field '" + key + "'");
            }
        }
        auto dataset = bind_schema(table, names("dimensions"), names("measures"), id);
        {
            std::unique_lock lock(mutex_);
            auto it = datasets_.find(id);
            if (it == datasets_.end() || it->second.table != table) {
                throw NotFoundError("dataset " + id + " changed while binding");
            }
            it->second.bound = dataset;
            cache_.evict(id);
        }
        return json_response(200, json{{"id", id},
                                       {"dimensions", dataset->schema().dimensions},
                                       {"measures", dataset->schema().measures},
                                       {"facts", dataset->fact_count()}});
    });
}

DatasetPtr Service::bound_dataset(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto it = datasets_.find(id);
    if (it == datasets_.end()) {
        throw NotFoundError("no dataset " + id);
    }
    if (!it->second.bound) {
        throw QueryError("dataset " + id + " has no schema yet");
    }
    return it->second.bound;
}

Response Service::dimensions(const std::string& id) const {
    return guarded([&] {
        const auto dataset = bound_dataset(id);
        json dims = json::array();
        for (const auto& name : dataset->schema().dimensions) {
            dims.push_back(json{{"name", name}, {"values", dataset->dictionary(name)}});
        }
        return json_response(200, json{{"id", id},
                                       {"dimensions", dims},
                                       {"measures", dataset->schema().measures},
                                       {"facts", dataset->fact_count()}});
    });
}

Response Service::run(const QueryDescriptor& descriptor, bool html) {
    const auto dataset = bound_dataset(descriptor.dataset);
    const auto result = run_query(dataset, descriptor, &cache_, options_.limits);
    if (html) {
        return Response{200, "text/html; charset=utf-8", render_embed_html(result)};
    }
    return Response{200, "application/json", to_wire_json(result)};
}

Response Service::cloud(const std::string& id, const Params& params) {
    return guarded([&] {
        bound_dataset(id);
        return run(descriptor_from_params(id, params), false);
    });
}

Response Service::permalink(const std::string& token) {
    return guarded([&] {
        const auto descriptor = decode_permalink(token);
        return run(descriptor, false);
    });
}

Response Service::embed(const std::string& token) {
    return guarded([&] {
        const auto descriptor = decode_permalink(token);
        return run(descriptor, true);
    });
}

Response Service::remove(const std::string& id) {
    return guarded([&] {
        {
            std::unique_lock lock(mutex_);
            if (datasets_.erase(id) == 0) {
                throw NotFoundError("no dataset " + id);
            }
        }
        cache_.evict(id);
        return json_response(200, json{{"id", id}, {"deleted", true}});
    });
}

struct HttpServer::Impl {
    explicit Impl(Service& s) : service(s) {}
    Service& service;
    httplib::Server server;
};

namespace {

void reply(httplib::Response& res, const Response& response) {
    res.status = response.status;
    res.set_content(response.body, response.content_type);
}

}  // namespace

HttpServer::HttpServer(Service& service) : impl_(std::make_unique<Impl>(service)) {
    auto& server = impl_->server;
    Service* svc = &service;
    server.set_default_headers({
        {"Access-Control-Allow-Origin", service.options().cors_origin},
        {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
        {"Access-Control-Allow-Headers", "Content-Type"},
    });
    server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Post("/datasets", [svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->upload(req.body, req.params));
    });
    server.Post(R"(/datasets/([^/]+)/schema)", [svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->bind(req.matches[1], req.body));
    });
    server.Get(R"(/datasets/([^/]+)/dimensions)", [svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->dimensions(req.matches[1]));
    });
    server.Get(R"(/datasets/([^/]+)/cloud)", [svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->cloud(req.matches[1], req.params));
    });
    server.Delete(R"(/datasets/([^/]+))", [svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->remove(req.matches[1]));
    });
    server.Get(R"(/c/([^/]+))", [svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->permalink(req.matches[1]));
    });
    server.Get(R"(/embed/([^/]+))", [svc](const httplib::Request& req, httplib::Response& res) {
        reply(res, svc->embed(req.matches[1]));
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            reply(res, error_response(res.status, res.status == 404 ? "no such endpoint" : "request failed"));
        }
    });
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) {
        return impl_->server.bind_to_any_port(host);
    }
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

void HttpServer::listen() { impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_->server.is_running()) {
        impl_->server.stop();
    }
}

int port_from_environment(int fallback) {
    const char* text = std::getenv("TAGCUBE_PORT");
    if (text == nullptr || *text == '\0') {
        return fallback;
    }
    int port = 0;
    const std::string_view view(text);
    const auto [ptr, ec] = std::from_chars(view.data(), view.data() + view.size(), port);
    if (ec != std::errc() || ptr != view.data() + view.size() || port < 1 || port > 65535) {
        throw QueryError("TAGCUBE_PORT must be a port number");
    }
    return port;
}

}  // namespace tagcube
