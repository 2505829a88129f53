// tagcube: batch front end — ingestion, clouds, the HTTP server and the
// two benchmark harnesses.

#include <tagcube/bench.hpp>
#include <tagcube/error.hpp>
#include <tagcube/fact_store.hpp>
#include <tagcube/pipeline.hpp>
#include <tagcube/service.hpp>
#include <tagcube/synth.hpp>
#include <tagcube/wire.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <sstream>

namespace {

using namespace tagcube;

constexpr int kUsageError = 2;

/// Validation problems exit with kUsageError; anything else with 1.
struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw std::runtime_error("cannot read " + path);
    }
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void emit(const std::string& text, const std::string& out_path) {
    if (out_path.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::ofstream out(out_path, std::ios::binary);
    if (!out || !(out << text)) {
        throw std::runtime_error("cannot write " + out_path);
    }
}

char delimiter_of(const std::string& text) {
    if (text == "tab" || text == "\\t") {
        return '\t';
    }
    if (text.size() != 1) {
        throw UsageError("delimiter must be a single character");
    }
    return text[0];
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (!item.empty()) {
            out.push_back(item);
        }
    }
    return out;
}

template <typename T>
std::vector<T> number_list(const std::string& text, const char* what) {
    std::vector<T> out;
    for (const auto& item : split_list(text)) {
        std::size_t used = 0;
        unsigned long long value = 0;
        try {
            value = std::stoull(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != item.size() || item.empty() || item[0] == '-') {
            throw UsageError(std::string(what) + ": '" + item + "' is not a non-negative integer");
        }
        out.push_back(static_cast<T>(value));
    }
    return out;
}

/// Input file plus schema flags, shared by every dataset-consuming command.
struct DatasetArgs {
    std::string input;
    std::string delimiter = ",";
    bool no_header = false;
    std::string dims;
    std::string measures;

    void add(CLI::App* app, bool required = true) {
        auto* opt = app->add_option("--input,-i", input, "Delimited fact table");
        if (required) {
            opt->required();
        }
        app->add_option("--delimiter", delimiter, "Field delimiter (',' or 'tab', ...)");
        app->add_flag("--no-header", no_header, "First line is data; columns become col1..colN");
        app->add_option("--schema-dims", dims, "Comma-separated dimension columns");
        app->add_option("--schema-measures", measures, "Comma-separated measure columns");
    }

    DatasetPtr load() const {
        const std::string text = read_file(input);
        const char delim = delimiter_of(delimiter);
        auto table = std::make_shared<const RawTable>(parse_table(text, delim, !no_header));
        auto dimension_columns = split_list(dims);
        if (dimension_columns.empty()) {
            throw UsageError("--schema-dims is required");
        }
        return bind_schema(table, dimension_columns, split_list(measures), dataset_id_for(text, delim, !no_header));
    }
};

struct QueryArgs {
    std::string dims;
    std::string agg = "count";
    std::string measure;
    std::string k;
    std::string limit;
    bool exact = false;
    std::string cluster;
    std::string sim;
    std::string heuristic;
    std::string seed;
    std::string buckets;
    std::vector<std::string> slices;
    std::vector<std::string> dices;
    std::vector<std::string> groups;

    void add(CLI::App* app) {
        app->add_option("--dims", dims, "Comma-separated tag dimensions")->required();
        app->add_option("--agg", agg, "count, sum, average, min or max");
        app->add_option("--measure", measure, "Measure column for non-count aggregators");
        app->add_option("--k", k, "Tag-cloud size (default 150)");
        app->add_option("--limit", limit, "Iceberg limit (default 150)");
        app->add_flag("--exact", exact, "Answer from the base facts instead of an iceberg");
        app->add_option("--cluster", cluster, "Comma-separated clustering dimensions");
        app->add_option("--sim", sim, "cosine, tanimoto or jaccard");
        app->add_option("--heuristic", heuristic, "nn, pwmc:N, mc:N or brute");
        app->add_option("--seed", seed, "Layout seed");
        app->add_option("--buckets", buckets, "Number of font sizes (default 7)");
        app->add_option("--slice", slices, "dimension:value (repeatable)");
        app->add_option("--dice", dices, "dimension:v1|v2|... (repeatable)");
        app->add_option("--group", groups, "JSON grouping {dimension, level, map} (repeatable)");
    }

    /// Same parameter grammar as the HTTP endpoint.
    Params params() const {
        Params p;
        p.emplace("dims", dims);
        p.emplace("agg", agg);
        auto optional = [&](const char* key, const std::string& value) {
            if (!value.empty()) {
                p.emplace(key, value);
            }
        };
        optional("measure", measure);
        optional("k", k);
        optional("limit", limit);
        optional("cluster", cluster);
        optional("sim", sim);
        optional("heuristic", heuristic);
        optional("seed", seed);
        optional("buckets", buckets);
        if (exact) {
            p.emplace("exact", "true");
        }
        for (const auto& s : slices) {
            p.emplace("slice", s);
        }
        for (const auto& d : dices) {
            p.emplace("dice", d);
        }
        for (const auto& g : groups) {
            p.emplace("group", g);
        }
        return p;
    }
};

/// Synthetic-data flags for the benchmarks when no --input is given.
struct SynthArgs {
    std::size_t dimensions = 4;
    std::string cardinality = "50";
    std::size_t facts = 100000;
    double zipf = 1.2;

    void add(CLI::App* app, std::size_t default_dimensions) {
        dimensions = default_dimensions;
        app->add_option("--synth-dims", dimensions, "Synthetic dimension count")->capture_default_str();
        app->add_option("--synth-cardinality", cardinality, "Synthetic cardinality, one or per dimension")
            ->capture_default_str();
        app->add_option("--synth-facts", facts, "Synthetic fact count")->capture_default_str();
        app->add_option("--synth-zipf", zipf, "Synthetic Zipf exponent")->capture_default_str();
    }

    SynthOptions options(std::uint64_t seed) const {
        SynthOptions o;
        o.dimensions = dimensions;
        o.cardinalities = number_list<std::size_t>(cardinality, "--synth-cardinality");
        o.facts = facts;
        o.zipf_s = zipf;
        o.seed = seed;
        return o;
    }
};

int run(int argc, char** argv) {
    CLI::App app{"Tag-cloud OLAP engine"};
    app.require_subcommand(1);
    app.fallthrough();
    std::string out_path;
    app.add_option("--out,-o", out_path, "Write output to this file instead of stdout");

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Parse a table, optionally bind a schema, print a summary");
    DatasetArgs ingest_data;
    ingest_data.add(ingest);

    // cloud
    auto* cloud = app.add_subcommand("cloud", "Compute one tag cloud");
    DatasetArgs cloud_data;
    cloud_data.add(cloud);
    QueryArgs query;
    query.add(cloud);
    std::string format = "json";
    cloud->add_option("--format", format, "json, text or html")
        ->check(CLI::IsMember({"json", "text", "html"}));
    std::size_t max_k = kDefaultCloudSize;
    cloud->add_option("--max-k", max_k, "Largest accepted k")->capture_default_str();

    // serve
    auto* serve = app.add_subcommand("serve", "Run the HTTP service");
    std::string host = "0.0.0.0";
    int port = 0;
    serve->add_option("--host", host, "Listen address")->capture_default_str();
    serve->add_option("--port", port, "Listen port (default: TAGCUBE_PORT or 8080)");

    // bench-iceberg
    auto* bench_ice = app.add_subcommand("bench-iceberg", "Iceberg vs exact top-k sweep (CSV)");
    DatasetArgs bench_ice_data;
    bench_ice_data.add(bench_ice, false);
    SynthArgs bench_ice_synth;
    bench_ice_synth.add(bench_ice, 4);
    std::string ice_dims;
    std::string ice_limits = "150,600,1200,4800,19600";
    std::string ice_sizes = "50,100,150,200";
    std::string ice_agg = "count";
    std::string ice_measure;
    std::uint64_t ice_seed = 0;
    bool per_dimension = false;
    int ice_repeats = 3;
    bench_ice->add_option("--dims", ice_dims, "Iceberg cuboid dimensions (default: all)");
    bench_ice->add_option("--limits", ice_limits, "Comma-separated iceberg limits")->capture_default_str();
    bench_ice->add_option("--sizes", ice_sizes, "Comma-separated cloud sizes")->capture_default_str();
    bench_ice->add_option("--agg", ice_agg, "Aggregator")->capture_default_str();
    bench_ice->add_option("--measure", ice_measure, "Measure column");
    bench_ice->add_option("--seed", ice_seed, "Seed of the synthetic dataset")->capture_default_str();
    bench_ice->add_flag("--per-dimension", per_dimension, "Add 1-tag clouds for every dimension");
    bench_ice->add_option("--repeats", ice_repeats, "Timing repeats (fastest kept)")->capture_default_str();

    // bench-layout
    auto* bench_lay = app.add_subcommand("bench-layout", "Layout heuristics over all dimension pairs (CSV)");
    DatasetArgs bench_lay_data;
    bench_lay_data.add(bench_lay, false);
    SynthArgs bench_lay_synth;
    bench_lay_synth.add(bench_lay, 8);
    std::string lay_heuristics = "nn,pwmc:10,pwmc:100,pwmc:1000,mc:1000";
    std::string lay_sims = "cosine,tanimoto";
    std::string lay_agg = "count";
    std::string lay_measure;
    std::uint64_t lay_seed = 0;
    std::size_t lay_limit = 150;
    int lay_repeats = 3;
    bench_lay->add_option("--heuristics", lay_heuristics, "Comma-separated heuristic specs")
        ->capture_default_str();
    bench_lay->add_option("--sims", lay_sims, "Comma-separated similarity measures")->capture_default_str();
    bench_lay->add_option("--agg", lay_agg, "Aggregator")->capture_default_str();
    bench_lay->add_option("--measure", lay_measure, "Measure column");
    bench_lay->add_option("--seed", lay_seed, "Seed for the heuristics and synthetic data")->capture_default_str();
    bench_lay->add_option("--limit", lay_limit, "Iceberg limit")->capture_default_str();
    bench_lay->add_option("--repeats", lay_repeats, "Timing repeats (fastest kept)")->capture_default_str();

    // synth
    auto* synth = app.add_subcommand("synth", "Generate a Zipf-distributed CSV dataset");
    SynthOptions synth_options;
    std::string synth_cards = "50";
    synth->add_option("--dims", synth_options.dimensions, "Dimension count")->capture_default_str();
    synth->add_option("--cardinality", synth_cards, "Cardinality, one or per dimension")->capture_default_str();
    synth->add_option("--facts", synth_options.facts, "Fact count")->capture_default_str();
    synth->add_option("--zipf", synth_options.zipf_s, "Zipf exponent s")->capture_default_str();
    synth->add_option("--seed", synth_options.seed, "Seed")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& error) {
        const int code = app.exit(error);
        return code == 0 ? 0 : kUsageError;
    }

    try {
        if (ingest->parsed()) {
            const std::string text = read_file(ingest_data.input);
            const char delim = delimiter_of(ingest_data.delimiter);
            const auto table = parse_table(text, delim, !ingest_data.no_header);
            nlohmann::ordered_json summary;
            summary["id"] = dataset_id_for(text, delim, !ingest_data.no_header);
            summary["columns"] = table.columns;
            summary["rows"] = table.rows.size();
            if (!ingest_data.dims.empty()) {
                const auto dataset = ingest_data.load();
                nlohmann::ordered_json dims = nlohmann::ordered_json::object();
                for (const auto& name : dataset->schema().dimensions) {
                    dims[name] = dataset->dictionary(name).size();
                }
                summary["dimensions"] = dims;
                summary["measures"] = dataset->schema().measures;
            }
            emit(summary.dump(2) + "\n", out_path);
        } else if (cloud->parsed()) {
            const auto dataset = cloud_data.load();
            const auto descriptor = descriptor_from_params(dataset->id(), query.params());
            QueryLimits limits;
            limits.max_k = max_k;
            const auto result = run_query(dataset, descriptor, nullptr, limits);
            if (format == "text") {
                emit(render_text(result), out_path);
            } else if (format == "html") {
                emit(render_embed_html(result), out_path);
            } else {
                emit(to_wire_json(result), out_path);
            }
        } else if (serve->parsed()) {
            Service service;
            HttpServer server(service);
            const int wanted = port != 0 ? port : port_from_environment(8080);
            const int bound = server.bind(host, wanted);
            if (bound < 0) {
                std::cerr << "tagcube: cannot listen on " << host << ":" << wanted << "\n";
                return 1;
            }
            std::cerr << "tagcube: serving on http://" << host << ":" << bound << "\n";
            server.listen();
        } else if (bench_ice->parsed()) {
            const auto dataset = bench_ice_data.input.empty() ? synth_dataset(bench_ice_synth.options(ice_seed))
                                                              : bench_ice_data.load();
            IcebergBenchOptions options;
            options.label = bench_ice_data.input.empty() ? "synth" : bench_ice_data.input;
            options.limits = number_list<std::size_t>(ice_limits, "--limits");
            options.sizes = number_list<std::size_t>(ice_sizes, "--sizes");
            options.aggregator = parse_aggregator(ice_agg);
            if (!ice_measure.empty()) {
                options.measure = ice_measure;
            }
            options.per_dimension = per_dimension;
            options.repeats = ice_repeats;
            const auto dims = ice_dims.empty() ? dataset->schema().dimensions : split_list(ice_dims);
            emit(iceberg_csv(bench_iceberg(dataset, dims, options)), out_path);
        } else if (bench_lay->parsed()) {
            LayoutBenchOptions options;
            for (const auto& spec : split_list(lay_heuristics)) {
                options.heuristics.push_back(HeuristicSpec::parse(spec));
            }
            options.similarities.clear();
            for (const auto& sim : split_list(lay_sims)) {
                options.similarities.push_back(parse_similarity(sim));
            }
            const auto dataset = bench_lay_data.input.empty() ? synth_dataset(bench_lay_synth.options(lay_seed))
                                                              : bench_lay_data.load();
            options.aggregator = parse_aggregator(lay_agg);
            if (!lay_measure.empty()) {
                options.measure = lay_measure;
            }
            options.seed = lay_seed;
            options.limit = lay_limit;
            options.repeats = lay_repeats;
            emit(layout_csv(bench_layout(dataset, options)), out_path);
        } else if (synth->parsed()) {
            synth_options.cardinalities = number_list<std::size_t>(synth_cards, "--cardinality");
            emit(synth_csv(synth_options), out_path);
        }
    } catch (const UsageError& error) {
        std::cerr << "tagcube: " << error.what() << "\n";
        return kUsageError;
    } catch (const ParseError& error) {
        std::cerr << "tagcube: " << error.what() << "\n";
        return kUsageError;
    } catch (const SchemaError& error) {
        std::cerr << "tagcube: " << error.what() << "\n";
        return kUsageError;
    } catch (const QueryError& error) {
        std::cerr << "tagcube: " << error.what() << "\n";
        return kUsageError;
    } catch (const std::exception& error) {
        std::cerr << "tagcube: " << error.what() << "\n";
        return 1;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) { return run(argc, argv); }
