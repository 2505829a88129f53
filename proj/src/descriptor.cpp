#include <tagcube/descriptor.hpp>

#include <tagcube/error.hpp>

#include <array>
#include <set>

namespace tagcube {

namespace {

using nlohmann::json;

constexpr std::array<std::string_view, 15> kFields = {
    "agg",   "buckets", "cluster", "dataset", "dice", "dims", "exact", "group",
    "heuristic", "k", "limit", "measure", "seed", "sim", "slice"};

const json& field(const json& object, std::string_view name) {
    auto it = object.find(std::string(name));
    if (it == object.end()) {
        throw QueryError("descriptor is missing '" + std::string(name) + "'");
    }
    return *it;
}

std::string as_string(const json& value, std::string_view what) {
    if (!value.is_string()) {
        throw QueryError("descriptor field '" + std::string(what) + "' must be a string");
    }
    return value.get<std::string>();
}

std::vector<std::string> as_strings(const json& value, std::string_view what) {
    if (!value.is_array()) {
        throw QueryError("descriptor field '" + std::string(what) + "' must be an array");
    }
    std::vector<std::string> out;
    for (const auto& item : value) {
        out.push_back(as_string(item, what));
    }
    return out;
}

std::uint64_t as_unsigned(const json& value, std::string_view what) {
    // Parsed non-negative numbers are unsigned; values built in memory from a
    // signed field are not, so accept both.
    const bool ok = value.is_number_unsigned() || (value.is_number_integer() && value.get<std::int64_t>() >= 0);
    if (!ok) {
        throw QueryError("descriptor field '" + std::string(what) + "' must be a non-negative integer");
    }
    return value.get<std::uint64_t>();
}

}  // namespace

json to_json(const QueryDescriptor& d) {
    json slices = json::object();
    for (const auto& [dimension, value] : d.filter.slices) {
        slices[dimension] = value;
    }
    json dices = json::object();
    for (const auto& [dimension, values] : d.filter.dices) {
        dices[dimension] = values;
    }
    json groups = json::array();
    for (const auto& grouping : d.groupings) {
        groups.push_back(json{{"dimension", grouping.dimension},
                              {"level", grouping.level},
                              {"map", grouping.mapping}});
    }
    json out = json::object();
    out["agg"] = std::string(to_string(d.agg));
    out["buckets"] = d.buckets;
    out["cluster"] = d.cluster;
    out["dataset"] = d.dataset;
    out["dice"] = std::move(dices);
    out["dims"] = d.dims;
    out["exact"] = d.exact;
    out["group"] = std::move(groups);
    out["heuristic"] = d.heuristic.to_string();
    out["k"] = d.k;
    out["limit"] = d.limit;
    out["measure"] = d.measure ? json(*d.measure) : json(nullptr);
    out["seed"] = d.seed;
    out["sim"] = std::string(to_string(d.sim));
    out["slice"] = std::move(slices);
    return out;
}

QueryDescriptor descriptor_from_json(const json& in) {
    if (!in.is_object()) {
        throw QueryError("descriptor must be a JSON object");
    }
    for (const auto& [key, value] : in.items()) {
        if (std::find(kFields.begin(), kFields.end(), key) == kFields.end()) {
            throw QueryError("unknown descriptor field '" + key + "'");
        }
    }
    QueryDescriptor d;
    d.agg = parse_aggregator(as_string(field(in, "agg"), "agg"));
    const auto buckets = as_unsigned(field(in, "buckets"), "buckets");
    if (buckets > 1000) {
        throw QueryError("descriptor field 'buckets' is out of range");
    }
    d.buckets = static_cast<int>(buckets);
    d.cluster = as_strings(field(in, "cluster"), "cluster");
    d.dataset = as_string(field(in, "dataset"), "dataset");

    const auto& dices = field(in, "dice");
    if (!dices.is_object()) {
        throw QueryError("descriptor field 'dice' must be an object");
    }
    for (const auto& [dimension, values] : dices.items()) {
        d.filter.dices[dimension] = as_strings(values, "dice");
    }
    d.dims = as_strings(field(in, "dims"), "dims");
    const auto& exact = field(in, "exact");
    if (!exact.is_boolean()) {
        throw QueryError("descriptor field 'exact' must be a boolean");
    }
    d.exact = exact.get<bool>();

    const auto& groups = field(in, "group");
    if (!groups.is_array()) {
        throw QueryError("descriptor field 'group' must be an array");
    }
    for (const auto& item : groups) {
        if (!item.is_object() || item.size() != 3) {
            throw QueryError("grouping must be {dimension, level, map}");
        }
        GroupingMap grouping;
        grouping.dimension = as_string(field(item, "dimension"), "group.dimension");
        grouping.level = as_string(field(item, "level"), "group.level");
        const auto& mapping = field(item, "map");
        if (!mapping.is_object()) {
            throw QueryError("grouping map must be an object");
        }
        for (const auto& [from, to] : mapping.items()) {
            grouping.mapping[from] = as_string(to, "group.map");
        }
        d.groupings.push_back(std::move(grouping));
    }
    d.heuristic = HeuristicSpec::parse(as_string(field(in, "heuristic"), "heuristic"));
    d.k = as_unsigned(field(in, "k"), "k");
    d.limit = as_unsigned(field(in, "limit"), "limit");
    const auto& measure = field(in, "measure");
    if (!measure.is_null()) {
        d.measure = as_string(measure, "measure");
    }
    d.seed = as_unsigned(field(in, "seed"), "seed");
    d.sim = parse_similarity(as_string(field(in, "sim"), "sim"));

    const auto& slices = field(in, "slice");
    if (!slices.is_object()) {
        throw QueryError("descriptor field 'slice' must be an object");
    }
    for (const auto& [dimension, value] : slices.items()) {
        d.filter.slices[dimension] = as_string(value, "slice");
    }
    return d;
}

std::string canonical_json(const QueryDescriptor& descriptor) {
    return to_json(descriptor).dump(-1, ' ', false, json::error_handler_t::replace);
}

namespace {

constexpr std::string_view kAlphabet =
    "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_";

int sextet(char ch) {
    const auto pos = kAlphabet.find(ch);
    return pos == std::string_view::npos ? -1 : static_cast<int>(pos);
}

}  // namespace

std::string base64url_encode(std::string_view bytes) {
    std::string out;
    out.reserve((bytes.size() * 4 + 2) / 3);
    std::size_t i = 0;
    for (; i + 3 <= bytes.size(); i += 3) {
        const std::uint32_t chunk = (static_cast<unsigned char>(bytes[i]) << 16) |
                                    (static_cast<unsigned char>(bytes[i + 1]) << 8) |
                                    static_cast<unsigned char>(bytes[i + 2]);
        out.push_back(kAlphabet[(chunk >> 18) & 63]);
        out.push_back(kAlphabet[(chunk >> 12) & 63]);
        out.push_back(kAlphabet[(chunk >> 6) & 63]);
        out.push_back(kAlphabet[chunk & 63]);
    }
    const std::size_t rest = bytes.size() - i;
    if (rest == 1) {
        const std::uint32_t chunk = static_cast<unsigned char>(bytes[i]) << 16;
        out.push_back(kAlphabet[(chunk >> 18) & 63]);
        out.push_back(kAlphabet[(chunk >> 12) & 63]);
    } else if (rest == 2) {
        const std::uint32_t chunk = (static_cast<unsigned char>(bytes[i]) << 16) |
                                    (static_cast<unsigned char>(bytes[i + 1]) << 8);
        out.push_back(kAlphabet[(chunk >> 18) & 63]);
        out.push_back(kAlphabet[(chunk >> 12) & 63]);
        out.push_back(kAlphabet[(chunk >> 6) & 63]);
    }
    return out;
}

std::optional<std::string> base64url_decode(std::string_view text) {
    if (text.size() % 4 == 1) {
        return std::nullopt;
    }
    std::string out;
    out.reserve(text.size() * 3 / 4);
    std::uint32_t buffer = 0;
    int bits = 0;
    for (char ch : text) {
        const int value = sextet(ch);
        if (value < 0) {
            return std::nullopt;
        }
        buffer = (buffer << 6) | static_cast<std::uint32_t>(value);
        bits += 6;
        if (bits >= 8) {
            bits -= 8;
            out.push_back(static_cast<char>((buffer >> bits) & 0xFF));
        }
    }
    // Leftover bits must be zero padding for the encoding to be canonical.
    if ((buffer & ((1u << bits) - 1)) != 0) {
        return std::nullopt;
    }
    return out;
}

std::string encode_permalink(const QueryDescriptor& descriptor) {
    return base64url_encode(canonical_json(descriptor));
}

QueryDescriptor decode_permalink(std::string_view token) {
    const auto text = base64url_decode(token);
    if (!text) {
        throw NotFoundError("malformed permalink");
    }
    const auto parsed = json::parse(*text, nullptr, false);
    if (parsed.is_discarded()) {
        throw NotFoundError("malformed permalink");
    }
    QueryDescriptor descriptor;
    try {
        descriptor = descriptor_from_json(parsed);
    } catch (const QueryError& error) {
        throw NotFoundError(std::string("malformed permalink: ") + error.what());
    }
    if (encode_permalink(descriptor) != token) {
        throw NotFoundError("permalink is not in canonical form");
    }
    return descriptor;
}

}  // namespace tagcube
