#include <tagcube/synth.hpp>

#include <tagcube/error.hpp>

#include <algorithm>
#include <cmath>

namespace tagcube {

double uniform_unit(std::mt19937_64& generator) {
    return static_cast<double>(generator() >> 11) * 0x1.0p-53;
}

ZipfSampler::ZipfSampler(std::size_t n, double s) {
    if (n == 0) {
        throw QueryError("Zipf support must be non-empty");
    }
    if (!(s >= 0.0) || !std::isfinite(s)) {
        throw QueryError("Zipf exponent must be finite and non-negative");
    }
    cumulative_.reserve(n);
    double total = 0.0;
    for (std::size_t r = 1; r <= n; ++r) {
        total += std::pow(static_cast<double>(r), -s);
        cumulative_.push_back(total);
    }
    for (double& c : cumulative_) {
        c /= total;
    }
    cumulative_.back() = 1.0;
}

std::size_t ZipfSampler::operator()(std::mt19937_64& generator) const {
    const double u = uniform_unit(generator);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

namespace {

std::vector<std::size_t> cardinalities(const SynthOptions& options) {
    if (options.dimensions == 0 || options.facts == 0) {
        throw QueryError("dimension and fact counts must be positive");
    }
    std::vector<std::size_t> out = options.cardinalities;
    if (out.size() == 1) {
        out.assign(options.dimensions, out.front());
    }
    if (out.size() != options.dimensions) {
        throw QueryError("give one cardinality, or one per dimension");
    }
    for (auto c : out) {
        if (c == 0) {
            throw QueryError("cardinalities must be positive");
        }
    }
    return out;
}

std::string value_name(std::size_t rank, std::size_t cardinality) {
    std::size_t width = 2;
    for (std::size_t top = cardinality - 1; top >= 100; top /= 10) {
        ++width;
    }
    std::string digits = std::to_string(rank);
    return "v" + std::string(width > digits.size() ? width - digits.size() : 0, '0') + digits;
}

}  // namespace

RawTable synth_table(const SynthOptions& options) {
    const auto cards = cardinalities(options);
    std::vector<ZipfSampler> samplers;
    std::vector<std::vector<std::string>> names(cards.size());
    RawTable table;
    for (std::size_t d = 0; d < cards.size(); ++d) {
        samplers.emplace_back(cards[d], options.zipf_s);
        for (std::size_t r = 0; r < cards[d]; ++r) {
            names[d].push_back(value_name(r, cards[d]));
        }
        table.columns.push_back("d" + std::to_string(d));
    }
    table.columns.emplace_back(kSynthMeasure);

    std::mt19937_64 generator(options.seed);
    table.rows.reserve(options.facts);
    for (std::size_t i = 0; i < options.facts; ++i) {
        std::vector<std::string> row;
        row.reserve(cards.size() + 1);
        for (std::size_t d = 0; d < cards.size(); ++d) {
            row.push_back(names[d][samplers[d](generator)]);
        }
        row.push_back(std::to_string(1 + generator() % 100));
        table.rows.push_back(std::move(row));
    }
    return table;
}

std::string synth_csv(const SynthOptions& options) {
    return serialize_table(synth_table(options));
}

DatasetPtr synth_dataset(const SynthOptions& options) {
    const std::string csv = synth_csv(options);
    auto table = std::make_shared<const RawTable>(parse_table(csv));
    std::vector<std::string> dims(table->columns.begin(), table->columns.end() - 1);
    return bind_schema(table, dims, {std::string(kSynthMeasure)}, dataset_id_for(csv, ',', true));
}

}  // namespace tagcube
