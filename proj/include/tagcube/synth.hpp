#pragma once

#include <tagcube/fact_store.hpp>

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace tagcube {

/// Zipf-distributed synthetic fact table: dimension columns d0..d{n-1}
/// with values v00, v01, ... (v00 most frequent) and one integer measure
/// column "m" drawn uniformly from 1..100.
struct SynthOptions {
    std::size_t dimensions = 4;
    /// One entry per dimension, or a single entry shared by all of them.
    std::vector<std::size_t> cardinalities{50};
    std::size_t facts = 100000;
    double zipf_s = 1.2;
    std::uint64_t seed = 0;
};

inline constexpr std::string_view kSynthMeasure = "m";

/// Uniform double in [0, 1) from the top 53 bits of one draw.
double uniform_unit(std::mt19937_64& generator);

/// Inverse-CDF sampler over ranks 0..n-1 with P(r) proportional to 1/(r+1)^s.
class ZipfSampler {
public:
    ZipfSampler(std::size_t n, double s);
    std::size_t operator()(std::mt19937_64& generator) const;

private:
    std::vector<double> cumulative_;
};

RawTable synth_table(const SynthOptions& options);
std::string synth_csv(const SynthOptions& options);

/// The generated table bound with every d* column as a dimension and "m"
/// as the measure; the id is derived from the CSV text.
DatasetPtr synth_dataset(const SynthOptions& options);

}  // namespace tagcube
