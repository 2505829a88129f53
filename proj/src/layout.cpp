#include <tagcube/layout.hpp>

#include <tagcube/error.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

namespace tagcube {

namespace {

// Relative slack below which a cost change is treated as rounding noise.
constexpr double kCostTolerance = 1e-9;

double weight(const SimilarityMatrix& matrix, std::size_t a, std::size_t b) {
    return std::max(matrix(a, b), 0.0);
}

std::size_t distance(std::size_t a, std::size_t b) {
    return a > b ? a - b : b - a;
}

// Unbiased draw from [0, n) on top of the standardized mt19937_64 stream, so
// layouts are reproducible across standard libraries.
std::size_t uniform_index(std::mt19937_64& generator, std::size_t n) {
    const std::uint64_t bound = static_cast<std::uint64_t>(n);
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t draw = 0;
    do {
        draw = generator();
    } while (draw >= limit);
    return static_cast<std::size_t>(draw % bound);
}

// Cost change of exchanging the tags at positions i and j.
std::pair<double, double> swap_delta(const std::vector<std::size_t>& order,
                                     const SimilarityMatrix& matrix, std::size_t i, std::size_t j) {
    const std::size_t a = order[i];
    const std::size_t b = order[j];
    double delta = 0.0;
    double magnitude = 0.0;
    for (std::size_t q = 0; q < order.size(); ++q) {
        if (q == i || q == j) {
            continue;
        }
        const std::size_t t = order[q];
        const double shift = static_cast<double>(distance(j, q)) - static_cast<double>(distance(i, q));
        const double term = (weight(matrix, a, t) - weight(matrix, b, t)) * shift;
        delta += term;
        magnitude += std::abs(term);
    }
    return {delta, magnitude};
}

// Cost change of moving block [cut, n) in front of block [0, cut). Pairs
// inside a block keep their distance; a crossing pair at (i, j) goes from
// j - i to n + i - j.
std::pair<double, double> block_delta(const std::vector<std::size_t>& order,
                                      const SimilarityMatrix& matrix, std::size_t cut) {
    const std::size_t n = order.size();
    double delta = 0.0;
    double magnitude = 0.0;
    for (std::size_t i = 0; i < cut; ++i) {
        for (std::size_t j = cut; j < n; ++j) {
            const double change = static_cast<double>(n + 2 * i) - static_cast<double>(2 * j);
            const double term = weight(matrix, order[i], order[j]) * change;
            delta += term;
            magnitude += std::abs(term);
        }
    }
    return {delta, magnitude};
}

bool improves(double delta, double magnitude) {
    return delta < -kCostTolerance * magnitude;
}

}  // namespace

std::vector<std::size_t> Arrangement::positions() const {
    std::vector<std::size_t> inverse(order.size());
    for (std::size_t p = 0; p < order.size(); ++p) {
        inverse[order[p]] = p;
    }
    return inverse;
}

bool is_permutation_of(const Arrangement& arrangement, std::size_t n) {
    if (arrangement.order.size() != n) {
        return false;
    }
    std::vector<char> seen(n, 0);
    for (std::size_t index : arrangement.order) {
        if (index >= n || seen[index]) {
            return false;
        }
        seen[index] = 1;
    }
    return true;
}

double mla_cost(const Arrangement& arrangement, const SimilarityMatrix& matrix) {
    const std::size_t n = matrix.size();
    if (!is_permutation_of(arrangement, n)) {
        throw QueryError("arrangement does not cover exactly the matrix tags");
    }
    const auto position = arrangement.positions();
    double cost = 0.0;
    for (std::size_t a = 0; a < n; ++a) {
        for (std::size_t b = a + 1; b < n; ++b) {
            cost += weight(matrix, a, b) * static_cast<double>(distance(position[a], position[b]));
        }
    }
    return cost;
}

Arrangement nn_arrange(const SimilarityMatrix& matrix) {
    const auto& tags = matrix.tags();
    const std::size_t n = tags.size();
    Arrangement arrangement;
    if (n == 0) {
        return arrangement;
    }
    arrangement.order.reserve(n);
    std::size_t start = 0;
    for (std::size_t i = 1; i < n; ++i) {
        if (heavier(tags[i], tags[start])) {
            start = i;
        }
    }
    std::vector<char> placed(n, 0);
    placed[start] = 1;
    arrangement.order.push_back(start);
    for (std::size_t step = 1; step < n; ++step) {
        const std::size_t last = arrangement.order.back();
        std::size_t best = n;
        for (std::size_t t = 0; t < n; ++t) {
            if (placed[t]) {
                continue;
            }
            if (best == n || matrix(last, t) > matrix(last, best) ||
                (matrix(last, t) == matrix(last, best) && tags[t].term < tags[best].term)) {
                best = t;
            }
        }
        placed[best] = 1;
        arrangement.order.push_back(best);
    }
    return arrangement;
}

Arrangement pwmc_arrange(const SimilarityMatrix& matrix, std::size_t exchanges, std::uint64_t seed) {
    Arrangement arrangement = nn_arrange(matrix);
    const std::size_t n = arrangement.order.size();
    if (n < 2) {
        return arrangement;
    }
    std::mt19937_64 generator(seed);
    for (std::size_t trial = 0; trial < exchanges; ++trial) {
        const std::size_t i = uniform_index(generator, n);
        std::size_t j = uniform_index(generator, n - 1);
        if (j >= i) {
            ++j;
        }
        const auto [delta, magnitude] = swap_delta(arrangement.order, matrix, i, j);
        if (improves(delta, magnitude)) {
            std::swap(arrangement.order[i], arrangement.order[j]);
        }
    }
    return arrangement;
}

Arrangement mc_block_arrange(const SimilarityMatrix& matrix, std::size_t iterations, std::uint64_t seed) {
    Arrangement arrangement = nn_arrange(matrix);
    const std::size_t n = arrangement.order.size();
    if (n < 2) {
        return arrangement;
    }
    std::mt19937_64 generator(seed);
    for (std::size_t iteration = 0; iteration < iterations; ++iteration) {
        const std::size_t cut = 1 + uniform_index(generator, n - 1);
        const auto [delta, magnitude] = block_delta(arrangement.order, matrix, cut);
        if (improves(delta, magnitude)) {
            std::rotate(arrangement.order.begin(),
                        arrangement.order.begin() + static_cast<std::ptrdiff_t>(cut),
                        arrangement.order.end());
        }
    }
    return arrangement;
}

Arrangement brute_force_arrange(const SimilarityMatrix& matrix) {
    const std::size_t n = matrix.size();
    if (n > kBruteForceMaxTags) {
        throw QueryError("brute force is limited to " + std::to_string(kBruteForceMaxTags) + " tags");
    }
    const auto& tags = matrix.tags();
    auto by_term = [&](std::size_t a, std::size_t b) { return tags[a].term < tags[b].term; };

    Arrangement candidate;
    candidate.order.resize(n);
    std::iota(candidate.order.begin(), candidate.order.end(), std::size_t{0});
    std::sort(candidate.order.begin(), candidate.order.end(), by_term);

    // Permutations are visited in increasing term-sequence order, so the
    // first strictly cheaper one found is the tie-break winner.
    Arrangement best = candidate;
    double best_cost = mla_cost(best, matrix);
    while (std::next_permutation(candidate.order.begin(), candidate.order.end(), by_term)) {
        const double cost = mla_cost(candidate, matrix);
        if (cost < best_cost - kCostTolerance * std::max(1.0, best_cost)) {
            best = candidate;
            best_cost = cost;
        }
    }
    return best;
}

HeuristicSpec HeuristicSpec::parse(std::string_view text) {
    const auto colon = text.find(':');
    const std::string_view name = text.substr(0, colon);
    HeuristicSpec spec;
    if (name == "nn") {
        spec.kind = Kind::NearestNeighbor;
    } else if (name == "pwmc") {
        spec.kind = Kind::PairwiseExchange;
    } else if (name == "mc") {
        spec.kind = Kind::BlockSwap;
    } else if (name == "brute") {
        spec.kind = Kind::BruteForce;
    } else {
        throw QueryError("unknown heuristic '" + std::string(text) + "'");
    }
    const bool takes_parameter = spec.kind == Kind::PairwiseExchange || spec.kind == Kind::BlockSwap;
    if (colon == std::string_view::npos) {
        if (takes_parameter) {
            throw QueryError("heuristic '" + std::string(name) + "' needs a count, e.g. " +
                             std::string(name) + ":100");
        }
        return spec;
    }
    if (!takes_parameter) {
        throw QueryError("heuristic '" + std::string(name) + "' takes no parameter");
    }
    const std::string_view digits = text.substr(colon + 1);
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), spec.parameter);
    if (digits.empty() || ec != std::errc{} || ptr != digits.data() + digits.size()) {
        throw QueryError("invalid heuristic parameter in '" + std::string(text) + "'");
    }
    return spec;
}

std::string HeuristicSpec::to_string() const {
    switch (kind) {
    case Kind::NearestNeighbor:
        return "nn";
    case Kind::PairwiseExchange:
        return "pwmc:" + std::to_string(parameter);
    case Kind::BlockSwap:
        return "mc:" + std::to_string(parameter);
    case Kind::BruteForce:
        return "brute";
    }
    return "nn";
}

Arrangement arrange(const SimilarityMatrix& matrix, const HeuristicSpec& heuristic, std::uint64_t seed) {
    switch (heuristic.kind) {
    case HeuristicSpec::Kind::NearestNeighbor:
        return nn_arrange(matrix);
    case HeuristicSpec::Kind::PairwiseExchange:
        return pwmc_arrange(matrix, heuristic.parameter, seed);
    case HeuristicSpec::Kind::BlockSwap:
        return mc_block_arrange(matrix, heuristic.parameter, seed);
    case HeuristicSpec::Kind::BruteForce:
        return brute_force_arrange(matrix);
    }
    return nn_arrange(matrix);
}

LayoutEntry LayoutEntry::tag(std::string term, double weight, int bucket) {
    return LayoutEntry{Kind::Tag, std::move(term), weight, bucket};
}

LayoutEntry LayoutEntry::glued() {
    return LayoutEntry{Kind::Glued, {}, 0.0, 0};
}

LayoutEntry LayoutEntry::permutable() {
    return LayoutEntry{Kind::Permutable, {}, 0.0, 0};
}

std::vector<std::string> HintedLayout::terms() const {
    std::vector<std::string> out;
    for (const auto& entry : entries) {
        if (entry.is_tag()) {
            out.push_back(entry.term);
        }
    }
    return out;
}

HintedLayout insert_hints(const Arrangement& arrangement, const SimilarityMatrix& matrix,
                          std::span<const int> buckets, HintThresholds thresholds) {
    if (!(thresholds.glue >= 0.0 && thresholds.glue <= 1.0 && thresholds.permute >= 0.0 &&
          thresholds.permute <= 1.0)) {
        throw QueryError("hint thresholds must lie in [0, 1]");
    }
    if (!(thresholds.glue > thresholds.permute)) {
        throw QueryError("glue threshold must exceed the permute threshold");
    }
    const std::size_t n = matrix.size();
    if (!is_permutation_of(arrangement, n)) {
        throw QueryError("arrangement does not cover exactly the matrix tags");
    }
    if (buckets.size() != n) {
        throw QueryError("one font bucket per tag is required");
    }
    const auto& tags = matrix.tags();
    const auto& order = arrangement.order;

    HintedLayout layout;
    layout.entries.reserve(2 * n);
    for (std::size_t p = 0; p < n; ++p) {
        const std::size_t t = order[p];
        layout.entries.push_back(LayoutEntry::tag(tags[t].term, tags[t].weight, buckets[t]));
        if (p + 1 == n) {
            break;
        }
        const std::size_t next = order[p + 1];
        const double similarity = matrix(t, next);
        if (similarity >= thresholds.glue) {
            layout.entries.push_back(LayoutEntry::glued());
            continue;
        }
        if (similarity > thresholds.permute) {
            continue;
        }
        // Transposing neighbours only moves them relative to everyone else:
        // one step further from the left side, one step closer to the right.
        double delta = 0.0;
        double magnitude = 0.0;
        for (std::size_t q = 0; q < n; ++q) {
            if (q == p || q == p + 1) {
                continue;
            }
            const double diff = weight(matrix, t, order[q]) - weight(matrix, next, order[q]);
            const double term = q < p ? diff : -diff;
            delta += term;
            magnitude += std::abs(term);
        }
        if (std::abs(delta) <= kCostTolerance * magnitude) {
            layout.entries.push_back(LayoutEntry::permutable());
        }
    }
    return layout;
}

HintedLayout plain_layout(const TagCloud& cloud, std::span<const int> buckets) {
    if (buckets.size() != cloud.size()) {
        throw QueryError("one font bucket per tag is required");
    }
    HintedLayout layout;
    layout.entries.reserve(cloud.size());
    for (std::size_t i = 0; i < cloud.size(); ++i) {
        layout.entries.push_back(LayoutEntry::tag(cloud.tags[i].term, cloud.tags[i].weight, buckets[i]));
    }
    return layout;
}

}  // namespace tagcube
