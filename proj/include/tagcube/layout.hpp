#pragma once

#include <tagcube/similarity.hpp>
#include <tagcube/tagcloud.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace tagcube {

/// A permutation of the matrix tags: `order[p]` is the matrix index of the
/// tag shown at position p.
struct Arrangement {
    std::vector<std::size_t> order;

    /// Inverse permutation: position of every matrix index.
    std::vector<std::size_t> positions() const;
    bool operator==(const Arrangement&) const = default;
};

/// True when `arrangement` is a bijection onto 0..n-1.
bool is_permutation_of(const Arrangement& arrangement, std::size_t n);

/// Sum over unordered tag pairs of similarity times index distance, with
/// negative similarities counted as 0. Throws QueryError when the
/// arrangement is not a permutation of the matrix tags.
double mla_cost(const Arrangement& arrangement, const SimilarityMatrix& matrix);

/// Greedy chain from the heaviest tag, always appending the unplaced tag
/// most similar to the last one. Ties go to the smaller term.
Arrangement nn_arrange(const SimilarityMatrix& matrix);

/// NN followed by `exchanges` random position swaps, each kept only when it
/// strictly lowers the cost.
Arrangement pwmc_arrange(const SimilarityMatrix& matrix, std::size_t exchanges, std::uint64_t seed);

/// NN followed by `iterations` random cuts; the two blocks are swapped only
/// when that strictly lowers the cost.
Arrangement mc_block_arrange(const SimilarityMatrix& matrix, std::size_t iterations, std::uint64_t seed);

inline constexpr std::size_t kBruteForceMaxTags = 9;

/// Exhaustive optimum; among optimal orders the smallest term sequence wins.
Arrangement brute_force_arrange(const SimilarityMatrix& matrix);

struct HeuristicSpec {
    enum class Kind { NearestNeighbor, PairwiseExchange, BlockSwap, BruteForce };

    Kind kind = Kind::NearestNeighbor;
    std::size_t parameter = 0;

    /// Accepts "nn", "pwmc:N", "mc:N" and "brute".
    static HeuristicSpec parse(std::string_view text);
    std::string to_string() const;
    bool operator==(const HeuristicSpec&) const = default;
};

Arrangement arrange(const SimilarityMatrix& matrix, const HeuristicSpec& heuristic, std::uint64_t seed);

struct LayoutEntry {
    enum class Kind { Tag, Glued, Permutable };

    Kind kind = Kind::Tag;
    std::string term;
    double weight = 0.0;
    int bucket = 0;

    static LayoutEntry tag(std::string term, double weight, int bucket);
    static LayoutEntry glued();
    static LayoutEntry permutable();

    bool is_tag() const noexcept { return kind == Kind::Tag; }
    bool operator==(const LayoutEntry&) const = default;
};

struct HintedLayout {
    std::vector<LayoutEntry> entries;

    std::vector<std::string> terms() const;
};

struct HintThresholds {
    double glue = 0.95;
    double permute = 0.05;
};

/// Emits the tags in arrangement order. Between two neighbours a GLUED token
/// marks similarity >= glue; otherwise a PERMUTABLE token marks similarity
/// <= permute when swapping the two leaves the cost unchanged. `buckets`
/// is aligned with the matrix tags.
HintedLayout insert_hints(const Arrangement& arrangement, const SimilarityMatrix& matrix,
                          std::span<const int> buckets, HintThresholds thresholds = {});

/// Tags in cloud order without tokens.
HintedLayout plain_layout(const TagCloud& cloud, std::span<const int> buckets);

}  // namespace tagcube
