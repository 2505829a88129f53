#include <tagcube/error.hpp>
#include <tagcube/similarity.hpp>
#include <tagcube/synth.hpp>

#include <doctest.h>

#include "fixtures.hpp"

#include <cmath>
#include <random>

using namespace tagcube;

namespace {

const std::optional<std::string> kNoMeasure;

TagCloud product_cloud() {
    return topk_exact(fixtures::table1(), {"product"}, Aggregator::Count, kNoMeasure, {}, 10);
}

std::size_t index_of(const SimilarityMatrix& m, const std::string& term) {
    for (std::size_t i = 0; i < m.size(); ++i)
        if (m.tags()[i].term == term) return i;
    FAIL("missing tag " << term);
    return 0;
}

std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n) {
    std::vector<double> v(n);
    std::uniform_real_distribution<double> w(0.0, 10.0);
    for (auto& x : v) x = rng() % 3 == 0 ? 0.0 : w(rng);
    return v;
}

}  // namespace

TEST_CASE("vector measures on small inputs") {
    const std::vector<double> a{1, 1}, b{1, 0}, z{0, 0};
    CHECK(cosine(a, b) == doctest::Approx(0.70711).epsilon(1e-5));
    CHECK(tanimoto(a, b) == doctest::Approx(0.5));
    CHECK(jaccard(std::vector<double>{1, 1, 0}, std::vector<double>{0, 1, 1}) == doctest::Approx(1.0 / 3));
    CHECK(cosine(a, z) == 0.0);
    CHECK(tanimoto(z, z) == 0.0);
    CHECK(jaccard(z, z) == 0.0);
    CHECK(binarize(std::vector<double>{0, 2.5, -1}) == std::vector<double>{0, 1, 0});
    CHECK_THROWS_AS(cosine(a, std::vector<double>{1}), QueryError);
}

TEST_CASE("similarity kinds parse and print") {
    CHECK(parse_similarity("cosine") == SimilarityKind::Cosine);
    CHECK(parse_similarity("tanimoto") == SimilarityKind::Tanimoto);
    CHECK(to_string(SimilarityKind::Jaccard) == "jaccard");
    CHECK_THROWS_AS(parse_similarity("euclid"), QueryError);
}

TEST_CASE("sub-cuboid vectors of products over locations") {
    const auto ds = fixtures::table1();
    const auto cloud = product_cloud();
    const auto shoe = subcuboid_vector(ds, {"product"}, *cloud.find("shoe"), {"location"}, Aggregator::Count,
                                       kNoMeasure);
    REQUIRE(shoe.axis.size() == 7);
    CHECK(shoe.axis.front() == Address{"Detroit"});
    CHECK(shoe.values == std::vector<double>{0, 0, 2, 0, 0, 2, 0});
    const auto chair = subcuboid_vector(ds, {"product"}, *cloud.find("chair"), {"location"}, Aggregator::Count,
                                        kNoMeasure);
    CHECK(chair.values == std::vector<double>{0, 0, 0, 2, 0, 0, 0});
    CHECK_THROWS_AS(subcuboid_vector(ds, {"product"}, *cloud.find("shoe"), {"product"}, Aggregator::Count,
                                     kNoMeasure),
                    QueryError);
}

TEST_CASE("product similarity clustered by location") {
    const auto ds = fixtures::table1();
    const auto m = similarity_matrix(ds, product_cloud(), {"location"}, SimilarityKind::Cosine, Aggregator::Count,
                                     kNoMeasure, {.exact = true});
    REQUIRE(m.size() == 4);
    const auto shoe = index_of(m, "shoe"), chair = index_of(m, "chair"), table = index_of(m, "table"),
               dress = index_of(m, "dress");
    CHECK(m(shoe, chair) == 0.0);
    CHECK(m(shoe, dress) == 0.0);
    CHECK(m(shoe, table) == doctest::Approx(1 / std::sqrt(2.0)));
    CHECK(m(shoe, shoe) == doctest::Approx(1.0));

    const auto t = similarity_matrix(ds, product_cloud(), {"location"}, SimilarityKind::Tanimoto,
                                     Aggregator::Count, kNoMeasure, {.exact = true});
    CHECK(t(shoe, table) == doctest::Approx(2.0 / 7));
}

TEST_CASE("matrix construction is validated") {
    std::vector<Tag> tags{{"a", {"a"}, 1}, {"b", {"b"}, 1}};
    CHECK_NOTHROW(SimilarityMatrix(tags, {1, 0.5, 0.5, 1}));
    CHECK_THROWS_AS(SimilarityMatrix(tags, {1, 0.5, 0.4, 1}), QueryError);
    CHECK_THROWS_AS(SimilarityMatrix(tags, {1, 2, 2, 1}), QueryError);
    CHECK_THROWS_AS(SimilarityMatrix(tags, {1, 0, 0}), QueryError);
}

TEST_CASE("cuboid dimensions for the backing iceberg") {
    Restriction r{{"time", {"March"}}, {"product", {"shoe"}}};
    CHECK(similarity_cuboid_dimensions({"product"}, {"location"}, r) ==
          std::vector<std::string>{"product", "location", "time"});
}

TEST_CASE("a complete iceberg reproduces the exact matrix") {
    SynthOptions o;
    o.dimensions = 3;
    o.cardinalities = {12};
    o.facts = 3000;
    o.seed = 5;
    const auto ds = synth_dataset(o);
    const auto cloud = topk_exact(ds, {"d0"}, Aggregator::Sum, std::string(kSynthMeasure), {}, 12);
    const auto exact = similarity_matrix(ds, cloud, {"d1"}, SimilarityKind::Cosine, Aggregator::Sum,
                                         std::string(kSynthMeasure), {.exact = true});
    const auto ice = build_iceberg(ds, {"d0", "d1"}, Aggregator::Sum, std::string(kSynthMeasure), 1u << 20);
    const auto approx = similarity_matrix(ice, cloud, {"d1"}, SimilarityKind::Cosine);
    const auto viaOptions = similarity_matrix(ds, cloud, {"d1"}, SimilarityKind::Cosine, Aggregator::Sum,
                                              std::string(kSynthMeasure), {.iceberg_limit = 1u << 20});
    REQUIRE(exact.size() == approx.size());
    for (std::size_t i = 0; i < exact.size(); ++i)
        for (std::size_t j = 0; j < exact.size(); ++j) {
            CHECK(approx(i, j) == doctest::Approx(exact(i, j)).epsilon(1e-12));
            CHECK(viaOptions(i, j) == doctest::Approx(exact(i, j)).epsilon(1e-12));
        }
}

TEST_CASE("property: bounds, symmetry, reflexivity and transitivity") {
    std::mt19937_64 rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const std::size_t n = 1 + rng() % 12;
        const auto u = random_vector(rng, n), v = random_vector(rng, n), w = random_vector(rng, n);
        for (auto f : {cosine, tanimoto, jaccard}) {
            const double s = f(u, v);
            CHECK(s >= 0.0);
            CHECK(s <= 1.0 + 1e-12);
            CHECK(s == f(v, u));
        }
        const bool nonzero = std::any_of(u.begin(), u.end(), [](double x) { return x > 0; });
        if (nonzero) {
            CHECK(cosine(u, u) == doctest::Approx(1.0));
            CHECK(tanimoto(u, u) == doctest::Approx(1.0));
            CHECK(jaccard(u, u) == 1.0);
        }
        // Cosine is scale invariant, Tanimoto is not in general.
        std::vector<double> scaled = u;
        for (auto& x : scaled) x *= 3.0;
        CHECK(cosine(scaled, v) == doctest::Approx(cosine(u, v)).epsilon(1e-12));
        const double cuv = cosine(u, v);
        CHECK(cosine(u, w) >= cosine(v, w) - std::sqrt(std::max(0.0, 1 - cuv * cuv)) - 1e-12);
        // Jaccard equals Tanimoto of the binarized vectors.
        CHECK(jaccard(u, v) == doctest::Approx(tanimoto(binarize(u), binarize(v))).epsilon(1e-12));
    }
    const std::vector<double> a{1, 0}, b{2, 0};
    CHECK(cosine(a, b) == doctest::Approx(1.0));
    CHECK(tanimoto(a, b) == doctest::Approx(2.0 / 3));
}
