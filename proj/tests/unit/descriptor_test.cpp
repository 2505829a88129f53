#include <tagcube/descriptor.hpp>
#include <tagcube/error.hpp>

#include <doctest.h>

#include <random>

using namespace tagcube;

namespace {

QueryDescriptor sample() {
    QueryDescriptor d;
    d.dataset = "ds-1";
    d.dims = {"location", "time"};
    d.agg = Aggregator::Sum;
    d.measure = "profit";
    d.filter.slices["product"] = "shoe";
    d.filter.dices["salesman"] = {"John", "Smith"};
    d.groupings = {GroupingMap{"location", "country", {{"Paris", "France"}}}};
    d.k = 20;
    d.limit = 600;
    d.cluster = {"salesman"};
    d.sim = SimilarityKind::Tanimoto;
    d.heuristic = HeuristicSpec::parse("pwmc:100");
    d.seed = 99;
    d.buckets = 5;
    return d;
}

}  // namespace

TEST_CASE("canonical form has sorted keys and every field") {
    QueryDescriptor d;
    d.dataset = "x";
    d.dims = {"a"};
    CHECK(canonical_json(d) ==
          R"({"agg":"count","buckets":7,"cluster":[],"dataset":"x","dice":{},"dims":["a"],"exact":false,)"
          R"("group":[],"heuristic":"nn","k":150,"limit":150,"measure":null,"seed":0,"sim":"cosine","slice":{}})");
}

TEST_CASE("permalinks round trip") {
    const auto d = sample();
    const auto token = encode_permalink(d);
    CHECK(token.find_first_of("+/=") == std::string::npos);
    CHECK(decode_permalink(token) == d);
    CHECK(encode_permalink(decode_permalink(token)) == token);
}

TEST_CASE("tampered or non-canonical tokens are rejected") {
    const auto token = encode_permalink(sample());
    auto flipped = token;
    flipped[5] = flipped[5] == 'A' ? 'B' : 'A';
    CHECK_THROWS_AS(decode_permalink(flipped), NotFoundError);
    CHECK_THROWS_AS(decode_permalink(token + "="), NotFoundError);
    CHECK_THROWS_AS(decode_permalink(""), NotFoundError);
    CHECK_THROWS_AS(decode_permalink("!!!!"), NotFoundError);

    auto spaced = to_json(sample()).dump(2);
    CHECK_THROWS_AS(decode_permalink(base64url_encode(spaced)), NotFoundError);
    auto extra = to_json(sample());
    extra["extra"] = 1;
    CHECK_THROWS_AS(decode_permalink(base64url_encode(extra.dump())), NotFoundError);
}

TEST_CASE("strict JSON decoding") {
    auto j = to_json(sample());
    CHECK(descriptor_from_json(j) == sample());
    auto missing = j;
    missing.erase("seed");
    CHECK_THROWS_AS(descriptor_from_json(missing), QueryError);
    auto wrong = j;
    wrong["k"] = "20";
    CHECK_THROWS_AS(descriptor_from_json(wrong), QueryError);
    auto unknown = j;
    unknown["colour"] = "red";
    CHECK_THROWS_AS(descriptor_from_json(unknown), QueryError);
    auto negative = j;
    negative["k"] = -1;
    CHECK_THROWS_AS(descriptor_from_json(negative), QueryError);
    auto heuristic = j;
    heuristic["heuristic"] = "anneal";
    CHECK_THROWS_AS(descriptor_from_json(heuristic), QueryError);
}

TEST_CASE("base64url") {
    CHECK(base64url_encode("") == "");
    CHECK(base64url_encode("f") == "Zg");
    CHECK(base64url_encode("fo") == "Zm8");
    CHECK(base64url_encode("foo") == "Zm9v");
    CHECK(base64url_encode("\xfb\xff") == "-_8");
    CHECK(base64url_decode("Zm9v") == "foo");
    CHECK(base64url_decode("-_8") == "\xfb\xff");
    CHECK_FALSE(base64url_decode("Zm9v="));
    CHECK_FALSE(base64url_decode("Z"));
    CHECK_FALSE(base64url_decode("Zh"));  // non-zero trailing bits
    CHECK_FALSE(base64url_decode("Zm+v"));
}

TEST_CASE("property: random descriptors survive the permalink") {
    std::mt19937_64 rng(1);
    const std::vector<std::string> words{"a", "b c", "é", "x\"y", "Canada\xE2\x80\x93March", "0"};
    auto word = [&] { return words[rng() % words.size()]; };
    for (int trial = 0; trial < 1000; ++trial) {
        QueryDescriptor d;
        d.dataset = "ds-" + std::to_string(rng());
        for (std::size_t i = 0, n = 1 + rng() % 3; i < n; ++i) d.dims.push_back(word() + std::to_string(i));
        d.agg = static_cast<Aggregator>(rng() % 5);
        if (d.agg != Aggregator::Count) d.measure = word();
        if (rng() % 2) d.filter.slices[word()] = word();
        if (rng() % 2) d.filter.dices[word()] = {word(), word()};
        if (rng() % 3 == 0) d.groupings.push_back(GroupingMap{word(), word(), {{word(), word()}}});
        d.k = 1 + rng() % 150;
        d.limit = 1 + rng() % 100000;
        d.exact = rng() % 2;
        if (rng() % 2) d.cluster = {word()};
        d.sim = static_cast<SimilarityKind>(rng() % 3);
        d.heuristic = HeuristicSpec::parse(std::vector<std::string>{"nn", "pwmc:10", "mc:1000", "brute"}[rng() % 4]);
        d.seed = rng();
        d.buckets = 1 + static_cast<int>(rng() % 10);
        const auto token = encode_permalink(d);
        REQUIRE(decode_permalink(token) == d);
        CHECK(encode_permalink(decode_permalink(token)) == token);
    }
}
