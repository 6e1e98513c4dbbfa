#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "mevir/bundle.hpp"
#include "mevir/error.hpp"

using namespace mevir;

namespace {

const char* kFixtureBundles[] = {"vaccine.json", "climate.json", "echo-chamber.json", "corrupted-ecosystem.json",
                                 "diagnostics.json"};

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string error_of(const std::string& text) {
    try {
        parse_bundle(text);
    } catch (const DataError& e) {
        return e.what();
    }
    return "";
}

const char* kSmall = R"({
  "sources": [{"id": "s", "kind": "institution"}],
  "corpus": {
    "claims": [{"id": "a", "text": "a"}, {"id": "b", "text": "b"}],
    "links": [{"id": "ab", "from": "a", "to": "b", "kind": "supports", "declared_weight": 0.5}]
  },
  "policies": [{"id": "p"}],
  "profiles": [{"id": "me", "beliefs": {"a": 0.8}}]
})";

}  // namespace

TEST_CASE("fixture bundles round-trip structurally and byte-for-byte") {
    for (const char* name : kFixtureBundles) {
        CAPTURE(name);
        const auto b = load_bundle(testing::fixture(name));
        const auto text = emit_bundle(b);
        const auto again = parse_bundle(text, testing::fixtures_dir());
        CHECK(again == b);
        CHECK(emit_bundle(again) == text);
        CHECK(emit_bundle(b) == text);
        CHECK(text.back() == '\n');
    }
}

TEST_CASE("bundle hash is stable and tracks content") {
    const auto b = load_bundle(testing::fixture("vaccine.json"));
    const auto h = bundle_hash(b);
    CHECK(h.size() == 64);
    CHECK(h.find_first_not_of("0123456789abcdef") == std::string::npos);
    CHECK(bundle_hash(load_bundle(testing::fixture("vaccine.json"))) == h);
    auto changed = b;
    changed.sources.begin()->second.reputation = 0.125;
    CHECK(bundle_hash(changed) != h);
}

TEST_CASE("small inline bundle parses") {
    const auto b = parse_bundle(kSmall);
    CHECK(b.corpus.claims.size() == 2);
    CHECK(b.corpus.links.at("ab").declared_weight == 0.5);
    CHECK(b.profile("me").beliefs.at("a") == 0.8);
    CHECK_THROWS_AS(b.profile("you"), NotFound);
}

TEST_CASE("dangling link names the edge and the path") {
    std::string text = kSmall;
    text.replace(text.find(R"("from": "a")"), 11, R"("from": "z")");
    const auto msg = error_of(text);
    CHECK(msg.find("/corpus/links/0/from") == 0);
    CHECK(msg.find("edge 'ab'") != std::string::npos);
    CHECK(msg.find("'z'") != std::string::npos);
}

TEST_CASE("out-of-range weight is rejected with its path") {
    std::string text = kSmall;
    text.replace(text.find("0.5"), 3, "1.5");
    const auto msg = error_of(text);
    CHECK(msg.find("/corpus/links/0/declared_weight") == 0);
    CHECK(msg.find("1.5 outside [0,1]") != std::string::npos);
}

TEST_CASE("unknown fields are rejected") {
    std::string text = kSmall;
    text.replace(text.find(R"("kind": "institution")"), 21, R"("kind": "institution", "colour": "red")");
    CHECK(error_of(text).find("/sources/0/colour: unknown field") == 0);
    CHECK(error_of(R"({"extra": 1})").find("/extra: unknown field") == 0);
}

TEST_CASE("malformed JSON reports a byte offset") {
    CHECK(error_of("{\"sources\": [").find("malformed JSON") != std::string::npos);
}

TEST_CASE("profile references must resolve") {
    std::string text = kSmall;
    text.replace(text.find(R"({"a": 0.8})"), 10, R"({"q": 0.8})");
    CHECK(error_of(text).find("/profiles/me/beliefs/q") == 0);
}

TEST_CASE("stored state evaluations must match a recomputation") {
    auto j = bundle_to_json(load_bundle(testing::fixture("vaccine.json")));
    REQUIRE(j["states"][0].contains("evaluation"));
    CHECK_NOTHROW(parse_bundle(j.dump(), testing::fixtures_dir()));
    auto& scores = j["states"][0]["evaluation"]["scores"];
    REQUIRE(scores.is_object());
    scores.begin().value() = 0.123456;
    try {
        parse_bundle(j.dump(), testing::fixtures_dir());
        FAIL("stale evaluation accepted");
    } catch (const DataError& e) {
        CHECK(e.path() == "/states/adherent/evaluation");
    }
}

TEST_CASE("history is optional in the emitted form") {
    const auto b = load_bundle(testing::fixture("vaccine.json"));
    const auto with = bundle_to_json(b);
    const auto without = bundle_to_json(b, EmitOptions{false});
    for (const auto& s : with["states"]) CHECK(s.contains("revision_log"));
    for (const auto& s : without["states"]) CHECK_FALSE(s.contains("revision_log"));
}

TEST_CASE("revised bundles round-trip including the log") {
    auto b = load_bundle(testing::fixture("climate.json"));
    const auto info = new_information_from_json(
        Json::parse(read_file(testing::fixture("revisions/natural-variation.json"))), "");
    int applied = 0;
    for (auto& [sid, st] : b.states) {
        const RevisionContext ctx{b.profile(st.profile_id), b.sources, b.policy(st.policy_id), b.lexicon.lexicon};
        st = revise(st, info, ctx);
        if (st.revision_log.back().disposition == Disposition::applied) ++applied;
    }
    CHECK(applied == 2);
    const auto text = emit_bundle(b);
    const auto again = parse_bundle(text, testing::fixtures_dir());
    CHECK(again == b);
    CHECK(emit_bundle(again) == text);
}
