#include <doctest.h>

#include "gen.hpp"
#include "helpers.hpp"
#include "mevir/error.hpp"
#include "mevir/evaluation.hpp"
#include "oracle.hpp"

using namespace mevir;
using namespace testing;

namespace {

const MoralLexicon kEmpty("empty", "0");

EvaluationResult run(const TrustLattice& l, const TrustPolicy& pol, const AgentProfile& p = {},
                     const SourceTable& s = {}) {
    return evaluate(l, p, s, pol, kEmpty);
}

}  // namespace

TEST_CASE("anchor scores") {
    const Claim c = claim("c");
    AgentProfile p;
    SourceTable s;
    s["src"] = SourceRecord{"src", "S", SourceKind::institution, {}, 0.0, 0.5, "", false};
    const auto pol = policy();
    CHECK(anchor_score(belief("c", 1.0), c, p, s, pol) == 1.0);
    p.source_trust["src"].default_trust = 0.6;
    CHECK(anchor_score(authority("c", "src"), c, p, s, pol) == doctest::Approx(0.30));
    CHECK(anchor_score(exhausted("c"), c, p, s, pol) == 0.5);
    TrustAnchor r{"c", AnchorKind::resource_exhausted, std::nullopt, std::nullopt};
    TrustPolicy shy = pol;
    shy.uncommitted = 0.2;
    CHECK(anchor_score(r, c, p, s, shy) == 0.2);
    CHECK_THROWS_AS(anchor_score(authority("c", "missing"), c, p, s, pol), NotFound);

    Claim topical = claim("c");
    topical.topics = {"health"};
    p.source_trust["src"].domains["health"] = 1.0;
    CHECK(anchor_score(authority("c", "src"), topical, p, s, pol) == 0.5);
    AgentProfile stranger;
    CHECK(anchor_score(authority("c", "src"), topical, stranger, s, pol) == 0.25);
}

TEST_CASE("admissibility") {
    TrustPolicy pol;
    pol.admissible_proxies["legal-parentage"] = {"birth-certificate"};
    pol.admissible_proxies["biological-event"] = {"clinical-trial"};
    CHECK_FALSE(admissible(pol, "legal-parentage", "dna-test"));
    CHECK(admissible(pol, "legal-parentage", "birth-certificate"));
    CHECK(admissible(pol, "speech-act", "anything"));
    CHECK(admissible(pol, "biological-event", "clinical-trial"));
    CHECK(admissible(pol, std::nullopt, "dna-test"));
    CHECK(admissible(pol, "legal-parentage", std::nullopt));
}

TEST_CASE("effective edge weight") {
    Claim child = claim("c", "harm");
    Claim target = claim("t");
    AgentProfile p;
    p.foundation_weights = FoundationVector::unit(Foundation::care);
    MoralLexicon lex("l", "1");
    lex.add("harm", FoundationVector::unit(Foundation::care));
    lex.add("free", FoundationVector::unit(Foundation::liberty));
    const auto e = edge("e", "c", "t");

    SUBCASE("inadmissible proxy vetoes") {
        TrustPolicy pol = policy(0.0);
        pol.admissible_proxies["legal-parentage"] = {"birth-certificate"};
        target.truth_maker_kind = "legal-parentage";
        child.proxy_kind = "dna-test";
        CHECK(effective_edge_weight(e, child, target, p, pol, nullptr, lex) == 0.0);
    }
    SUBCASE("lambda 0 collapses the blend") {
        CHECK(effective_edge_weight(e, child, target, p, policy(0.0), nullptr, lex) == 1.0);
    }
    SUBCASE("lambda 1 follows congruence") {
        CHECK(effective_edge_weight(e, child, target, p, policy(1.0), nullptr, lex) == doctest::Approx(1.0));
        child.text = "free";
        CHECK(effective_edge_weight(e, child, target, p, policy(1.0), nullptr, lex) == 0.0);
    }
    SUBCASE("cached footprint wins over the text") {
        child.footprint = FoundationVector::unit(Foundation::liberty);
        CHECK(effective_edge_weight(e, child, target, p, policy(1.0), nullptr, lex) == 0.0);
    }
    SUBCASE("rule multiplier is clamped") {
        TrustPolicy pol = policy(0.0);
        WeightRule r;
        r.multiplier = 2.0;
        pol.weight_rules = {r};
        CHECK(effective_edge_weight(e, child, target, p, pol, nullptr, lex) == 1.0);
        pol.weight_rules[0].multiplier = 0.25;
        CHECK(effective_edge_weight(e, child, target, p, pol, nullptr, lex) == 0.25);
    }
}

TEST_CASE("attached source prefers the authority anchor") {
    SourceTable s;
    s["a"] = SourceRecord{"a", "A", SourceKind::media, {}, 0.0, 0.5, "", false};
    s["b"] = SourceRecord{"b", "B", SourceKind::media, {}, 0.0, 0.5, "", false};
    auto l = star(0.5);
    CHECK(attached_source(l, "a", s) == nullptr);
    add(l, edge("prov:a:b", "b", "a", EdgeKind::sourced_from));
    add(l, edge("prov:a:a", "a", "a", EdgeKind::sourced_from));
    CHECK(attached_source(l, "a", s)->id == "a");
    l.anchors["a"] = authority("a", "b");
    CHECK(attached_source(l, "a", s)->id == "b");
}

TEST_CASE("combine rule examples") {
    const auto one = run(star(0.8), policy(0.0));
    CHECK(one.scores.at("t") == doctest::Approx(0.9));
    CHECK(one.trace.at("t").support == doctest::Approx(0.8));
    CHECK(one.trace.at("t").attack == 0.0);
    CHECK(one.accepted("t"));

    const auto two = run(star(0.8, 0.3), policy(0.0));
    CHECK(two.trace.at("t").support == doctest::Approx(0.8));
    CHECK(two.trace.at("t").attack == doctest::Approx(0.3));
    CHECK(two.scores.at("t") == doctest::Approx(0.75));
    CHECK(two.verdicts.at("t") == Verdict::accepted);

    const auto losing = run(star(0.2, 0.9), policy(0.0));
    CHECK(losing.scores.at("t") == doctest::Approx(0.5 - 0.5 * 0.7));
    CHECK(combine(0.5, 0.0, 0.0) == 0.5);
    CHECK(combine(0.2, 1.0, 0.0) == 1.0);
    CHECK(combine(0.2, 0.0, 1.0) == 0.0);
}

TEST_CASE("uncommitted never passes a matching threshold") {
    TrustLattice l;
    l.id = "x";
    l.target_claim_id = "t";
    add(l, claim("t"));
    add(l, exhausted("t"));
    const auto r = run(l, policy());
    CHECK(r.scores.at("t") == 0.5);
    CHECK(r.verdicts.at("t") == Verdict::rejected);
}

TEST_CASE("disabled elements drop out of the score") {
    auto l = star(0.8, 0.3);
    l.disabled_edges.insert("eb");
    const auto r = run(l, policy(0.0));
    CHECK(r.scores.at("t") == doctest::Approx(0.9));
    const auto& edges = r.trace.at("t").edges;
    REQUIRE(edges.size() == 2);
    CHECK(edges[1].edge_id == "eb");
    CHECK(edges[1].disabled);
    CHECK(edges[1].contribution == 0.0);

    l.disabled_edges.clear();
    l.disabled_anchors.insert("a");
    const auto r2 = run(l, policy(0.0));
    CHECK(r2.scores.at("a") == 0.5);
}

TEST_CASE("invalid lattices are rejected") {
    auto l = star(0.8);
    add(l, claim("orphan"));
    CHECK_THROWS_AS(run(l, policy()), DataError);
}

TEST_CASE("random lattices: range, monotonicity, lambda invariance, oracle") {
    gen::Rng rng(3);
    for (int trial = 0; trial < 150; ++trial) {
        auto w = gen::random_world(rng);
        gen::LatticeShape shape;
        shape.min_nodes = 2;
        shape.max_nodes = 12;
        const auto l = gen::random_lattice(rng, w, shape);
        const auto r = evaluate(l, w.profile, w.sources, w.policy, w.lexicon);
        const auto ref = oracle::naive_scores(oracle::World{l, w.profile, w.sources, w.policy, w.lexicon});
        for (const auto& [id, s] : r.scores) {
            CHECK(s >= 0.0);
            CHECK(s <= 1.0);
            CHECK(s == doctest::Approx(ref.at(id)).epsilon(1e-12));
        }

        auto grown = l;
        add(grown, claim("zz", "harm"));
        add(grown, belief("zz", gen::uniform(rng)));
        add(grown, edge("zz-edge", "zz", "n00", gen::coin(rng) ? EdgeKind::attacks : EdgeKind::supports,
                        gen::uniform(rng)));
        const bool attack = grown.edges.at("zz-edge").is_attack();
        const double before = r.scores.at("n00");
        const double after = evaluate(grown, w.profile, w.sources, w.policy, w.lexicon).scores.at("n00");
        if (attack) CHECK(after <= before);
        else CHECK(after >= before);

        w.policy.lambda = 0.0;
        const auto base = evaluate(l, w.profile, w.sources, w.policy, w.lexicon);
        auto other = w.profile;
        other.foundation_weights = gen::random_vector(rng);
        CHECK(evaluate(l, other, w.sources, w.policy, gen::random_lexicon(rng, 5)) == base);
    }
}
