#include <doctest.h>

#include "gen.hpp"
#include "helpers.hpp"
#include "mevir/bundle.hpp"
#include "mevir/error.hpp"
#include "mevir/revision.hpp"
#include "oracle.hpp"

using namespace mevir;
using namespace testing;

namespace {

const MoralLexicon kLex("empty", "0");

struct Fixture {
    AgentProfile profile;
    SourceTable sources;
    TrustPolicy pol = policy(0.0);

    Fixture() {
        profile.id = "p";
        sources["good"] = SourceRecord{"good", "Good", SourceKind::institution, {}, 0.0, 1.0, "", false};
        sources["bad"] = SourceRecord{"bad", "Bad", SourceKind::anonymous, {}, 0.0, 0.2, "", false};
        profile.source_trust["good"].default_trust = 1.0;
        profile.source_trust["bad"].default_trust = 0.5;
    }

    RevisionContext ctx(Execution exec = Execution::parallel) const { return {profile, sources, pol, kLex, exec}; }

    EpistemicState state(TrustLattice l) const { return make_state("s", profile, pol, std::move(l), sources, kLex); }
};

// C1 rests on a belief anchor; C2 is exclusive with C1 and currently rejected.
TrustLattice two_claims() {
    TrustLattice l;
    l.id = "L";
    l.target_claim_id = "C1";
    Claim c1 = claim("C1"), c2 = claim("C2");
    c1.mutually_exclusive_with = {"C2"};
    c2.mutually_exclusive_with = {"C1"};
    add(l, c1);
    add(l, c2);
    add(l, claim("B1"));
    add(l, belief("B1", 0.9));
    add(l, edge("b1", "B1", "C1"));
    add(l, claim("W"));
    add(l, belief("W", 0.1));
    add(l, edge("w", "W", "C2", EdgeKind::attacks));
    return l;
}

NewInformation support_c2(double weight) {
    NewInformation info;
    info.claim = claim("X");
    info.source_id = "good";
    info.anchors.push_back(belief("X", 1.0));
    info.edges.push_back(edge("x", "X", "C2", EdgeKind::supports, weight));
    return info;
}

std::string bytes(const EpistemicState& s) {
    return dump_canonical(to_json(s, EmitOptions{false}));
}

}  // namespace

TEST_CASE("contradictions") {
    EvaluationResult r;
    TrustLattice l = two_claims();
    r.verdicts = {{"C1", Verdict::accepted}, {"C2", Verdict::rejected}, {"B1", Verdict::accepted}};
    CHECK(find_contradictions(r, l).empty());
    r.verdicts["C2"] = Verdict::accepted;
    CHECK(find_contradictions(r, l) == std::set<ClaimPair>{{"C1", "C2"}});
    l.nodes["C1"].mutually_exclusive_with.clear();
    CHECK(find_contradictions(r, l).size() == 1);  // one direction is enough
    l.nodes["C2"].mutually_exclusive_with.clear();
    CHECK(find_contradictions(r, l).empty());
}

TEST_CASE("untrusted information is gated out") {
    Fixture f;
    f.pol.ingest_threshold = 0.3;
    const auto s0 = f.state(two_claims());
    auto info = support_c2(0.6);
    info.source_id = "bad";
    const auto s1 = revise(s0, info, f.ctx());
    CHECK(s1.lattice == s0.lattice);
    REQUIRE(s1.revision_log.size() == 1);
    CHECK(s1.revision_log[0].disposition == Disposition::gated_out);
    CHECK_FALSE(s1.lattice.nodes.contains("X"));
    CHECK_THROWS_AS(reinstate(s1, 1, f.ctx()), StateError);
    CHECK_THROWS_AS(reinstate(s1, 7, f.ctx()), NotFound);
}

TEST_CASE("information without exclusivity merges with no conflict") {
    Fixture f;
    const auto s0 = f.state(two_claims());
    NewInformation info;
    info.claim = claim("Y");
    info.source_id = "good";
    info.anchors.push_back(belief("Y", 0.4));
    info.edges.push_back(edge("y", "Y", "C1"));
    const auto s1 = revise(s0, info, f.ctx());
    CHECK(s1.revision_log.back().disposition == Disposition::no_conflict);
    CHECK(s1.lattice.nodes.contains("Y"));
    CHECK(s1.lattice.edges.contains("prov:Y:good"));
    CHECK(s1.lattice.disabled_edges.empty());
    CHECK(s1.evaluation == evaluate(s1.lattice, f.profile, f.sources, f.pol, kLex));
}

TEST_CASE("the cheapest new edge is retracted") {
    Fixture f;
    const auto s0 = f.state(two_claims());
    CHECK(s0.evaluation.accepted("C1"));
    CHECK_FALSE(s0.evaluation.accepted("C2"));
    const auto s1 = revise(s0, support_c2(0.6), f.ctx());
    const auto& entry = s1.revision_log.back();
    CHECK(entry.disposition == Disposition::applied);
    REQUIRE(entry.retracted_edges.size() == 1);
    CHECK(entry.retracted_edges[0].id == "x");
    CHECK(entry.retracted_anchors.empty());
    CHECK(s1.lattice.disabled_edges == std::set<std::string>{"x"});
    CHECK(s1.lattice.edges.contains("x"));
    CHECK(find_contradictions(s1.evaluation, s1.lattice).empty());

    // Reversal restores the pre-revision content exactly.
    const auto s2 = reinstate(s1, entry.id, f.ctx());
    CHECK(bytes(s2) == bytes(s0));
    CHECK(s2.revision_log.back().disposition == Disposition::reinstated);
    CHECK(s2.revision_log.back().reverses == entry.id);
    CHECK_THROWS_AS(reinstate(s2, entry.id, f.ctx()), StateError);
}

TEST_CASE("minimal retraction picks the cheaper anchor") {
    Fixture f;
    f.pol.prior = 0.2;
    TrustLattice l;
    l.id = "L";
    l.target_claim_id = "A";
    Claim a = claim("A"), b = claim("B");
    a.mutually_exclusive_with = {"B"};
    add(l, a);
    add(l, b);
    add(l, claim("b1"));
    add(l, claim("b2"));
    add(l, belief("b1", 0.9));
    add(l, belief("b2", 0.6));
    add(l, edge("e1", "b1", "A", EdgeKind::supports, 1.0));
    add(l, edge("e2", "b2", "B", EdgeKind::supports, 1.0));
    const auto r = evaluate(l, f.profile, f.sources, f.pol, kLex);
    const auto c = find_contradictions(r, l);
    REQUIRE(c.size() == 1);
    const auto set = minimal_retraction(l, r, c, f.ctx());
    REQUIRE(set.elements.size() == 1);
    CHECK(set.elements[0].id == "b2");
    CHECK(set.elements[0].kind == RetractionElement::Kind::anchor);
    CHECK(set.total_entrenchment == 0.6);
    CHECK(set.exhaustive);

    SUBCASE("equal entrenchment breaks ties by id") {
        l.anchors["b1"].base_strength = 0.6;
        l.anchors["b2"].base_strength = 0.6;
        l.edges["e1"].declared_weight = 1.0;
        const auto r2 = evaluate(l, f.profile, f.sources, f.pol, kLex);
        const auto s2 = minimal_retraction(l, r2, find_contradictions(r2, l), f.ctx());
        REQUIRE(s2.elements.size() == 1);
        CHECK(s2.elements[0].id == "b1");
    }
}

TEST_CASE("two light edges beat one heavy anchor") {
    Fixture f;
    f.pol.prior = 0.2;
    f.pol.tau = 0.3;
    TrustLattice l;
    l.id = "L";
    l.target_claim_id = "A";
    Claim a = claim("A"), b = claim("B");
    a.mutually_exclusive_with = {"B"};
    add(l, a);
    add(l, b);
    add(l, claim("k"));
    add(l, belief("k", 0.6));
    add(l, edge("ka", "k", "A", EdgeKind::supports, 0.55));
    for (const auto& [id, w] : std::vector<std::pair<std::string, double>>{{"m", 0.2}, {"n", 0.3}}) {
        add(l, claim(id));
        add(l, belief(id, 1.0));
        add(l, edge("e" + id, id, "B", EdgeKind::supports, w));
    }
    const auto r = evaluate(l, f.profile, f.sources, f.pol, kLex);
    const auto c = find_contradictions(r, l);
    REQUIRE(c.size() == 1);
    const auto set = minimal_retraction(l, r, c, f.ctx());
    REQUIRE(set.elements.size() == 2);
    CHECK(set.elements[0].id == "em");
    CHECK(set.elements[1].id == "en");
    CHECK(set.total_entrenchment == doctest::Approx(0.5));
}

TEST_CASE("independent revisions survive reinstating the first") {
    Fixture f;
    const auto s0 = f.state(two_claims());
    const auto s1 = revise(s0, support_c2(0.6), f.ctx());
    NewInformation other;
    other.claim = claim("Z");
    other.source_id = "good";
    other.anchors.push_back(belief("Z", 0.5));
    other.edges.push_back(edge("z", "Z", "C1"));
    const auto s2 = revise(s1, other, f.ctx());
    CHECK(s2.revision_log.back().disposition == Disposition::no_conflict);
    const auto s3 = reinstate(s2, 1, f.ctx());
    CHECK_FALSE(s3.lattice.nodes.contains("X"));
    CHECK(s3.lattice.nodes.contains("Z"));
    CHECK(s3.lattice.edges.contains("z"));
    CHECK(s3.lattice.disabled_edges.empty());
}

TEST_CASE("merge errors leave the state untouched") {
    Fixture f;
    const auto s0 = f.state(two_claims());
    auto info = support_c2(0.6);
    info.edges.push_back(edge("b1", "X", "C1"));
    CHECK_THROWS_AS(revise(s0, info, f.ctx()), DataError);
    info = support_c2(0.6);
    info.edges[0].to = "ghost";
    CHECK_THROWS_AS(revise(s0, info, f.ctx()), DataError);
    info = support_c2(0.6);
    info.source_id = "nobody";
    CHECK_THROWS_AS(revise(s0, info, f.ctx()), NotFound);
}

TEST_CASE("random instances match the exhaustive oracle and reverse exactly") {
    gen::Rng rng(17);
    int checked = 0;
    for (int trial = 0; trial < 60; ++trial) {
        auto w = gen::random_world(rng);
        const auto inst = gen::random_revision(rng, w);
        RevisionEntry scratch;
        const auto merged = merge_information(inst.lattice, inst.info, scratch);
        const RevisionContext ctx{w.profile, w.sources, w.policy, w.lexicon};
        const auto r = evaluate(merged, w.profile, w.sources, w.policy, w.lexicon);
        const auto conflicts = find_contradictions(r, merged);
        const LatticeEvaluator ev(merged, w.profile, w.sources, w.policy, w.lexicon);
        if (retraction_candidates(merged, conflicts, ev).size() > kExhaustiveCandidateLimit) continue;
        const auto ref = oracle::exhaustive_retraction(oracle::World{merged, w.profile, w.sources, w.policy, w.lexicon});
        ++checked;
        if (!ref.cleared) {
            CHECK_THROWS_AS(minimal_retraction(merged, r, conflicts, ctx), StateError);
            continue;
        }
        const auto set = minimal_retraction(merged, r, conflicts, ctx);
        CHECK(set.total_entrenchment == ref.total);

        const auto s0 = make_state("s", w.profile, w.policy, inst.lattice, w.sources, w.lexicon);
        const auto s1 = revise(s0, inst.info, ctx);
        REQUIRE(s1.revision_log.back().disposition == Disposition::applied);
        CHECK(find_contradictions(s1.evaluation, s1.lattice).empty());
        CHECK(bytes(reinstate(s1, 1, ctx)) == bytes(s0));
    }
    CHECK(checked > 30);
}
