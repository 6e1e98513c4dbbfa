#include <doctest.h>

#include "gen.hpp"
#include "mevir/error.hpp"
#include "mevir/moral.hpp"
#include "mevir/revision.hpp"

using namespace mevir;

TEST_CASE("parallel evaluation equals serial") {
    gen::Rng rng(101);
    gen::LatticeShape big;
    big.min_nodes = 40;
    big.max_nodes = 120;
    big.extra_edge_chance = 0.05;
    for (int i = 0; i < 30; ++i) {
        auto w = gen::random_world(rng);
        const auto l = gen::random_lattice(rng, w, big);
        const auto s = evaluate(l, w.profile, w.sources, w.policy, w.lexicon, Execution::serial);
        const auto p = evaluate(l, w.profile, w.sources, w.policy, w.lexicon, Execution::parallel);
        CHECK(s == p);
    }
}

TEST_CASE("batch footprints equal serial") {
    gen::Rng rng(102);
    const auto lexicon = gen::random_lexicon(rng, 40);
    std::vector<std::string> texts;
    for (int i = 0; i < 2000; ++i) texts.push_back(gen::random_text(rng, 30));
    const auto s = compute_footprints_serial(texts, lexicon);
    const auto p = compute_footprints(texts, lexicon);
    REQUIRE(s.size() == p.size());
    for (std::size_t i = 0; i < s.size(); ++i) CHECK(s[i] == p[i]);
}

TEST_CASE("parallel retraction search equals serial") {
    gen::Rng rng(103);
    int checked = 0;
    for (int i = 0; i < 40; ++i) {
        auto w = gen::random_world(rng);
        const auto inst = gen::random_revision(rng, w);
        RevisionEntry entry;
        const auto merged = merge_information(inst.lattice, inst.info, entry);
        const auto ev = evaluate(merged, w.profile, w.sources, w.policy, w.lexicon);
        const auto pairs = find_contradictions(ev, merged);
        REQUIRE_FALSE(pairs.empty());
        RevisionContext serial{w.profile, w.sources, w.policy, w.lexicon, Execution::serial};
        RevisionContext parallel{w.profile, w.sources, w.policy, w.lexicon, Execution::parallel};
        RetractionSet a, b;
        bool a_ok = true, b_ok = true;
        try {
            a = minimal_retraction(merged, ev, pairs, serial);
        } catch (const StateError&) {
            a_ok = false;
        }
        try {
            b = minimal_retraction(merged, ev, pairs, parallel);
        } catch (const StateError&) {
            b_ok = false;
        }
        REQUIRE(a_ok == b_ok);
        if (!a_ok) continue;
        CHECK(a.elements == b.elements);
        CHECK(a.total_entrenchment == b.total_entrenchment);
        CHECK(a.exhaustive == b.exhaustive);
        ++checked;
    }
    CHECK(checked > 20);
}
