#include <doctest.h>

#include "dot_check.hpp"
#include "gen.hpp"
#include "helpers.hpp"
#include "mevir/bundle.hpp"
#include "mevir/dot.hpp"

using namespace mevir;
using testing::add;

namespace {

std::string render(const TrustLattice& l, const TrustPolicy& p = testing::policy()) {
    return export_dot(l, evaluate(l, AgentProfile{}, SourceTable{}, p, MoralLexicon{}));
}

const dotcheck::Statement* node(const dotcheck::Result& r, const std::string& id) {
    for (const auto& n : r.nodes) {
        if (n.ids.front() == id) return &n;
    }
    return nullptr;
}

}  // namespace

TEST_CASE("single belief node") {
    TrustLattice l;
    l.id = "one";
    l.target_claim_id = "n";
    add(l, testing::claim("n"));
    add(l, testing::belief("n", 1.0));
    const auto text = render(l);
    const auto r = dotcheck::check(text);
    REQUIRE_MESSAGE(r.ok, r.error);
    CHECK(r.directed);
    CHECK(r.graph_id == "one");
    REQUIRE(r.nodes.size() == 1);
    CHECK(r.edges.empty());
    const auto& label = r.nodes[0].attrs.at("label");
    CHECK(label.find("σ=1.000") != std::string::npos);
    CHECK(label.find("accepted") != std::string::npos);
    CHECK(r.nodes[0].attrs.at("shape") == "box");
}

TEST_CASE("star with an attack") {
    const auto text = render(testing::star(0.9, 0.4));
    const auto r = dotcheck::check(text);
    REQUIRE_MESSAGE(r.ok, r.error);
    CHECK(r.nodes.size() == 3);
    REQUIRE(r.edges.size() == 2);
    for (const auto& e : r.edges) {
        REQUIRE(e.ids.size() == 2);
        if (e.attrs.at("id") == "eb") {
            CHECK(e.ids[0] == "b");
            CHECK(e.ids[1] == "t");
            CHECK(e.attrs.at("color") == "red");
            CHECK(e.attrs.at("arrowhead") == "tee");
        } else {
            CHECK(e.attrs.count("color") == 0);
        }
    }
    CHECK(node(r, "t")->attrs.at("penwidth") == "2");
    CHECK(node(r, "t")->attrs.at("shape") == "ellipse");
}

TEST_CASE("disabled elements are dotted and provenance sources get nodes") {
    auto l = testing::star(0.9, 0.4);
    l.disabled_anchors.insert("a");
    l.disabled_edges.insert("eb");
    add(l, testing::edge(provenance_edge_id("a", "src"), "src", "a", EdgeKind::sourced_from));
    const auto r = dotcheck::check(render(l));
    REQUIRE_MESSAGE(r.ok, r.error);
    CHECK(node(r, "a")->attrs.at("style") == "dotted");
    REQUIRE(node(r, "src") != nullptr);
    CHECK(node(r, "src")->attrs.at("shape") == "note");
    for (const auto& e : r.edges) {
        if (e.attrs.at("id") == "eb") CHECK(e.attrs.at("style") == "dotted");
    }
}

TEST_CASE("ids needing quotes stay valid") {
    TrustLattice l;
    l.id = "odd \"graph\"";
    l.target_claim_id = "x y";
    add(l, testing::claim("x y"));
    add(l, testing::claim("a->b"));
    add(l, testing::belief("a->b", 0.5));
    add(l, testing::edge("e", "a->b", "x y"));
    const auto r = dotcheck::check(render(l));
    REQUIRE_MESSAGE(r.ok, r.error);
    CHECK(node(r, "x y") != nullptr);
    CHECK(node(r, "a->b") != nullptr);
}

TEST_CASE("random lattices and fixtures export valid DOT") {
    gen::Rng rng(7);
    for (int i = 0; i < 50; ++i) {
        auto w = gen::random_world(rng);
        const auto l = gen::random_lattice(rng, w);
        const auto text = export_dot(l, evaluate(l, w.profile, w.sources, w.policy, w.lexicon));
        const auto r = dotcheck::check(text);
        REQUIRE_MESSAGE(r.ok, r.error);
        CHECK(r.nodes.size() >= l.nodes.size());
        CHECK(r.edges.size() == l.edges.size());
    }
    const auto b = load_bundle(testing::fixture("vaccine.json"));
    for (const auto& [sid, st] : b.states) {
        const auto r = dotcheck::check(export_dot(st.lattice, st.evaluation));
        CHECK_MESSAGE(r.ok, r.error);
    }
}
