#include <doctest.h>

#include <algorithm>

#include "helpers.hpp"
#include "mevir/validate.hpp"

using namespace mevir;
using namespace testing;

namespace {

bool has(const std::vector<Violation>& v, ViolationKind k, const std::string& id) {
    return std::any_of(v.begin(), v.end(), [&](const Violation& x) {
        return x.kind == k && std::find(x.ids.begin(), x.ids.end(), id) != x.ids.end();
    });
}

}  // namespace

TEST_CASE("a well-formed lattice has no violations") {
    CHECK(validate_lattice(star(0.8, 0.3)).empty());
}

TEST_CASE("each invariant is reported") {
    SUBCASE("missing target") {
        auto l = star(0.8);
        l.target_claim_id = "zz";
        CHECK(has(validate_lattice(l), ViolationKind::missing_target, "zz"));
    }
    SUBCASE("dangling edge names the edge") {
        auto l = star(0.8);
        add(l, edge("bad", "a", "ghost"));
        CHECK(has(validate_lattice(l), ViolationKind::dangling_edge, "bad"));
    }
    SUBCASE("self loop") {
        auto l = star(0.8);
        add(l, edge("loop", "t", "t"));
        CHECK(has(validate_lattice(l), ViolationKind::self_loop, "loop"));
    }
    SUBCASE("cycle") {
        auto l = star(0.8);
        add(l, claim("m"));
        add(l, edge("e1", "t", "m"));
        add(l, edge("e2", "m", "t"));
        CHECK(has(validate_lattice(l), ViolationKind::cycle, "m"));
    }
    SUBCASE("unanchored leaf") {
        auto l = star(0.8);
        add(l, claim("orphan"));
        CHECK(has(validate_lattice(l), ViolationKind::missing_anchor, "orphan"));
    }
    SUBCASE("anchor with incoming evidence") {
        auto l = star(0.8);
        add(l, belief("t", 0.5));
        CHECK(has(validate_lattice(l), ViolationKind::anchored_with_incoming, "t"));
    }
    SUBCASE("anchor fields must match the kind") {
        auto l = star(0.8);
        l.anchors["a"].source_id = "s";
        CHECK(has(validate_lattice(l), ViolationKind::anchor_fields, "a"));
        l = star(0.8);
        l.anchors["a"].base_strength.reset();
        CHECK(has(validate_lattice(l), ViolationKind::anchor_fields, "a"));
    }
    SUBCASE("ranges") {
        auto l = star(1.5);
        CHECK(has(validate_lattice(l), ViolationKind::out_of_range, "a"));
        l = star(0.5);
        l.edges["ea"].declared_weight = -0.1;
        CHECK(has(validate_lattice(l), ViolationKind::out_of_range, "ea"));
    }
    SUBCASE("disabled ids must exist") {
        auto l = star(0.5);
        l.disabled_edges.insert("nope");
        l.disabled_anchors.insert("t");
        const auto v = validate_lattice(l);
        CHECK(has(v, ViolationKind::unknown_disabled, "nope"));
        CHECK(has(v, ViolationKind::unknown_disabled, "t"));
    }
}

TEST_CASE("height levels ignore provenance and keep disabled edges") {
    auto l = star(0.8, 0.3);
    add(l, edge("prov:t:s", "s", "t", EdgeKind::sourced_from));
    l.disabled_edges.insert("eb");
    const auto levels = height_levels(l);
    REQUIRE(levels.size() == 2);
    CHECK(levels[0] == std::vector<std::string>{"a", "b"});
    CHECK(levels[1] == std::vector<std::string>{"t"});
    CHECK(incoming_edges(l).at("t").size() == 2);
}
