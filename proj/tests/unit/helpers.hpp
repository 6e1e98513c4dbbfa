#pragma once

#include <filesystem>
#include <string>

#include "mevir/bundle.hpp"

namespace testing {

inline std::filesystem::path fixtures_dir() { return MEVIR_FIXTURES_DIR; }

inline std::filesystem::path fixture(const std::string& name) { return fixtures_dir() / name; }

inline mevir::Claim claim(const std::string& id, const std::string& text = "") {
    mevir::Claim c;
    c.id = id;
    c.text = text;
    return c;
}

inline mevir::EvidenceEdge edge(const std::string& id, const std::string& from, const std::string& to,
                                mevir::EdgeKind kind = mevir::EdgeKind::supports, double w = 1.0) {
    return mevir::EvidenceEdge{id, from, to, kind, w};
}

inline mevir::TrustAnchor belief(const std::string& node, double strength) {
    return mevir::TrustAnchor{node, mevir::AnchorKind::belief, std::nullopt, strength};
}

inline mevir::TrustAnchor exhausted(const std::string& node) {
    return mevir::TrustAnchor{node, mevir::AnchorKind::evidence_exhausted, std::nullopt, std::nullopt};
}

inline mevir::TrustAnchor authority(const std::string& node, const std::string& source) {
    return mevir::TrustAnchor{node, mevir::AnchorKind::authority, source, std::nullopt};
}

inline void add(mevir::TrustLattice& l, const mevir::Claim& c) { l.nodes[c.id] = c; }
inline void add(mevir::TrustLattice& l, const mevir::EvidenceEdge& e) { l.edges[e.id] = e; }
inline void add(mevir::TrustLattice& l, const mevir::TrustAnchor& a) { l.anchors[a.node_id] = a; }

/// Target t supported (and optionally attacked) by anchored leaves.
inline mevir::TrustLattice star(double support, std::optional<double> attack = std::nullopt) {
    mevir::TrustLattice l;
    l.id = "star";
    l.target_claim_id = "t";
    add(l, claim("t"));
    add(l, claim("a"));
    add(l, belief("a", support));
    add(l, edge("ea", "a", "t"));
    if (attack) {
        add(l, claim("b"));
        add(l, belief("b", *attack));
        add(l, edge("eb", "b", "t", mevir::EdgeKind::attacks));
    }
    return l;
}

inline mevir::TrustPolicy policy(double lambda = 0.0) {
    mevir::TrustPolicy p;
    p.id = "pol";
    p.lambda = lambda;
    return p;
}

}  // namespace testing
