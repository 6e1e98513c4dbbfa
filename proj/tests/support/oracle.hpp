#pragma once

// Test-only reference implementations. They follow the written semantics
// directly and share no code with the engine beyond the data types.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mevir/moral.hpp"
#include "mevir/types.hpp"

namespace oracle {

using namespace mevir;

struct NaiveFootprint {
    std::array<double, kFoundationCount> vector{};
    double intensity = 0.0;
    int matched_count = 0;
};

std::vector<std::string> naive_tokens(const std::string& text);

/// Quadratic scan: at each position try every lexicon phrase, keep the longest.
NaiveFootprint naive_footprint(const std::string& text, const MoralLexicon& lexicon);

struct World {
    const TrustLattice& lattice;
    const AgentProfile& profile;
    const SourceTable& sources;
    const TrustPolicy& policy;
    const MoralLexicon& lexicon;
};

/// Recursive evaluation of one node without memoization.
double naive_sigma(const World& w, const std::string& node, const std::set<std::string>& anchors_off,
                   const std::set<std::string>& edges_off);

std::map<std::string, double> naive_scores(const World& w);
std::map<std::string, double> naive_scores(const World& w, const std::set<std::string>& anchors_off,
                                           const std::set<std::string>& edges_off);

double naive_edge_weight(const World& w, const EvidenceEdge& e);

struct OracleRetraction {
    bool cleared = false;
    double total = 0.0;
    std::vector<std::string> elements;  // "anchor:<id>" / "edge:<id>"
    std::size_t candidates = 0;
};

/// Minimum-entrenchment subset over every belief/pre_trusted anchor in the
/// lattice plus every active evaluative edge into a node that reaches a
/// contradicted claim. Totals are summed in ascending (id, kind) order.
OracleRetraction exhaustive_retraction(const World& w);

}  // namespace oracle
