#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mevir/moral.hpp"
#include "mevir/types.hpp"

namespace mevir {

enum class Verdict { accepted, rejected };

std::string_view to_string(Verdict v);
std::optional<Verdict> parse_verdict(std::string_view s);

struct EdgeTrace {
    std::string edge_id;
    std::string child;
    bool attack = false;
    double weight = 0.0;        // effective edge weight
    double contribution = 0.0;  // child score x weight; 0 when the edge is disabled
    bool disabled = false;

    bool operator==(const EdgeTrace&) const = default;
};

struct NodeTrace {
    double support = 0.0;  // S
    double attack = 0.0;   // A
    std::vector<EdgeTrace> edges;

    bool operator==(const NodeTrace&) const = default;
};

struct EvaluationResult {
    std::string lattice_id;
    std::map<std::string, double> scores;
    std::map<std::string, Verdict> verdicts;
    std::map<std::string, NodeTrace> trace;

    bool accepted(const std::string& node_id) const;

    bool operator==(const EvaluationResult&) const = default;
};

enum class Execution { serial, parallel };

/// Score of an anchored node. Authority anchors need `claim` (for the domain
/// topic) and throw NotFound when their source is missing.
double anchor_score(const TrustAnchor& anchor, const Claim& claim, const AgentProfile& profile,
                    const SourceTable& sources, const TrustPolicy& policy);

/// Whether `proxy_kind` may stand in for `truth_maker_kind` under the policy.
/// Absent tags and unlisted truth-maker kinds are admissible.
bool admissible(const TrustPolicy& policy, const std::optional<std::string>& truth_maker_kind,
                const std::optional<std::string>& proxy_kind);

/// Source whose metadata weight rules see for `child`: its authority anchor's
/// source, else the first provenance source. nullptr when none resolves.
const SourceRecord* attached_source(const TrustLattice& lattice, const std::string& child,
                                    const SourceTable& sources);

/// Effective weight of an evidence edge in [0,1]: zero for inadmissible proxies,
/// else declared weight x first-rule multiplier x moral blend, clamped.
double effective_edge_weight(const EvidenceEdge& edge, const Claim& child, const Claim& target,
                             const AgentProfile& profile, const TrustPolicy& policy,
                             const SourceRecord* child_source, const MoralLexicon& lexicon);

/// Bipolar combination of aggregated support S and attack A around prior v0.
double combine(double prior, double support, double attack);

/// Precomputed scoring plan for one lattice under one profile/policy/lexicon.
/// Re-running with different disabled sets reuses edge weights and topology.
class LatticeEvaluator {
public:
    LatticeEvaluator(const TrustLattice& lattice, const AgentProfile& profile, const SourceTable& sources,
                     const TrustPolicy& policy, const MoralLexicon& lexicon,
                     Execution exec = Execution::parallel);

    /// Evaluates with the lattice's own disabled sets.
    EvaluationResult evaluate() const;

    /// Evaluates with the given disabled anchors (node ids) and edges (edge ids).
    EvaluationResult evaluate(const std::set<std::string>& disabled_anchors,
                              const std::set<std::string>& disabled_edges) const;

    /// Node scores indexed as `node_ids()`, for masks indexed as `node_ids()` and `edge_ids()`.
    std::vector<double> scores(const std::vector<char>& anchor_off, const std::vector<char>& edge_off) const;

    const std::vector<std::string>& node_ids() const { return node_ids_; }
    const std::vector<std::string>& edge_ids() const { return edge_ids_; }
    std::size_t node_index(const std::string& id) const;
    std::size_t edge_index(const std::string& id) const;

    /// Effective weight of an evaluative edge.
    double edge_weight(const std::string& edge_id) const;

    const TrustPolicy& policy() const { return policy_; }
    Execution execution() const { return exec_; }

private:
    struct Incoming {
        std::size_t edge;
        std::size_t child;
        bool attack;
        double weight;
    };

    double score_node(std::size_t n, const std::vector<double>& sigma, const std::vector<char>& anchor_off,
                      const std::vector<char>& edge_off) const;

    const TrustLattice& lattice_;
    const TrustPolicy& policy_;
    Execution exec_;
    std::vector<std::string> node_ids_;
    std::vector<std::string> edge_ids_;  // evaluative edges only
    std::map<std::string, std::size_t> node_index_;
    std::map<std::string, std::size_t> edge_index_;
    std::vector<std::optional<double>> anchor_score_;  // per node
    std::vector<std::vector<Incoming>> incoming_;      // per node, edge id order
    std::vector<std::vector<std::size_t>> levels_;
    std::vector<double> edge_weight_;
};

/// Scores every node (children before parents) and renders verdicts
/// (accepted iff score > tau). Throws DataError when the lattice is invalid.
EvaluationResult evaluate(const TrustLattice& lattice, const AgentProfile& profile, const SourceTable& sources,
                          const TrustPolicy& policy, const MoralLexicon& lexicon,
                          Execution exec = Execution::parallel);

}  // namespace mevir
