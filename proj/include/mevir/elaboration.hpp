#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>

#include "mevir/types.hpp"

namespace mevir {

/// The searchable evidence space: claims, declared evidence links between them,
/// and source attachments per claim.
struct ClaimCorpus {
    std::map<std::string, Claim> claims;
    std::map<std::string, EvidenceEdge> links;                 // supports / attacks / evidence_for
    std::map<std::string, std::set<std::string>> attachments;  // claim id -> source ids

    /// Completes the symmetric closure of mutually_exclusive_with.
    void close_exclusivity();

    /// True when some link points at `claim_id`.
    bool has_evidence(const std::string& claim_id) const;

    bool operator==(const ClaimCorpus&) const = default;
};

struct Budget {
    std::size_t max_expansions = 1;
};

/// Expansions spent so far against the budget.
struct BudgetState {
    std::size_t used = 0;
    std::size_t max = 1;

    bool exhausted() const { return used >= max; }
};

/// Anchor classification, first rule wins: pre_trusted, belief, authority,
/// resource_exhausted, evidence_exhausted. Nodes needing no budget (no corpus
/// evidence) are never resource-exhausted. nullopt means "expand this node".
std::optional<TrustAnchor> classify_anchor(const Claim& claim, const ClaimCorpus& corpus,
                                           const AgentProfile& profile, const TrustPolicy& policy,
                                           const SourceTable& sources, const BudgetState& budget);

/// Breadth-first elaboration from `target`. Children are visited in ascending
/// (depth, claim id) order; anchored nodes are not expanded; shared evidence is
/// merged. Throws NotFound for an unknown target and CycleError when the
/// expanded subgraph is cyclic.
TrustLattice elaborate(const ClaimCorpus& corpus, const std::string& target, const AgentProfile& profile,
                       const TrustPolicy& policy, const SourceTable& sources, Budget budget,
                       std::string lattice_id = {});

/// Id given to the provenance edge attaching `source_id` to `claim_id`.
std::string provenance_edge_id(const std::string& claim_id, const std::string& source_id);

}  // namespace mevir
