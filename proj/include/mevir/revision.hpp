#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "mevir/evaluation.hpp"
#include "mevir/types.hpp"

namespace mevir {

enum class Disposition { applied, gated_out, no_conflict, failed, reinstated };

std::string_view to_string(Disposition d);
std::optional<Disposition> parse_disposition(std::string_view s);

/// Incoming information: one claim, the edges linking it into the lattice, the
/// delivering source, and anchors for any new leaves.
struct NewInformation {
    Claim claim;
    std::vector<EvidenceEdge> edges;
    std::string source_id;
    std::vector<TrustAnchor> anchors;

    bool operator==(const NewInformation&) const = default;
};

struct RevisionEntry {
    std::uint64_t id = 0;
    std::string trigger_claim;
    std::string trigger_source;
    Disposition disposition = Disposition::no_conflict;
    std::vector<TrustAnchor> retracted_anchors;  // snapshots, as they were when disabled
    std::vector<EvidenceEdge> retracted_edges;
    std::vector<std::string> added_nodes;    // elements merged from the information
    std::vector<std::string> added_edges;
    std::vector<std::string> added_anchors;
    std::optional<std::uint64_t> reverses;   // set on reinstated entries
    std::string context;

    bool operator==(const RevisionEntry&) const = default;
};

struct EpistemicState {
    std::string id;
    std::string profile_id;
    std::string policy_id;
    TrustLattice lattice;
    EvaluationResult evaluation;
    std::vector<RevisionEntry> revision_log;

    std::uint64_t next_revision_id() const;

    bool operator==(const EpistemicState&) const = default;
};

/// Everything revision needs besides the state itself.
struct RevisionContext {
    const AgentProfile& profile;
    const SourceTable& sources;
    const TrustPolicy& policy;
    const MoralLexicon& lexicon;
    Execution exec = Execution::parallel;
};

using ClaimPair = std::pair<std::string, std::string>;  // first < second

/// Unordered pairs of mutually exclusive nodes that are both accepted.
std::set<ClaimPair> find_contradictions(const EvaluationResult& evaluation, const TrustLattice& lattice);

struct RetractionElement {
    enum class Kind { anchor, edge };
    Kind kind = Kind::anchor;
    std::string id;  // node id for anchors, edge id for edges
    double entrenchment = 0.0;

    bool operator==(const RetractionElement&) const = default;
};

struct RetractionSet {
    std::vector<RetractionElement> elements;  // ascending (id, kind)
    double total_entrenchment = 0.0;
    bool exhaustive = true;
};

/// Candidates for retraction: enabled belief / pre_trusted anchors and enabled
/// evidence edges on nodes that reach a contradicted claim. Sorted by (id, kind).
std::vector<RetractionElement> retraction_candidates(const TrustLattice& lattice,
                                                     const std::set<ClaimPair>& contradictions,
                                                     const LatticeEvaluator& evaluator);

/// Cheapest set of candidates whose disabling clears every contradiction.
/// Exhaustive over subsets when there are at most 16 candidates (ties: fewer
/// elements, then smallest id sequence), greedy by entrenchment otherwise.
/// Throws StateError when nothing clears the contradictions.
RetractionSet minimal_retraction(const TrustLattice& lattice, const EvaluationResult& evaluation,
                                 const std::set<ClaimPair>& contradictions, const RevisionContext& ctx);

inline constexpr std::size_t kExhaustiveCandidateLimit = 16;

/// Builds a state for `lattice` with its evaluation.
EpistemicState make_state(std::string id, const AgentProfile& profile, const TrustPolicy& policy,
                          TrustLattice lattice, const SourceTable& sources, const MoralLexicon& lexicon);

/// Merges `lattice` and `info` without evaluating; throws DataError if the
/// result is not a valid lattice. `entry` receives the added element ids.
TrustLattice merge_information(const TrustLattice& lattice, const NewInformation& info, RevisionEntry& entry);

/// Trust-gated minimal-change revision. Returns the new state; the input is untouched.
EpistemicState revise(const EpistemicState& state, const NewInformation& info, const RevisionContext& ctx);

/// Undoes an applied revision: re-enables its retracted elements and removes
/// what it merged. Throws NotFound / StateError on bad ids or dispositions.
EpistemicState reinstate(const EpistemicState& state, std::uint64_t revision_id, const RevisionContext& ctx);

}  // namespace mevir
