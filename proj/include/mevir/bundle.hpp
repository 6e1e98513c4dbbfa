#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "mevir/diagnostics.hpp"
#include "mevir/elaboration.hpp"
#include "mevir/evaluation.hpp"
#include "mevir/moral.hpp"
#include "mevir/revision.hpp"
#include "mevir/types.hpp"

namespace mevir {

using Json = nlohmann::json;

/// Lexicon carried by a bundle, either inline or by path relative to the bundle file.
struct LexiconRef {
    std::optional<std::string> path;
    MoralLexicon lexicon;

    bool operator==(const LexiconRef&) const = default;
};

/// Self-contained document holding every input the engine works on.
struct Bundle {
    ClaimCorpus corpus;
    std::map<std::string, AgentProfile> profiles;
    SourceTable sources;
    std::map<std::string, TrustPolicy> policies;
    LexiconRef lexicon;
    std::map<std::string, TrustLattice> lattices;
    std::map<std::string, EpistemicState> states;
    std::map<std::string, SessionLog> sessions;

    const AgentProfile& profile(const std::string& id) const;
    const TrustPolicy& policy(const std::string& id) const;
    const SessionLog& session(const std::string& id) const;
    const EpistemicState& state(const std::string& id) const;

    /// Bare lattice, or the lattice of a state (matched by lattice id, then state id).
    const TrustLattice& lattice(const std::string& id) const;
    /// State owning lattice `id`, if any.
    const EpistemicState* state_for_lattice(const std::string& id) const;

    bool operator==(const Bundle&) const = default;
};

struct EmitOptions {
    /// Revision logs are history; content comparisons leave them out.
    bool include_history = true;
};

/// Parses and fully validates a bundle. Lexicon paths resolve against `base_dir`.
/// Throws DataError naming the offending JSON path.
Bundle parse_bundle(std::string_view bytes, const std::filesystem::path& base_dir = {});
Bundle load_bundle(const std::filesystem::path& file);

/// Canonical form: sorted keys, id-sorted arrays, two-space indent, trailing newline.
std::string emit_bundle(const Bundle& bundle, EmitOptions options = {});
Json bundle_to_json(const Bundle& bundle, EmitOptions options = {});

/// Lowercase hex SHA-256 of the canonical serialization.
std::string bundle_hash(const Bundle& bundle);

std::string dump_canonical(const Json& j);

// Per-type conversions. Readers reject unknown fields and out-of-range values,
// reporting `path`.
Json to_json(const FoundationVector& v);
Json to_json(const Claim& c);
Json to_json(const EvidenceEdge& e);
Json to_json(const TrustAnchor& a);
Json to_json(const TrustLattice& l);
Json to_json(const AgentProfile& p);
Json to_json(const SourceRecord& s);
Json to_json(const TrustPolicy& p);
Json to_json(const ClaimCorpus& c);
Json to_json(const Footprint& f);
Json to_json(const BiasFlag& f);
Json to_json(const SessionEvent& e);
Json to_json(const SessionLog& s);
Json to_json(const NewInformation& info);
Json to_json(const RevisionEntry& e);
Json to_json(const EpistemicState& s, EmitOptions options = {});
Json to_json(const EvaluationResult& r, bool with_trace);

FoundationVector foundation_vector_from_json(const Json& j, const std::string& path, bool partial = false,
                                             FoundationVector base = {});
Claim claim_from_json(const Json& j, const std::string& path);
EvidenceEdge edge_from_json(const Json& j, const std::string& path);
TrustAnchor anchor_from_json(const Json& j, const std::string& path);
TrustLattice lattice_from_json(const Json& j, const std::string& path);
AgentProfile profile_from_json(const Json& j, const std::string& path);
SourceRecord source_from_json(const Json& j, const std::string& path);
TrustPolicy policy_from_json(const Json& j, const std::string& path);
SourceTrust source_trust_from_json(const Json& j, const std::string& path);
SessionEvent session_event_from_json(const Json& j, const std::string& path);
SessionLog session_from_json(const Json& j, const std::string& path);
NewInformation new_information_from_json(const Json& j, const std::string& path);
RevisionEntry revision_entry_from_json(const Json& j, const std::string& path);

/// Applies the policy fields present in `j` (tau, prior, ...) on top of `base`.
TrustPolicy policy_overrides_from_json(const Json& j, const std::string& path, TrustPolicy base);

/// Parses JSON text, turning syntax errors into DataError with the byte offset.
Json parse_json_text(std::string_view text, const std::string& what);

}  // namespace mevir
