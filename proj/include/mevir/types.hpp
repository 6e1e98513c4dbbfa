#pragma once

// Shared domain model: claims, evidence edges, trust anchors, lattices,
// agent profiles, sources and trust policies. All types are plain values;
// containers keyed by id keep iteration order canonical.

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace mevir {

// ---------------------------------------------------------------------------
// Moral foundations

enum class Foundation : std::size_t {
    care,
    fairness_equity,
    fairness_proportionality,
    liberty,
    loyalty,
    authority,
    purity,
};

inline constexpr std::size_t kFoundationCount = 7;

inline constexpr std::array<Foundation, kFoundationCount> kAllFoundations = {
    Foundation::care,    Foundation::fairness_equity, Foundation::fairness_proportionality,
    Foundation::liberty, Foundation::loyalty,         Foundation::authority,
    Foundation::purity,
};

std::string_view to_string(Foundation f);
std::optional<Foundation> parse_foundation(std::string_view name);

/// Seven non-negative foundation scores in canonical order.
struct FoundationVector {
    std::array<double, kFoundationCount> values{};

    double& operator[](Foundation f) { return values[static_cast<std::size_t>(f)]; }
    double operator[](Foundation f) const { return values[static_cast<std::size_t>(f)]; }

    bool is_zero() const;
    double sum() const;

    static FoundationVector unit(Foundation f) {
        FoundationVector v;
        v[f] = 1.0;
        return v;
    }

    bool operator==(const FoundationVector&) const = default;
};

// ---------------------------------------------------------------------------
// Claims and edges

enum class EvidenceKind { statistical, anecdotal, testimonial, official_record, opinion };

std::string_view to_string(EvidenceKind k);
std::optional<EvidenceKind> parse_evidence_kind(std::string_view s);

struct Claim {
    std::string id;
    std::string text;
    std::set<std::string> topics;
    std::optional<std::string> truth_maker_kind;
    std::optional<std::string> proxy_kind;
    EvidenceKind evidence_kind = EvidenceKind::opinion;
    std::optional<FoundationVector> footprint;
    std::set<std::string> mutually_exclusive_with;

    /// First topic in canonical (sorted) order, used to select domain trust.
    std::optional<std::string> primary_topic() const;

    bool operator==(const Claim&) const = default;
};

enum class EdgeKind { supports, attacks, evidence_for, sourced_from };

std::string_view to_string(EdgeKind k);
std::optional<EdgeKind> parse_edge_kind(std::string_view s);

struct EvidenceEdge {
    std::string id;
    std::string from;  // child claim, or source id for sourced_from
    std::string to;    // target claim
    EdgeKind kind = EdgeKind::supports;
    double declared_weight = 1.0;

    /// supports / attacks / evidence_for take part in scoring; sourced_from is provenance.
    bool evaluative() const { return kind != EdgeKind::sourced_from; }
    bool is_attack() const { return kind == EdgeKind::attacks; }

    bool operator==(const EvidenceEdge&) const = default;
};

// ---------------------------------------------------------------------------
// Anchors and lattices

enum class AnchorKind { belief, authority, pre_trusted, evidence_exhausted, resource_exhausted };

std::string_view to_string(AnchorKind k);
std::optional<AnchorKind> parse_anchor_kind(std::string_view s);

struct TrustAnchor {
    std::string node_id;
    AnchorKind kind = AnchorKind::evidence_exhausted;
    std::optional<std::string> source_id;  // iff authority
    std::optional<double> base_strength;   // iff belief / pre_trusted

    bool operator==(const TrustAnchor&) const = default;
};

/// A claim's evidence graph rooted at `target_claim_id`. Retracted anchors and
/// edges stay in the lattice and are listed in the disabled sets.
struct TrustLattice {
    std::string id;
    std::string target_claim_id;
    std::map<std::string, Claim> nodes;
    std::map<std::string, EvidenceEdge> edges;
    std::map<std::string, TrustAnchor> anchors;  // keyed by node id
    std::set<std::string> disabled_anchors;      // node ids
    std::set<std::string> disabled_edges;        // edge ids

    const Claim& node(const std::string& node_id) const;

    /// Enabled anchor of `node_id`, or nullptr.
    const TrustAnchor* active_anchor(const std::string& node_id) const;
    bool edge_active(const std::string& edge_id) const { return !disabled_edges.contains(edge_id); }

    /// node id -> source ids, from sourced_from edges (sorted, unique).
    std::map<std::string, std::vector<std::string>> provenance() const;

    bool operator==(const TrustLattice&) const = default;
};

// ---------------------------------------------------------------------------
// Sources, profiles, policies

enum class SourceKind { individual_expert, institution, media, government, crowd, anonymous };

std::string_view to_string(SourceKind k);
std::optional<SourceKind> parse_source_kind(std::string_view s);

struct SourceRecord {
    std::string id;
    std::string name;
    SourceKind kind = SourceKind::anonymous;
    std::set<std::string> expertise_domains;
    double leaning = 0.0;     // [-1, 1]
    double reputation = 0.5;  // [0, 1]
    std::string funding;
    bool public_faith = false;

    bool operator==(const SourceRecord&) const = default;
};

using SourceTable = std::map<std::string, SourceRecord>;

struct SourceTrust {
    std::optional<double> default_trust;
    std::map<std::string, double> domains;

    bool operator==(const SourceTrust&) const = default;
};

struct AgentProfile {
    std::string id;
    FoundationVector foundation_weights;
    std::map<std::string, double> beliefs;
    std::map<std::string, double> pretrusted;
    std::map<std::string, SourceTrust> source_trust;
    std::set<std::string> competence_domains;
    std::set<std::string> bias_dispositions;

    /// Domain entry, then per-source default; nullopt when the profile says nothing.
    std::optional<double> explicit_trust(const std::string& source_id,
                                         const std::optional<std::string>& domain) const;

    /// explicit_trust with the neutral 0.5 fallback.
    double trust(const std::string& source_id, const std::optional<std::string>& domain) const;

    bool operator==(const AgentProfile&) const = default;
};

struct ScoreRange {
    double lo = 0.0;
    double hi = 1.0;
    bool contains(double x) const { return lo <= x && x <= hi; }
    bool operator==(const ScoreRange&) const = default;
};

/// Conjunction of optional predicates over the child claim and its source.
struct RuleMatcher {
    std::optional<SourceKind> source_kind;
    std::optional<ScoreRange> leaning;
    std::optional<ScoreRange> reputation;
    std::optional<EvidenceKind> evidence_kind;
    std::optional<std::string> proxy_kind;

    bool matches(const Claim& child, const SourceRecord* source) const;

    bool operator==(const RuleMatcher&) const = default;
};

struct WeightRule {
    RuleMatcher matcher;
    double multiplier = 1.0;  // [0, 2]

    bool operator==(const WeightRule&) const = default;
};

struct TrustPolicy {
    std::string id;
    double tau = 0.5;
    double prior = 0.5;
    double uncommitted = 0.5;
    double lambda = 0.5;
    double ingest_threshold = 0.3;
    std::vector<WeightRule> weight_rules;  // first match wins
    std::map<std::string, std::set<std::string>> admissible_proxies;
    std::map<std::string, double> heuristic_thresholds;

    /// Multiplier of the first matching rule, 1.0 when none matches.
    double rule_multiplier(const Claim& child, const SourceRecord* source) const;

    double threshold(const std::string& name, double fallback) const;

    bool operator==(const TrustPolicy&) const = default;
};

double clamp01(double x);

}  // namespace mevir
