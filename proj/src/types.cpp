#include "mevir/types.hpp"

#include <algorithm>
#include <cmath>

#include "mevir/error.hpp"

namespace mevir {

namespace {

template <typename Enum, std::size_t N>
std::optional<Enum> lookup(const std::array<std::string_view, N>& names, std::string_view s) {
    for (std::size_t i = 0; i < N; ++i) {
        if (names[i] == s) return static_cast<Enum>(i);
    }
    return std::nullopt;
}

constexpr std::array<std::string_view, kFoundationCount> kFoundationNames = {
    "care", "fairness_equity", "fairness_proportionality", "liberty", "loyalty", "authority", "purity"};

constexpr std::array<std::string_view, 5> kEvidenceKindNames = {
    "statistical", "anecdotal", "testimonial", "official_record", "opinion"};

constexpr std::array<std::string_view, 4> kEdgeKindNames = {
    "supports", "attacks", "evidence_for", "sourced_from"};

constexpr std::array<std::string_view, 5> kAnchorKindNames = {
    "belief", "authority", "pre_trusted", "evidence_exhausted", "resource_exhausted"};

constexpr std::array<std::string_view, 6> kSourceKindNames = {
    "individual_expert", "institution", "media", "government", "crowd", "anonymous"};

}  // namespace

std::string_view to_string(Foundation f) { return kFoundationNames[static_cast<std::size_t>(f)]; }
std::optional<Foundation> parse_foundation(std::string_view s) { return lookup<Foundation>(kFoundationNames, s); }

std::string_view to_string(EvidenceKind k) { return kEvidenceKindNames[static_cast<std::size_t>(k)]; }
std::optional<EvidenceKind> parse_evidence_kind(std::string_view s) { return lookup<EvidenceKind>(kEvidenceKindNames, s); }

std::string_view to_string(EdgeKind k) { return kEdgeKindNames[static_cast<std::size_t>(k)]; }
std::optional<EdgeKind> parse_edge_kind(std::string_view s) { return lookup<EdgeKind>(kEdgeKindNames, s); }

std::string_view to_string(AnchorKind k) { return kAnchorKindNames[static_cast<std::size_t>(k)]; }
std::optional<AnchorKind> parse_anchor_kind(std::string_view s) { return lookup<AnchorKind>(kAnchorKindNames, s); }

std::string_view to_string(SourceKind k) { return kSourceKindNames[static_cast<std::size_t>(k)]; }
std::optional<SourceKind> parse_source_kind(std::string_view s) { return lookup<SourceKind>(kSourceKindNames, s); }

double clamp01(double x) {
    if (std::isnan(x)) return 0.0;
    return std::clamp(x, 0.0, 1.0);
}

bool FoundationVector::is_zero() const {
    return std::all_of(values.begin(), values.end(), [](double v) { return v == 0.0; });
}

double FoundationVector::sum() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

std::optional<std::string> Claim::primary_topic() const {
    if (topics.empty()) return std::nullopt;
    return *topics.begin();
}

const Claim& TrustLattice::node(const std::string& node_id) const {
    auto it = nodes.find(node_id);
    if (it == nodes.end()) throw NotFound("lattice '" + id + "' has no node '" + node_id + "'");
    return it->second;
}

const TrustAnchor* TrustLattice::active_anchor(const std::string& node_id) const {
    if (disabled_anchors.contains(node_id)) return nullptr;
    auto it = anchors.find(node_id);
    return it == anchors.end() ? nullptr : &it->second;
}

std::map<std::string, std::vector<std::string>> TrustLattice::provenance() const {
    std::map<std::string, std::set<std::string>> acc;
    for (const auto& [eid, e] : edges) {
        if (e.kind == EdgeKind::sourced_from) acc[e.to].insert(e.from);
    }
    std::map<std::string, std::vector<std::string>> out;
    for (auto& [node_id, ids] : acc) out[node_id].assign(ids.begin(), ids.end());
    return out;
}

std::optional<double> AgentProfile::explicit_trust(const std::string& source_id,
                                                   const std::optional<std::string>& domain) const {
    auto it = source_trust.find(source_id);
    if (it == source_trust.end()) return std::nullopt;
    if (domain) {
        auto d = it->second.domains.find(*domain);
        if (d != it->second.domains.end()) return d->second;
    }
    return it->second.default_trust;
}

double AgentProfile::trust(const std::string& source_id, const std::optional<std::string>& domain) const {
    return explicit_trust(source_id, domain).value_or(0.5);
}

bool RuleMatcher::matches(const Claim& child, const SourceRecord* source) const {
    if (source_kind && (!source || source->kind != *source_kind)) return false;
    if (leaning && (!source || !leaning->contains(source->leaning))) return false;
    if (reputation && (!source || !reputation->contains(source->reputation))) return false;
    if (evidence_kind && child.evidence_kind != *evidence_kind) return false;
    if (proxy_kind && child.proxy_kind != proxy_kind) return false;
    return true;
}

double TrustPolicy::rule_multiplier(const Claim& child, const SourceRecord* source) const {
    for (const auto& rule : weight_rules) {
        if (rule.matcher.matches(child, source)) return rule.multiplier;
    }
    return 1.0;
}

double TrustPolicy::threshold(const std::string& name, double fallback) const {
    auto it = heuristic_thresholds.find(name);
    return it == heuristic_thresholds.end() ? fallback : it->second;
}

}  // namespace mevir
