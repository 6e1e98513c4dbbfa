#include "mevir/diagnostics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <set>

#include "mevir/error.hpp"

namespace mevir {

namespace {

constexpr std::string_view kPath2 = "Corruption of Path 2";
constexpr std::string_view kPath1 = "Misapplication of Path 1";
constexpr std::string_view kPath1Evidence = "Corruption of the evidence base for Path 1";

std::string_view bucket_name(LeaningBucket b) {
    switch (b) {
        case LeaningBucket::left: return "left";
        case LeaningBucket::center: return "center";
        case LeaningBucket::right: return "right";
    }
    return "center";
}

std::string join(const std::set<std::string>& items) {
    std::string out;
    for (const auto& s : items) out += (out.empty() ? "" : ", ") + s;
    return out;
}

bool disjoint(const std::set<std::string>& a, const std::set<std::string>& b) {
    return std::none_of(a.begin(), a.end(), [&](const auto& x) { return b.contains(x); });
}

BiasFlag make_flag(BiasKind kind, double severity, std::string explanation, std::string subject = {}) {
    return {kind, severity, std::move(explanation), std::string(diagnosis_label(kind)), std::move(subject)};
}

}  // namespace

void SessionLog::check_steps() const {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].step <= events[i - 1].step) {
            throw DataError("/sessions/" + id + "/events/" + std::to_string(i) + "/step",
                            "steps must strictly increase");
        }
    }
}

std::string_view to_string(BiasKind k) {
    switch (k) {
        case BiasKind::availability: return "availability";
        case BiasKind::bandwagon: return "bandwagon";
        case BiasKind::confirmation: return "confirmation";
        case BiasKind::halo: return "halo";
        case BiasKind::overconfidence: return "overconfidence";
    }
    return "unknown";
}

std::optional<BiasKind> parse_bias_kind(std::string_view s) {
    for (auto k : {BiasKind::availability, BiasKind::bandwagon, BiasKind::confirmation, BiasKind::halo,
                   BiasKind::overconfidence}) {
        if (to_string(k) == s) return k;
    }
    return std::nullopt;
}

std::string_view diagnosis_label(BiasKind k) {
    switch (k) {
        case BiasKind::confirmation:
        case BiasKind::bandwagon:
        case BiasKind::halo: return kPath2;
        case BiasKind::overconfidence: return kPath1;
        case BiasKind::availability: return kPath1Evidence;
    }
    return kPath2;
}

LeaningBucket leaning_bucket(double leaning) {
    constexpr double third = 1.0 / 3.0;
    if (leaning < -third) return LeaningBucket::left;
    if (leaning > third) return LeaningBucket::right;
    return LeaningBucket::center;
}

HeuristicThresholds HeuristicThresholds::from_policy(const TrustPolicy& policy) {
    HeuristicThresholds t;
    t.confirmation_min_sources = policy.threshold("confirmation_min_sources", t.confirmation_min_sources);
    t.confirmation_share = policy.threshold("confirmation_share", t.confirmation_share);
    t.availability_max_sources = policy.threshold("availability_max_sources", t.availability_max_sources);
    return t;
}

std::optional<BiasFlag> detect_confirmation(const SessionLog& session, const SourceTable& sources,
                                            const HeuristicThresholds& thresholds) {
    std::set<std::string> consulted;
    for (const auto& e : session.events) {
        if (e.kind != SessionEvent::Kind::consulted) continue;
        if (!e.supports_current_stance) return std::nullopt;
        consulted.insert(e.source_id);
    }
    if (consulted.empty() || static_cast<double>(consulted.size()) < thresholds.confirmation_min_sources) {
        return std::nullopt;
    }
    std::array<std::size_t, 3> buckets{};
    for (const auto& id : consulted) {
        auto it = sources.find(id);
        if (it == sources.end()) throw NotFound("session '" + session.id + "' consults unknown source '" + id + "'");
        ++buckets[static_cast<std::size_t>(leaning_bucket(it->second.leaning))];
    }
    const auto top = std::max_element(buckets.begin(), buckets.end());
    const double share = static_cast<double>(*top) / static_cast<double>(consulted.size());
    if (share < thresholds.confirmation_share) return std::nullopt;
    const auto bucket = static_cast<LeaningBucket>(top - buckets.begin());
    return make_flag(BiasKind::confirmation, share,
                     "Warning: all " + std::to_string(consulted.size()) +
                         " sources you consulted support your current position, and " +
                         std::to_string(*top) + " of them lean " + std::string(bucket_name(bucket)) +
                         ". Consider reading a well-argued view from outside this group.");
}

std::optional<BiasFlag> detect_availability(const SessionLog& session, const TrustLattice& lattice,
                                            const HeuristicThresholds& thresholds) {
    std::vector<const SessionEvent*> window;
    for (const auto& e : session.events) {
        if (e.kind == SessionEvent::Kind::consulted) {
            window.push_back(&e);
            continue;
        }
        const bool few = !window.empty() && static_cast<double>(window.size()) <= thresholds.availability_max_sources;
        const bool vivid = std::all_of(window.begin(), window.end(), [&](const SessionEvent* c) {
            auto it = lattice.nodes.find(c->claim_id);
            return it != lattice.nodes.end() && (it->second.evidence_kind == EvidenceKind::anecdotal ||
                                                 it->second.evidence_kind == EvidenceKind::testimonial);
        });
        if (few && vivid) {
            return make_flag(BiasKind::availability, 1.0,
                             "Warning: you committed to '" + e.claim_id + "' after consulting only " +
                                 std::to_string(window.size()) +
                                 " anecdotal or testimonial item(s). A single vivid story is a thin basis; "
                                 "look for statistical evidence.",
                             e.claim_id);
        }
        window.clear();
    }
    return std::nullopt;
}

std::vector<BiasFlag> detect_halo(const TrustLattice& lattice, const SourceTable& sources) {
    std::vector<BiasFlag> out;
    for (const auto& [node_id, anchor] : lattice.anchors) {
        if (anchor.kind != AnchorKind::authority || !lattice.active_anchor(node_id) || !anchor.source_id) continue;
        auto src = sources.find(*anchor.source_id);
        if (src == sources.end()) continue;
        const auto& topics = lattice.node(node_id).topics;
        if (topics.empty() || !disjoint(src->second.expertise_domains, topics)) continue;
        out.push_back(make_flag(BiasKind::halo, 1.0,
                                "Warning: '" + src->second.name + "' is trusted on '" + node_id + "' (topics: " +
                                    join(topics) + ") but their expertise lies in " +
                                    (src->second.expertise_domains.empty() ? std::string("no declared domain")
                                                                           : join(src->second.expertise_domains)) +
                                    ".",
                                node_id));
    }
    return out;
}

std::vector<BiasFlag> detect_bandwagon(const TrustLattice& lattice, const SourceTable& sources) {
    std::vector<BiasFlag> out;
    for (const auto& [node_id, anchor] : lattice.anchors) {
        if (anchor.kind != AnchorKind::authority || !lattice.active_anchor(node_id) || !anchor.source_id) continue;
        auto src = sources.find(*anchor.source_id);
        if (src == sources.end() || src->second.kind != SourceKind::crowd) continue;
        out.push_back(make_flag(BiasKind::bandwagon, 1.0,
                                "Warning: '" + node_id + "' is accepted on the authority of '" + src->second.name +
                                    "', a crowd rather than a competent source. Popularity is not reliability.",
                                node_id));
    }
    return out;
}

std::optional<BiasFlag> detect_overconfidence(const TrustLattice& lattice, const AgentProfile& profile) {
    auto target = lattice.nodes.find(lattice.target_claim_id);
    if (target == lattice.nodes.end()) return std::nullopt;
    const auto& topics = target->second.topics;
    if (topics.empty() || !disjoint(topics, profile.competence_domains)) return std::nullopt;
    for (const auto& [node_id, anchor] : lattice.anchors) {
        if (anchor.kind == AnchorKind::authority && lattice.active_anchor(node_id)) return std::nullopt;
    }
    return make_flag(BiasKind::overconfidence, 1.0,
                     "Warning: '" + target->first + "' concerns " + join(target->second.topics) +
                         ", outside your declared competence, yet no expert or institution was consulted. "
                         "Consider deferring to a recognised authority.",
                     target->first);
}

double insularity(const TrustLattice& lattice, const SourceTable& sources) {
    std::set<std::string> referenced;
    for (const auto& [id, e] : lattice.edges) {
        if (e.kind == EdgeKind::sourced_from) referenced.insert(e.from);
    }
    for (const auto& [node_id, a] : lattice.anchors) {
        if (a.kind == AnchorKind::authority && a.source_id) referenced.insert(*a.source_id);
    }
    std::array<std::size_t, 3> buckets{};
    std::size_t total = 0;
    for (const auto& id : referenced) {
        auto it = sources.find(id);
        if (it == sources.end()) continue;
        ++buckets[static_cast<std::size_t>(leaning_bucket(it->second.leaning))];
        ++total;
    }
    if (total == 0) return 0.0;
    return static_cast<double>(*std::max_element(buckets.begin(), buckets.end())) / static_cast<double>(total);
}

std::vector<BiasFlag> diagnose(const SessionLog& session, const TrustLattice& lattice, const SourceTable& sources,
                               const AgentProfile& profile, const TrustPolicy& policy) {
    const auto thresholds = HeuristicThresholds::from_policy(policy);
    std::vector<BiasFlag> flags;
    if (auto f = detect_confirmation(session, sources, thresholds)) flags.push_back(std::move(*f));
    if (auto f = detect_availability(session, lattice, thresholds)) flags.push_back(std::move(*f));
    for (auto& f : detect_halo(lattice, sources)) flags.push_back(std::move(f));
    for (auto& f : detect_bandwagon(lattice, sources)) flags.push_back(std::move(f));
    if (auto f = detect_overconfidence(lattice, profile)) flags.push_back(std::move(*f));
    std::sort(flags.begin(), flags.end(), [](const BiasFlag& a, const BiasFlag& b) {
        if (a.severity != b.severity) return a.severity > b.severity;
        if (a.kind != b.kind) return to_string(a.kind) < to_string(b.kind);
        return a.subject < b.subject;
    });
    return flags;
}

}  // namespace mevir
