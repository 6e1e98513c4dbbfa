#include "mevir/elaboration.hpp"

#include <algorithm>
#include <utility>
#include <vector>

#include "mevir/error.hpp"
#include "mevir/validate.hpp"

namespace mevir {

namespace {

std::optional<TrustAnchor> classify(const Claim& claim, bool has_evidence, const ClaimCorpus& corpus,
                                    const AgentProfile& profile, const TrustPolicy& policy,
                                    const SourceTable& sources, const BudgetState& budget) {
    if (auto it = profile.pretrusted.find(claim.id); it != profile.pretrusted.end()) {
        return TrustAnchor{claim.id, AnchorKind::pre_trusted, std::nullopt, it->second};
    }
    if (auto it = profile.beliefs.find(claim.id); it != profile.beliefs.end()) {
        return TrustAnchor{claim.id, AnchorKind::belief, std::nullopt, it->second};
    }
    if (auto att = corpus.attachments.find(claim.id); att != corpus.attachments.end()) {
        const auto topic = claim.primary_topic();
        for (const auto& source_id : att->second) {
            auto src = sources.find(source_id);
            const bool public_faith = src != sources.end() && src->second.public_faith;
            const auto trust = profile.explicit_trust(source_id, topic);
            if (public_faith || (trust && *trust >= policy.tau)) {
                return TrustAnchor{claim.id, AnchorKind::authority, source_id, std::nullopt};
            }
        }
    }
    if (has_evidence && budget.exhausted()) {
        return TrustAnchor{claim.id, AnchorKind::resource_exhausted, std::nullopt, std::nullopt};
    }
    if (!has_evidence) {
        return TrustAnchor{claim.id, AnchorKind::evidence_exhausted, std::nullopt, std::nullopt};
    }
    return std::nullopt;
}

}  // namespace

void ClaimCorpus::close_exclusivity() {
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& [id, claim] : claims) {
        for (const auto& other : claim.mutually_exclusive_with) pairs.emplace_back(other, id);
    }
    for (const auto& [a, b] : pairs) {
        if (auto it = claims.find(a); it != claims.end()) it->second.mutually_exclusive_with.insert(b);
    }
}

bool ClaimCorpus::has_evidence(const std::string& claim_id) const {
    return std::any_of(links.begin(), links.end(),
                       [&](const auto& kv) { return kv.second.evaluative() && kv.second.to == claim_id; });
}

std::optional<TrustAnchor> classify_anchor(const Claim& claim, const ClaimCorpus& corpus,
                                           const AgentProfile& profile, const TrustPolicy& policy,
                                           const SourceTable& sources, const BudgetState& budget) {
    return classify(claim, corpus.has_evidence(claim.id), corpus, profile, policy, sources, budget);
}

std::string provenance_edge_id(const std::string& claim_id, const std::string& source_id) {
    return "prov:" + claim_id + ":" + source_id;
}

TrustLattice elaborate(const ClaimCorpus& corpus, const std::string& target, const AgentProfile& profile,
                       const TrustPolicy& policy, const SourceTable& sources, Budget budget,
                       std::string lattice_id) {
    if (!corpus.claims.contains(target)) throw NotFound("corpus has no claim '" + target + "'");
    if (budget.max_expansions < 1) throw DataError("/budget", "max_expansions must be at least 1");

    std::map<std::string, std::vector<const EvidenceEdge*>> incoming;
    for (const auto& [id, link] : corpus.links) {
        if (link.evaluative()) incoming[link.to].push_back(&link);
    }

    TrustLattice lattice;
    lattice.id = lattice_id.empty() ? target + "@" + profile.id : std::move(lattice_id);
    lattice.target_claim_id = target;

    BudgetState state{0, budget.max_expansions};
    std::set<std::string> discovered{target};
    std::vector<std::string> level{target};

    while (!level.empty()) {
        std::sort(level.begin(), level.end());
        std::set<std::string> next;
        for (const auto& id : level) {
            const Claim& claim = corpus.claims.at(id);
            lattice.nodes.emplace(id, claim);
            const auto in = incoming.find(id);
            const bool has_evidence = in != incoming.end();
            if (auto anchor = classify(claim, has_evidence, corpus, profile, policy, sources, state)) {
                lattice.anchors.emplace(id, *anchor);
                continue;
            }
            ++state.used;
            for (const auto* link : in->second) {
                if (!corpus.claims.contains(link->from)) {
                    throw DataError("/corpus/links/" + link->id, "link starts at unknown claim '" + link->from + "'");
                }
                lattice.edges.emplace(link->id, *link);
                if (discovered.insert(link->from).second) next.insert(link->from);
            }
        }
        level.assign(next.begin(), next.end());
    }

    for (const auto& [id, _] : lattice.nodes) {
        auto att = corpus.attachments.find(id);
        if (att == corpus.attachments.end()) continue;
        for (const auto& source_id : att->second) {
            auto edge_id = provenance_edge_id(id, source_id);
            if (lattice.edges.contains(edge_id)) {
                throw DataError("/corpus/links/" + edge_id, "link id collides with a provenance edge id");
            }
            lattice.edges.emplace(edge_id, EvidenceEdge{edge_id, source_id, id, EdgeKind::sourced_from, 1.0});
        }
    }

    if (auto cycles = find_cycles(lattice); !cycles.empty()) {
        throw CycleError("/corpus/links", cycles.front());
    }
    return lattice;
}

}  // namespace mevir
