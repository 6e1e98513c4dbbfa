#include "mevir/revision.hpp"

#include <algorithm>
#include <bit>
#include <cstdio>
#include <numeric>

#include "mevir/elaboration.hpp"
#include "mevir/error.hpp"
#include "mevir/validate.hpp"

namespace mevir {

namespace {

std::string fmt_score(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", x);
    return buf;
}

bool candidate_less(const RetractionElement& a, const RetractionElement& b) {
    if (a.id != b.id) return a.id < b.id;
    return a.kind < b.kind;
}

/// Exclusive node pairs as evaluator indices.
std::vector<std::pair<std::size_t, std::size_t>> exclusive_pairs(const TrustLattice& lattice,
                                                                 const LatticeEvaluator& ev) {
    std::set<ClaimPair> pairs;
    for (const auto& [id, claim] : lattice.nodes) {
        for (const auto& other : claim.mutually_exclusive_with) {
            if (other == id || !lattice.nodes.contains(other)) continue;
            pairs.insert(id < other ? ClaimPair{id, other} : ClaimPair{other, id});
        }
    }
    std::vector<std::pair<std::size_t, std::size_t>> out;
    for (const auto& [a, b] : pairs) out.emplace_back(ev.node_index(a), ev.node_index(b));
    return out;
}

struct Masks {
    std::vector<char> anchor_off;
    std::vector<char> edge_off;
};

Masks base_masks(const TrustLattice& lattice, const LatticeEvaluator& ev) {
    Masks m{std::vector<char>(ev.node_ids().size(), 0), std::vector<char>(ev.edge_ids().size(), 0)};
    for (const auto& id : lattice.disabled_anchors) m.anchor_off[ev.node_index(id)] = 1;
    for (const auto& id : lattice.disabled_edges) m.edge_off[ev.edge_index(id)] = 1;
    return m;
}

class SubsetProbe {
public:
    SubsetProbe(const TrustLattice& lattice, const LatticeEvaluator& ev, const std::vector<RetractionElement>& cands)
        : ev_(ev), base_(base_masks(lattice, ev)), pairs_(exclusive_pairs(lattice, ev)) {
        for (const auto& c : cands) {
            slots_.push_back(c.kind == RetractionElement::Kind::anchor ? ev.node_index(c.id) : ev.edge_index(c.id));
        }
        kinds_.reserve(cands.size());
        for (const auto& c : cands) kinds_.push_back(c.kind);
    }

    /// True when disabling the candidates in `mask` leaves no accepted exclusive pair.
    bool clears(std::uint32_t mask) const {
        Masks m = base_;
        for (std::size_t i = 0; i < slots_.size(); ++i) {
            if (!(mask >> i & 1u)) continue;
            (kinds_[i] == RetractionElement::Kind::anchor ? m.anchor_off : m.edge_off)[slots_[i]] = 1;
        }
        const auto sigma = ev_.scores(m.anchor_off, m.edge_off);
        const double tau = ev_.policy().tau;
        return std::none_of(pairs_.begin(), pairs_.end(),
                            [&](const auto& p) { return sigma[p.first] > tau && sigma[p.second] > tau; });
    }

private:
    const LatticeEvaluator& ev_;
    Masks base_;
    std::vector<std::pair<std::size_t, std::size_t>> pairs_;
    std::vector<std::size_t> slots_;
    std::vector<RetractionElement::Kind> kinds_;
};

double mask_total(std::uint32_t mask, const std::vector<RetractionElement>& cands) {
    double total = 0.0;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (mask >> i & 1u) total += cands[i].entrenchment;
    }
    return total;
}

RetractionSet exhaustive_search(const SubsetProbe& probe, const std::vector<RetractionElement>& cands, Execution exec) {
    const std::uint32_t n_masks = 1u << cands.size();
    std::vector<std::uint32_t> masks(n_masks - 1);
    std::iota(masks.begin(), masks.end(), 1u);
    std::vector<double> totals(n_masks, 0.0);
    for (std::uint32_t m = 1; m < n_masks; ++m) totals[m] = mask_total(m, cands);

    // Order: total entrenchment, then size, then id sequence. Candidates are
    // id-sorted, so among equal-size sets the one owning the lowest differing
    // index has the smaller id sequence.
    std::sort(masks.begin(), masks.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (totals[a] != totals[b]) return totals[a] < totals[b];
        const int pa = std::popcount(a), pb = std::popcount(b);
        if (pa != pb) return pa < pb;
        if (a == b) return false;
        const std::uint32_t low = (a ^ b) & (~(a ^ b) + 1u);
        return (a & low) != 0;
    });

    const auto count = static_cast<std::ptrdiff_t>(masks.size());
    std::ptrdiff_t found = count;
    if (exec == Execution::parallel) {
        // Scan in blocks so cheap sets found early stop the search.
        constexpr std::ptrdiff_t kBlock = 256;
        for (std::ptrdiff_t start = 0; start < count && found == count; start += kBlock) {
            const std::ptrdiff_t end = std::min(count, start + kBlock);
            std::ptrdiff_t best = count;
#pragma omp parallel for reduction(min : best) schedule(dynamic, 8)
            for (std::ptrdiff_t i = start; i < end; ++i) {
                if (i < best && probe.clears(masks[static_cast<std::size_t>(i)])) best = std::min(best, i);
            }
            found = best;
        }
    } else {
        for (std::ptrdiff_t i = 0; i < count; ++i) {
            if (probe.clears(masks[static_cast<std::size_t>(i)])) {
                found = i;
                break;
            }
        }
    }
    if (found == count) throw StateError("no retraction set clears the contradiction");

    const std::uint32_t mask = masks[static_cast<std::size_t>(found)];
    RetractionSet out;
    out.exhaustive = true;
    for (std::size_t i = 0; i < cands.size(); ++i) {
        if (mask >> i & 1u) out.elements.push_back(cands[i]);
    }
    out.total_entrenchment = totals[mask];
    return out;
}

RetractionSet greedy_search(const TrustLattice& lattice, const LatticeEvaluator& ev,
                            const std::vector<RetractionElement>& cands) {
    std::vector<RetractionElement> order = cands;
    std::stable_sort(order.begin(), order.end(), [](const auto& a, const auto& b) {
        if (a.entrenchment != b.entrenchment) return a.entrenchment < b.entrenchment;
        return candidate_less(a, b);
    });
    Masks m = base_masks(lattice, ev);
    const auto pairs = exclusive_pairs(lattice, ev);
    const double tau = ev.policy().tau;
    auto clear = [&] {
        const auto sigma = ev.scores(m.anchor_off, m.edge_off);
        return std::none_of(pairs.begin(), pairs.end(),
                            [&](const auto& p) { return sigma[p.first] > tau && sigma[p.second] > tau; });
    };
    RetractionSet out;
    out.exhaustive = false;
    for (const auto& c : order) {
        if (c.kind == RetractionElement::Kind::anchor) m.anchor_off[ev.node_index(c.id)] = 1;
        else m.edge_off[ev.edge_index(c.id)] = 1;
        out.elements.push_back(c);
        if (clear()) {
            std::sort(out.elements.begin(), out.elements.end(), candidate_less);
            for (const auto& e : out.elements) out.total_entrenchment += e.entrenchment;
            return out;
        }
    }
    throw StateError("no retraction set clears the contradiction");
}

void apply_retraction(TrustLattice& lattice, const RetractionSet& set, RevisionEntry& entry) {
    for (const auto& e : set.elements) {
        if (e.kind == RetractionElement::Kind::anchor) {
            entry.retracted_anchors.push_back(lattice.anchors.at(e.id));
            lattice.disabled_anchors.insert(e.id);
        } else {
            entry.retracted_edges.push_back(lattice.edges.at(e.id));
            lattice.disabled_edges.insert(e.id);
        }
    }
}

}  // namespace

std::string_view to_string(Disposition d) {
    switch (d) {
        case Disposition::applied: return "applied";
        case Disposition::gated_out: return "gated_out";
        case Disposition::no_conflict: return "no_conflict";
        case Disposition::failed: return "failed";
        case Disposition::reinstated: return "reinstated";
    }
    return "unknown";
}

std::optional<Disposition> parse_disposition(std::string_view s) {
    for (auto d : {Disposition::applied, Disposition::gated_out, Disposition::no_conflict, Disposition::failed,
                   Disposition::reinstated}) {
        if (to_string(d) == s) return d;
    }
    return std::nullopt;
}

std::uint64_t EpistemicState::next_revision_id() const {
    return revision_log.empty() ? 1 : revision_log.back().id + 1;
}

std::set<ClaimPair> find_contradictions(const EvaluationResult& evaluation, const TrustLattice& lattice) {
    std::set<ClaimPair> out;
    for (const auto& [id, claim] : lattice.nodes) {
        if (!evaluation.accepted(id)) continue;
        for (const auto& other : claim.mutually_exclusive_with) {
            if (other == id || !lattice.nodes.contains(other) || !evaluation.accepted(other)) continue;
            out.insert(id < other ? ClaimPair{id, other} : ClaimPair{other, id});
        }
    }
    return out;
}

std::vector<RetractionElement> retraction_candidates(const TrustLattice& lattice,
                                                     const std::set<ClaimPair>& contradictions,
                                                     const LatticeEvaluator& evaluator) {
    const auto in = incoming_edges(lattice);
    std::set<std::string> reach;
    std::vector<std::string> stack;
    for (const auto& [a, b] : contradictions) {
        for (const auto* id : {&a, &b}) {
            if (reach.insert(*id).second) stack.push_back(*id);
        }
    }
    while (!stack.empty()) {
        const std::string node = stack.back();
        stack.pop_back();
        auto it = in.find(node);
        if (it == in.end()) continue;
        for (const auto* e : it->second) {
            if (!lattice.edge_active(e->id)) continue;
            if (reach.insert(e->from).second) stack.push_back(e->from);
        }
    }

    std::vector<RetractionElement> out;
    for (const auto& node : reach) {
        if (const auto* a = lattice.active_anchor(node)) {
            if (a->kind == AnchorKind::belief || a->kind == AnchorKind::pre_trusted) {
                out.push_back({RetractionElement::Kind::anchor, node, a->base_strength.value_or(0.0)});
            }
        }
        auto it = in.find(node);
        if (it == in.end()) continue;
        for (const auto* e : it->second) {
            if (!lattice.edge_active(e->id)) continue;
            out.push_back({RetractionElement::Kind::edge, e->id, evaluator.edge_weight(e->id)});
        }
    }
    std::sort(out.begin(), out.end(), candidate_less);
    return out;
}

RetractionSet minimal_retraction(const TrustLattice& lattice, const EvaluationResult& /*evaluation*/,
                                 const std::set<ClaimPair>& contradictions, const RevisionContext& ctx) {
    if (contradictions.empty()) throw StateError("minimal_retraction needs at least one contradiction");
    const LatticeEvaluator ev(lattice, ctx.profile, ctx.sources, ctx.policy, ctx.lexicon, ctx.exec);
    const auto cands = retraction_candidates(lattice, contradictions, ev);
    if (cands.empty()) throw StateError("no retractable element supports the contradiction");
    if (cands.size() <= kExhaustiveCandidateLimit) {
        return exhaustive_search(SubsetProbe(lattice, ev, cands), cands, ctx.exec);
    }
    return greedy_search(lattice, ev, cands);
}

EpistemicState make_state(std::string id, const AgentProfile& profile, const TrustPolicy& policy,
                          TrustLattice lattice, const SourceTable& sources, const MoralLexicon& lexicon) {
    EpistemicState s;
    s.id = std::move(id);
    s.profile_id = profile.id;
    s.policy_id = policy.id;
    s.lattice = std::move(lattice);
    s.evaluation = evaluate(s.lattice, profile, sources, policy, lexicon);
    return s;
}

TrustLattice merge_information(const TrustLattice& lattice, const NewInformation& info, RevisionEntry& entry) {
    TrustLattice merged = lattice;
    const std::string& cid = info.claim.id;
    if (cid.empty()) throw DataError("/info/claim/id", "claim id is empty");
    if (auto it = merged.nodes.find(cid); it != merged.nodes.end()) {
        if (!(it->second == info.claim)) {
            throw DataError("/info/claim", "claim '" + cid + "' already exists with different content");
        }
    } else {
        merged.nodes.emplace(cid, info.claim);
        entry.added_nodes.push_back(cid);
    }

    for (std::size_t i = 0; i < info.edges.size(); ++i) {
        const auto& e = info.edges[i];
        if (!merged.edges.emplace(e.id, e).second) {
            throw DataError("/info/edges/" + std::to_string(i) + "/id", "edge id '" + e.id + "' already exists");
        }
        entry.added_edges.push_back(e.id);
    }
    if (!info.source_id.empty()) {
        const auto prov = provenance_edge_id(cid, info.source_id);
        if (merged.edges.emplace(prov, EvidenceEdge{prov, info.source_id, cid, EdgeKind::sourced_from, 1.0}).second) {
            entry.added_edges.push_back(prov);
        }
    }
    for (std::size_t i = 0; i < info.anchors.size(); ++i) {
        const auto& a = info.anchors[i];
        if (!merged.nodes.contains(a.node_id) || lattice.nodes.contains(a.node_id)) {
            throw DataError("/info/anchors/" + std::to_string(i), "anchors may only be declared for the new claim");
        }
        if (!merged.anchors.emplace(a.node_id, a).second) {
            throw DataError("/info/anchors/" + std::to_string(i), "node '" + a.node_id + "' is anchored twice");
        }
        entry.added_anchors.push_back(a.node_id);
    }
    std::sort(entry.added_edges.begin(), entry.added_edges.end());

    if (auto violations = validate_lattice(merged); !violations.empty()) {
        std::string msg = "merging the information breaks the lattice:";
        for (const auto& v : violations) msg += " " + v.message + ";";
        throw DataError("/info", msg);
    }
    return merged;
}

EpistemicState revise(const EpistemicState& state, const NewInformation& info, const RevisionContext& ctx) {
    EpistemicState next = state;
    RevisionEntry entry;
    entry.id = state.next_revision_id();
    entry.trigger_claim = info.claim.id;
    entry.trigger_source = info.source_id;

    auto src = ctx.sources.find(info.source_id);
    if (src == ctx.sources.end()) throw NotFound("unknown source '" + info.source_id + "'");
    const double trust = clamp01(ctx.profile.trust(info.source_id, info.claim.primary_topic()) * src->second.reputation);
    if (trust < ctx.policy.ingest_threshold) {
        entry.disposition = Disposition::gated_out;
        entry.context = "source trust " + fmt_score(trust) + " is below the ingest threshold " +
                        fmt_score(ctx.policy.ingest_threshold) + "; information ignored";
        next.revision_log.push_back(std::move(entry));
        return next;
    }

    TrustLattice merged = merge_information(state.lattice, info, entry);
    const LatticeEvaluator ev(merged, ctx.profile, ctx.sources, ctx.policy, ctx.lexicon, ctx.exec);
    EvaluationResult evaluation = ev.evaluate();
    const auto conflicts = find_contradictions(evaluation, merged);
    if (conflicts.empty()) {
        entry.disposition = Disposition::no_conflict;
        entry.context = "merged without contradiction";
        next.lattice = std::move(merged);
        next.evaluation = std::move(evaluation);
        next.revision_log.push_back(std::move(entry));
        return next;
    }

    RetractionSet retraction;
    try {
        retraction = minimal_retraction(merged, evaluation, conflicts, ctx);
    } catch (const StateError& e) {
        RevisionEntry failed;
        failed.id = entry.id;
        failed.trigger_claim = entry.trigger_claim;
        failed.trigger_source = entry.trigger_source;
        failed.disposition = Disposition::failed;
        failed.context = std::string("contradiction could not be resolved: ") + e.what() + "; prior state kept";
        next.revision_log.push_back(std::move(failed));
        return next;
    }

    apply_retraction(merged, retraction, entry);
    entry.disposition = Disposition::applied;
    std::string what;
    for (const auto& e : retraction.elements) what += (what.empty() ? "" : ", ") + e.id;
    entry.context = "retracted {" + what + "} (total entrenchment " + fmt_score(retraction.total_entrenchment) +
                    (retraction.exhaustive ? ", exhaustive search)" : ", greedy search)");
    next.lattice = std::move(merged);
    next.evaluation = LatticeEvaluator(next.lattice, ctx.profile, ctx.sources, ctx.policy, ctx.lexicon, ctx.exec)
                          .evaluate();
    next.revision_log.push_back(std::move(entry));
    return next;
}

EpistemicState reinstate(const EpistemicState& state, std::uint64_t revision_id, const RevisionContext& ctx) {
    auto it = std::find_if(state.revision_log.begin(), state.revision_log.end(),
                           [&](const RevisionEntry& e) { return e.id == revision_id; });
    if (it == state.revision_log.end()) throw NotFound("no revision " + std::to_string(revision_id));
    if (it->disposition != Disposition::applied) {
        throw StateError("revision " + std::to_string(revision_id) + " has disposition " +
                         std::string(to_string(it->disposition)) + "; only applied revisions can be reinstated");
    }
    for (const auto& e : state.revision_log) {
        if (e.reverses == revision_id) {
            throw StateError("revision " + std::to_string(revision_id) + " was already reinstated");
        }
    }

    const RevisionEntry& target = *it;
    const std::set<std::string> added_nodes(target.added_nodes.begin(), target.added_nodes.end());
    const std::set<std::string> added_edges(target.added_edges.begin(), target.added_edges.end());
    const std::set<std::string> added_anchors(target.added_anchors.begin(), target.added_anchors.end());

    // Later live revisions must not depend on what this one merged.
    for (auto later = std::next(it); later != state.revision_log.end(); ++later) {
        if (later->disposition != Disposition::applied && later->disposition != Disposition::no_conflict) continue;
        bool reversed = false;
        for (const auto& e : state.revision_log) reversed = reversed || e.reverses == later->id;
        if (reversed) continue;
        for (const auto& a : later->retracted_anchors) {
            if (added_anchors.contains(a.node_id)) {
                throw StateError("revision " + std::to_string(later->id) + " depends on revision " +
                                 std::to_string(revision_id));
            }
        }
        for (const auto& e : later->retracted_edges) {
            if (added_edges.contains(e.id)) {
                throw StateError("revision " + std::to_string(later->id) + " depends on revision " +
                                 std::to_string(revision_id));
            }
        }
    }

    TrustLattice lattice = state.lattice;
    for (const auto& a : target.retracted_anchors) lattice.disabled_anchors.erase(a.node_id);
    for (const auto& e : target.retracted_edges) lattice.disabled_edges.erase(e.id);
    for (const auto& id : added_anchors) {
        lattice.anchors.erase(id);
        lattice.disabled_anchors.erase(id);
    }
    for (const auto& id : added_edges) {
        lattice.edges.erase(id);
        lattice.disabled_edges.erase(id);
    }
    for (const auto& id : added_nodes) lattice.nodes.erase(id);
    for (const auto& [eid, e] : lattice.edges) {
        if (added_nodes.contains(e.from) || added_nodes.contains(e.to)) {
            throw StateError("edge '" + eid + "' from a later revision still uses a node merged by revision " +
                             std::to_string(revision_id));
        }
    }

    EpistemicState next = state;
    next.lattice = std::move(lattice);
    next.evaluation = LatticeEvaluator(next.lattice, ctx.profile, ctx.sources, ctx.policy, ctx.lexicon, ctx.exec)
                          .evaluate();
    RevisionEntry entry;
    entry.id = state.next_revision_id();
    entry.trigger_claim = target.trigger_claim;
    entry.trigger_source = target.trigger_source;
    entry.disposition = Disposition::reinstated;
    entry.reverses = revision_id;
    entry.context = "reinstated the state before revision " + std::to_string(revision_id);
    next.revision_log.push_back(std::move(entry));
    return next;
}

}  // namespace mevir
