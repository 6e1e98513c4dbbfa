#include "mevir/evaluation.hpp"

#include "mevir/error.hpp"
#include "mevir/validate.hpp"

namespace mevir {

namespace {

// Level width below which the OpenMP region costs more than it saves.
constexpr std::size_t kParallelLevelWidth = 64;

double blend_weight(double declared, double multiplier, double lambda, double congruence) {
    const double blend = (1.0 - lambda) + lambda * congruence;
    return clamp01(declared * multiplier * blend);
}

}  // namespace

std::string_view to_string(Verdict v) { return v == Verdict::accepted ? "accepted" : "rejected"; }

std::optional<Verdict> parse_verdict(std::string_view s) {
    if (s == "accepted") return Verdict::accepted;
    if (s == "rejected") return Verdict::rejected;
    return std::nullopt;
}

bool EvaluationResult::accepted(const std::string& node_id) const {
    auto it = verdicts.find(node_id);
    return it != verdicts.end() && it->second == Verdict::accepted;
}

double anchor_score(const TrustAnchor& anchor, const Claim& claim, const AgentProfile& profile,
                    const SourceTable& sources, const TrustPolicy& policy) {
    switch (anchor.kind) {
        case AnchorKind::belief:
        case AnchorKind::pre_trusted:
            return clamp01(anchor.base_strength.value_or(0.0));
        case AnchorKind::authority: {
            const std::string source_id = anchor.source_id.value_or("");
            auto it = sources.find(source_id);
            if (it == sources.end()) {
                throw NotFound("authority anchor on '" + anchor.node_id + "' names unknown source '" + source_id + "'");
            }
            return clamp01(profile.trust(source_id, claim.primary_topic()) * it->second.reputation);
        }
        case AnchorKind::evidence_exhausted:
        case AnchorKind::resource_exhausted:
            return policy.uncommitted;
    }
    return policy.uncommitted;
}

bool admissible(const TrustPolicy& policy, const std::optional<std::string>& truth_maker_kind,
                const std::optional<std::string>& proxy_kind) {
    if (!truth_maker_kind || !proxy_kind) return true;
    auto it = policy.admissible_proxies.find(*truth_maker_kind);
    return it == policy.admissible_proxies.end() || it->second.contains(*proxy_kind);
}

const SourceRecord* attached_source(const TrustLattice& lattice, const std::string& child,
                                    const SourceTable& sources) {
    if (auto a = lattice.anchors.find(child); a != lattice.anchors.end() && a->second.source_id) {
        if (auto s = sources.find(*a->second.source_id); s != sources.end()) return &s->second;
    }
    // Edges are id-ordered; pick the smallest source id among provenance edges.
    const SourceRecord* best = nullptr;
    for (const auto& [id, e] : lattice.edges) {
        if (e.kind != EdgeKind::sourced_from || e.to != child) continue;
        auto s = sources.find(e.from);
        if (s != sources.end() && (!best || s->second.id < best->id)) best = &s->second;
    }
    return best;
}

double effective_edge_weight(const EvidenceEdge& edge, const Claim& child, const Claim& target,
                             const AgentProfile& profile, const TrustPolicy& policy,
                             const SourceRecord* child_source, const MoralLexicon& lexicon) {
    if (!admissible(policy, target.truth_maker_kind, child.proxy_kind)) return 0.0;
    const FoundationVector footprint =
        child.footprint ? *child.footprint : compute_footprint(child.text, lexicon).vector;
    return blend_weight(edge.declared_weight, policy.rule_multiplier(child, child_source), policy.lambda,
                        moral_congruence(footprint, profile.foundation_weights));
}

double combine(double prior, double support, double attack) {
    if (support >= attack) return prior + (1.0 - prior) * (support - attack);
    return prior - prior * (attack - support);
}

LatticeEvaluator::LatticeEvaluator(const TrustLattice& lattice, const AgentProfile& profile,
                                   const SourceTable& sources, const TrustPolicy& policy,
                                   const MoralLexicon& lexicon, Execution exec)
    : lattice_(lattice), policy_(policy), exec_(exec) {
    if (auto violations = validate_lattice(lattice); !violations.empty()) {
        std::string msg = "invalid lattice:";
        for (const auto& v : violations) msg += " [" + std::string(to_string(v.kind)) + "] " + v.message + ";";
        throw DataError("/lattices/" + lattice.id, msg);
    }

    for (const auto& [id, _] : lattice.nodes) {
        node_index_[id] = node_ids_.size();
        node_ids_.push_back(id);
    }
    for (const auto& [id, e] : lattice.edges) {
        if (!e.evaluative()) continue;
        edge_index_[id] = edge_ids_.size();
        edge_ids_.push_back(id);
    }

    const std::size_t n_nodes = node_ids_.size();
    anchor_score_.resize(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        if (auto a = lattice.anchors.find(node_ids_[i]); a != lattice.anchors.end()) {
            anchor_score_[i] = anchor_score(a->second, lattice.nodes.at(node_ids_[i]), profile, sources, policy);
        }
    }

    // Footprints are the expensive part of edge weighting; compute each child once.
    std::vector<std::string> texts;
    std::vector<std::size_t> text_owner;
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const Claim& c = lattice.nodes.at(node_ids_[i]);
        if (!c.footprint) {
            texts.push_back(c.text);
            text_owner.push_back(i);
        }
    }
    const auto computed = exec == Execution::parallel ? compute_footprints(texts, lexicon)
                                                      : compute_footprints_serial(texts, lexicon);
    std::vector<FoundationVector> footprint(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        const Claim& c = lattice.nodes.at(node_ids_[i]);
        if (c.footprint) footprint[i] = *c.footprint;
    }
    for (std::size_t k = 0; k < computed.size(); ++k) footprint[text_owner[k]] = computed[k].vector;

    std::vector<double> congruence(n_nodes);
    std::vector<const SourceRecord*> child_source(n_nodes);
    for (std::size_t i = 0; i < n_nodes; ++i) {
        congruence[i] = moral_congruence(footprint[i], profile.foundation_weights);
        child_source[i] = attached_source(lattice, node_ids_[i], sources);
    }

    edge_weight_.resize(edge_ids_.size());
    incoming_.resize(n_nodes);
    for (std::size_t k = 0; k < edge_ids_.size(); ++k) {
        const EvidenceEdge& e = lattice.edges.at(edge_ids_[k]);
        const std::size_t child = node_index_.at(e.from);
        const std::size_t parent = node_index_.at(e.to);
        const Claim& child_claim = lattice.nodes.at(e.from);
        const Claim& target_claim = lattice.nodes.at(e.to);
        double w = 0.0;
        if (admissible(policy, target_claim.truth_maker_kind, child_claim.proxy_kind)) {
            w = blend_weight(e.declared_weight, policy.rule_multiplier(child_claim, child_source[child]),
                             policy.lambda, congruence[child]);
        }
        edge_weight_[k] = w;
        incoming_[parent].push_back({k, child, e.is_attack(), w});
    }

    for (const auto& level : height_levels(lattice)) {
        std::vector<std::size_t> idx;
        idx.reserve(level.size());
        for (const auto& id : level) idx.push_back(node_index_.at(id));
        levels_.push_back(std::move(idx));
    }
}

std::size_t LatticeEvaluator::node_index(const std::string& id) const {
    auto it = node_index_.find(id);
    if (it == node_index_.end()) throw NotFound("no node '" + id + "'");
    return it->second;
}

std::size_t LatticeEvaluator::edge_index(const std::string& id) const {
    auto it = edge_index_.find(id);
    if (it == edge_index_.end()) throw NotFound("no evidence edge '" + id + "'");
    return it->second;
}

double LatticeEvaluator::edge_weight(const std::string& edge_id) const { return edge_weight_[edge_index(edge_id)]; }

double LatticeEvaluator::score_node(std::size_t n, const std::vector<double>& sigma,
                                    const std::vector<char>& anchor_off, const std::vector<char>& edge_off) const {
    if (anchor_score_[n] && !anchor_off[n]) return *anchor_score_[n];
    double keep_s = 1.0;
    double keep_a = 1.0;
    for (const auto& in : incoming_[n]) {
        if (edge_off[in.edge]) continue;
        const double c = sigma[in.child] * in.weight;
        (in.attack ? keep_a : keep_s) *= (1.0 - c);
    }
    return clamp01(combine(policy_.prior, 1.0 - keep_s, 1.0 - keep_a));
}

std::vector<double> LatticeEvaluator::scores(const std::vector<char>& anchor_off,
                                             const std::vector<char>& edge_off) const {
    std::vector<double> sigma(node_ids_.size(), 0.0);
    for (const auto& level : levels_) {
        const auto width = static_cast<std::ptrdiff_t>(level.size());
        if (exec_ == Execution::parallel && level.size() >= kParallelLevelWidth) {
#pragma omp parallel for schedule(static)
            for (std::ptrdiff_t i = 0; i < width; ++i) {
                const std::size_t n = level[static_cast<std::size_t>(i)];
                sigma[n] = score_node(n, sigma, anchor_off, edge_off);
            }
        } else {
            for (std::size_t n : level) sigma[n] = score_node(n, sigma, anchor_off, edge_off);
        }
    }
    return sigma;
}

EvaluationResult LatticeEvaluator::evaluate() const {
    return evaluate(lattice_.disabled_anchors, lattice_.disabled_edges);
}

EvaluationResult LatticeEvaluator::evaluate(const std::set<std::string>& disabled_anchors,
                                            const std::set<std::string>& disabled_edges) const {
    std::vector<char> anchor_off(node_ids_.size(), 0);
    std::vector<char> edge_off(edge_ids_.size(), 0);
    for (const auto& id : disabled_anchors) {
        if (auto it = node_index_.find(id); it != node_index_.end()) anchor_off[it->second] = 1;
    }
    for (const auto& id : disabled_edges) {
        if (auto it = edge_index_.find(id); it != edge_index_.end()) edge_off[it->second] = 1;
    }
    const auto sigma = scores(anchor_off, edge_off);

    EvaluationResult result;
    result.lattice_id = lattice_.id;
    for (std::size_t n = 0; n < node_ids_.size(); ++n) {
        const auto& id = node_ids_[n];
        result.scores.emplace(id, sigma[n]);
        result.verdicts.emplace(id, sigma[n] > policy_.tau ? Verdict::accepted : Verdict::rejected);

        NodeTrace t;
        double keep_s = 1.0, keep_a = 1.0;
        for (const auto& in : incoming_[n]) {
            EdgeTrace et{edge_ids_[in.edge], node_ids_[in.child], in.attack, in.weight, 0.0, edge_off[in.edge] != 0};
            if (!et.disabled) {
                et.contribution = sigma[in.child] * in.weight;
                (in.attack ? keep_a : keep_s) *= (1.0 - et.contribution);
            }
            t.edges.push_back(std::move(et));
        }
        if (!(anchor_score_[n] && !anchor_off[n])) {
            t.support = 1.0 - keep_s;
            t.attack = 1.0 - keep_a;
        }
        result.trace.emplace(id, std::move(t));
    }
    return result;
}

EvaluationResult evaluate(const TrustLattice& lattice, const AgentProfile& profile, const SourceTable& sources,
                          const TrustPolicy& policy, const MoralLexicon& lexicon, Execution exec) {
    return LatticeEvaluator(lattice, profile, sources, policy, lexicon, exec).evaluate();
}

}  // namespace mevir
