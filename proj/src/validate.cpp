#include "mevir/validate.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "mevir/error.hpp"

namespace mevir {

std::string_view to_string(ViolationKind k) {
    switch (k) {
        case ViolationKind::missing_target: return "missing_target";
        case ViolationKind::dangling_edge: return "dangling_edge";
        case ViolationKind::self_loop: return "self_loop";
        case ViolationKind::cycle: return "cycle";
        case ViolationKind::missing_anchor: return "missing_anchor";
        case ViolationKind::anchored_with_incoming: return "anchored_with_incoming";
        case ViolationKind::anchor_node_missing: return "anchor_node_missing";
        case ViolationKind::anchor_fields: return "anchor_fields";
        case ViolationKind::out_of_range: return "out_of_range";
        case ViolationKind::unknown_disabled: return "unknown_disabled";
    }
    return "unknown";
}

namespace {

bool in_unit(double x) { return std::isfinite(x) && x >= 0.0 && x <= 1.0; }

}  // namespace

std::map<std::string, std::vector<const EvidenceEdge*>> incoming_edges(const TrustLattice& lattice) {
    std::map<std::string, std::vector<const EvidenceEdge*>> in;
    for (const auto& [id, e] : lattice.edges) {
        if (e.evaluative()) in[e.to].push_back(&e);  // map order = edge id order
    }
    return in;
}

std::vector<std::vector<std::string>> find_cycles(const TrustLattice& lattice) {
    // Tarjan over the evaluative subgraph restricted to known nodes.
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [id, e] : lattice.edges) {
        if (!e.evaluative()) continue;
        if (!lattice.nodes.contains(e.from) || !lattice.nodes.contains(e.to)) continue;
        succ[e.from].push_back(e.to);
    }

    std::map<std::string, int> index, low;
    std::set<std::string> on_stack;
    std::vector<std::string> stack;
    std::vector<std::vector<std::string>> sccs;
    int counter = 0;

    std::function<void(const std::string&)> strong = [&](const std::string& v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack.insert(v);
        for (const auto& w : succ[v]) {
            if (!index.contains(w)) {
                strong(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack.contains(w)) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            std::vector<std::string> comp;
            std::string w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack.erase(w);
                comp.push_back(w);
            } while (w != v);
            if (comp.size() > 1) {
                std::sort(comp.begin(), comp.end());
                sccs.push_back(std::move(comp));
            }
        }
    };

    for (const auto& [id, _] : lattice.nodes) {
        if (!index.contains(id)) strong(id);
    }
    std::sort(sccs.begin(), sccs.end());
    return sccs;
}

std::vector<Violation> validate_lattice(const TrustLattice& lattice) {
    std::vector<Violation> out;
    auto report = [&](ViolationKind kind, std::vector<std::string> ids, std::string message) {
        std::sort(ids.begin(), ids.end());
        out.push_back({kind, std::move(ids), std::move(message)});
    };

    if (!lattice.nodes.contains(lattice.target_claim_id)) {
        report(ViolationKind::missing_target, {lattice.target_claim_id},
               "target claim '" + lattice.target_claim_id + "' is not a node");
    }

    for (const auto& [key, claim] : lattice.nodes) {
        if (claim.id != key || claim.id.empty()) {
            report(ViolationKind::anchor_fields, {key}, "node key '" + key + "' does not match claim id");
        }
    }

    std::set<std::string> has_incoming;
    for (const auto& [id, e] : lattice.edges) {
        if (e.from == e.to) {
            report(ViolationKind::self_loop, {id}, "edge '" + id + "' is a self-loop on '" + e.from + "'");
        }
        if (!lattice.nodes.contains(e.to)) {
            report(ViolationKind::dangling_edge, {id}, "edge '" + id + "' targets unknown node '" + e.to + "'");
        }
        if (e.evaluative()) {
            if (!lattice.nodes.contains(e.from)) {
                report(ViolationKind::dangling_edge, {id}, "edge '" + id + "' starts at unknown node '" + e.from + "'");
            }
            if (!in_unit(e.declared_weight)) {
                report(ViolationKind::out_of_range, {id}, "edge '" + id + "' declared_weight outside [0,1]");
            }
            if (e.from != e.to) has_incoming.insert(e.to);
        } else if (e.from.empty()) {
            report(ViolationKind::dangling_edge, {id}, "sourced_from edge '" + id + "' has no source id");
        }
    }

    for (auto& cycle : find_cycles(lattice)) {
        std::string names;
        for (const auto& n : cycle) names += (names.empty() ? "" : ", ") + n;
        report(ViolationKind::cycle, cycle, "evidence cycle through {" + names + "}");
    }

    for (const auto& [node_id, anchor] : lattice.anchors) {
        if (anchor.node_id != node_id) {
            report(ViolationKind::anchor_fields, {node_id}, "anchor keyed '" + node_id + "' names node '" + anchor.node_id + "'");
        }
        if (!lattice.nodes.contains(node_id)) {
            report(ViolationKind::anchor_node_missing, {node_id}, "anchor on unknown node '" + node_id + "'");
            continue;
        }
        const bool needs_source = anchor.kind == AnchorKind::authority;
        const bool needs_strength = anchor.kind == AnchorKind::belief || anchor.kind == AnchorKind::pre_trusted;
        if (needs_source != anchor.source_id.has_value() || (needs_source && anchor.source_id->empty())) {
            report(ViolationKind::anchor_fields, {node_id},
                   "anchor on '" + node_id + "': source_id is required iff kind is authority");
        }
        if (needs_strength != anchor.base_strength.has_value()) {
            report(ViolationKind::anchor_fields, {node_id},
                   "anchor on '" + node_id + "': base_strength is required iff kind is belief or pre_trusted");
        } else if (anchor.base_strength && !in_unit(*anchor.base_strength)) {
            report(ViolationKind::out_of_range, {node_id}, "anchor on '" + node_id + "': base_strength outside [0,1]");
        }
        if (has_incoming.contains(node_id)) {
            report(ViolationKind::anchored_with_incoming, {node_id},
                   "anchored node '" + node_id + "' has incoming evidence edges");
        }
    }

    for (const auto& [node_id, _] : lattice.nodes) {
        if (!has_incoming.contains(node_id) && !lattice.anchors.contains(node_id)) {
            report(ViolationKind::missing_anchor, {node_id}, "leaf node '" + node_id + "' has no anchor");
        }
    }

    for (const auto& id : lattice.disabled_anchors) {
        if (!lattice.anchors.contains(id)) {
            report(ViolationKind::unknown_disabled, {id}, "disabled anchor '" + id + "' does not exist");
        }
    }
    for (const auto& id : lattice.disabled_edges) {
        auto it = lattice.edges.find(id);
        if (it == lattice.edges.end() || !it->second.evaluative()) {
            report(ViolationKind::unknown_disabled, {id}, "disabled edge '" + id + "' is not an evidence edge");
        }
    }
    return out;
}

std::vector<std::vector<std::string>> height_levels(const TrustLattice& lattice) {
    const auto in = incoming_edges(lattice);
    std::map<std::string, std::size_t> height;
    std::map<std::string, std::size_t> pending;
    std::map<std::string, std::vector<std::string>> parents;
    for (const auto& [id, _] : lattice.nodes) pending[id] = 0;
    for (const auto& [to, edges] : in) {
        for (const auto* e : edges) {
            ++pending[to];
            parents[e->from].push_back(to);
        }
    }

    std::vector<std::vector<std::string>> levels;
    std::vector<std::string> current;
    for (const auto& [id, n] : pending) {
        if (n == 0) current.push_back(id);
    }
    std::size_t placed = 0;
    while (!current.empty()) {
        std::sort(current.begin(), current.end());
        placed += current.size();
        std::vector<std::string> next;
        for (const auto& id : current) {
            for (const auto& p : parents[id]) {
                if (--pending[p] == 0) next.push_back(p);
            }
        }
        levels.push_back(std::move(current));
        current = std::move(next);
    }
    if (placed != lattice.nodes.size()) {
        throw DataError("/lattices/" + lattice.id, "lattice contains an evidence cycle");
    }
    return levels;
}

}  // namespace mevir
