#include "mevir/dot.hpp"

#include <cstdio>
#include <sstream>

namespace mevir {

namespace {

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        if (c == '\n') {
            out += "\\n";
            continue;
        }
        out += c;
    }
    return out + "\"";
}

std::string_view shape_for(const TrustAnchor* anchor) {
    if (!anchor) return "ellipse";
    switch (anchor->kind) {
        case AnchorKind::belief: return "box";
        case AnchorKind::authority: return "house";
        case AnchorKind::pre_trusted: return "doublecircle";
        case AnchorKind::evidence_exhausted: return "octagon";
        case AnchorKind::resource_exhausted: return "trapezium";
    }
    return "ellipse";
}

std::string fixed3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

std::string export_dot(const TrustLattice& lattice, const EvaluationResult& evaluation) {
    std::ostringstream out;
    out << "digraph " << quote(lattice.id) << " {\n";
    out << "  rankdir=BT;\n";
    out << "  node [fontname=\"Helvetica\"];\n";
    for (const auto& [id, claim] : lattice.nodes) {
        const auto anchor_it = lattice.anchors.find(id);
        const TrustAnchor* anchor = anchor_it == lattice.anchors.end() ? nullptr : &anchor_it->second;
        std::string label = id;
        if (auto s = evaluation.scores.find(id); s != evaluation.scores.end()) {
            label += "\nσ=" + fixed3(s->second);
        }
        if (auto v = evaluation.verdicts.find(id); v != evaluation.verdicts.end()) {
            label += "\n" + std::string(to_string(v->second));
        }
        out << "  " << quote(id) << " [label=" << quote(label) << ", shape=" << shape_for(anchor);
        if (id == lattice.target_claim_id) out << ", penwidth=2";
        if (anchor && !lattice.active_anchor(id)) out << ", style=dotted";
        out << "];\n";
    }
    for (const auto& [id, edge] : lattice.edges) {
        out << "  " << quote(edge.from) << " -> " << quote(edge.to) << " [id=" << quote(id)
            << ", label=" << quote(std::string(to_string(edge.kind)));
        const bool off = !lattice.edge_active(id);
        if (edge.is_attack()) {
            out << ", color=red, arrowhead=tee, style=" << (off ? "dotted" : "dashed");
        } else if (edge.kind == EdgeKind::sourced_from) {
            out << ", color=gray, style=" << (off ? "dotted" : "solid");
        } else if (off) {
            out << ", style=dotted";
        }
        out << "];\n";
    }
    // Sources referenced by provenance edges get their own plain nodes.
    std::set<std::string> sources;
    for (const auto& [_, edge] : lattice.edges) {
        if (edge.kind == EdgeKind::sourced_from && !lattice.nodes.contains(edge.from)) sources.insert(edge.from);
    }
    for (const auto& s : sources) out << "  " << quote(s) << " [shape=note, color=gray];\n";
    out << "}\n";
    return out.str();
}

}  // namespace mevir
