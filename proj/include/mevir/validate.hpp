#pragma once

#include <string>
#include <vector>

#include "mevir/types.hpp"

namespace mevir {

enum class ViolationKind {
    missing_target,
    dangling_edge,
    self_loop,
    cycle,
    missing_anchor,
    anchored_with_incoming,
    anchor_node_missing,
    anchor_fields,
    out_of_range,
    unknown_disabled,
};

std::string_view to_string(ViolationKind k);

struct Violation {
    ViolationKind kind;
    std::vector<std::string> ids;  // nodes/edges involved, sorted
    std::string message;
};

/// Checks every TrustLattice invariant. Violations are data; an empty report
/// means the lattice is valid.
std::vector<Violation> validate_lattice(const TrustLattice& lattice);

/// Nodes grouped by height over the evaluative subgraph: level 0 holds nodes
/// without incoming evaluative edges, level k nodes whose deepest child sits in
/// level k-1. Ids within a level are sorted. Disabled edges are included, so the
/// grouping is stable under retraction. Requires an acyclic lattice.
std::vector<std::vector<std::string>> height_levels(const TrustLattice& lattice);

/// Incoming evaluative edges (including disabled ones) per node, ordered by edge id.
std::map<std::string, std::vector<const EvidenceEdge*>> incoming_edges(const TrustLattice& lattice);

/// Strongly connected components of size > 1 in the evaluative subgraph.
std::vector<std::vector<std::string>> find_cycles(const TrustLattice& lattice);

}  // namespace mevir
