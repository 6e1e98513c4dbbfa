#pragma once

#include <string>

#include "mevir/evaluation.hpp"
#include "mevir/types.hpp"

namespace mevir {

/// Graphviz digraph of a lattice. Nodes carry id, score and verdict; the anchor
/// kind picks the shape. Attacks are red dashed tee arrows, disabled elements dotted.
std::string export_dot(const TrustLattice& lattice, const EvaluationResult& evaluation);

}  // namespace mevir
