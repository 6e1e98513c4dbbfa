#pragma once

#include <optional>
#include <string>

#include "mevir/bundle.hpp"

namespace mevir {

/// A lattice together with the profile and policy it is evaluated under.
struct LatticeBinding {
    const TrustLattice* lattice = nullptr;
    const AgentProfile* profile = nullptr;
    const TrustPolicy* policy = nullptr;
    const EpistemicState* state = nullptr;  // owning state, if any
};

/// Resolves `lattice_id`. Explicit profile/policy ids win; otherwise the owning
/// state's are used, then the bundle's only profile/policy. Throws NotFound for
/// unknown ids and DataError when no binding can be chosen.
LatticeBinding bind_lattice(const Bundle& bundle, const std::string& lattice_id,
                            const std::optional<std::string>& profile_id = std::nullopt,
                            const std::optional<std::string>& policy_id = std::nullopt);

/// Shared payloads so the CLI and the service print the same JSON.
Json evaluation_payload(const Bundle& bundle, const LatticeBinding& binding, bool with_trace);
Json diagnosis_payload(const Bundle& bundle, const std::string& session_id,
                       const std::optional<std::string>& lattice_id = std::nullopt);
Json recommend_payload(const Bundle& bundle, const std::string& topic, std::size_t k, double min_reputation);
Json footprint_payload(const Footprint& footprint);

}  // namespace mevir
