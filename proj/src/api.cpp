#include "mevir/api.hpp"

#include "mevir/diagnostics.hpp"
#include "mevir/error.hpp"
#include "mevir/recommend.hpp"

namespace mevir {

namespace {

template <typename Map>
const typename Map::mapped_type* only_entry(const Map& m) {
    return m.size() == 1 ? &m.begin()->second : nullptr;
}

}  // namespace

LatticeBinding bind_lattice(const Bundle& bundle, const std::string& lattice_id,
                            const std::optional<std::string>& profile_id,
                            const std::optional<std::string>& policy_id) {
    LatticeBinding b;
    b.lattice = &bundle.lattice(lattice_id);
    if (!bundle.lattices.contains(lattice_id)) b.state = bundle.state_for_lattice(lattice_id);

    if (profile_id) b.profile = &bundle.profile(*profile_id);
    else if (b.state) b.profile = &bundle.profile(b.state->profile_id);
    else b.profile = only_entry(bundle.profiles);

    if (policy_id) b.policy = &bundle.policy(*policy_id);
    else if (b.state) b.policy = &bundle.policy(b.state->policy_id);
    else b.policy = only_entry(bundle.policies);

    if (!b.profile) throw DataError("/profile", "lattice '" + lattice_id + "' needs an explicit profile");
    if (!b.policy) throw DataError("/policy", "lattice '" + lattice_id + "' needs an explicit policy");
    return b;
}

Json evaluation_payload(const Bundle& bundle, const LatticeBinding& binding, bool with_trace) {
    const auto result = evaluate(*binding.lattice, *binding.profile, bundle.sources, *binding.policy,
                                 bundle.lexicon.lexicon);
    Json j = to_json(result, with_trace);
    j["profile"] = binding.profile->id;
    j["policy"] = binding.policy->id;
    j["target_claim_id"] = binding.lattice->target_claim_id;
    return j;
}

Json diagnosis_payload(const Bundle& bundle, const std::string& session_id,
                       const std::optional<std::string>& lattice_id) {
    const auto& session = bundle.session(session_id);
    const std::string lid = lattice_id ? *lattice_id : session.lattice_id;
    if (lid.empty()) throw DataError("/lattice", "session '" + session_id + "' names no lattice");
    const auto& lattice = bundle.lattice(lid);
    const auto& profile = bundle.profile(session.profile_id);
    const auto& policy = bundle.policy(session.policy_id);

    Json flags = Json::array();
    for (const auto& f : diagnose(session, lattice, bundle.sources, profile, policy)) flags.push_back(to_json(f));
    return Json{{"session", session.id},
                {"lattice", lid},
                {"flags", flags},
                {"insularity", insularity(lattice, bundle.sources)}};
}

Json recommend_payload(const Bundle& bundle, const std::string& topic, std::size_t k, double min_reputation) {
    Json picks = Json::array();
    for (const auto& id : recommend_authorities(topic, bundle.sources, k, min_reputation)) {
        const auto& s = bundle.sources.at(id);
        picks.push_back(Json{{"id", id}, {"name", s.name}, {"leaning", s.leaning}, {"reputation", s.reputation}});
    }
    return Json{{"topic", topic}, {"k", k}, {"min_reputation", min_reputation}, {"recommendations", picks}};
}

Json footprint_payload(const Footprint& footprint) { return to_json(footprint); }

}  // namespace mevir
