#include "mevir/fixtures.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mevir/api.hpp"
#include "mevir/bundle.hpp"
#include "mevir/error.hpp"

namespace mevir {

namespace {

std::string str_field(const Json& j, const char* key, const std::string& path, bool required) {
    auto it = j.find(key);
    if (it == j.end()) {
        if (required) throw DataError(path + "/" + key, "missing required field");
        return {};
    }
    if (!it->is_string()) throw DataError(path + "/" + key, "expected a string");
    return it->get<std::string>();
}

}  // namespace

std::vector<FixtureExpectation> load_manifest(const std::filesystem::path& manifest) {
    std::ifstream in(manifest, std::ios::binary);
    if (!in) throw DataError(manifest.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    const Json root = parse_json_text(ss.str(), manifest.string());
    if (!root.is_object() || !root.contains("fixtures") || !root["fixtures"].is_array()) {
        throw DataError("/fixtures", "expected an array of fixtures");
    }
    static const std::set<std::string> known = {"id",      "bundle",           "profile",        "policy",
                                                "target",  "budget",           "lattice",        "session",
                                                "expected_verdict", "expected_flags", "expected_insularity",
                                                "ground_truth", "notes"};
    std::vector<FixtureExpectation> out;
    for (std::size_t i = 0; i < root["fixtures"].size(); ++i) {
        const Json& j = root["fixtures"][i];
        const std::string path = "/fixtures/" + std::to_string(i);
        if (!j.is_object()) throw DataError(path, "expected an object");
        for (auto it = j.begin(); it != j.end(); ++it) {
            if (!known.contains(it.key())) throw DataError(path + "/" + it.key(), "unknown field");
        }
        FixtureExpectation e;
        e.id = str_field(j, "id", path, true);
        e.bundle = str_field(j, "bundle", path, true);
        e.profile = str_field(j, "profile", path, false);
        e.policy = str_field(j, "policy", path, false);
        e.target = str_field(j, "target", path, false);
        e.lattice = str_field(j, "lattice", path, false);
        e.session = str_field(j, "session", path, false);
        e.notes = str_field(j, "notes", path, false);
        if (auto it = j.find("budget"); it != j.end()) {
            if (!it->is_number_unsigned() || it->get<std::size_t>() < 1) {
                throw DataError(path + "/budget", "expected a positive integer");
            }
            e.budget = it->get<std::size_t>();
        }
        if (auto it = j.find("expected_verdict"); it != j.end()) {
            auto v = it->is_string() ? parse_verdict(it->get<std::string>()) : std::nullopt;
            if (!v) throw DataError(path + "/expected_verdict", "expected 'accepted' or 'rejected'");
            e.expected_verdict = v;
        }
        if (auto it = j.find("expected_flags"); it != j.end()) {
            if (!it->is_array()) throw DataError(path + "/expected_flags", "expected an array");
            std::set<std::string> flags;
            for (const auto& f : *it) {
                if (!f.is_string() || !parse_bias_kind(f.get<std::string>())) {
                    throw DataError(path + "/expected_flags", "unknown bias kind");
                }
                flags.insert(f.get<std::string>());
            }
            e.expected_flags = flags;
        }
        if (auto it = j.find("expected_insularity"); it != j.end()) {
            if (!it->is_number()) throw DataError(path + "/expected_insularity", "expected a number");
            e.expected_insularity = it->get<double>();
        }
        if (auto it = j.find("ground_truth"); it != j.end()) {
            if (!it->is_boolean()) throw DataError(path + "/ground_truth", "expected a boolean");
            e.ground_truth = it->get<bool>();
        }
        if (e.target.empty() && e.lattice.empty() && e.session.empty()) {
            throw DataError(path, "fixture needs a target, a lattice or a session");
        }
        out.push_back(std::move(e));
    }
    return out;
}

FixtureReport run_fixture(const FixtureExpectation& x, const std::filesystem::path& base_dir) {
    const Bundle bundle = load_bundle(base_dir / x.bundle);
    FixtureReport r;
    r.id = x.id;
    auto mismatch = [&](std::string m) {
        r.passed = false;
        r.mismatches.push_back(std::move(m));
    };

    std::optional<TrustLattice> elaborated;
    const TrustLattice* lattice = nullptr;
    if (!x.target.empty()) {
        elaborated = elaborate(bundle.corpus, x.target, bundle.profile(x.profile), bundle.policy(x.policy),
                               bundle.sources, Budget{x.budget});
        lattice = &*elaborated;
    } else if (!x.lattice.empty()) {
        lattice = &bundle.lattice(x.lattice);
    }

    if (lattice && x.expected_verdict) {
        const auto binding = x.target.empty()
                                 ? bind_lattice(bundle, x.lattice, x.profile.empty() ? std::nullopt : std::optional(x.profile),
                                                x.policy.empty() ? std::nullopt : std::optional(x.policy))
                                 : LatticeBinding{lattice, &bundle.profile(x.profile), &bundle.policy(x.policy), nullptr};
        const auto result =
            evaluate(*lattice, *binding.profile, bundle.sources, *binding.policy, bundle.lexicon.lexicon);
        const auto& target = lattice->target_claim_id;
        r.score = result.scores.at(target);
        r.verdict = result.verdicts.at(target);
        if (*r.verdict != *x.expected_verdict) {
            mismatch("verdict on '" + target + "' is " + std::string(to_string(*r.verdict)) + ", expected " +
                     std::string(to_string(*x.expected_verdict)));
        }
    }

    if (!x.session.empty()) {
        const auto& session = bundle.session(x.session);
        const TrustLattice& diag_lattice =
            lattice ? *lattice : bundle.lattice(session.lattice_id);
        for (const auto& f : diagnose(session, diag_lattice, bundle.sources, bundle.profile(session.profile_id),
                                      bundle.policy(session.policy_id))) {
            r.flags.insert(std::string(to_string(f.kind)));
        }
        r.insularity = insularity(diag_lattice, bundle.sources);
        if (x.expected_flags && r.flags != *x.expected_flags) {
            std::string got, want;
            for (const auto& f : r.flags) got += (got.empty() ? "" : ",") + f;
            for (const auto& f : *x.expected_flags) want += (want.empty() ? "" : ",") + f;
            mismatch("flags {" + got + "}, expected {" + want + "}");
        }
    } else if (lattice) {
        r.insularity = insularity(*lattice, bundle.sources);
    }
    if (x.expected_insularity && (!r.insularity || *r.insularity != *x.expected_insularity)) {
        mismatch("insularity " + (r.insularity ? std::to_string(*r.insularity) : std::string("n/a")) + ", expected " +
                 std::to_string(*x.expected_insularity));
    }
    return r;
}

}  // namespace mevir
