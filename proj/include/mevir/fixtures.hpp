#pragma once

#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mevir/evaluation.hpp"

namespace mevir {

/// One expected outcome from the fixture manifest. Either `target` (elaborate
/// with `budget`) or `lattice` (stored) names what gets evaluated; `session`
/// adds a diagnosis.
struct FixtureExpectation {
    std::string id;
    std::string bundle;  // relative to the manifest
    std::string profile;
    std::string policy;
    std::string target;
    std::size_t budget = 1;
    std::string lattice;
    std::string session;
    std::optional<Verdict> expected_verdict;
    std::optional<std::set<std::string>> expected_flags;
    std::optional<double> expected_insularity;
    std::optional<bool> ground_truth;  // fixture metadata, never read by the engine
    std::string notes;
};

struct FixtureReport {
    std::string id;
    bool passed = true;
    std::vector<std::string> mismatches;
    std::optional<double> score;
    std::optional<Verdict> verdict;
    std::set<std::string> flags;
    std::optional<double> insularity;
};

std::vector<FixtureExpectation> load_manifest(const std::filesystem::path& manifest);

/// Elaborates/evaluates/diagnoses as the expectation asks and compares.
/// Bundle errors propagate.
FixtureReport run_fixture(const FixtureExpectation& expectation, const std::filesystem::path& base_dir);

}  // namespace mevir
