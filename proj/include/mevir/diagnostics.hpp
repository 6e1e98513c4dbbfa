#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mevir/evaluation.hpp"
#include "mevir/types.hpp"

namespace mevir {

struct SessionEvent {
    enum class Kind { consulted, committed };
    Kind kind = Kind::consulted;
    std::int64_t step = 0;
    std::string source_id;                // consulted only
    std::string claim_id;
    bool supports_current_stance = false;  // consulted only
    std::optional<Verdict> verdict;        // committed only

    bool operator==(const SessionEvent&) const = default;
};

/// An analyst's information-seeking trace. Steps strictly increase.
struct SessionLog {
    std::string id;
    std::string profile_id;
    std::string policy_id;
    std::string lattice_id;
    std::vector<SessionEvent> events;

    /// Throws DataError unless steps strictly increase.
    void check_steps() const;

    bool operator==(const SessionLog&) const = default;
};

enum class BiasKind { availability, bandwagon, confirmation, halo, overconfidence };

std::string_view to_string(BiasKind k);
std::optional<BiasKind> parse_bias_kind(std::string_view s);

/// Epistemic-failure label shown with each bias.
std::string_view diagnosis_label(BiasKind k);

struct BiasFlag {
    BiasKind kind;
    double severity = 1.0;
    std::string explanation;
    std::string mevir_diagnosis;
    std::string subject;  // claim or node the flag concerns, when there is one

    bool operator==(const BiasFlag&) const = default;
};

enum class LeaningBucket { left, center, right };

/// left [-1,-1/3), center [-1/3,1/3], right (1/3,1].
LeaningBucket leaning_bucket(double leaning);

/// Named thresholds with their defaults; policies override them by name.
struct HeuristicThresholds {
    double confirmation_min_sources = 3;
    double confirmation_share = 0.8;
    double availability_max_sources = 1;

    static HeuristicThresholds from_policy(const TrustPolicy& policy);
};

std::optional<BiasFlag> detect_confirmation(const SessionLog& session, const SourceTable& sources,
                                            const HeuristicThresholds& thresholds);
std::optional<BiasFlag> detect_availability(const SessionLog& session, const TrustLattice& lattice,
                                            const HeuristicThresholds& thresholds);
/// Halo and overconfidence need topics; claims without any are never flagged.
std::vector<BiasFlag> detect_halo(const TrustLattice& lattice, const SourceTable& sources);
std::vector<BiasFlag> detect_bandwagon(const TrustLattice& lattice, const SourceTable& sources);
std::optional<BiasFlag> detect_overconfidence(const TrustLattice& lattice, const AgentProfile& profile);

/// Share of the largest leaning bucket among distinct sources referenced by
/// provenance edges or authority anchors; 0 when no source is referenced.
double insularity(const TrustLattice& lattice, const SourceTable& sources);

/// All detectors, ordered by (severity desc, kind asc, subject asc).
std::vector<BiasFlag> diagnose(const SessionLog& session, const TrustLattice& lattice, const SourceTable& sources,
                               const AgentProfile& profile, const TrustPolicy& policy);

}  // namespace mevir
