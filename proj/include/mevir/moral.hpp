#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mevir/types.hpp"

namespace mevir {

/// Phrase lexicon mapping lowercase token sequences to foundation contributions.
class MoralLexicon {
public:
    MoralLexicon() = default;
    MoralLexicon(std::string name, std::string version);

    /// Adds a phrase; it is normalized with `tokenize`. Throws DataError on an
    /// empty phrase, a duplicate, an all-zero contribution, or a score outside [0,1].
    void add(std::string_view phrase, const FoundationVector& contribution);

    /// Contribution for an already-normalized phrase, or nullptr.
    const FoundationVector* find(std::string_view normalized) const;

    const std::map<std::string, FoundationVector, std::less<>>& entries() const { return entries_; }
    std::size_t max_phrase_tokens() const { return max_tokens_; }

    const std::string& name() const { return name_; }
    const std::string& version() const { return version_; }
    void set_name(std::string n) { name_ = std::move(n); }
    void set_version(std::string v) { version_ = std::move(v); }

    bool operator==(const MoralLexicon& o) const {
        return name_ == o.name_ && version_ == o.version_ && entries_ == o.entries_;
    }

private:
    std::string name_;
    std::string version_;
    std::map<std::string, FoundationVector, std::less<>> entries_;
    std::size_t max_tokens_ = 0;

};

struct Footprint {
    FoundationVector vector;  // L1-normalized, or zero when nothing matched
    double intensity = 0.0;   // matched tokens / total tokens
    std::size_t matched_count = 0;

    bool operator==(const Footprint&) const = default;
};

/// Lowercases ASCII, splits on every character that is not an ASCII letter or
/// digit. Bytes >= 0x80 are kept inside tokens so UTF-8 words stay whole.
std::vector<std::string> tokenize(std::string_view text);

/// Greedy longest-match scan, left to right; each token is used at most once.
Footprint compute_footprint(std::string_view text, const MoralLexicon& lexicon);

/// compute_footprint over many texts. The OpenMP kernel and the serial loop
/// produce identical results.
std::vector<Footprint> compute_footprints(std::span<const std::string> texts, const MoralLexicon& lexicon);
std::vector<Footprint> compute_footprints_serial(std::span<const std::string> texts, const MoralLexicon& lexicon);

/// Cosine similarity of two non-negative vectors; 0.5 when either is all zero.
double moral_congruence(const FoundationVector& a, const FoundationVector& b);

/// Lexicon TSV: header `phrase care fairness_equity fairness_proportionality
/// liberty loyalty authority purity` (tab separated), one entry per line.
/// Optional leading `# name: ...` / `# version: ...` comment lines.
MoralLexicon parse_lexicon_tsv(std::string_view text, std::string default_name = "lexicon");
MoralLexicon load_lexicon_tsv(const std::filesystem::path& path);
std::string emit_lexicon_tsv(const MoralLexicon& lexicon);

}  // namespace mevir
