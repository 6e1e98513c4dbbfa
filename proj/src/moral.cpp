#include "mevir/moral.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mevir/error.hpp"

namespace mevir {

namespace {

bool is_token_char(unsigned char c) {
    return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c >= 0x80;
}

char ascii_lower(unsigned char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : static_cast<char>(c);
}

std::string join(const std::vector<std::string>& tokens, std::size_t begin, std::size_t end) {
    std::string out;
    for (std::size_t i = begin; i < end; ++i) {
        if (i > begin) out += ' ';
        out += tokens[i];
    }
    return out;
}

std::vector<std::string_view> split_tabs(std::string_view line) {
    std::vector<std::string_view> cols;
    std::size_t start = 0;
    while (true) {
        auto pos = line.find('\t', start);
        cols.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos) break;
        start = pos + 1;
    }
    return cols;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

}  // namespace

MoralLexicon::MoralLexicon(std::string name, std::string version)
    : name_(std::move(name)), version_(std::move(version)) {}

void MoralLexicon::add(std::string_view phrase, const FoundationVector& contribution) {
    auto tokens = tokenize(phrase);
    if (tokens.empty()) throw DataError("", "lexicon phrase '" + std::string(phrase) + "' is empty after normalization");
    for (double v : contribution.values) {
        if (!std::isfinite(v) || v < 0.0 || v > 1.0) {
            throw DataError("", "lexicon phrase '" + std::string(phrase) + "' has a score outside [0,1]");
        }
    }
    if (contribution.is_zero()) {
        throw DataError("", "lexicon phrase '" + std::string(phrase) + "' contributes to no foundation");
    }
    auto key = join(tokens, 0, tokens.size());
    if (!entries_.emplace(key, contribution).second) {
        throw DataError("", "duplicate lexicon phrase '" + key + "'");
    }
    max_tokens_ = std::max(max_tokens_, tokens.size());
}

const FoundationVector* MoralLexicon::find(std::string_view normalized) const {
    auto it = entries_.find(normalized);
    return it == entries_.end() ? nullptr : &it->second;
}

std::vector<std::string> tokenize(std::string_view text) {
    std::vector<std::string> tokens;
    std::string current;
    for (unsigned char c : text) {
        if (is_token_char(c)) {
            current += ascii_lower(c);
        } else if (!current.empty()) {
            tokens.push_back(std::move(current));
            current.clear();
        }
    }
    if (!current.empty()) tokens.push_back(std::move(current));
    return tokens;
}

Footprint compute_footprint(std::string_view text, const MoralLexicon& lexicon) {
    const auto tokens = tokenize(text);
    Footprint fp;
    FoundationVector raw;
    std::size_t covered = 0;
    std::size_t i = 0;
    while (i < tokens.size()) {
        std::size_t longest = std::min(lexicon.max_phrase_tokens(), tokens.size() - i);
        const FoundationVector* hit = nullptr;
        std::size_t len = longest;
        for (; len >= 1; --len) {
            hit = lexicon.find(join(tokens, i, i + len));
            if (hit) break;
        }
        if (hit) {
            for (std::size_t k = 0; k < kFoundationCount; ++k) raw.values[k] += hit->values[k];
            covered += len;
            ++fp.matched_count;
            i += len;
        } else {
            ++i;
        }
    }
    const double total = raw.sum();
    if (total > 0.0) {
        for (std::size_t k = 0; k < kFoundationCount; ++k) fp.vector.values[k] = raw.values[k] / total;
    }
    fp.intensity = tokens.empty() ? 0.0 : static_cast<double>(covered) / static_cast<double>(tokens.size());
    return fp;
}

std::vector<Footprint> compute_footprints_serial(std::span<const std::string> texts, const MoralLexicon& lexicon) {
    std::vector<Footprint> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(compute_footprint(t, lexicon));
    return out;
}

std::vector<Footprint> compute_footprints(std::span<const std::string> texts, const MoralLexicon& lexicon) {
    std::vector<Footprint> out(texts.size());
    const auto n = static_cast<std::ptrdiff_t>(texts.size());
#pragma omp parallel for schedule(dynamic, 16) if (n > 64)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
        out[static_cast<std::size_t>(i)] = compute_footprint(texts[static_cast<std::size_t>(i)], lexicon);
    }
    return out;
}

double moral_congruence(const FoundationVector& a, const FoundationVector& b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t k = 0; k < kFoundationCount; ++k) {
        dot += a.values[k] * b.values[k];
        na += a.values[k] * a.values[k];
        nb += b.values[k] * b.values[k];
    }
    if (na == 0.0 || nb == 0.0) return 0.5;
    return clamp01(dot / (std::sqrt(na) * std::sqrt(nb)));
}

MoralLexicon parse_lexicon_tsv(std::string_view text, std::string default_name) {
    MoralLexicon lex(std::move(default_name), "");
    static constexpr std::string_view kHeader[] = {"phrase",  "care",    "fairness_equity",
                                                   "fairness_proportionality", "liberty", "loyalty",
                                                   "authority", "purity"};
    bool header_seen = false;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        const std::string where = "line " + std::to_string(line_no);
        if (trim(line).empty()) continue;
        if (line.front() == '#') {
            auto body = trim(line.substr(1));
            if (body.starts_with("name:")) lex.set_name(std::string(trim(body.substr(5))));
            else if (body.starts_with("version:")) lex.set_version(std::string(trim(body.substr(8))));
            continue;
        }
        auto cols = split_tabs(line);
        if (!header_seen) {
            if (cols.size() != std::size(kHeader)) throw DataError(where, "lexicon header must have 8 tab-separated columns");
            for (std::size_t c = 0; c < cols.size(); ++c) {
                if (trim(cols[c]) != kHeader[c]) {
                    throw DataError(where, "lexicon header column " + std::to_string(c + 1) + " must be '" +
                                               std::string(kHeader[c]) + "'");
                }
            }
            header_seen = true;
            continue;
        }
        if (cols.size() != std::size(kHeader)) throw DataError(where, "expected 8 tab-separated columns");
        FoundationVector v;
        for (std::size_t k = 0; k < kFoundationCount; ++k) {
            auto cell = trim(cols[k + 1]);
            double value = 0.0;
            auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), value);
            if (ec != std::errc{} || ptr != cell.data() + cell.size()) {
                throw DataError(where, "column '" + std::string(kHeader[k + 1]) + "' is not a decimal number");
            }
            v.values[k] = value;
        }
        try {
            lex.add(cols[0], v);
        } catch (const DataError& e) {
            throw DataError(where, e.what());
        }
    }
    if (!header_seen) throw DataError("line 1", "lexicon is missing its header row");
    return lex;
}

MoralLexicon load_lexicon_tsv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError(path.string(), "cannot open lexicon file");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_lexicon_tsv(ss.str(), path.stem().string());
    } catch (const DataError& e) {
        throw DataError(path.string(), e.what());
    }
}

std::string emit_lexicon_tsv(const MoralLexicon& lexicon) {
    std::ostringstream out;
    if (!lexicon.name().empty()) out << "# name: " << lexicon.name() << '\n';
    if (!lexicon.version().empty()) out << "# version: " << lexicon.version() << '\n';
    out << "phrase";
    for (auto f : kAllFoundations) out << '\t' << to_string(f);
    out << '\n';
    for (const auto& [phrase, v] : lexicon.entries()) {
        out << phrase;
        for (double x : v.values) {
            char buf[32];
            auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, x);
            out << '\t' << std::string_view(buf, static_cast<std::size_t>(ptr - buf));
        }
        out << '\n';
    }
    return out.str();
}

}  // namespace mevir
