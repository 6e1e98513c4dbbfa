#include "mevir/bundle.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mevir/error.hpp"
#include "mevir/validate.hpp"

namespace mevir {

namespace {

// ---------------------------------------------------------------------------
// Reading helpers

/// Strict object reader: every key must be consumed before `done()`.
class Obj {
public:
    Obj(const Json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw DataError(path_, "expected an object");
    }

    const Json& req(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end()) throw DataError(at(key), "missing required field");
        used_.insert(key);
        return *it;
    }

    const Json* opt(const std::string& key) {
        auto it = j_.find(key);
        if (it == j_.end() || it->is_null()) {
            if (it != j_.end()) used_.insert(key);
            return nullptr;
        }
        used_.insert(key);
        return &*it;
    }

    std::string at(const std::string& key) const { return path_ + "/" + key; }

    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it) {
            if (!used_.contains(it.key())) throw DataError(at(it.key()), "unknown field");
        }
    }

private:
    const Json& j_;
    std::string path_;
    std::set<std::string> used_;
};

std::string as_string(const Json& j, const std::string& path) {
    if (!j.is_string()) throw DataError(path, "expected a string");
    return j.get<std::string>();
}

std::string as_id(const Json& j, const std::string& path) {
    auto s = as_string(j, path);
    if (s.empty()) throw DataError(path, "id must be non-empty");
    return s;
}

double as_number(const Json& j, const std::string& path) {
    if (!j.is_number()) throw DataError(path, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw DataError(path, "number must be finite");
    return v;
}

double as_range(const Json& j, const std::string& path, double lo, double hi) {
    const double v = as_number(j, path);
    if (v < lo || v > hi) {
        std::ostringstream msg;
        msg << "value " << v << " outside [" << lo << "," << hi << "]";
        throw DataError(path, msg.str());
    }
    return v;
}

double as_score(const Json& j, const std::string& path) { return as_range(j, path, 0.0, 1.0); }

bool as_bool(const Json& j, const std::string& path) {
    if (!j.is_boolean()) throw DataError(path, "expected a boolean");
    return j.get<bool>();
}

const Json& as_array(const Json& j, const std::string& path) {
    if (!j.is_array()) throw DataError(path, "expected an array");
    return j;
}

std::set<std::string> as_string_set(const Json& j, const std::string& path) {
    std::set<std::string> out;
    const auto& arr = as_array(j, path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto p = path + "/" + std::to_string(i);
        if (!out.insert(as_id(arr[i], p)).second) throw DataError(p, "duplicate entry");
    }
    return out;
}

std::map<std::string, double> as_score_map(const Json& j, const std::string& path) {
    if (!j.is_object()) throw DataError(path, "expected an object");
    std::map<std::string, double> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = as_score(*it, path + "/" + it.key());
    return out;
}

template <typename Enum>
Enum as_enum(const Json& j, const std::string& path, std::optional<Enum> (*parse)(std::string_view),
             std::string_view what) {
    auto s = as_string(j, path);
    auto v = parse(s);
    if (!v) throw DataError(path, "unknown " + std::string(what) + " '" + s + "'");
    return *v;
}

/// Reads an array of id'd objects into a map, rejecting duplicate ids.
template <typename T, typename Reader, typename IdOf>
std::map<std::string, T> read_id_array(const Json& j, const std::string& path, Reader read, IdOf id_of) {
    std::map<std::string, T> out;
    const auto& arr = as_array(j, path);
    for (std::size_t i = 0; i < arr.size(); ++i) {
        const auto p = path + "/" + std::to_string(i);
        T value = read(arr[i], p);
        const std::string id = id_of(value);
        if (!out.emplace(id, std::move(value)).second) throw DataError(p, "duplicate id '" + id + "'");
    }
    return out;
}

std::optional<std::string> opt_tag(Obj& o, const std::string& key) {
    if (const auto* v = o.opt(key)) return as_id(*v, o.at(key));
    return std::nullopt;
}

ScoreRange range_from_json(const Json& j, const std::string& path, double lo, double hi) {
    if (!j.is_array() || j.size() != 2) throw DataError(path, "expected [low, high]");
    ScoreRange r{as_range(j[0], path + "/0", lo, hi), as_range(j[1], path + "/1", lo, hi)};
    if (r.lo > r.hi) throw DataError(path, "low bound exceeds high bound");
    return r;
}

Json range_to_json(const ScoreRange& r) { return Json::array({r.lo, r.hi}); }

Json string_array(const std::set<std::string>& s) {
    Json a = Json::array();
    for (const auto& x : s) a.push_back(x);
    return a;
}

Json string_array(const std::vector<std::string>& s) {
    Json a = Json::array();
    for (const auto& x : s) a.push_back(x);
    return a;
}

Json score_map(const std::map<std::string, double>& m) {
    Json o = Json::object();
    for (const auto& [k, v] : m) o[k] = v;
    return o;
}

std::string read_file(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw DataError(file.string(), "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// ---------------------------------------------------------------------------
// Evaluation snapshot stored in states (scores and verdicts only)

Json evaluation_snapshot(const EvaluationResult& r) {
    Json scores = Json::object(), verdicts = Json::object();
    for (const auto& [id, s] : r.scores) scores[id] = s;
    for (const auto& [id, v] : r.verdicts) verdicts[id] = to_string(v);
    return Json{{"scores", scores}, {"verdicts", verdicts}};
}

}  // namespace

// ---------------------------------------------------------------------------
// Emission

std::string dump_canonical(const Json& j) { return j.dump(2) + "\n"; }

Json to_json(const FoundationVector& v) {
    Json o = Json::object();
    for (auto f : kAllFoundations) o[std::string(to_string(f))] = v[f];
    return o;
}

Json to_json(const Claim& c) {
    Json o{{"id", c.id},
           {"text", c.text},
           {"topics", string_array(c.topics)},
           {"evidence_kind", to_string(c.evidence_kind)},
           {"mutually_exclusive_with", string_array(c.mutually_exclusive_with)}};
    if (c.truth_maker_kind) o["truth_maker_kind"] = *c.truth_maker_kind;
    if (c.proxy_kind) o["proxy_kind"] = *c.proxy_kind;
    if (c.footprint) o["footprint"] = to_json(*c.footprint);
    return o;
}

Json to_json(const EvidenceEdge& e) {
    return Json{{"id", e.id},
                {"from", e.from},
                {"to", e.to},
                {"kind", to_string(e.kind)},
                {"declared_weight", e.declared_weight}};
}

Json to_json(const TrustAnchor& a) {
    Json o{{"node_id", a.node_id}, {"kind", to_string(a.kind)}};
    if (a.source_id) o["source_id"] = *a.source_id;
    if (a.base_strength) o["base_strength"] = *a.base_strength;
    return o;
}

Json to_json(const TrustLattice& l) {
    Json nodes = Json::array(), edges = Json::array(), anchors = Json::array();
    for (const auto& [_, c] : l.nodes) nodes.push_back(to_json(c));
    for (const auto& [_, e] : l.edges) edges.push_back(to_json(e));
    for (const auto& [_, a] : l.anchors) anchors.push_back(to_json(a));
    Json provenance = Json::object();
    for (const auto& [node, srcs] : l.provenance()) provenance[node] = string_array(srcs);
    return Json{{"id", l.id},
                {"target_claim_id", l.target_claim_id},
                {"nodes", nodes},
                {"edges", edges},
                {"anchors", anchors},
                {"provenance", provenance},
                {"disabled_anchors", string_array(l.disabled_anchors)},
                {"disabled_edges", string_array(l.disabled_edges)}};
}

Json to_json(const AgentProfile& p) {
    Json trust = Json::object();
    for (const auto& [src, t] : p.source_trust) {
        Json e{{"domains", score_map(t.domains)}};
        if (t.default_trust) e["default"] = *t.default_trust;
        trust[src] = e;
    }
    return Json{{"id", p.id},
                {"foundation_weights", to_json(p.foundation_weights)},
                {"beliefs", score_map(p.beliefs)},
                {"pretrusted", score_map(p.pretrusted)},
                {"source_trust", trust},
                {"competence_domains", string_array(p.competence_domains)},
                {"bias_dispositions", string_array(p.bias_dispositions)}};
}

Json to_json(const SourceRecord& s) {
    return Json{{"id", s.id},
                {"name", s.name},
                {"kind", to_string(s.kind)},
                {"expertise_domains", string_array(s.expertise_domains)},
                {"leaning", s.leaning},
                {"reputation", s.reputation},
                {"funding", s.funding},
                {"public_faith", s.public_faith}};
}

Json to_json(const TrustPolicy& p) {
    Json rules = Json::array();
    for (const auto& r : p.weight_rules) {
        Json m = Json::object();
        if (r.matcher.source_kind) m["source_kind"] = to_string(*r.matcher.source_kind);
        if (r.matcher.leaning) m["leaning"] = range_to_json(*r.matcher.leaning);
        if (r.matcher.reputation) m["reputation"] = range_to_json(*r.matcher.reputation);
        if (r.matcher.evidence_kind) m["evidence_kind"] = to_string(*r.matcher.evidence_kind);
        if (r.matcher.proxy_kind) m["proxy_kind"] = *r.matcher.proxy_kind;
        rules.push_back(Json{{"match", m}, {"multiplier", r.multiplier}});
    }
    Json adm = Json::object();
    for (const auto& [tm, proxies] : p.admissible_proxies) adm[tm] = string_array(proxies);
    return Json{{"id", p.id},
                {"tau", p.tau},
                {"prior", p.prior},
                {"uncommitted", p.uncommitted},
                {"lambda", p.lambda},
                {"ingest_threshold", p.ingest_threshold},
                {"weight_rules", rules},
                {"admissible_proxies", adm},
                {"heuristic_thresholds", score_map(p.heuristic_thresholds)}};
}

Json to_json(const ClaimCorpus& c) {
    Json claims = Json::array(), links = Json::array(), att = Json::object();
    for (const auto& [_, claim] : c.claims) claims.push_back(to_json(claim));
    for (const auto& [_, e] : c.links) links.push_back(to_json(e));
    for (const auto& [claim, srcs] : c.attachments) att[claim] = string_array(srcs);
    return Json{{"claims", claims}, {"links", links}, {"attachments", att}};
}

Json to_json(const Footprint& f) {
    return Json{{"vector", to_json(f.vector)}, {"intensity", f.intensity}, {"matched_count", f.matched_count}};
}

Json to_json(const BiasFlag& f) {
    Json o{{"kind", to_string(f.kind)},
           {"severity", f.severity},
           {"explanation", f.explanation},
           {"mevir_diagnosis", f.mevir_diagnosis}};
    if (!f.subject.empty()) o["subject"] = f.subject;
    return o;
}

Json to_json(const SessionEvent& e) {
    Json o{{"step", e.step}, {"claim_id", e.claim_id}};
    if (e.kind == SessionEvent::Kind::consulted) {
        o["kind"] = "consulted";
        o["source_id"] = e.source_id;
        o["supports_current_stance"] = e.supports_current_stance;
    } else {
        o["kind"] = "committed";
        if (e.verdict) o["verdict"] = to_string(*e.verdict);
    }
    return o;
}

Json to_json(const SessionLog& s) {
    Json events = Json::array();
    for (const auto& e : s.events) events.push_back(to_json(e));
    Json o{{"id", s.id}, {"profile", s.profile_id}, {"policy", s.policy_id}, {"events", events}};
    if (!s.lattice_id.empty()) o["lattice"] = s.lattice_id;
    return o;
}

Json to_json(const NewInformation& info) {
    Json edges = Json::array(), anchors = Json::array();
    for (const auto& e : info.edges) edges.push_back(to_json(e));
    for (const auto& a : info.anchors) anchors.push_back(to_json(a));
    return Json{{"claim", to_json(info.claim)}, {"edges", edges}, {"source_id", info.source_id}, {"anchors", anchors}};
}

Json to_json(const RevisionEntry& e) {
    Json ra = Json::array(), re = Json::array();
    for (const auto& a : e.retracted_anchors) ra.push_back(to_json(a));
    for (const auto& x : e.retracted_edges) re.push_back(to_json(x));
    Json o{{"id", e.id},
           {"trigger", Json{{"claim_id", e.trigger_claim}, {"source_id", e.trigger_source}}},
           {"disposition", to_string(e.disposition)},
           {"retracted", Json{{"anchors", ra}, {"edges", re}}},
           {"added", Json{{"nodes", string_array(e.added_nodes)},
                          {"edges", string_array(e.added_edges)},
                          {"anchors", string_array(e.added_anchors)}}},
           {"context", e.context}};
    if (e.reverses) o["reverses"] = *e.reverses;
    return o;
}

Json to_json(const EpistemicState& s, EmitOptions options) {
    Json o{{"id", s.id},
           {"profile", s.profile_id},
           {"policy", s.policy_id},
           {"lattice", to_json(s.lattice)},
           {"evaluation", evaluation_snapshot(s.evaluation)}};
    if (options.include_history) {
        Json log = Json::array();
        for (const auto& e : s.revision_log) log.push_back(to_json(e));
        o["revision_log"] = log;
    }
    return o;
}

Json to_json(const EvaluationResult& r, bool with_trace) {
    Json o = evaluation_snapshot(r);
    o["lattice"] = r.lattice_id;
    if (with_trace) {
        Json trace = Json::object();
        for (const auto& [id, t] : r.trace) {
            Json edges = Json::array();
            for (const auto& e : t.edges) {
                edges.push_back(Json{{"edge", e.edge_id},
                                     {"child", e.child},
                                     {"kind", e.attack ? "attack" : "support"},
                                     {"weight", e.weight},
                                     {"contribution", e.contribution},
                                     {"disabled", e.disabled}});
            }
            trace[id] = Json{{"support", t.support}, {"attack", t.attack}, {"edges", edges}};
        }
        o["trace"] = trace;
    }
    return o;
}

Json bundle_to_json(const Bundle& b, EmitOptions options) {
    Json profiles = Json::array(), sources = Json::array(), policies = Json::array(), lattices = Json::array(),
         states = Json::array(), sessions = Json::array();
    for (const auto& [_, p] : b.profiles) profiles.push_back(to_json(p));
    for (const auto& [_, s] : b.sources) sources.push_back(to_json(s));
    for (const auto& [_, p] : b.policies) policies.push_back(to_json(p));
    for (const auto& [_, l] : b.lattices) lattices.push_back(to_json(l));
    for (const auto& [_, s] : b.states) states.push_back(to_json(s, options));
    for (const auto& [_, s] : b.sessions) sessions.push_back(to_json(s));

    Json lex;
    if (b.lexicon.path) {
        lex = Json{{"path", *b.lexicon.path}};
    } else {
        Json entries = Json::object();
        for (const auto& [phrase, v] : b.lexicon.lexicon.entries()) entries[phrase] = to_json(v);
        lex = Json{{"name", b.lexicon.lexicon.name()}, {"version", b.lexicon.lexicon.version()}, {"entries", entries}};
    }
    return Json{{"corpus", to_json(b.corpus)}, {"profiles", profiles}, {"sources", sources},
                {"policies", policies},         {"lexicon", lex},         {"lattices", lattices},
                {"states", states},             {"sessions", sessions}};
}

std::string emit_bundle(const Bundle& bundle, EmitOptions options) {
    return dump_canonical(bundle_to_json(bundle, options));
}

std::string bundle_hash(const Bundle& bundle) {
    const std::string bytes = emit_bundle(bundle);
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr);
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[digest[i] >> 4];
        out += hex[digest[i] & 0xF];
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parsing

Json parse_json_text(std::string_view text, const std::string& what) {
    try {
        return Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw DataError(what, std::string("malformed JSON at byte ") + std::to_string(e.byte) + ": " + e.what());
    }
}

FoundationVector foundation_vector_from_json(const Json& j, const std::string& path, bool partial,
                                             FoundationVector base) {
    Obj o(j, path);
    FoundationVector v = partial ? base : FoundationVector{};
    for (auto f : kAllFoundations) {
        const std::string key(to_string(f));
        if (const auto* x = o.opt(key)) v[f] = as_score(*x, o.at(key));
    }
    o.done();
    return v;
}

Claim claim_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    Claim c;
    c.id = as_id(o.req("id"), o.at("id"));
    if (const auto* t = o.opt("text")) c.text = as_string(*t, o.at("text"));
    if (const auto* t = o.opt("topics")) c.topics = as_string_set(*t, o.at("topics"));
    c.truth_maker_kind = opt_tag(o, "truth_maker_kind");
    c.proxy_kind = opt_tag(o, "proxy_kind");
    if (const auto* k = o.opt("evidence_kind")) {
        c.evidence_kind = as_enum<EvidenceKind>(*k, o.at("evidence_kind"), parse_evidence_kind, "evidence kind");
    }
    if (const auto* f = o.opt("footprint")) c.footprint = foundation_vector_from_json(*f, o.at("footprint"));
    if (const auto* m = o.opt("mutually_exclusive_with")) {
        c.mutually_exclusive_with = as_string_set(*m, o.at("mutually_exclusive_with"));
        if (c.mutually_exclusive_with.contains(c.id)) {
            throw DataError(o.at("mutually_exclusive_with"), "a claim cannot exclude itself");
        }
    }
    o.done();
    return c;
}

EvidenceEdge edge_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    EvidenceEdge e;
    e.id = as_id(o.req("id"), o.at("id"));
    e.from = as_id(o.req("from"), o.at("from"));
    e.to = as_id(o.req("to"), o.at("to"));
    e.kind = as_enum<EdgeKind>(o.req("kind"), o.at("kind"), parse_edge_kind, "edge kind");
    if (const auto* w = o.opt("declared_weight")) e.declared_weight = as_score(*w, o.at("declared_weight"));
    if (e.from == e.to) throw DataError(path, "edge '" + e.id + "' has from == to");
    o.done();
    return e;
}

TrustAnchor anchor_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    TrustAnchor a;
    a.node_id = as_id(o.req("node_id"), o.at("node_id"));
    a.kind = as_enum<AnchorKind>(o.req("kind"), o.at("kind"), parse_anchor_kind, "anchor kind");
    a.source_id = opt_tag(o, "source_id");
    if (const auto* s = o.opt("base_strength")) a.base_strength = as_score(*s, o.at("base_strength"));
    o.done();
    const bool needs_source = a.kind == AnchorKind::authority;
    const bool needs_strength = a.kind == AnchorKind::belief || a.kind == AnchorKind::pre_trusted;
    if (needs_source != a.source_id.has_value()) {
        throw DataError(path + "/source_id", "source_id is required iff kind is authority");
    }
    if (needs_strength != a.base_strength.has_value()) {
        throw DataError(path + "/base_strength", "base_strength is required iff kind is belief or pre_trusted");
    }
    return a;
}

TrustLattice lattice_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    TrustLattice l;
    l.id = as_id(o.req("id"), o.at("id"));
    l.target_claim_id = as_id(o.req("target_claim_id"), o.at("target_claim_id"));
    l.nodes = read_id_array<Claim>(o.req("nodes"), o.at("nodes"), claim_from_json, [](const Claim& c) { return c.id; });
    if (const auto* e = o.opt("edges")) {
        l.edges = read_id_array<EvidenceEdge>(*e, o.at("edges"), edge_from_json, [](const EvidenceEdge& x) { return x.id; });
    }
    if (const auto* a = o.opt("anchors")) {
        l.anchors = read_id_array<TrustAnchor>(*a, o.at("anchors"), anchor_from_json,
                                              [](const TrustAnchor& x) { return x.node_id; });
    }
    if (const auto* d = o.opt("disabled_anchors")) l.disabled_anchors = as_string_set(*d, o.at("disabled_anchors"));
    if (const auto* d = o.opt("disabled_edges")) l.disabled_edges = as_string_set(*d, o.at("disabled_edges"));
    if (const auto* p = o.opt("provenance")) {
        // Derived data; accepted only when it agrees with the sourced_from edges.
        Json expected = Json::object();
        for (const auto& [node, srcs] : l.provenance()) expected[node] = string_array(srcs);
        if (*p != expected) throw DataError(o.at("provenance"), "provenance disagrees with sourced_from edges");
    }
    o.done();

    if (auto violations = validate_lattice(l); !violations.empty()) {
        const auto& v = violations.front();
        std::string where = path;
        if (!v.ids.empty()) {
            const auto& id = v.ids.front();
            if (l.edges.contains(id)) where += "/edges/" + id;
            else if (l.nodes.contains(id) || l.anchors.contains(id)) where += "/nodes/" + id;
        }
        throw DataError(where, "[" + std::string(to_string(v.kind)) + "] " + v.message);
    }
    return l;
}

SourceTrust source_trust_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    SourceTrust t;
    if (const auto* d = o.opt("default")) t.default_trust = as_score(*d, o.at("default"));
    if (const auto* d = o.opt("domains")) t.domains = as_score_map(*d, o.at("domains"));
    o.done();
    return t;
}

AgentProfile profile_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    AgentProfile p;
    p.id = as_id(o.req("id"), o.at("id"));
    if (const auto* f = o.opt("foundation_weights")) {
        p.foundation_weights = foundation_vector_from_json(*f, o.at("foundation_weights"));
    }
    if (const auto* b = o.opt("beliefs")) p.beliefs = as_score_map(*b, o.at("beliefs"));
    if (const auto* b = o.opt("pretrusted")) p.pretrusted = as_score_map(*b, o.at("pretrusted"));
    if (const auto* t = o.opt("source_trust")) {
        if (!t->is_object()) throw DataError(o.at("source_trust"), "expected an object");
        for (auto it = t->begin(); it != t->end(); ++it) {
            p.source_trust[it.key()] = source_trust_from_json(*it, o.at("source_trust") + "/" + it.key());
        }
    }
    if (const auto* c = o.opt("competence_domains")) p.competence_domains = as_string_set(*c, o.at("competence_domains"));
    if (const auto* c = o.opt("bias_dispositions")) p.bias_dispositions = as_string_set(*c, o.at("bias_dispositions"));
    o.done();
    for (const auto& [claim, _] : p.beliefs) {
        if (p.pretrusted.contains(claim)) {
            throw DataError(path + "/pretrusted/" + claim, "claim appears in both beliefs and pretrusted");
        }
    }
    return p;
}

SourceRecord source_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    SourceRecord s;
    s.id = as_id(o.req("id"), o.at("id"));
    if (const auto* n = o.opt("name")) s.name = as_string(*n, o.at("name"));
    if (s.name.empty()) s.name = s.id;
    s.kind = as_enum<SourceKind>(o.req("kind"), o.at("kind"), parse_source_kind, "source kind");
    if (const auto* e = o.opt("expertise_domains")) s.expertise_domains = as_string_set(*e, o.at("expertise_domains"));
    if (const auto* l = o.opt("leaning")) s.leaning = as_range(*l, o.at("leaning"), -1.0, 1.0);
    if (const auto* r = o.opt("reputation")) s.reputation = as_score(*r, o.at("reputation"));
    if (const auto* f = o.opt("funding")) s.funding = as_string(*f, o.at("funding"));
    if (const auto* p = o.opt("public_faith")) s.public_faith = as_bool(*p, o.at("public_faith"));
    o.done();
    return s;
}

TrustPolicy policy_overrides_from_json(const Json& j, const std::string& path, TrustPolicy p) {
    Obj o(j, path);
    if (const auto* x = o.opt("id")) p.id = as_id(*x, o.at("id"));
    if (const auto* x = o.opt("tau")) p.tau = as_score(*x, o.at("tau"));
    if (const auto* x = o.opt("prior")) p.prior = as_score(*x, o.at("prior"));
    if (const auto* x = o.opt("uncommitted")) p.uncommitted = as_score(*x, o.at("uncommitted"));
    if (const auto* x = o.opt("lambda")) p.lambda = as_score(*x, o.at("lambda"));
    if (const auto* x = o.opt("ingest_threshold")) p.ingest_threshold = as_score(*x, o.at("ingest_threshold"));
    if (const auto* rules = o.opt("weight_rules")) {
        p.weight_rules.clear();
        const auto& arr = as_array(*rules, o.at("weight_rules"));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto rp = o.at("weight_rules") + "/" + std::to_string(i);
            Obj r(arr[i], rp);
            WeightRule rule;
            rule.multiplier = as_range(r.req("multiplier"), r.at("multiplier"), 0.0, 2.0);
            if (const auto* m = r.opt("match")) {
                Obj mo(*m, r.at("match"));
                if (const auto* x = mo.opt("source_kind")) {
                    rule.matcher.source_kind = as_enum<SourceKind>(*x, mo.at("source_kind"), parse_source_kind, "source kind");
                }
                if (const auto* x = mo.opt("leaning")) rule.matcher.leaning = range_from_json(*x, mo.at("leaning"), -1.0, 1.0);
                if (const auto* x = mo.opt("reputation")) {
                    rule.matcher.reputation = range_from_json(*x, mo.at("reputation"), 0.0, 1.0);
                }
                if (const auto* x = mo.opt("evidence_kind")) {
                    rule.matcher.evidence_kind =
                        as_enum<EvidenceKind>(*x, mo.at("evidence_kind"), parse_evidence_kind, "evidence kind");
                }
                if (const auto* x = mo.opt("proxy_kind")) rule.matcher.proxy_kind = as_id(*x, mo.at("proxy_kind"));
                mo.done();
            }
            r.done();
            p.weight_rules.push_back(std::move(rule));
        }
    }
    if (const auto* adm = o.opt("admissible_proxies")) {
        if (!adm->is_object()) throw DataError(o.at("admissible_proxies"), "expected an object");
        p.admissible_proxies.clear();
        for (auto it = adm->begin(); it != adm->end(); ++it) {
            p.admissible_proxies[it.key()] = as_string_set(*it, o.at("admissible_proxies") + "/" + it.key());
        }
    }
    if (const auto* h = o.opt("heuristic_thresholds")) {
        if (!h->is_object()) throw DataError(o.at("heuristic_thresholds"), "expected an object");
        for (auto it = h->begin(); it != h->end(); ++it) {
            const auto hp = o.at("heuristic_thresholds") + "/" + it.key();
            const double v = as_number(*it, hp);
            if (v < 0.0) throw DataError(hp, "threshold must be non-negative");
            p.heuristic_thresholds[it.key()] = v;
        }
    }
    o.done();
    return p;
}

TrustPolicy policy_from_json(const Json& j, const std::string& path) {
    if (!j.is_object() || !j.contains("id")) {
        Obj o(j, path);
        o.req("id");
    }
    return policy_overrides_from_json(j, path, TrustPolicy{});
}

SessionEvent session_event_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    SessionEvent e;
    const auto kind = as_string(o.req("kind"), o.at("kind"));
    const auto& step = o.req("step");
    if (!step.is_number_integer()) throw DataError(o.at("step"), "expected an integer");
    e.step = step.get<std::int64_t>();
    e.claim_id = as_id(o.req("claim_id"), o.at("claim_id"));
    if (kind == "consulted") {
        e.kind = SessionEvent::Kind::consulted;
        e.source_id = as_id(o.req("source_id"), o.at("source_id"));
        e.supports_current_stance = as_bool(o.req("supports_current_stance"), o.at("supports_current_stance"));
    } else if (kind == "committed") {
        e.kind = SessionEvent::Kind::committed;
        if (const auto* v = o.opt("verdict")) e.verdict = as_enum<Verdict>(*v, o.at("verdict"), parse_verdict, "verdict");
    } else {
        throw DataError(o.at("kind"), "unknown event kind '" + kind + "'");
    }
    o.done();
    return e;
}

SessionLog session_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    SessionLog s;
    s.id = as_id(o.req("id"), o.at("id"));
    s.profile_id = as_id(o.req("profile"), o.at("profile"));
    s.policy_id = as_id(o.req("policy"), o.at("policy"));
    if (const auto* l = o.opt("lattice")) s.lattice_id = as_id(*l, o.at("lattice"));
    if (const auto* ev = o.opt("events")) {
        const auto& arr = as_array(*ev, o.at("events"));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            s.events.push_back(session_event_from_json(arr[i], o.at("events") + "/" + std::to_string(i)));
        }
    }
    o.done();
    for (std::size_t i = 1; i < s.events.size(); ++i) {
        if (s.events[i].step <= s.events[i - 1].step) {
            throw DataError(path + "/events/" + std::to_string(i) + "/step", "steps must strictly increase");
        }
    }
    return s;
}

NewInformation new_information_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    NewInformation info;
    info.claim = claim_from_json(o.req("claim"), o.at("claim"));
    info.source_id = as_id(o.req("source_id"), o.at("source_id"));
    if (const auto* e = o.opt("edges")) {
        const auto& arr = as_array(*e, o.at("edges"));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            info.edges.push_back(edge_from_json(arr[i], o.at("edges") + "/" + std::to_string(i)));
        }
    }
    if (const auto* a = o.opt("anchors")) {
        const auto& arr = as_array(*a, o.at("anchors"));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            info.anchors.push_back(anchor_from_json(arr[i], o.at("anchors") + "/" + std::to_string(i)));
        }
    }
    o.done();
    return info;
}

RevisionEntry revision_entry_from_json(const Json& j, const std::string& path) {
    Obj o(j, path);
    RevisionEntry e;
    const auto& id = o.req("id");
    if (!id.is_number_unsigned()) throw DataError(o.at("id"), "expected a non-negative integer");
    e.id = id.get<std::uint64_t>();
    {
        Obj t(o.req("trigger"), o.at("trigger"));
        e.trigger_claim = as_string(t.req("claim_id"), t.at("claim_id"));
        e.trigger_source = as_string(t.req("source_id"), t.at("source_id"));
        t.done();
    }
    e.disposition = as_enum<Disposition>(o.req("disposition"), o.at("disposition"), parse_disposition, "disposition");
    if (const auto* r = o.opt("retracted")) {
        Obj ro(*r, o.at("retracted"));
        if (const auto* a = ro.opt("anchors")) {
            const auto& arr = as_array(*a, ro.at("anchors"));
            for (std::size_t i = 0; i < arr.size(); ++i) {
                e.retracted_anchors.push_back(anchor_from_json(arr[i], ro.at("anchors") + "/" + std::to_string(i)));
            }
        }
        if (const auto* x = ro.opt("edges")) {
            const auto& arr = as_array(*x, ro.at("edges"));
            for (std::size_t i = 0; i < arr.size(); ++i) {
                e.retracted_edges.push_back(edge_from_json(arr[i], ro.at("edges") + "/" + std::to_string(i)));
            }
        }
        ro.done();
    }
    if (const auto* a = o.opt("added")) {
        Obj ao(*a, o.at("added"));
        auto list = [&](const char* key, std::vector<std::string>& out) {
            if (const auto* x = ao.opt(key)) {
                const auto& arr = as_array(*x, ao.at(key));
                for (std::size_t i = 0; i < arr.size(); ++i) {
                    out.push_back(as_id(arr[i], ao.at(key) + "/" + std::to_string(i)));
                }
            }
        };
        list("nodes", e.added_nodes);
        list("edges", e.added_edges);
        list("anchors", e.added_anchors);
        ao.done();
    }
    if (const auto* r = o.opt("reverses")) {
        if (!r->is_number_unsigned()) throw DataError(o.at("reverses"), "expected a non-negative integer");
        e.reverses = r->get<std::uint64_t>();
    }
    if (const auto* c = o.opt("context")) e.context = as_string(*c, o.at("context"));
    o.done();
    return e;
}

// ---------------------------------------------------------------------------
// Bundle

const AgentProfile& Bundle::profile(const std::string& id) const {
    auto it = profiles.find(id);
    if (it == profiles.end()) throw NotFound("unknown profile '" + id + "'");
    return it->second;
}

const TrustPolicy& Bundle::policy(const std::string& id) const {
    auto it = policies.find(id);
    if (it == policies.end()) throw NotFound("unknown policy '" + id + "'");
    return it->second;
}

const SessionLog& Bundle::session(const std::string& id) const {
    auto it = sessions.find(id);
    if (it == sessions.end()) throw NotFound("unknown session '" + id + "'");
    return it->second;
}

const EpistemicState& Bundle::state(const std::string& id) const {
    auto it = states.find(id);
    if (it == states.end()) throw NotFound("unknown state '" + id + "'");
    return it->second;
}

const EpistemicState* Bundle::state_for_lattice(const std::string& id) const {
    for (const auto& [_, s] : states) {
        if (s.lattice.id == id) return &s;
    }
    auto it = states.find(id);
    return it == states.end() ? nullptr : &it->second;
}

const TrustLattice& Bundle::lattice(const std::string& id) const {
    if (auto it = lattices.find(id); it != lattices.end()) return it->second;
    if (const auto* s = state_for_lattice(id)) return s->lattice;
    throw NotFound("unknown lattice '" + id + "'");
}

namespace {

void check_lattice_sources(const TrustLattice& l, const SourceTable& sources, const std::string& path) {
    for (const auto& [id, e] : l.edges) {
        if (e.kind == EdgeKind::sourced_from && !sources.contains(e.from)) {
            throw DataError(path + "/edges/" + id + "/from", "dangling reference to source '" + e.from + "'");
        }
    }
    for (const auto& [id, a] : l.anchors) {
        if (a.source_id && !sources.contains(*a.source_id)) {
            throw DataError(path + "/anchors/" + id + "/source_id",
                            "dangling reference to source '" + *a.source_id + "'");
        }
    }
}

ClaimCorpus corpus_from_json(const Json& j, const std::string& path, const SourceTable& sources) {
    Obj o(j, path);
    ClaimCorpus c;
    if (const auto* x = o.opt("claims")) {
        c.claims = read_id_array<Claim>(*x, o.at("claims"), claim_from_json, [](const Claim& cl) { return cl.id; });
    }
    if (const auto* x = o.opt("links")) {
        const auto& arr = as_array(*x, o.at("links"));
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto p = o.at("links") + "/" + std::to_string(i);
            auto e = edge_from_json(arr[i], p);
            if (!e.evaluative()) throw DataError(p + "/kind", "corpus links must be supports, attacks or evidence_for");
            if (!c.claims.contains(e.from)) {
                throw DataError(p + "/from", "edge '" + e.id + "' has a dangling reference to claim '" + e.from + "'");
            }
            if (!c.claims.contains(e.to)) {
                throw DataError(p + "/to", "edge '" + e.id + "' has a dangling reference to claim '" + e.to + "'");
            }
            const std::string id = e.id;
            if (!c.links.emplace(id, std::move(e)).second) throw DataError(p, "duplicate id '" + id + "'");
        }
    }
    if (const auto* x = o.opt("attachments")) {
        if (!x->is_object()) throw DataError(o.at("attachments"), "expected an object");
        for (auto it = x->begin(); it != x->end(); ++it) {
            const auto p = o.at("attachments") + "/" + it.key();
            if (!c.claims.contains(it.key())) throw DataError(p, "dangling reference to claim '" + it.key() + "'");
            auto srcs = as_string_set(*it, p);
            for (const auto& s : srcs) {
                if (!sources.contains(s)) throw DataError(p, "dangling reference to source '" + s + "'");
            }
            c.attachments[it.key()] = std::move(srcs);
        }
    }
    o.done();
    for (const auto& [id, claim] : c.claims) {
        for (const auto& other : claim.mutually_exclusive_with) {
            if (!c.claims.contains(other)) {
                throw DataError(path + "/claims/" + id + "/mutually_exclusive_with",
                                "dangling reference to claim '" + other + "'");
            }
        }
    }
    c.close_exclusivity();
    return c;
}

LexiconRef lexicon_from_json(const Json& j, const std::string& path, const std::filesystem::path& base_dir) {
    Obj o(j, path);
    LexiconRef ref;
    if (const auto* p = o.opt("path")) {
        ref.path = as_string(*p, o.at("path"));
        ref.lexicon = load_lexicon_tsv(base_dir / *ref.path);
    } else {
        if (const auto* n = o.opt("name")) ref.lexicon.set_name(as_string(*n, o.at("name")));
        if (const auto* v = o.opt("version")) ref.lexicon.set_version(as_string(*v, o.at("version")));
        if (const auto* e = o.opt("entries")) {
            if (!e->is_object()) throw DataError(o.at("entries"), "expected an object");
            for (auto it = e->begin(); it != e->end(); ++it) {
                const auto p = o.at("entries") + "/" + it.key();
                auto v = foundation_vector_from_json(*it, p);
                try {
                    ref.lexicon.add(it.key(), v);
                } catch (const DataError& err) {
                    throw DataError(p, err.what());
                }
            }
        }
    }
    o.done();
    return ref;
}

}  // namespace

Bundle parse_bundle(std::string_view bytes, const std::filesystem::path& base_dir) {
    const Json root = parse_json_text(bytes, "");
    Obj o(root, "");
    Bundle b;

    if (const auto* s = o.opt("sources")) {
        b.sources = read_id_array<SourceRecord>(*s, "/sources", source_from_json, [](const SourceRecord& x) { return x.id; });
    }
    if (const auto* c = o.opt("corpus")) b.corpus = corpus_from_json(*c, "/corpus", b.sources);
    if (const auto* p = o.opt("policies")) {
        b.policies = read_id_array<TrustPolicy>(*p, "/policies", policy_from_json, [](const TrustPolicy& x) { return x.id; });
    }
    if (const auto* l = o.opt("lexicon")) b.lexicon = lexicon_from_json(*l, "/lexicon", base_dir);
    if (const auto* l = o.opt("lattices")) {
        b.lattices = read_id_array<TrustLattice>(*l, "/lattices", lattice_from_json, [](const TrustLattice& x) { return x.id; });
    }
    for (const auto& [id, l] : b.lattices) check_lattice_sources(l, b.sources, "/lattices/" + id);

    std::map<std::string, Json> raw_states;
    if (const auto* s = o.opt("states")) {
        const auto& arr = as_array(*s, "/states");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            const auto p = "/states/" + std::to_string(i);
            Obj so(arr[i], p);
            EpistemicState st;
            st.id = as_id(so.req("id"), so.at("id"));
            st.profile_id = as_id(so.req("profile"), so.at("profile"));
            st.policy_id = as_id(so.req("policy"), so.at("policy"));
            st.lattice = lattice_from_json(so.req("lattice"), so.at("lattice"));
            check_lattice_sources(st.lattice, b.sources, so.at("lattice"));
            if (const auto* ev = so.opt("evaluation")) raw_states[st.id] = *ev;
            if (const auto* log = so.opt("revision_log")) {
                const auto& la = as_array(*log, so.at("revision_log"));
                for (std::size_t k = 0; k < la.size(); ++k) {
                    st.revision_log.push_back(
                        revision_entry_from_json(la[k], so.at("revision_log") + "/" + std::to_string(k)));
                    if (k > 0 && st.revision_log[k].id <= st.revision_log[k - 1].id) {
                        throw DataError(so.at("revision_log") + "/" + std::to_string(k) + "/id",
                                        "revision ids must increase");
                    }
                }
            }
            so.done();
            const std::string sid = st.id;
            if (!b.states.emplace(sid, std::move(st)).second) throw DataError(p, "duplicate id '" + sid + "'");
        }
    }

    // Profiles are read after lattices so claim references can resolve against them.
    if (const auto* p = o.opt("profiles")) {
        b.profiles = read_id_array<AgentProfile>(*p, "/profiles", profile_from_json, [](const AgentProfile& x) { return x.id; });
    }
    auto claim_known = [&](const std::string& id) {
        if (b.corpus.claims.contains(id)) return true;
        for (const auto& [_, l] : b.lattices) {
            if (l.nodes.contains(id)) return true;
        }
        for (const auto& [_, s] : b.states) {
            if (s.lattice.nodes.contains(id)) return true;
        }
        return false;
    };
    for (const auto& [pid, prof] : b.profiles) {
        const std::string pp = "/profiles/" + pid;
        for (const auto& [claim, _] : prof.beliefs) {
            if (!claim_known(claim)) throw DataError(pp + "/beliefs/" + claim, "dangling reference to claim '" + claim + "'");
        }
        for (const auto& [claim, _] : prof.pretrusted) {
            if (!claim_known(claim)) {
                throw DataError(pp + "/pretrusted/" + claim, "dangling reference to claim '" + claim + "'");
            }
        }
        for (const auto& [src, _] : prof.source_trust) {
            if (!b.sources.contains(src)) {
                throw DataError(pp + "/source_trust/" + src, "dangling reference to source '" + src + "'");
            }
        }
    }

    if (const auto* s = o.opt("sessions")) {
        b.sessions = read_id_array<SessionLog>(*s, "/sessions", session_from_json, [](const SessionLog& x) { return x.id; });
    }
    o.done();

    for (auto& [sid, st] : b.states) {
        const std::string p = "/states/" + sid;
        if (!b.profiles.contains(st.profile_id)) throw DataError(p + "/profile", "dangling reference to profile '" + st.profile_id + "'");
        if (!b.policies.contains(st.policy_id)) throw DataError(p + "/policy", "dangling reference to policy '" + st.policy_id + "'");
        try {
            st.evaluation = evaluate(st.lattice, b.profiles.at(st.profile_id), b.sources, b.policies.at(st.policy_id),
                                     b.lexicon.lexicon);
        } catch (const NotFound& e) {
            throw DataError(p + "/lattice", e.what());
        }
        if (auto raw = raw_states.find(sid); raw != raw_states.end()) {
            if (raw->second != evaluation_snapshot(st.evaluation)) {
                throw DataError(p + "/evaluation", "stored evaluation is stale for this lattice, profile and policy");
            }
        }
    }
    for (const auto& [sid, s] : b.sessions) {
        const std::string p = "/sessions/" + sid;
        if (!b.profiles.contains(s.profile_id)) throw DataError(p + "/profile", "dangling reference to profile '" + s.profile_id + "'");
        if (!b.policies.contains(s.policy_id)) throw DataError(p + "/policy", "dangling reference to policy '" + s.policy_id + "'");
        if (!s.lattice_id.empty() && !b.lattices.contains(s.lattice_id) && !b.state_for_lattice(s.lattice_id)) {
            throw DataError(p + "/lattice", "dangling reference to lattice '" + s.lattice_id + "'");
        }
        for (std::size_t i = 0; i < s.events.size(); ++i) {
            const auto& e = s.events[i];
            if (e.kind == SessionEvent::Kind::consulted && !b.sources.contains(e.source_id)) {
                throw DataError(p + "/events/" + std::to_string(i) + "/source_id",
                                "dangling reference to source '" + e.source_id + "'");
            }
        }
    }
    return b;
}

Bundle load_bundle(const std::filesystem::path& file) {
    const auto text = read_file(file);
    return parse_bundle(text, file.parent_path());
}

}  // namespace mevir
