#include "mevir/service.hpp"

#include <httplib.h>

#include <regex>

#include "mevir/api.hpp"
#include "mevir/error.hpp"
#include "mevir/recommend.hpp"
#include "mevir/version.hpp"

namespace mevir {

namespace {

std::optional<std::string> query(const ApiRequest& req, const std::string& key) {
    auto it = req.query.find(key);
    if (it == req.query.end()) return std::nullopt;
    return it->second;
}

Json body_json(const ApiRequest& req, bool allow_empty) {
    if (req.body.find_first_not_of(" \t\r\n") == std::string::npos) {
        if (allow_empty) return Json::object();
        throw DataError("/", "request body is required");
    }
    return parse_json_text(req.body, "/");
}

std::optional<std::uint64_t> if_match(const ApiRequest& req) {
    auto it = req.headers.find("if-match");
    if (it == req.headers.end()) return std::nullopt;
    std::string v = it->second;
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"') v = v.substr(1, v.size() - 2);
    try {
        std::size_t used = 0;
        const auto n = std::stoull(v, &used);
        if (used == v.size()) return n;
    } catch (const std::exception&) {
    }
    throw DataError("If-Match", "expected a version number");
}

double parse_number(const std::string& text, const std::string& path) {
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used == text.size()) return v;
    } catch (const std::exception&) {
    }
    throw DataError(path, "expected a number");
}

/// What-if overrides: foundation weights, per-source trust, and policy fields.
std::pair<AgentProfile, TrustPolicy> apply_overrides(const Json& body, const Bundle& bundle, AgentProfile profile,
                                                     TrustPolicy policy) {
    if (!body.is_object()) throw DataError("/", "expected an object");
    Json policy_fields = Json::object();
    for (auto it = body.begin(); it != body.end(); ++it) {
        const auto& key = it.key();
        if (key == "foundation_weights") {
            profile.foundation_weights =
                foundation_vector_from_json(*it, "/foundation_weights", true, profile.foundation_weights);
        } else if (key == "source_trust") {
            if (!it->is_object()) throw DataError("/source_trust", "expected an object");
            for (auto s = it->begin(); s != it->end(); ++s) {
                const auto path = "/source_trust/" + s.key();
                if (!bundle.sources.contains(s.key())) throw DataError(path, "dangling reference to source '" + s.key() + "'");
                profile.source_trust[s.key()] = source_trust_from_json(*s, path);
            }
        } else if (key == "profile" || key == "policy" || key == "id") {
            throw DataError("/" + key, "unknown field");
        } else {
            policy_fields[key] = *it;
        }
    }
    policy = policy_overrides_from_json(policy_fields, "", policy);
    return {std::move(profile), std::move(policy)};
}

}  // namespace

struct Service::Route {
    std::string method;
    std::regex pattern;
    std::function<ApiResponse(Service&, const std::smatch&, const ApiRequest&)> run;
};

Service::Service(Bundle bundle, ServiceOptions options)
    : bundle_(std::move(bundle)), hash_(mevir::bundle_hash(bundle_)), options_(std::move(options)) {}

Bundle Service::bundle() const {
    std::shared_lock lock(mutex_);
    return bundle_;
}

std::string Service::bundle_hash() const {
    std::shared_lock lock(mutex_);
    return hash_;
}

ApiResponse Service::ok(const Json& data) const {
    ApiResponse r;
    const Json body{{"engine_version", kEngineVersion}, {"bundle_hash", hash_}, {"data", data}};
    r.body = dump_canonical(body);
    r.headers["X-Mevir-Version"] = kEngineVersion;
    r.headers["X-Bundle-Hash"] = hash_;
    return r;
}

ApiResponse Service::error(int status, const std::string& path, const std::string& message) const {
    ApiResponse r;
    r.status = status;
    const Json body{{"engine_version", kEngineVersion},
                    {"bundle_hash", hash_},
                    {"error", Json{{"status", status}, {"path", path}, {"message", message}}}};
    r.body = dump_canonical(body);
    r.headers["X-Mevir-Version"] = kEngineVersion;
    r.headers["X-Bundle-Hash"] = hash_;
    return r;
}

std::mutex& Service::writer_lock(const std::string& key) {
    std::lock_guard lock(writers_mutex_);
    auto& slot = writers_[key];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

ApiResponse Service::handle(const ApiRequest& request) {
    static const std::vector<Route> routes = {
        {"GET", std::regex("^/api/lattices/?$"),
         [](Service& s, const std::smatch&, const ApiRequest&) { return s.list_lattices(); }},
        {"GET", std::regex("^/api/lattices/([^/]+)$"),
         [](Service& s, const std::smatch& m, const ApiRequest& r) { return s.get_lattice(m[1], r); }},
        {"POST", std::regex("^/api/lattices/([^/]+)/evaluate$"),
         [](Service& s, const std::smatch& m, const ApiRequest& r) { return s.what_if(m[1], r); }},
        {"POST", std::regex("^/api/states/([^/]+)/revise$"),
         [](Service& s, const std::smatch& m, const ApiRequest& r) { return s.revise_state(m[1], r); }},
        {"POST", std::regex("^/api/states/([^/]+)/reinstate$"),
         [](Service& s, const std::smatch& m, const ApiRequest& r) { return s.reinstate_state(m[1], r); }},
        {"GET", std::regex("^/api/sessions/([^/]+)/nudges$"),
         [](Service& s, const std::smatch& m, const ApiRequest& r) { return s.nudges(m[1], r); }},
        {"POST", std::regex("^/api/sessions/([^/]+)/events$"),
         [](Service& s, const std::smatch& m, const ApiRequest& r) { return s.append_events(m[1], r); }},
        {"GET", std::regex("^/api/recommend$"),
         [](Service& s, const std::smatch&, const ApiRequest& r) { return s.recommend(r); }},
        {"GET", std::regex("^/api/footprint$"),
         [](Service& s, const std::smatch&, const ApiRequest& r) { return s.footprint(r); }},
    };

    bool path_known = false;
    for (const auto& route : routes) {
        std::smatch m;
        if (!std::regex_match(request.path, m, route.pattern)) continue;
        path_known = true;
        if (route.method != request.method) continue;
        try {
            return route.run(*this, m, request);
        } catch (const DataError& e) {
            std::shared_lock lock(mutex_);
            return error(400, e.path(), e.what());
        } catch (const NotFound& e) {
            std::shared_lock lock(mutex_);
            return error(404, request.path, e.what());
        } catch (const StateError& e) {
            std::shared_lock lock(mutex_);
            return error(400, request.path, e.what());
        } catch (const Json::exception& e) {
            std::shared_lock lock(mutex_);
            return error(400, "/", e.what());
        }
    }
    std::shared_lock lock(mutex_);
    if (path_known) return error(405, request.path, "method not allowed");
    return error(404, request.path, "no such endpoint");
}

ApiResponse Service::list_lattices() const {
    std::shared_lock lock(mutex_);
    Json items = Json::array();
    for (const auto& [id, l] : bundle_.lattices) {
        items.push_back(Json{{"id", id}, {"target_claim_id", l.target_claim_id}, {"state", nullptr}});
    }
    for (const auto& [sid, st] : bundle_.states) {
        items.push_back(Json{{"id", st.lattice.id},
                             {"target_claim_id", st.lattice.target_claim_id},
                             {"state", sid},
                             {"profile", st.profile_id},
                             {"policy", st.policy_id},
                             {"version", st.revision_log.size()}});
    }
    return ok(Json{{"lattices", items}});
}

ApiResponse Service::get_lattice(const std::string& id, const ApiRequest& req) const {
    std::shared_lock lock(mutex_);
    const auto binding = bind_lattice(bundle_, id, query(req, "profile") ? query(req, "profile") : options_.default_profile,
                                      query(req, "policy") ? query(req, "policy") : options_.default_policy);
    Json data{{"lattice", to_json(*binding.lattice)}, {"evaluation", evaluation_payload(bundle_, binding, true)}};
    if (binding.state) {
        data["state"] = binding.state->id;
        data["version"] = binding.state->revision_log.size();
    } else {
        data["state"] = nullptr;
    }
    return ok(data);
}

ApiResponse Service::what_if(const std::string& id, const ApiRequest& req) const {
    const Json body = body_json(req, true);
    std::shared_lock lock(mutex_);
    const auto binding = bind_lattice(bundle_, id, query(req, "profile") ? query(req, "profile") : options_.default_profile,
                                      query(req, "policy") ? query(req, "policy") : options_.default_policy);
    auto [profile, policy] = apply_overrides(body, bundle_, *binding.profile, *binding.policy);
    LatticeBinding what_if = binding;
    what_if.profile = &profile;
    what_if.policy = &policy;
    return ok(Json{{"evaluation", evaluation_payload(bundle_, what_if, true)}});
}

ApiResponse Service::revise_state(const std::string& id, const ApiRequest& req) {
    const Json body = body_json(req, false);
    const auto info = new_information_from_json(body, "");
    auto& writer = writer_lock("state:" + id);
    std::unique_lock guard(writer, std::try_to_lock);
    if (!guard.owns_lock()) {
        std::shared_lock lock(mutex_);
        return error(409, "/api/states/" + id, "another write to this state is in progress");
    }

    EpistemicState next;
    {
        std::shared_lock lock(mutex_);
        const auto& state = bundle_.state(id);
        if (auto v = if_match(req); v && *v != state.revision_log.size()) {
            return error(409, "If-Match", "state version is " + std::to_string(state.revision_log.size()));
        }
        if (!bundle_.sources.contains(info.source_id)) {
            throw DataError("/source_id", "dangling reference to source '" + info.source_id + "'");
        }
        const RevisionContext ctx{bundle_.profile(state.profile_id), bundle_.sources, bundle_.policy(state.policy_id),
                                  bundle_.lexicon.lexicon};
        next = revise(state, info, ctx);
    }
    std::unique_lock lock(mutex_);
    auto& slot = bundle_.states.at(id);
    slot = std::move(next);
    hash_ = mevir::bundle_hash(bundle_);
    return ok(Json{{"state", id},
                   {"version", slot.revision_log.size()},
                   {"entry", to_json(slot.revision_log.back())},
                   {"evaluation", to_json(slot.evaluation, false)}});
}

ApiResponse Service::reinstate_state(const std::string& id, const ApiRequest& req) {
    const Json body = body_json(req, false);
    std::uint64_t revision_id = 0;
    {
        if (!body.is_object()) throw DataError("/", "expected an object");
        for (auto it = body.begin(); it != body.end(); ++it) {
            if (it.key() != "revision_id") throw DataError("/" + it.key(), "unknown field");
        }
        auto it = body.find("revision_id");
        if (it == body.end()) throw DataError("/revision_id", "missing required field");
        if (!it->is_number_unsigned()) throw DataError("/revision_id", "expected a non-negative integer");
        revision_id = it->get<std::uint64_t>();
    }
    auto& writer = writer_lock("state:" + id);
    std::unique_lock guard(writer, std::try_to_lock);
    if (!guard.owns_lock()) {
        std::shared_lock lock(mutex_);
        return error(409, "/api/states/" + id, "another write to this state is in progress");
    }

    EpistemicState next;
    {
        std::shared_lock lock(mutex_);
        const auto& state = bundle_.state(id);
        if (auto v = if_match(req); v && *v != state.revision_log.size()) {
            return error(409, "If-Match", "state version is " + std::to_string(state.revision_log.size()));
        }
        const RevisionContext ctx{bundle_.profile(state.profile_id), bundle_.sources, bundle_.policy(state.policy_id),
                                  bundle_.lexicon.lexicon};
        next = reinstate(state, revision_id, ctx);
    }
    std::unique_lock lock(mutex_);
    auto& slot = bundle_.states.at(id);
    slot = std::move(next);
    hash_ = mevir::bundle_hash(bundle_);
    return ok(Json{{"state", id},
                   {"version", slot.revision_log.size()},
                   {"entry", to_json(slot.revision_log.back())},
                   {"evaluation", to_json(slot.evaluation, false)}});
}

ApiResponse Service::nudges(const std::string& id, const ApiRequest& req) const {
    std::shared_lock lock(mutex_);
    Json diag = diagnosis_payload(bundle_, id, query(req, "lattice"));
    Json nudges = Json::array();
    for (const auto& f : diag["flags"]) {
        nudges.push_back(Json{{"kind", f["kind"]},
                              {"severity", f["severity"]},
                              {"message", f["explanation"]},
                              {"diagnosis", f["mevir_diagnosis"]}});
    }
    diag["nudges"] = nudges;
    return ok(diag);
}

ApiResponse Service::append_events(const std::string& id, const ApiRequest& req) {
    const Json body = body_json(req, false);
    std::vector<SessionEvent> events;
    {
        if (!body.is_object()) throw DataError("/", "expected an object");
        for (auto it = body.begin(); it != body.end(); ++it) {
            if (it.key() != "events") throw DataError("/" + it.key(), "unknown field");
        }
        auto it = body.find("events");
        if (it == body.end() || !it->is_array()) throw DataError("/events", "expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            events.push_back(session_event_from_json((*it)[i], "/events/" + std::to_string(i)));
        }
    }
    auto& writer = writer_lock("session:" + id);
    std::unique_lock guard(writer, std::try_to_lock);
    if (!guard.owns_lock()) {
        std::shared_lock lock(mutex_);
        return error(409, "/api/sessions/" + id, "another write to this session is in progress");
    }

    SessionLog next;
    {
        std::shared_lock lock(mutex_);
        next = bundle_.session(id);
        if (auto v = if_match(req); v && *v != next.events.size()) {
            return error(409, "If-Match", "session version is " + std::to_string(next.events.size()));
        }
        for (std::size_t i = 0; i < events.size(); ++i) {
            const auto& e = events[i];
            if (e.kind == SessionEvent::Kind::consulted && !bundle_.sources.contains(e.source_id)) {
                throw DataError("/events/" + std::to_string(i) + "/source_id",
                                "dangling reference to source '" + e.source_id + "'");
            }
            if (!next.events.empty() && e.step <= next.events.back().step) {
                throw DataError("/events/" + std::to_string(i) + "/step", "steps must strictly increase");
            }
            next.events.push_back(e);
        }
    }
    std::unique_lock lock(mutex_);
    auto& slot = bundle_.sessions.at(id);
    slot = std::move(next);
    hash_ = mevir::bundle_hash(bundle_);
    return ok(Json{{"session", to_json(slot)}, {"version", slot.events.size()}});
}

ApiResponse Service::recommend(const ApiRequest& req) const {
    const auto topic = query(req, "topic");
    if (!topic || topic->empty()) throw DataError("topic", "query parameter is required");
    std::size_t k = kDefaultRecommendK;
    if (auto v = query(req, "k")) {
        const double d = parse_number(*v, "k");
        if (d < 1 || d != static_cast<double>(static_cast<std::size_t>(d))) throw DataError("k", "must be a positive integer");
        k = static_cast<std::size_t>(d);
    }
    double min_rep = kDefaultMinReputation;
    if (auto v = query(req, "min_reputation")) {
        min_rep = parse_number(*v, "min_reputation");
        if (min_rep < 0.0 || min_rep > 1.0) throw DataError("min_reputation", "must lie in [0,1]");
    }
    std::shared_lock lock(mutex_);
    return ok(recommend_payload(bundle_, *topic, k, min_rep));
}

ApiResponse Service::footprint(const ApiRequest& req) const {
    const auto text = query(req, "text").value_or("");
    std::shared_lock lock(mutex_);
    return ok(footprint_payload(compute_footprint(text, bundle_.lexicon.lexicon)));
}

bool run_http(Service& service, const std::string& host, int port) {
    httplib::Server server;
    auto forward = [&service](const httplib::Request& req, httplib::Response& res) {
        ApiRequest api;
        api.method = req.method;
        api.path = req.path;
        for (const auto& [k, v] : req.params) api.query.emplace(k, v);
        for (const auto& [k, v] : req.headers) {
            std::string key = k;
            for (auto& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            api.headers.emplace(key, v);
        }
        api.body = req.body;
        const auto out = service.handle(api);
        res.status = out.status;
        for (const auto& [k, v] : out.headers) res.set_header(k, v);
        res.set_content(out.body, "application/json");
    };
    server.Get(R"(/.*)", forward);
    server.Post(R"(/.*)", forward);
    server.Put(R"(/.*)", forward);
    server.Delete(R"(/.*)", forward);
    return server.listen(host, port);
}

}  // namespace mevir
