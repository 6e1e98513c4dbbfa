#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>

#include "mevir/bundle.hpp"

namespace mevir {

struct ApiRequest {
    std::string method;  // GET or POST
    std::string path;
    std::map<std::string, std::string> query;
    std::map<std::string, std::string> headers;  // lowercase names
    std::string body;
};

struct ApiResponse {
    int status = 200;
    std::map<std::string, std::string> headers;
    std::string body;
};

struct ServiceOptions {
    /// Profile and policy used for lattices that do not belong to a state.
    std::optional<std::string> default_profile;
    std::optional<std::string> default_policy;
};

/// In-memory bundle store behind the JSON API. Reads run concurrently; each
/// state and session has a single writer, and a competing write gets 409.
/// Writes may carry `If-Match: <version>` where version is the revision-log
/// length (states) or event count (sessions).
class Service {
public:
    explicit Service(Bundle bundle, ServiceOptions options = {});

    ApiResponse handle(const ApiRequest& request);

    /// Snapshot of the current bundle.
    Bundle bundle() const;
    std::string bundle_hash() const;

private:
    struct Route;

    ApiResponse list_lattices() const;
    ApiResponse get_lattice(const std::string& id, const ApiRequest& req) const;
    ApiResponse what_if(const std::string& id, const ApiRequest& req) const;
    ApiResponse revise_state(const std::string& id, const ApiRequest& req);
    ApiResponse reinstate_state(const std::string& id, const ApiRequest& req);
    ApiResponse nudges(const std::string& id, const ApiRequest& req) const;
    ApiResponse append_events(const std::string& id, const ApiRequest& req);
    ApiResponse recommend(const ApiRequest& req) const;
    ApiResponse footprint(const ApiRequest& req) const;

    ApiResponse ok(const Json& data) const;
    ApiResponse error(int status, const std::string& path, const std::string& message) const;
    std::mutex& writer_lock(const std::string& key);

    mutable std::shared_mutex mutex_;
    Bundle bundle_;
    std::string hash_;
    ServiceOptions options_;
    std::mutex writers_mutex_;
    std::map<std::string, std::unique_ptr<std::mutex>> writers_;
};

/// Serves `service` over HTTP until the process stops. Returns false when the
/// port cannot be bound.
bool run_http(Service& service, const std::string& host, int port);

}  // namespace mevir
