#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mevir {

/// Base class for all engine errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input data violates a schema, range, or referential rule. `path` addresses
/// the offending location (e.g. `/corpus/links/3/to`).
class DataError : public Error {
public:
    DataError(std::string path, const std::string& message)
        : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

/// Evidence cycle met where a DAG is required. `cycle()` lists the node ids.
class CycleError : public DataError {
public:
    CycleError(std::string path, std::vector<std::string> cycle)
        : DataError(std::move(path), "evidence cycle through {" + join_ids(cycle) + "}"), cycle_(std::move(cycle)) {}

    const std::vector<std::string>& cycle() const noexcept { return cycle_; }

private:
    static std::string join_ids(const std::vector<std::string>& ids) {
        std::string out;
        for (const auto& id : ids) out += (out.empty() ? "" : ", ") + id;
        return out;
    }
    std::vector<std::string> cycle_;
};

/// Lookup of an id that does not exist.
class NotFound : public Error {
public:
    using Error::Error;
};

/// Operation precondition not met (e.g. reinstating a non-applied revision).
class StateError : public Error {
public:
    using Error::Error;
};

}  // namespace mevir
