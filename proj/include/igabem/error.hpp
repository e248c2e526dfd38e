#pragma once

#include <stdexcept>
#include <string>

namespace igabem {

// Base of every error raised by the library; kind() is a stable machine tag.
class Error : public std::runtime_error {
public:
    Error(std::string kind, const std::string& what)
        : std::runtime_error(what), kind_(std::move(kind)) {}
    const std::string& kind() const noexcept { return kind_; }

private:
    std::string kind_;
};

struct DomainError : Error {
    explicit DomainError(const std::string& w) : Error("domain", w) {}
};
struct ConstructionError : Error {
    explicit ConstructionError(const std::string& w) : Error("construction", w) {}
};
struct GeometryError : Error {
    explicit GeometryError(const std::string& w) : Error("geometry", w) {}
};
struct UsageError : Error {
    explicit UsageError(const std::string& w) : Error("usage", w) {}
};
struct MetricError : Error {
    explicit MetricError(const std::string& w) : Error("metric", w) {}
};
struct SolverError : Error {
    explicit SolverError(const std::string& w) : Error("solver", w) {}
};
struct ConfigError : Error {
    explicit ConfigError(const std::string& w) : Error("config", w) {}
};

}  // namespace igabem
