#pragma once

#include <nlohmann/json.hpp>

#include <stdexcept>
#include <string>
#include <string_view>

namespace symdist {

/// Category of a failure raised by the engine. The same kinds travel over
/// the CLI (exit codes) and the HTTP API (`{error:{kind, detail, witness}}`).
enum class ErrorKind {
    validation,
    range,
    not_found,
    config,
    format,
    audit,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, std::string detail, nlohmann::json witness = nlohmann::json::object());

    ErrorKind kind() const noexcept { return kind_; }
    const std::string& detail() const noexcept { return detail_; }
    const nlohmann::json& witness() const noexcept { return witness_; }

    /// `{"error": {"kind": ..., "detail": ..., "witness": ...}}`
    nlohmann::json to_json() const;

private:
    ErrorKind kind_;
    std::string detail_;
    nlohmann::json witness_;
};

}  // namespace symdist
