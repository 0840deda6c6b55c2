#include "symdist/error.hpp"

#include <utility>

namespace symdist {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::validation: return "VALIDATION";
        case ErrorKind::range: return "RANGE";
        case ErrorKind::not_found: return "NOT_FOUND";
        case ErrorKind::config: return "CONFIG";
        case ErrorKind::format: return "FORMAT";
        case ErrorKind::audit: return "AUDIT";
    }
    return "UNKNOWN";
}

Error::Error(ErrorKind kind, std::string detail, nlohmann::json witness)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(std::move(detail)),
      witness_(std::move(witness)) {}

nlohmann::json Error::to_json() const {
    return {{"error", {{"kind", to_string(kind_)}, {"detail", detail_}, {"witness", witness_}}}};
}

}  // namespace symdist
