#pragma once

#include "symdist/diagnosis.hpp"
#include "symdist/error.hpp"
#include "symdist/knowledge_base.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

namespace symdist {

/// JSON request handlers shared by the HTTP service and the CLI, so both
/// paths emit the same payload for the same inputs. Each throws `Error`.
namespace api {

nlohmann::json health(const KnowledgeBase& kb);
nlohmann::json schema(const KnowledgeBase& kb);
nlohmann::json ontology(const KnowledgeBase& kb);
/// `{values: [..]}` -> `{code, values}`
nlohmann::json encode(const KnowledgeBase& kb, const nlohmann::json& request);
/// `{code}` -> `{code, values, labels}`
nlohmann::json decode(const KnowledgeBase& kb, const nlohmann::json& request);
/// `{a, b}` (codes or element vectors) -> `{a, b, distance, element_distances}`
nlohmann::json distance(const KnowledgeBase& kb, const nlohmann::json& request);
/// `{case_id?, symptoms: [...], k?, lambda?}` -> ranked diagnosis
nlohmann::json diagnose(const KnowledgeBase& kb, const nlohmann::json& request, const ListDistanceParams& defaults,
                        std::size_t max_symptoms);
nlohmann::json disease(const KnowledgeBase& kb, std::string_view id);

}  // namespace api

struct ServiceConfig {
    std::string host = "127.0.0.1";
    int port = 8080;
    std::filesystem::path bundle_dir;
    ListDistanceParams defaults;
    std::size_t max_body_bytes = 1 << 20;
    std::size_t max_symptoms = 256;
    /// Required in `X-Admin-Token` for POST /v1/admin/reload; empty disables reload.
    std::string admin_token;
};

struct HttpResponse {
    int status = 200;
    std::string body;
};

/// HTTP status for an error kind: VALIDATION/RANGE 422, FORMAT 400,
/// NOT_FOUND 404, AUDIT 409, CONFIG 500.
int http_status(ErrorKind kind) noexcept;

/// Serves the `/v1` JSON API over one immutable knowledge base. Reload swaps
/// the whole bundle; in-flight requests keep the snapshot they started with.
class Service {
public:
    /// Loads `cfg.bundle_dir`; a bundle that fails to load or audit throws and
    /// the service never starts.
    explicit Service(ServiceConfig cfg);
    Service(ServiceConfig cfg, KnowledgeBase kb);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    const ServiceConfig& config() const noexcept { return cfg_; }
    std::shared_ptr<const KnowledgeBase> snapshot() const;

    /// Loads the bundle directory again and swaps it in. On failure the current
    /// bundle stays and the error propagates.
    void reload();

    /// Routes one request without any socket; the HTTP server delegates here.
    HttpResponse handle(std::string_view method, std::string_view path, std::string_view body,
                        std::string_view admin_token = {});

    /// Binds `cfg.host` on `cfg.port` (0 picks a free port) and returns the
    /// port, or -1 on failure.
    int bind();
    /// Blocks serving requests until `stop()`.
    bool listen_after_bind();
    void stop();

private:
    class Http;

    ServiceConfig cfg_;
    mutable std::mutex mu_;
    std::shared_ptr<const KnowledgeBase> kb_;
    std::unique_ptr<Http> http_;
};

}  // namespace symdist
