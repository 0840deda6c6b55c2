#include "symdist/service.hpp"

#include "symdist/bundle_io.hpp"
#include "symdist/error.hpp"

#include <httplib.h>

#include <cmath>
#include <utility>

namespace symdist {

using nlohmann::json;

namespace api {

namespace {

json with_versions(json payload, const KnowledgeBase& kb) {
    payload["bundle_version"] = kb.bundle_version();
    payload["engine_version"] = engine_version;
    return payload;
}

const json& field(const json& request, const char* key) {
    if (!request.is_object() || !request.contains(key)) {
        throw Error(ErrorKind::validation, std::string("request needs field '") + key + "'", {{"field", key}});
    }
    return request.at(key);
}

json violations_json(const ValidationReport& report) {
    json out = json::array();
    for (const SymptomViolation& v : report.violations) {
        out.push_back({{"kind", to_string(v.kind)},
                       {"element_index", v.element_index + 1},
                       {"value", v.value},
                       {"detail", v.detail}});
    }
    return out;
}

/// Code or element vector -> validated symptom.
Symptom resolve_symptom(const KnowledgeBase& kb, const json& value, const char* name) {
    const std::vector<RawSymptom> raw = raw_symptoms_from_json(json::array({value}));
    try {
        const PatientCase c = ingest_case(name, raw, kb);
        return c.symptoms.front();
    } catch (const Error& e) {
        json witness = e.witness();
        witness["field"] = name;
        witness.erase("symptom_index");
        throw Error(e.kind(), std::string(name) + ": " + e.detail(), witness);
    }
}

std::string element_label(const KnowledgeBase& kb, std::size_t k, ElementValue v) {
    const ElementDef& e = kb.schema().element(k);
    if (e.kind == ElementKind::where && kb.ontology().contains(static_cast<BodyCode>(v))) {
        return kb.ontology().node(static_cast<BodyCode>(v)).label;
    }
    return std::string(e.label_of(v));
}

}  // namespace

json health(const KnowledgeBase& kb) {
    return with_versions({{"status", "ok"}, {"diseases", kb.diseases().size()}}, kb);
}

json schema(const KnowledgeBase& kb) {
    return with_versions({{"elements", to_json(kb.schema())}, {"total_width", kb.schema().total_width()}}, kb);
}

json ontology(const KnowledgeBase& kb) {
    return with_versions({{"tree", ontology_tree(kb.ontology())}, {"nodes", to_json(kb.ontology())}}, kb);
}

json encode(const KnowledgeBase& kb, const json& request) {
    const json& values = field(request, "values");
    if (!values.is_array()) {
        throw Error(ErrorKind::validation, "values must be an array");
    }
    Symptom s;
    for (const json& v : values) {
        const std::uint64_t value = json_uint(v, "values");
        if (value > 0xffffffffu) {
            throw Error(ErrorKind::range, "element value too large", {{"value", v}});
        }
        s.values.push_back(static_cast<ElementValue>(value));
    }
    const ValidationReport report = validate_symptom(s, kb.schema(), &kb.ontology());
    if (!report.ok()) {
        const SymptomViolation& first = report.violations.front();
        throw Error(ErrorKind::validation, "element " + std::to_string(first.element_index + 1) + ": " + first.detail,
                    {{"element_index", first.element_index + 1},
                     {"value", first.value},
                     {"violations", violations_json(report)}});
    }
    const CharacteristicValue code = encode_symptom(s, kb.schema());
    return with_versions({{"code", code.to_string(kb.schema().total_width())}, {"values", s.values}}, kb);
}

json decode(const KnowledgeBase& kb, const json& request) {
    const CharacteristicValue code = json_code(field(request, "code"), "code");
    const Symptom s = decode_symptom(code, kb.schema());
    json labels = json::array();
    for (std::size_t k = 0; k < s.values.size(); ++k) {
        labels.push_back(element_label(kb, k, s.values[k]));
    }
    return with_versions(
        {{"code", code.to_string(kb.schema().total_width())}, {"values", s.values}, {"labels", std::move(labels)}}, kb);
}

json distance(const KnowledgeBase& kb, const json& request) {
    const Symptom a = resolve_symptom(kb, field(request, "a"), "a");
    const Symptom b = resolve_symptom(kb, field(request, "b"), "b");
    const std::vector<double> parts = element_distances(a, b, kb.relations());
    double sum = 0.0;
    for (double d : parts) {
        sum += d * d;
    }
    const int width = kb.schema().total_width();
    return with_versions({{"a", encode_symptom(a, kb.schema()).to_string(width)},
                          {"b", encode_symptom(b, kb.schema()).to_string(width)},
                          {"distance", std::sqrt(sum)},
                          {"element_distances", parts}},
                         kb);
}

json diagnose(const KnowledgeBase& kb, const json& request, const ListDistanceParams& defaults,
              std::size_t max_symptoms) {
    if (!request.is_object()) {
        throw Error(ErrorKind::format, "request body must be a JSON object");
    }
    ListDistanceParams params = defaults;
    if (request.contains("k") && !request.at("k").is_null()) {
        const json& k = request.at("k");
        if (!k.is_number_integer() || k.get<std::int64_t>() < 1) {
            throw Error(ErrorKind::validation, "k must be a positive integer", {{"k", k}});
        }
        params.k = k.get<std::size_t>();
    }
    if (request.contains("lambda") && !request.at("lambda").is_null()) {
        const json& lambda = request.at("lambda");
        if (!lambda.is_number()) {
            throw Error(ErrorKind::validation, "lambda must be a number", {{"lambda", lambda}});
        }
        params.lambda = lambda.get<double>();
    }
    params.validate();
    if (request.contains("symptoms") && request.at("symptoms").is_array() &&
        request.at("symptoms").size() > max_symptoms) {
        throw Error(ErrorKind::validation, "too many symptoms in one request",
                    {{"limit", max_symptoms}, {"count", request.at("symptoms").size()}});
    }
    const PatientCase patient = ingest_case(request, kb);
    return to_json(symdist::diagnose(patient, kb, params), kb.schema());
}

json disease(const KnowledgeBase& kb, std::string_view id) {
    return with_versions(to_json(kb.lookup(id), kb.schema()), kb);
}

}  // namespace api

int http_status(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::validation:
        case ErrorKind::range: return 422;
        case ErrorKind::format: return 400;
        case ErrorKind::not_found: return 404;
        case ErrorKind::audit: return 409;
        case ErrorKind::config: return 500;
    }
    return 500;
}

class Service::Http {
public:
    httplib::Server server;
};

Service::Service(ServiceConfig cfg) : cfg_(std::move(cfg)) {
    kb_ = std::make_shared<const KnowledgeBase>(load_bundle(cfg_.bundle_dir));
}

Service::Service(ServiceConfig cfg, KnowledgeBase kb)
    : cfg_(std::move(cfg)), kb_(std::make_shared<const KnowledgeBase>(std::move(kb))) {}

Service::~Service() {
    stop();
}

std::shared_ptr<const KnowledgeBase> Service::snapshot() const {
    std::lock_guard lock(mu_);
    return kb_;
}

void Service::reload() {
    auto fresh = std::make_shared<const KnowledgeBase>(load_bundle(cfg_.bundle_dir));
    std::lock_guard lock(mu_);
    kb_ = std::move(fresh);
}

HttpResponse Service::handle(std::string_view method, std::string_view path, std::string_view body,
                             std::string_view admin_token) {
    const std::shared_ptr<const KnowledgeBase> kb = snapshot();
    const auto reply = [](int status, const json& payload) { return HttpResponse{status, render_json(payload)}; };
    const auto fail = [&](int status, const Error& e) {
        json payload = e.to_json();
        payload["bundle_version"] = kb->bundle_version();
        payload["engine_version"] = engine_version;
        return HttpResponse{status, render_json(payload)};
    };

    if (const auto q = path.find('?'); q != std::string_view::npos) {
        path = path.substr(0, q);
    }
    try {
        if (body.size() > cfg_.max_body_bytes) {
            return fail(413, Error(ErrorKind::format, "request body too large", {{"limit", cfg_.max_body_bytes}}));
        }
        const auto parse_body = [&] { return parse_json_text(body.empty() ? std::string_view("{}") : body, "request body"); };

        if (method == "GET") {
            if (path == "/v1/health" || path == "/health") return reply(200, api::health(*kb));
            if (path == "/v1/schema") return reply(200, api::schema(*kb));
            if (path == "/v1/ontology") return reply(200, api::ontology(*kb));
            constexpr std::string_view diseases_prefix = "/v1/diseases/";
            if (path.starts_with(diseases_prefix) && path.size() > diseases_prefix.size()) {
                return reply(200, api::disease(*kb, path.substr(diseases_prefix.size())));
            }
        } else if (method == "POST") {
            if (path == "/v1/encode") return reply(200, api::encode(*kb, parse_body()));
            if (path == "/v1/decode") return reply(200, api::decode(*kb, parse_body()));
            if (path == "/v1/distance") return reply(200, api::distance(*kb, parse_body()));
            if (path == "/v1/diagnose") {
                return reply(200, api::diagnose(*kb, parse_body(), cfg_.defaults, cfg_.max_symptoms));
            }
            if (path == "/v1/admin/reload") {
                if (cfg_.admin_token.empty() || admin_token != cfg_.admin_token) {
                    return fail(403, Error(ErrorKind::validation, "reload requires the admin token"));
                }
                reload();
                return reply(200, api::health(*snapshot()));
            }
        }
        return fail(404, Error(ErrorKind::not_found, "no route for " + std::string(method) + " " + std::string(path),
                               {{"method", std::string(method)}, {"path", std::string(path)}}));
    } catch (const Error& e) {
        return fail(http_status(e.kind()), e);
    } catch (const std::exception& e) {
        return fail(500, Error(ErrorKind::config, e.what()));
    }
}

int Service::bind() {
    if (!http_) {
        http_ = std::make_unique<Http>();
        auto& server = http_->server;
        server.set_payload_max_length(cfg_.max_body_bytes);
        const auto forward = [this](const httplib::Request& req, httplib::Response& res) {
            const HttpResponse out = handle(req.method, req.path, req.body, req.get_header_value("X-Admin-Token"));
            res.status = out.status;
            res.set_content(out.body, "application/json");
        };
        server.Get(R"(/.*)", forward);
        server.Post(R"(/.*)", forward);
    }
    if (cfg_.port == 0) {
        return http_->server.bind_to_any_port(cfg_.host);
    }
    return http_->server.bind_to_port(cfg_.host, cfg_.port) ? cfg_.port : -1;
}

bool Service::listen_after_bind() {
    return http_ && http_->server.listen_after_bind();
}

void Service::stop() {
    if (http_) {
        http_->server.stop();
    }
}

}  // namespace symdist
