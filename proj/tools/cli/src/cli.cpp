#include "symdist/cli.hpp"

#include "symdist/bundle_io.hpp"
#include "symdist/diagnosis.hpp"
#include "symdist/error.hpp"
#include "symdist/knowledge_base.hpp"
#include "symdist/service.hpp"
#include "symdist/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <filesystem>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <vector>

namespace symdist::cli {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 7> subcommands = {"encode", "decode", "distance", "audit",
                                                         "diagnose", "simulate", "serve"};

int exit_code(ErrorKind kind) {
    return kind == ErrorKind::audit ? exit_audit : exit_validation;
}

void usage(std::ostream& err) {
    err << "usage: symdist <command> [options]\n\n"
           "commands:\n"
           "  encode    --schema FILE [--ontology FILE] --values V1,V2,...\n"
           "  decode    --schema FILE [--ontology FILE] --code DIGITS [--padded]\n"
           "  distance  --bundle DIR --a CODE|V1,V2,.. --b CODE|V1,V2,.. [--format text|json]\n"
           "  audit     --bundle DIR [--format text|json]\n"
           "  diagnose  --bundle DIR --case FILE [--k N] [--lambda X] [--format json|table]\n"
           "  simulate  --config FILE --out DIR [--threads N]\n"
           "  serve     --bundle DIR [--host H] [--port P] [--admin-token T] [--max-body BYTES]\n";
}

ElementSchema load_schema(const std::string& schema_path, const std::string& ontology_path) {
    ElementSchema schema = schema_from_json(parse_json_text(read_text_file(schema_path), schema_path));
    if (!ontology_path.empty()) {
        schema = schema.bound_to(ontology_from_json(parse_json_text(read_text_file(ontology_path), ontology_path)));
    }
    return schema;
}

json symptom_arg(const std::string& text) {
    if (text.find(',') == std::string::npos) {
        return text;
    }
    return parse_symptom(text).values;
}

std::string text_audit(const AuditReport& report) {
    std::ostringstream out;
    if (report.ok()) {
        out << "audit: ok\n";
        return out.str();
    }
    for (const AuditViolation& v : report.violations) {
        out << (v.blocking ? "error" : "warning") << ' ' << to_string(v.kind) << " element " << v.element_index + 1
            << ": " << v.detail << ' ' << v.witness.dump() << '\n';
    }
    out << "audit: " << report.violations.size() << " violation(s), "
        << (report.has_blocking() ? "blocking" : "warnings only") << '\n';
    return out.str();
}

std::string diagnosis_table(const json& payload) {
    std::ostringstream out;
    out << "case " << payload.at("case_id").get<std::string>() << "  bundle "
        << payload.at("bundle_version").get<std::string>() << '\n';
    out << std::left << std::setw(6) << "rank" << std::setw(12) << "id" << std::setw(32) << "name"
        << "distance\n";
    for (const json& e : payload.at("entries")) {
        out << std::left << std::setw(6) << e.at("rank").get<std::size_t>() << std::setw(12)
            << e.at("disease_id").get<std::string>() << std::setw(32) << e.at("name").get<std::string>()
            << format_distance(e.at("distance").get<double>()) << '\n';
    }
    return out.str();
}

}  // namespace

std::string format_distance(double value) {
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    return ec == std::errc() ? std::string(buf.data(), ptr) : std::to_string(value);
}

int run(std::span<const std::string> args, std::ostream& out, std::ostream& err) {
    if (args.empty()) {
        usage(err);
        return exit_usage;
    }
    const std::string& command = args.front();
    if (command == "-h" || command == "--help" || command == "help") {
        usage(out);
        return exit_ok;
    }
    if (std::find(subcommands.begin(), subcommands.end(), command) == subcommands.end()) {
        err << "unknown command '" << command << "'\n";
        usage(err);
        return exit_usage;
    }

    CLI::App app{"symptom similarity engine", "symdist"};
    app.require_subcommand(1);

    std::string schema_path;
    std::string ontology_path;
    std::string values;
    std::string code;
    bool padded = false;
    std::string bundle;
    std::string a;
    std::string b;
    std::string format;
    std::string case_path;
    std::optional<std::size_t> k;
    std::optional<double> lambda;
    std::string config_path;
    std::string out_dir;
    unsigned threads = 0;
    ServiceConfig service_cfg;

    auto* encode = app.add_subcommand("encode", "pack element values into a characteristic value");
    encode->add_option("--schema", schema_path)->required();
    encode->add_option("--ontology", ontology_path);
    encode->add_option("--values", values)->required();

    auto* decode = app.add_subcommand("decode", "split a characteristic value into element values");
    decode->add_option("--schema", schema_path)->required();
    decode->add_option("--ontology", ontology_path);
    decode->add_option("--code", code)->required();
    decode->add_flag("--padded", padded, "zero-pad each value to its element width");

    auto* distance = app.add_subcommand("distance", "distance between two symptoms");
    distance->add_option("--bundle", bundle)->required();
    distance->add_option("--a", a)->required();
    distance->add_option("--b", b)->required();
    distance->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* audit = app.add_subcommand("audit", "check relation tables against band, ordering and metric rules");
    audit->add_option("--bundle", bundle)->required();
    audit->add_option("--format", format)->check(CLI::IsMember({"text", "json"}));

    auto* diagnose = app.add_subcommand("diagnose", "rank diseases for a patient case");
    diagnose->add_option("--bundle", bundle)->required();
    diagnose->add_option("--case", case_path)->required();
    diagnose->add_option("--k", k);
    diagnose->add_option("--lambda", lambda);
    diagnose->add_option("--format", format)->check(CLI::IsMember({"json", "table"}));

    auto* simulate = app.add_subcommand("simulate", "generate a synthetic bundle and measure accuracy");
    simulate->add_option("--config", config_path)->required();
    simulate->add_option("--out", out_dir)->required();
    simulate->add_option("--threads", threads);

    auto* serve = app.add_subcommand("serve", "serve the /v1 HTTP API");
    serve->add_option("--bundle", bundle)->required();
    serve->add_option("--host", service_cfg.host);
    serve->add_option("--port", service_cfg.port);
    serve->add_option("--admin-token", service_cfg.admin_token);
    serve->add_option("--max-body", service_cfg.max_body_bytes);
    serve->add_option("--k", k);
    serve->add_option("--lambda", lambda);

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::CallForHelp& e) {
        out << app.help(command == "-h" ? "" : command);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << e.what() << '\n';
        usage(err);
        return exit_usage;
    }

    try {
        if (*encode) {
            const ElementSchema schema = load_schema(schema_path, ontology_path);
            out << encode_symptom(parse_symptom(values), schema).to_string(schema.total_width()) << '\n';
        } else if (*decode) {
            const ElementSchema schema = load_schema(schema_path, ontology_path);
            out << format_symptom(decode_symptom(CharacteristicValue::parse(code), schema), schema, padded) << '\n';
        } else if (*distance) {
            const KnowledgeBase kb = load_bundle(std::filesystem::path(bundle));
            const json payload = api::distance(kb, {{"a", symptom_arg(a)}, {"b", symptom_arg(b)}});
            if (format == "json") {
                out << render_json(payload);
            } else {
                out << format_distance(payload.at("distance").get<double>()) << '\n';
            }
        } else if (*audit) {
            const KnowledgeBase kb = load_bundle(std::filesystem::path(bundle), LoadOptions{.enforce_audit = false});
            if (format == "json") {
                json payload = to_json(kb.audit());
                payload["bundle_version"] = kb.bundle_version();
                out << render_json(payload);
            } else {
                out << text_audit(kb.audit());
            }
            return kb.audit().has_blocking() ? exit_audit : exit_ok;
        } else if (*diagnose) {
            const KnowledgeBase kb = load_bundle(std::filesystem::path(bundle));
            json request = parse_json_text(read_text_file(case_path), case_path);
            if (!request.is_object()) {
                throw Error(ErrorKind::format, "case file must hold a JSON object");
            }
            if (k) request["k"] = *k;
            if (lambda) request["lambda"] = *lambda;
            const json payload = api::diagnose(kb, request, ListDistanceParams{}, static_cast<std::size_t>(-1));
            out << (format == "table" ? diagnosis_table(payload) : render_json(payload));
        } else if (*simulate) {
            const std::filesystem::path config_file(config_path);
            SimConfig cfg = sim_config_from_json(parse_json_text(read_text_file(config_file), config_path));
            std::filesystem::path base = cfg.base_bundle.empty() ? std::filesystem::path(".") : std::filesystem::path(cfg.base_bundle);
            if (base.is_relative()) {
                base = config_file.parent_path() / base;
            }
            const SimulationResult result = run_simulation(cfg, read_bundle_dir(base), threads);
            write_simulation(out_dir, result);
            out << summary_csv(result.report);
        } else if (*serve) {
            service_cfg.bundle_dir = bundle;
            if (k) service_cfg.defaults.k = *k;
            if (lambda) service_cfg.defaults.lambda = *lambda;
            service_cfg.defaults.validate();
            Service service(service_cfg);
            const int port = service.bind();
            if (port < 0) {
                err << "cannot bind " << service_cfg.host << ':' << service_cfg.port << '\n';
                return exit_failure;
            }
            out << "serving " << service.snapshot()->bundle_version() << " on http://" << service_cfg.host << ':'
                << port << std::endl;
            return service.listen_after_bind() ? exit_ok : exit_failure;
        }
    } catch (const Error& e) {
        err << e.what() << '\n';
        if (!e.witness().empty()) {
            err << e.witness().dump() << '\n';
        }
        return exit_code(e.kind());
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return exit_failure;
    }
    return exit_ok;
}

}  // namespace symdist::cli
