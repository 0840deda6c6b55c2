// One line per acceptance criterion; exit status is non-zero if any fails.

#include "oracle/brute_force.hpp"
#include "symdist/bundle_io.hpp"
#include "symdist/cli.hpp"
#include "symdist/codec.hpp"
#include "symdist/diagnosis.hpp"
#include "symdist/error.hpp"
#include "symdist/knowledge_base.hpp"
#include "symdist/metric.hpp"
#include "symdist/service.hpp"
#include "symdist/simulation.hpp"

#include <httplib.h>

#include <chrono>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

namespace {

using namespace symdist;
using nlohmann::json;
using Clock = std::chrono::steady_clock;

struct Outcome {
    bool pass = true;
    std::string note;
};

int failures = 0;

void report(const std::string& name, const std::function<Outcome()>& check, double limit_s = 0.0) {
    const auto start = Clock::now();
    Outcome o;
    try {
        o = check();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(Clock::now() - start).count();
    if (limit_s > 0.0 && secs >= limit_s) {
        o.pass = false;
        o.note += " over time limit";
    }
    std::ostringstream line;
    line << (o.pass ? "PASS " : "FAIL ") << name << " [" << std::fixed;
    line.precision(3);
    line << secs << "s] " << o.note;
    std::cout << line.str() << std::endl;
    failures += o.pass ? 0 : 1;
}

Outcome fail(std::string why) {
    return {false, std::move(why)};
}

const std::filesystem::path fixture = SYMDIST_FIXTURE_DIR;
const std::filesystem::path prior_art = SYMDIST_PRIOR_ART_DIR;

oracle::Bundle oracle_of(const BundleTexts& t) {
    return oracle::Bundle(json::parse(t.schema), json::parse(t.ontology), json::parse(t.relations),
                          json::parse(t.diseases));
}

std::vector<std::vector<unsigned>> as_rows(const PatientCase& c) {
    std::vector<std::vector<unsigned>> out;
    for (const Symptom& s : c.symptoms) out.emplace_back(s.values.begin(), s.values.end());
    return out;
}

Symptom random_symptom(std::mt19937_64& rng, const ElementSchema& schema) {
    Symptom s;
    for (const ElementDef& e : schema.elements()) {
        s.values.push_back(e.value_at(std::uniform_int_distribution<std::size_t>(0, e.domain_size() - 1)(rng)));
    }
    return s;
}

Outcome eq1_reproduction() {
    const ElementSchema schema({{"where", ElementKind::where, 3, std::nullopt},
                                {"trouble", ElementKind::category, 3, std::nullopt},
                                {"serious", ElementKind::scale, 1, std::nullopt},
                                {"long", ElementKind::scale, 1, std::nullopt}});
    const std::string worked = encode_symptom(parse_symptom("100,002,3,4"), schema).to_string();
    if (worked != "10000234") return fail("(100,002,3,4) -> " + worked);
    for (const char* code : {"10000234", "20000500", "30001101", "60040302", "50030400"}) {
        const Symptom s = decode_symptom(CharacteristicValue::parse(code), schema);
        if (encode_symptom(s, schema).to_string(8) != code) return fail(std::string("round trip of ") + code);
    }
    return {true, "10000234 and five table codes exact"};
}

Outcome codec_round_trip() {
    std::vector<std::pair<std::string, ElementSchema>> schemas;
    const KnowledgeBase kb = load_bundle(fixture);
    schemas.emplace_back("fixture", kb.schema());
    for (const auto& entry : std::filesystem::directory_iterator(prior_art)) {
        schemas.emplace_back(entry.path().filename().string(),
                             schema_from_json(parse_json_text(read_text_file(entry.path()), "schema")));
    }
    std::mt19937_64 rng(2024);
    std::size_t total = 0;
    for (const auto& [name, schema] : schemas) {
        for (int i = 0; i < 10000; ++i) {
            const Symptom s = random_symptom(rng, schema);
            if (decode_symptom(encode_symptom(s, schema), schema) != s) {
                return fail(name + ": " + format_symptom(s, schema));
            }
            ++total;
        }
    }
    return {true, std::to_string(schemas.size()) + " schemas, " + std::to_string(total) + " round trips, 0 failures"};
}

Outcome metric_axioms() {
    const BundleTexts texts = read_bundle_dir(fixture);
    const oracle::Bundle ref = oracle_of(texts);
    for (std::size_t k = 0; k < ref.elements().size(); ++k) {
        if (auto bad = ref.metric_failure(k)) return fail("element " + std::to_string(k + 1) + ": " + *bad);
    }
    const KnowledgeBase kb = load_bundle(texts);
    std::mt19937_64 rng(99);
    for (int i = 0; i < 10000; ++i) {
        const Symptom x = random_symptom(rng, kb.schema());
        const Symptom y = random_symptom(rng, kb.schema());
        const Symptom z = random_symptom(rng, kb.schema());
        const double xy = symptom_distance(x, y, kb.relations());
        if (xy != symptom_distance(y, x, kb.relations())) return fail("asymmetric");
        if ((xy == 0.0) != (x == y)) return fail("identity");
        if (xy > symptom_distance(x, z, kb.relations()) + symptom_distance(z, y, kb.relations()) + 1e-9) {
            return fail("triangle");
        }
    }
    return {true, "exhaustive scan of " + std::to_string(ref.elements().size()) +
                      " tables, 10000 random triples"};
}

Outcome definition1_enforcement() {
    const BundleTexts base = read_bundle_dir(fixture);
    const auto expect_audit = [&](const json& relations, const char* kind, std::size_t element) -> std::string {
        BundleTexts t = base;
        t.relations = render_json(relations);
        try {
            load_bundle(t);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::audit) return "kind " + std::string(to_string(e.kind()));
            if (e.witness().value("kind", "") != kind) return "witness kind " + e.witness().dump();
            for (const json& v : e.witness().at("violations")) {
                if (v.at("kind") == kind && v.at("element_index") == element && !v.at("witness").empty()) return {};
            }
            return "no witness for element " + std::to_string(element);
        }
        return std::string("accepted a bundle with a ") + kind + " violation";
    };
    json below = json::parse(base.relations);
    below.at(1).at("entries").push_back({{"a", "003"}, {"b", "005"}, {"d", 8.5}});
    json above = json::parse(base.relations);
    above.at(3).at("entries").push_back({{"a", "1"}, {"b", "2"}, {"d", 25.0}});
    json ordering = json::parse(base.relations);
    ordering.at(2)["d_min"] = 12.0;
    for (const auto& [relations, kind, element] :
         {std::tuple{below, "BAND", 2}, std::tuple{above, "BAND", 4}, std::tuple{ordering, "ORDERING", 3}}) {
        if (const std::string why = expect_audit(relations, kind, static_cast<std::size_t>(element)); !why.empty()) {
            return fail(why);
        }
    }
    return {true, "band below/above and STRICT ordering rejected as AUDIT with witnesses"};
}

Outcome oracle_equivalence() {
    const BundleTexts base = read_bundle_dir(fixture);
    std::mt19937_64 rng(4242);
    std::size_t compared = 0;
    for (int kb_index = 0; kb_index < 20; ++kb_index) {
        SimConfig cfg;
        cfg.rng_seed = 1000 + static_cast<std::uint64_t>(kb_index);
        cfg.n_diseases = 5 + uniform_index(rng, 46);
        cfg.symptoms_min = 1 + uniform_index(rng, 3);
        cfg.symptoms_max = cfg.symptoms_min + uniform_index(rng, 11 - cfg.symptoms_min);
        cfg.dropout_rate = 0.3;
        cfg.substitution_rate = 0.3;
        const BundleTexts texts = generate_bundle(cfg, base);
        const KnowledgeBase kb = load_bundle(texts);
        const oracle::Bundle ref = oracle_of(texts);
        const double lambda = kb_index % 3 == 0 ? 0.5 : 1.0;
        for (std::size_t c = 0; c < 100; ++c) {
            const DiseaseRecord& source = kb.diseases()[uniform_index(rng, kb.diseases().size())];
            const PatientCase patient = generate_case(source, cfg, c, kb);
            const RankedDiagnosis got = diagnose(patient, kb, {.lambda = lambda, .k = kb.diseases().size()});
            const auto expected = ref.rank(as_rows(patient), lambda);
            if (got.entries.size() != expected.size()) return fail("length mismatch");
            for (std::size_t i = 0; i < expected.size(); ++i) {
                if (got.entries[i].disease_id != expected[i].id ||
                    std::abs(got.entries[i].distance - expected[i].distance) > 1e-12) {
                    return fail("KB " + std::to_string(kb_index) + " case " + std::to_string(c) + " rank " +
                                std::to_string(i + 1));
                }
            }
            ++compared;
        }
    }
    return {true, "20 KBs, " + std::to_string(compared) + " cases, full orderings identical"};
}

Outcome noise_free_recovery() {
    SimConfig cfg = sim_config_from_json(parse_json_text(read_text_file(fixture / "sim.json"), "sim.json"));
    cfg.dropout_rate = 0.0;
    cfg.substitution_rate = 0.0;
    const BundleTexts base = read_bundle_dir(fixture);
    const SimulationResult a = run_simulation(cfg, base);
    const SimulationResult b = run_simulation(cfg, base, 1);
    if (a.report.top1 != 1.0) return fail("top1 = " + std::to_string(a.report.top1));
    if (outcomes_csv(a.report) != outcomes_csv(b.report)) return fail("not deterministic");
    return {true, "top1 = 1.0 over " + std::to_string(a.report.n_cases) + " cases, seed " + std::to_string(cfg.rng_seed)};
}

Outcome scale_invariance() {
    const BundleTexts base = read_bundle_dir(fixture);
    SimConfig cfg;
    cfg.n_diseases = 40;
    cfg.symptoms_max = 8;
    cfg.dropout_rate = 0.4;
    cfg.substitution_rate = 0.4;
    for (const BundleTexts& texts : {base, generate_bundle(cfg, base)}) {
        json relations = json::parse(texts.relations);
        for (json& t : relations) {
            t["d_min"] = 3.0 * t.at("d_min").get<double>();
            t["d_max"] = 3.0 * t.at("d_max").get<double>();
            for (json& e : t.at("entries")) e["d"] = 3.0 * e.at("d").get<double>();
        }
        BundleTexts scaled_texts = texts;
        scaled_texts.relations = render_json(relations);
        const KnowledgeBase kb = load_bundle(texts);
        const KnowledgeBase scaled = load_bundle(scaled_texts);
        const ListDistanceParams params{.lambda = 1.0, .k = kb.diseases().size()};
        std::size_t case_index = 0;
        for (const DiseaseRecord& d : kb.diseases()) {
            for (int r = 0; r < 5; ++r) {
                const PatientCase c = generate_case(d, cfg, case_index++, kb);
                const RankedDiagnosis x = diagnose(c, kb, params);
                const RankedDiagnosis y = diagnose(c, scaled, params);
                for (std::size_t i = 0; i < x.entries.size(); ++i) {
                    if (x.entries[i].disease_id != y.entries[i].disease_id) return fail("order changed");
                    if (std::abs(y.entries[i].distance - 3.0 * x.entries[i].distance) > 1e-9) {
                        return fail("distance not tripled");
                    }
                }
            }
        }
    }
    return {true, "fixture and 40-disease synthetic KB, order and x3.0 distances preserved"};
}

Outcome cli_http_parity() {
    ServiceConfig cfg;
    cfg.bundle_dir = fixture;
    cfg.port = 0;
    Service service(cfg);
    const int port = service.bind();
    if (port <= 0) return fail("cannot bind");
    std::thread server([&] { service.listen_after_bind(); });
    httplib::Client client("127.0.0.1", port);

    const auto tmp = std::filesystem::temp_directory_path() / "symdist_parity_case.json";
    const std::vector<json> requests = {
        parse_json_text(read_text_file(fixture / "case.json"), "case"),
        {{"case_id", "p2"}, {"symptoms", {"60040302", "20000500", "62140402"}}, {"k", 3}, {"lambda", 0.5}},
        {{"case_id", "p3"}, {"symptoms", {json::array({123, 2, 3, 4}), "51030510"}}},
    };
    std::string note = "ok";
    for (const json& request : requests) {
        write_text_file(tmp, request.dump());
        std::ostringstream out, err;
        const std::vector<std::string> args{"diagnose", "--bundle", fixture.string(), "--case", tmp.string()};
        if (cli::run(args, out, err) != 0) {
            note = "cli failed: " + err.str();
            break;
        }
        const auto res = client.Post("/v1/diagnose", request.dump(), "application/json");
        if (!res || res->status != 200) {
            note = "http failed";
            break;
        }
        if (res->body != out.str()) {
            note = "payloads differ for " + request.value("case_id", "?");
            break;
        }
    }
    service.stop();
    server.join();
    std::filesystem::remove(tmp);
    if (note != "ok") return fail(note);
    return {true, std::to_string(requests.size()) + " requests byte-identical over a live server"};
}

}  // namespace

int main() {
    report("eq1_reproduction", eq1_reproduction, 1.0);
    report("codec_round_trip", codec_round_trip);
    report("metric_axioms", metric_axioms, 10.0);
    report("definition1_enforcement", definition1_enforcement);
    report("oracle_equivalence", oracle_equivalence, 60.0);
    report("noise_free_recovery", noise_free_recovery);
    report("scale_invariance", scale_invariance);
    report("cli_http_parity", cli_http_parity);
    std::cout << (failures == 0 ? "all acceptance criteria passed" : std::to_string(failures) + " failed") << std::endl;
    return failures == 0 ? 0 : 1;
}
