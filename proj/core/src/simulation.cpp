#include "symdist/simulation.hpp"

#include "symdist/error.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <set>
#include <sstream>
#include <thread>

namespace symdist {

using nlohmann::json;

namespace {

constexpr std::uint64_t kb_stream = 1;
constexpr std::uint64_t case_stream = 2;
constexpr int max_set_attempts = 1000;

template <typename Fn>
void parallel_for(std::size_t n, unsigned threads, Fn&& fn) {
    if (threads == 0) {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
    if (threads <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::vector<std::exception_ptr> errors(threads);
    {
        std::vector<std::jthread> workers;
        for (unsigned t = 0; t < threads; ++t) {
            workers.emplace_back([&, t] {
                try {
                    for (std::size_t i = t; i < n; i += threads) {
                        fn(i);
                    }
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

/// Saturating product of domain sizes.
std::uint64_t symptom_space(const ElementSchema& schema) {
    std::uint64_t out = 1;
    for (const ElementDef& e : schema.elements()) {
        const std::uint64_t n = e.domain_size();
        if (n != 0 && out > std::numeric_limits<std::uint64_t>::max() / n) {
            return std::numeric_limits<std::uint64_t>::max();
        }
        out *= n;
    }
    return out;
}

/// Saturating count of distinct sets with size in [lo, hi] drawn from `space`.
std::uint64_t distinct_sets(std::uint64_t space, std::size_t lo, std::size_t hi) {
    constexpr std::uint64_t cap = std::numeric_limits<std::uint64_t>::max();
    std::uint64_t total = 0;
    for (std::size_t m = lo; m <= hi && m <= space; ++m) {
        long double c = 1.0L;
        for (std::size_t i = 0; i < m; ++i) {
            c = c * static_cast<long double>(space - i) / static_cast<long double>(i + 1);
        }
        if (c >= static_cast<long double>(cap - total)) {
            return cap;
        }
        total += static_cast<std::uint64_t>(std::llround(c));
    }
    return total;
}

Symptom random_symptom(const ElementSchema& schema, std::mt19937_64& rng) {
    Symptom s;
    s.values.reserve(schema.size());
    for (const ElementDef& e : schema.elements()) {
        s.values.push_back(e.value_at(uniform_index(rng, e.domain_size())));
    }
    return s;
}

std::string padded_id(char prefix, std::size_t value, std::size_t width) {
    std::string digits = std::to_string(value);
    if (digits.size() < width) {
        digits.insert(0, width - digits.size(), '0');
    }
    return std::string(1, prefix) + digits;
}

}  // namespace

void SimConfig::validate() const {
    if (n_diseases < 2) {
        throw Error(ErrorKind::config, "n_diseases must be at least 2", {{"n_diseases", n_diseases}});
    }
    if (symptoms_min < 1 || symptoms_min > symptoms_max) {
        throw Error(ErrorKind::config, "symptoms_per_disease must be a range [min, max] with 1 <= min <= max",
                    {{"min", symptoms_min}, {"max", symptoms_max}});
    }
    for (const auto& [name, rate] : {std::pair{"dropout_rate", dropout_rate}, {"substitution_rate", substitution_rate}}) {
        if (!(rate >= 0.0 && rate <= 1.0)) {
            throw Error(ErrorKind::config, std::string(name) + " must lie in [0, 1]", {{name, rate}});
        }
    }
    try {
        params.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::config, e.detail(), e.witness());
    }
}

SimConfig sim_config_from_json(const json& value) {
    if (!value.is_object()) {
        throw Error(ErrorKind::format, "simulation config must be a JSON object");
    }
    SimConfig cfg;
    try {
        cfg.n_diseases = value.value("n_diseases", cfg.n_diseases);
        if (value.contains("symptoms_per_disease")) {
            const json& range = value.at("symptoms_per_disease");
            if (!range.is_array() || range.size() != 2) {
                throw Error(ErrorKind::format, "symptoms_per_disease must be [min, max]");
            }
            cfg.symptoms_min = range[0].get<std::size_t>();
            cfg.symptoms_max = range[1].get<std::size_t>();
        }
        cfg.dropout_rate = value.value("dropout_rate", cfg.dropout_rate);
        cfg.substitution_rate = value.value("substitution_rate", cfg.substitution_rate);
        cfg.rng_seed = value.value("seed", cfg.rng_seed);
        cfg.cases_per_disease = value.value("cases_per_disease", cfg.cases_per_disease);
        cfg.params.k = value.value("k", cfg.params.k);
        cfg.params.lambda = value.value("lambda", cfg.params.lambda);
        cfg.base_bundle = value.value("base_bundle", cfg.base_bundle);
    } catch (const json::exception& e) {
        throw Error(ErrorKind::format, std::string("simulation config: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

json to_json(const SimConfig& cfg) {
    return {{"n_diseases", cfg.n_diseases},
            {"symptoms_per_disease", {cfg.symptoms_min, cfg.symptoms_max}},
            {"dropout_rate", cfg.dropout_rate},
            {"substitution_rate", cfg.substitution_rate},
            {"seed", cfg.rng_seed},
            {"cases_per_disease", cfg.cases_per_disease},
            {"k", cfg.params.k},
            {"lambda", cfg.params.lambda},
            {"base_bundle", cfg.base_bundle}};
}

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(purpose), static_cast<std::uint32_t>(index),
                      static_cast<std::uint32_t>(index >> 32)};
    return std::mt19937_64(seq);
}

std::size_t uniform_index(std::mt19937_64& rng, std::size_t n) {
    const std::uint64_t bound = n;
    const std::uint64_t threshold = (0 - bound) % bound;
    while (true) {
        const std::uint64_t r = rng();
        if (r >= threshold) {
            return static_cast<std::size_t>(r % bound);
        }
    }
}

bool bernoulli(std::mt19937_64& rng, double p) {
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    return u < p;
}

BundleTexts generate_bundle(const SimConfig& cfg, const BundleTexts& base) {
    cfg.validate();
    const BodyOntology ontology = ontology_from_json(parse_json_text(base.ontology, ontology_file));
    ElementSchema schema = schema_from_json(parse_json_text(base.schema, schema_file));
    if (!ontology.empty()) {
        schema = schema.bound_to(ontology);
    }

    const std::uint64_t space = symptom_space(schema);
    const std::size_t hi = static_cast<std::size_t>(std::min<std::uint64_t>(cfg.symptoms_max, space));
    if (space < cfg.symptoms_min || distinct_sets(space, cfg.symptoms_min, hi) < cfg.n_diseases) {
        throw Error(ErrorKind::config,
                    "symptom space too small for " + std::to_string(cfg.n_diseases) + " distinct symptom sets",
                    {{"symptom_space", space}, {"n_diseases", cfg.n_diseases}});
    }

    static constexpr const char* categories[] = {"internal", "surgical", "ophthalmic", "infectious"};
    const std::size_t id_width = std::max<std::size_t>(3, std::to_string(cfg.n_diseases).size());
    std::mt19937_64 rng = make_stream(cfg.rng_seed, kb_stream, 0);
    std::set<std::vector<CharacteristicValue>> used;
    json diseases = json::array();
    for (std::size_t i = 0; i < cfg.n_diseases; ++i) {
        std::vector<CharacteristicValue> codes;
        for (int attempt = 0;; ++attempt) {
            if (attempt == max_set_attempts) {
                throw Error(ErrorKind::config, "could not draw a distinct symptom set",
                            {{"disease_index", i}, {"attempts", max_set_attempts}});
            }
            const std::size_t m = cfg.symptoms_min + uniform_index(rng, hi - cfg.symptoms_min + 1);
            std::set<CharacteristicValue> chosen;
            while (chosen.size() < m) {
                chosen.insert(encode_symptom(random_symptom(schema, rng), schema));
            }
            codes.assign(chosen.begin(), chosen.end());
            if (used.insert(codes).second) {
                break;
            }
        }
        json symptom_codes = json::array();
        for (const CharacteristicValue& c : codes) {
            symptom_codes.push_back(c.to_string(schema.total_width()));
        }
        diseases.push_back({{"id", padded_id('D', i + 1, id_width)},
                            {"name", "Synthetic disease " + std::to_string(i + 1)},
                            {"category", categories[i % std::size(categories)]},
                            {"symptoms", std::move(symptom_codes)}});
    }
    BundleTexts out = base;
    out.diseases = render_json(diseases);
    return out;
}

KnowledgeBase generate_kb(const SimConfig& cfg, const BundleTexts& base) {
    return load_bundle(generate_bundle(cfg, base));
}

PatientCase generate_case(const DiseaseRecord& disease, const SimConfig& cfg, std::size_t case_index,
                          const KnowledgeBase& kb) {
    std::mt19937_64 rng = make_stream(cfg.rng_seed, case_stream, case_index);
    std::vector<Symptom> kept;
    for (const Symptom& s : disease.symptoms) {
        if (!bernoulli(rng, cfg.dropout_rate)) {
            kept.push_back(s);
        }
    }
    if (kept.empty()) {
        kept.push_back(disease.symptoms[uniform_index(rng, disease.symptoms.size())]);
    }
    const ElementSchema& schema = kb.schema();
    for (Symptom& s : kept) {
        for (std::size_t k = 0; k < schema.size(); ++k) {
            const ElementDef& e = schema.element(k);
            if (e.kind == ElementKind::where || !bernoulli(rng, cfg.substitution_rate) || e.domain_size() < 2) {
                continue;
            }
            // Uniform over the other admissible values.
            const std::size_t pick = uniform_index(rng, e.domain_size() - 1);
            std::vector<ElementValue> others;
            others.reserve(e.domain_size() - 1);
            for (std::size_t j = 0; j < e.domain_size(); ++j) {
                if (e.value_at(j) != s.values[k]) {
                    others.push_back(e.value_at(j));
                }
            }
            s.values[k] = others[pick];
        }
    }
    std::vector<RawSymptom> raw(kept.begin(), kept.end());
    return ingest_case(padded_id('C', case_index + 1, 5), raw, kb);
}

std::vector<LabeledCase> generate_cases(const KnowledgeBase& kb, const SimConfig& cfg) {
    const auto diseases = kb.diseases();
    std::vector<LabeledCase> out(diseases.size() * cfg.cases_per_disease);
    parallel_for(out.size(), 0, [&](std::size_t i) {
        const DiseaseRecord& d = diseases[i / cfg.cases_per_disease];
        out[i] = {generate_case(d, cfg, i, kb), d.id};
    });
    return out;
}

AccuracyReport evaluate(const KnowledgeBase& kb, std::span<const LabeledCase> cases, const ListDistanceParams& params,
                        unsigned threads) {
    params.validate();
    if (cases.empty()) {
        throw Error(ErrorKind::validation, "evaluation needs at least one case");
    }
    for (std::size_t i = 0; i < cases.size(); ++i) {
        try {
            kb.lookup(cases[i].true_id);
        } catch (const Error& e) {
            throw Error(ErrorKind::validation, "case label '" + cases[i].true_id + "' is not a disease in the bundle",
                        {{"case_index", i}, {"true_id", cases[i].true_id}});
        }
    }
    AccuracyReport report;
    report.params = params;
    report.bundle_version = kb.bundle_version();
    report.n_cases = cases.size();
    report.outcomes.resize(cases.size());

    ListDistanceParams full = params;
    full.k = kb.diseases().size();
    parallel_for(cases.size(), threads, [&](std::size_t i) {
        const RankedDiagnosis ranked = diagnose(cases[i].patient, kb, full);
        CaseOutcome& o = report.outcomes[i];
        o.case_id = cases[i].patient.case_id;
        o.true_id = cases[i].true_id;
        o.predicted_id = ranked.entries.front().disease_id;
        o.predicted_distance = ranked.entries.front().distance;
        for (std::size_t r = 0; r < ranked.entries.size(); ++r) {
            if (ranked.entries[r].disease_id == o.true_id) {
                o.true_rank = r + 1;
                o.true_distance = ranked.entries[r].distance;
                break;
            }
        }
    });

    std::size_t hits1 = 0;
    std::size_t hits3 = 0;
    std::size_t hits5 = 0;
    for (const CaseOutcome& o : report.outcomes) {
        hits1 += o.true_rank == 1;
        hits3 += o.true_rank >= 1 && o.true_rank <= 3;
        hits5 += o.true_rank >= 1 && o.true_rank <= 5;
    }
    const auto n = static_cast<double>(cases.size());
    report.top1 = static_cast<double>(hits1) / n;
    report.top3 = static_cast<double>(hits3) / n;
    report.top5 = static_cast<double>(hits5) / n;
    return report;
}

json to_json(const AccuracyReport& report) {
    json outcomes = json::array();
    for (const CaseOutcome& o : report.outcomes) {
        outcomes.push_back({{"case_id", o.case_id},
                            {"true_id", o.true_id},
                            {"true_rank", o.true_rank},
                            {"predicted_id", o.predicted_id},
                            {"predicted_distance", o.predicted_distance},
                            {"true_distance", o.true_distance}});
    }
    return {{"top1", report.top1},
            {"top3", report.top3},
            {"top5", report.top5},
            {"n_cases", report.n_cases},
            {"seed", report.seed},
            {"bundle_version", report.bundle_version},
            {"engine_version", engine_version},
            {"params", {{"k", report.params.k}, {"lambda", report.params.lambda}}},
            {"config", report.config},
            {"outcomes", std::move(outcomes)}};
}

json cases_to_json(std::span<const LabeledCase> cases, const ElementSchema& schema) {
    json out = json::array();
    for (const LabeledCase& c : cases) {
        json item = to_json(c.patient, schema);
        item["true_id"] = c.true_id;
        out.push_back(std::move(item));
    }
    return out;
}

std::string outcomes_csv(const AccuracyReport& report) {
    std::ostringstream out;
    out << "case_id,true_id,true_rank,predicted_id,predicted_distance,true_distance\n";
    out << std::setprecision(17);
    for (const CaseOutcome& o : report.outcomes) {
        out << o.case_id << ',' << o.true_id << ',' << o.true_rank << ',' << o.predicted_id << ','
            << o.predicted_distance << ',' << o.true_distance << '\n';
    }
    return out.str();
}

std::string summary_csv(const AccuracyReport& report) {
    std::ostringstream out;
    out << std::setprecision(17);
    out << "metric,value\n";
    out << "top1," << report.top1 << '\n';
    out << "top3," << report.top3 << '\n';
    out << "top5," << report.top5 << '\n';
    out << "n_cases," << report.n_cases << '\n';
    out << "seed," << report.seed << '\n';
    out << "bundle_version," << report.bundle_version << '\n';
    return out.str();
}

SimulationResult run_simulation(const SimConfig& cfg, const BundleTexts& base, unsigned threads) {
    SimulationResult result;
    result.bundle = generate_bundle(cfg, base);
    result.kb = load_bundle(result.bundle);
    result.cases = generate_cases(result.kb, cfg);
    result.report = evaluate(result.kb, result.cases, cfg.params, threads);
    result.report.config = to_json(cfg);
    result.report.seed = cfg.rng_seed;
    return result;
}

void write_simulation(const std::filesystem::path& out_dir, const SimulationResult& result) {
    std::filesystem::create_directories(out_dir);
    write_bundle_dir(out_dir / "kb", result.bundle);
    write_text_file(out_dir / "cases.json", render_json(cases_to_json(result.cases, result.kb.schema())));
    write_text_file(out_dir / "report.json", render_json(to_json(result.report)));
    write_text_file(out_dir / "summary.csv", summary_csv(result.report));
    write_text_file(out_dir / "outcomes.csv", outcomes_csv(result.report));
}

}  // namespace symdist
