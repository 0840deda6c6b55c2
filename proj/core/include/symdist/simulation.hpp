#pragma once

#include "symdist/bundle_io.hpp"
#include "symdist/diagnosis.hpp"
#include "symdist/knowledge_base.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <vector>

namespace symdist {

struct SimConfig {
    std::size_t n_diseases = 20;
    std::size_t symptoms_min = 2;  ///< per disease, inclusive
    std::size_t symptoms_max = 6;
    double dropout_rate = 0.0;
    double substitution_rate = 0.0;
    std::uint64_t rng_seed = 7;
    std::size_t cases_per_disease = 5;
    ListDistanceParams params;
    /// Directory holding schema/ontology/relations for the synthetic bundle;
    /// relative paths resolve against the config file.
    std::string base_bundle;

    /// Throws `Error(config)`.
    void validate() const;
};

SimConfig sim_config_from_json(const nlohmann::json& value);
nlohmann::json to_json(const SimConfig& cfg);

/// Random streams are mt19937_64 seeded through std::seed_seq with
/// (seed, purpose, index), so every case has its own reproducible stream.
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t purpose, std::uint64_t index);

/// Unbiased draw from [0, n); n > 0.
std::size_t uniform_index(std::mt19937_64& rng, std::size_t n);
/// True with probability p, from the top 53 bits of one draw.
bool bernoulli(std::mt19937_64& rng, double p);

/// `base` supplies schema, ontology and relations; its disease text is
/// replaced. Disease symptom sets are pairwise distinct. Throws
/// `Error(config)` when the symptom space cannot hold n distinct sets.
BundleTexts generate_bundle(const SimConfig& cfg, const BundleTexts& base);

/// `load_bundle(generate_bundle(cfg, base))`.
KnowledgeBase generate_kb(const SimConfig& cfg, const BundleTexts& base);

/// Noisy copy of a disease's symptom list: each symptom dropped with
/// dropout_rate (one kept at random if all go), then each SCALE/CATEGORY
/// element of the survivors replaced by a different admissible value with
/// substitution_rate. WHERE elements are never substituted.
PatientCase generate_case(const DiseaseRecord& disease, const SimConfig& cfg, std::size_t case_index,
                          const KnowledgeBase& kb);

struct LabeledCase {
    PatientCase patient;
    std::string true_id;
};

/// `cases_per_disease` cases for every disease, in knowledge-base order.
std::vector<LabeledCase> generate_cases(const KnowledgeBase& kb, const SimConfig& cfg);

struct CaseOutcome {
    std::string case_id;
    std::string true_id;
    std::size_t true_rank = 0;  ///< 1-based position of the true disease
    std::string predicted_id;
    double predicted_distance = 0.0;
    double true_distance = 0.0;
};

struct AccuracyReport {
    double top1 = 0.0;
    double top3 = 0.0;
    double top5 = 0.0;
    std::size_t n_cases = 0;
    std::vector<CaseOutcome> outcomes;
    ListDistanceParams params;
    std::string bundle_version;
    nlohmann::json config;  ///< echo of the generating SimConfig, if any
    std::uint64_t seed = 0;
};

/// Ranks every disease for every case. Throws `Error(validation)` for an empty
/// case list or a label missing from the knowledge base. `threads == 0` uses
/// the hardware concurrency; results do not depend on it.
AccuracyReport evaluate(const KnowledgeBase& kb, std::span<const LabeledCase> cases, const ListDistanceParams& params,
                        unsigned threads = 0);

nlohmann::json to_json(const AccuracyReport& report);
nlohmann::json cases_to_json(std::span<const LabeledCase> cases, const ElementSchema& schema);
/// `case_id,true_id,true_rank,predicted_id,predicted_distance,true_distance`
std::string outcomes_csv(const AccuracyReport& report);
/// `metric,value` rows: top1, top3, top5, n_cases, seed, bundle_version.
std::string summary_csv(const AccuracyReport& report);

struct SimulationResult {
    BundleTexts bundle;
    KnowledgeBase kb;
    std::vector<LabeledCase> cases;
    AccuracyReport report;
};

SimulationResult run_simulation(const SimConfig& cfg, const BundleTexts& base, unsigned threads = 0);

/// Writes `kb/` (bundle files), `cases.json`, `report.json`, `summary.csv`
/// and the per-case `outcomes.csv`.
void write_simulation(const std::filesystem::path& out_dir, const SimulationResult& result);

}  // namespace symdist
