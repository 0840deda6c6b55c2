#include "support.hpp"

#include "symdist/simulation.hpp"

#include <gtest/gtest.h>

#include <set>

namespace symdist {
namespace {

using test::error_kind;

SimConfig small_config() {
    SimConfig cfg;
    cfg.n_diseases = 12;
    cfg.symptoms_min = 2;
    cfg.symptoms_max = 5;
    cfg.cases_per_disease = 3;
    cfg.rng_seed = 7;
    return cfg;
}

TEST(Simulation, SameSeedSameBundle) {
    const SimConfig cfg = small_config();
    const BundleTexts a = generate_bundle(cfg, test::fixture_texts());
    const BundleTexts b = generate_bundle(cfg, test::fixture_texts());
    EXPECT_EQ(a, b);
    SimConfig other = cfg;
    other.rng_seed = 8;
    EXPECT_NE(generate_bundle(other, test::fixture_texts()).diseases, a.diseases);
}

TEST(Simulation, GeneratedDiseasesAreDistinctAndSized) {
    const SimConfig cfg = small_config();
    const KnowledgeBase kb = generate_kb(cfg, test::fixture_texts());
    ASSERT_EQ(kb.diseases().size(), cfg.n_diseases);
    std::set<std::vector<Symptom>> lists;
    for (const DiseaseRecord& d : kb.diseases()) {
        EXPECT_GE(d.symptoms.size(), cfg.symptoms_min);
        EXPECT_LE(d.symptoms.size(), cfg.symptoms_max);
        lists.insert(d.symptoms);
    }
    EXPECT_EQ(lists.size(), cfg.n_diseases);
    EXPECT_EQ(kb.diseases().front().id, "D001");
}

TEST(Simulation, InfeasibleSpaceIsAConfigError) {
    BundleTexts tiny = test::fixture_texts();
    tiny.schema = R"([{"name": "s", "kind": "SCALE", "width": 1, "domain": [0, 1]}])";
    tiny.relations = R"([{"element_index": 1, "d_min": 1.0, "d_max": 1.0}])";
    tiny.ontology = "[]";
    SimConfig cfg = small_config();
    cfg.n_diseases = 5;
    cfg.symptoms_min = 1;
    cfg.symptoms_max = 1;
    EXPECT_EQ(error_kind([&] { generate_bundle(cfg, tiny); }), ErrorKind::config);
    cfg.n_diseases = 2;
    EXPECT_EQ(generate_kb(cfg, tiny).diseases().size(), 2u);
}

TEST(Simulation, ConfigValidation) {
    SimConfig cfg = small_config();
    cfg.symptoms_min = 0;
    EXPECT_EQ(error_kind([&] { cfg.validate(); }), ErrorKind::config);
    cfg = small_config();
    cfg.dropout_rate = 1.5;
    EXPECT_EQ(error_kind([&] { cfg.validate(); }), ErrorKind::config);
    cfg = small_config();
    cfg.symptoms_max = 1;
    EXPECT_EQ(error_kind([&] { cfg.validate(); }), ErrorKind::config);

    const SimConfig parsed = sim_config_from_json(test::fixture_json("sim.json"));
    EXPECT_EQ(parsed.n_diseases, 30u);
    EXPECT_EQ(parsed.rng_seed, 7u);
    EXPECT_EQ(sim_config_from_json(to_json(parsed)).n_diseases, parsed.n_diseases);
}

TEST(Simulation, NoiseFreeCasesCopyTheDisease) {
    const SimConfig cfg = small_config();
    const KnowledgeBase kb = generate_kb(cfg, test::fixture_texts());
    for (const LabeledCase& c : generate_cases(kb, cfg)) {
        EXPECT_EQ(c.patient.symptoms, kb.lookup(c.true_id).symptoms);
    }
    const AccuracyReport report = evaluate(kb, generate_cases(kb, cfg), cfg.params);
    EXPECT_EQ(report.top1, 1.0);
    EXPECT_EQ(report.n_cases, cfg.n_diseases * cfg.cases_per_disease);
}

TEST(Simulation, FullDropoutKeepsOneSymptom) {
    SimConfig cfg = small_config();
    cfg.dropout_rate = 1.0;
    const KnowledgeBase kb = generate_kb(cfg, test::fixture_texts());
    for (const LabeledCase& c : generate_cases(kb, cfg)) {
        ASSERT_EQ(c.patient.symptoms.size(), 1u);
        const auto& source = kb.lookup(c.true_id).symptoms;
        EXPECT_NE(std::find(source.begin(), source.end(), c.patient.symptoms[0]), source.end());
    }
}

TEST(Simulation, SubstitutionKeepsWhereAndValidity) {
    SimConfig cfg = small_config();
    cfg.substitution_rate = 1.0;
    const KnowledgeBase kb = generate_kb(cfg, test::fixture_texts());
    for (const LabeledCase& c : generate_cases(kb, cfg)) {
        const auto& source = kb.lookup(c.true_id).symptoms;
        std::set<ElementValue> where;
        for (const Symptom& s : source) where.insert(s.values[0]);
        for (const Symptom& s : c.patient.symptoms) {
            EXPECT_TRUE(where.contains(s.values[0]));
            EXPECT_TRUE(validate_symptom(s, kb.schema(), &kb.ontology()).ok());
            EXPECT_EQ(std::find(source.begin(), source.end(), s), source.end());
        }
    }
}

TEST(Simulation, ThreadCountDoesNotChangeResults) {
    SimConfig cfg = small_config();
    cfg.dropout_rate = 0.3;
    cfg.substitution_rate = 0.3;
    const KnowledgeBase kb = generate_kb(cfg, test::fixture_texts());
    const auto cases = generate_cases(kb, cfg);
    const AccuracyReport one = evaluate(kb, cases, cfg.params, 1);
    const AccuracyReport four = evaluate(kb, cases, cfg.params, 4);
    EXPECT_EQ(outcomes_csv(one), outcomes_csv(four));
    EXPECT_EQ(summary_csv(one), summary_csv(four));
    EXPECT_EQ(cases_to_json(cases, kb.schema()), cases_to_json(generate_cases(kb, cfg), kb.schema()));
}

TEST(Simulation, EvaluateRejectsBadInput) {
    const KnowledgeBase& kb = test::fixture_kb();
    EXPECT_EQ(error_kind([&] { evaluate(kb, {}, {}); }), ErrorKind::validation);
    const std::vector<LabeledCase> unknown{{ingest_case(test::fixture_json("case.json"), kb), "D999"}};
    EXPECT_EQ(error_kind([&] { evaluate(kb, unknown, {}); }), ErrorKind::validation);
}

TEST(Simulation, WritesArtifacts) {
    SimConfig cfg = small_config();
    cfg.dropout_rate = 0.2;
    const SimulationResult result = run_simulation(cfg, test::fixture_texts(), 2);
    const auto dir = std::filesystem::temp_directory_path() / "symdist_sim_test";
    std::filesystem::remove_all(dir);
    write_simulation(dir, result);
    for (const char* f : {"cases.json", "report.json", "summary.csv", "outcomes.csv", "kb/diseases.json"}) {
        EXPECT_TRUE(std::filesystem::exists(dir / f)) << f;
    }
    EXPECT_EQ(load_bundle(dir / "kb").bundle_version(), result.kb.bundle_version());
    EXPECT_TRUE(summary_csv(result.report).starts_with("metric,value\n"));
    std::filesystem::remove_all(dir);
}

TEST(Simulation, StreamsAreIndependentOfOrder) {
    auto a = make_stream(7, 2, 5);
    auto b = make_stream(7, 2, 5);
    auto c = make_stream(7, 2, 6);
    EXPECT_EQ(a(), b());
    EXPECT_NE(b(), c());
    std::mt19937_64 rng(1);
    for (int i = 0; i < 1000; ++i) {
        EXPECT_LT(uniform_index(rng, 7), 7u);
    }
    EXPECT_FALSE(bernoulli(rng, 0.0));
    EXPECT_TRUE(bernoulli(rng, 1.0));
}

}  // namespace
}  // namespace symdist
