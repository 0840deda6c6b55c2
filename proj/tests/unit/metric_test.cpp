#include "support.hpp"

#include "oracle/brute_force.hpp"
#include "symdist/metric.hpp"

#include <gtest/gtest.h>

#include <random>

namespace symdist {
namespace {

using test::error_kind;

ElementSchema where_schema() {
    return ElementSchema({{"where", ElementKind::where, 3, std::nullopt}}).bound_to(test::fixture_kb().ontology());
}

ElementSchema scale_schema(std::size_t n) {
    return ElementSchema(std::vector<ElementDef>(n, ElementDef{"s", ElementKind::scale, 1, std::nullopt}));
}

oracle::Bundle fixture_oracle() {
    return oracle::Bundle(test::fixture_json(schema_file), test::fixture_json(ontology_file),
                          test::fixture_json(relations_file), test::fixture_json(diseases_file));
}

TEST(Metric, UnrelatedPartsCostTheMaximum) {
    const ElementSchema schema = where_schema();
    const RelationTableSet ts(schema, {RelationTable(0, 2.0, 9.0, OrderingMode::strict, {{620, 621, 2.0}},
                                                     Derivation::ontology)});
    EXPECT_EQ(element_distance(0, 500, 620, ts), 9.0);
    EXPECT_EQ(element_distance(0, 620, 621, ts), 2.0);
    EXPECT_EQ(element_distance(0, 621, 620, ts), 2.0);
    EXPECT_EQ(element_distance(0, 123, 123, ts), 0.0);
    // head/eye/iris vs head: two steps down the same part.
    EXPECT_DOUBLE_EQ(element_distance(0, 100, 123, ts), 2.0 + 7.0 / 3.0);
    EXPECT_EQ(error_kind([&] { element_distance(0, 999, 100, ts); }), ErrorKind::validation);
}

TEST(Metric, EuclideanCombination) {
    const ElementSchema schema = scale_schema(2);
    const RelationTableSet ts(schema, {RelationTable(0, 3.0, 9.0, OrderingMode::lenient, {{0, 1, 3.0}}),
                                       RelationTable(1, 4.0, 9.0, OrderingMode::lenient, {{0, 1, 4.0}})});
    EXPECT_DOUBLE_EQ(symptom_distance({{0, 0}}, {{1, 1}}, ts), 5.0);
    EXPECT_EQ(symptom_distance({{4, 7}}, {{4, 7}}, ts), 0.0);
    EXPECT_EQ(element_distances({{0, 2}}, {{1, 2}}, ts), (std::vector<double>{3.0, 0.0}));
}

TEST(Metric, MissingTableIsAConfigError) {
    const ElementSchema schema = scale_schema(2);
    const RelationTableSet ts(schema, {RelationTable(0, 1.0, 2.0, OrderingMode::strict, {})});
    EXPECT_FALSE(ts.complete());
    EXPECT_EQ(error_kind([&] { symptom_distance({{0, 0}}, {{1, 1}}, ts); }), ErrorKind::config);
    EXPECT_EQ(error_kind([&] {
                  RelationTableSet(schema, {RelationTable(0, 1.0, 2.0, OrderingMode::strict, {}),
                                            RelationTable(0, 1.0, 2.0, OrderingMode::strict, {})});
              }),
              ErrorKind::config);
    EXPECT_EQ(error_kind([&] { RelationTableSet(schema, {RelationTable(0, 1.0, 2.0, OrderingMode::strict, {{0, 12, 1.5}})}); }),
              ErrorKind::validation);
}

TEST(Metric, LinearDerivationSpreadsRankGaps) {
    const ElementSchema schema = scale_schema(1);
    const RelationTableSet ts(schema, {RelationTable(0, 13.0, 16.0, OrderingMode::strict, {}, Derivation::linear)});
    EXPECT_EQ(element_distance(0, 3, 4, ts), 13.0);
    EXPECT_EQ(element_distance(0, 0, 9, ts), 16.0);
    EXPECT_DOUBLE_EQ(element_distance(0, 0, 3, ts), 13.75);
}

TEST(Metric, FixtureMatchesOracleOnEveryPair) {
    const KnowledgeBase& kb = test::fixture_kb();
    const oracle::Bundle ref = fixture_oracle();
    for (std::size_t k = 0; k < kb.schema().size(); ++k) {
        const auto values = kb.schema().element(k).admissible_values();
        for (ElementValue a : values) {
            for (ElementValue b : values) {
                ASSERT_EQ(element_distance(k, a, b, kb.relations()), ref.element_distance(k, a, b))
                    << "element " << k + 1 << " pair " << a << "," << b;
            }
        }
    }
}

TEST(Metric, FixtureTablesAreMetricsByExhaustiveScan) {
    const oracle::Bundle ref = fixture_oracle();
    for (std::size_t k = 0; k < ref.elements().size(); ++k) {
        EXPECT_EQ(ref.metric_failure(k), std::nullopt) << "element " << k + 1;
    }
    EXPECT_TRUE(test::fixture_kb().audit().ok());
}

TEST(Metric, RandomTriplesObeyTheAxioms) {
    const KnowledgeBase& kb = test::fixture_kb();
    std::mt19937_64 rng(3);
    const auto draw = [&] {
        Symptom s;
        for (const ElementDef& e : kb.schema().elements()) {
            s.values.push_back(e.value_at(std::uniform_int_distribution<std::size_t>(0, e.domain_size() - 1)(rng)));
        }
        return s;
    };
    for (int i = 0; i < 2000; ++i) {
        const Symptom x = draw(), y = draw(), z = draw();
        const double xy = symptom_distance(x, y, kb.relations());
        EXPECT_EQ(xy, symptom_distance(y, x, kb.relations()));
        EXPECT_EQ(xy == 0.0, x == y);
        EXPECT_LE(xy, symptom_distance(x, z, kb.relations()) + symptom_distance(z, y, kb.relations()) + distance_tolerance);
    }
}

TEST(Audit, EntryBelowBand) {
    const ElementSchema schema = scale_schema(1);
    const RelationTableSet ts(schema, {RelationTable(0, 1.0, 9.0, OrderingMode::strict, {{2, 3, 0.5}})});
    const AuditReport report = audit_tables(ts, schema);
    ASSERT_EQ(report.violations.size(), 1u);
    EXPECT_EQ(report.violations[0].kind, AuditKind::band);
    EXPECT_TRUE(report.violations[0].blocking);
    EXPECT_EQ(report.violations[0].witness.at("d"), 0.5);
}

TEST(Audit, ShortcutThroughARelatedValue) {
    const ElementSchema schema = scale_schema(1);
    const RelationTableSet ts(schema, {RelationTable(0, 1.0, 9.0, OrderingMode::strict, {{1, 3, 1.0}, {3, 2, 1.0}})});
    const AuditReport report = audit_tables(ts, schema);
    EXPECT_EQ(report.count(AuditKind::triangle), 1u);
    EXPECT_EQ(report.violations.size(), 1u);
    EXPECT_TRUE(report.has_blocking());

    const RelationTableSet lenient(schema,
                                   {RelationTable(0, 1.0, 9.0, OrderingMode::lenient, {{1, 3, 1.0}, {3, 2, 1.0}})});
    const AuditReport warn = audit_tables(lenient, schema);
    EXPECT_EQ(warn.count(AuditKind::triangle), 1u);
    EXPECT_FALSE(warn.has_blocking());
}

TEST(Audit, StrictOrderingAcrossElements) {
    const ElementSchema schema = scale_schema(2);
    const RelationTableSet ts(schema, {RelationTable(0, 1.0, 5.0, OrderingMode::strict, {}),
                                       RelationTable(1, 5.0, 8.0, OrderingMode::strict, {})});
    const AuditReport report = audit_tables(ts, schema);
    ASSERT_EQ(report.count(AuditKind::ordering), 1u);
    EXPECT_EQ(report.violations[0].element_index, 1u);
    EXPECT_TRUE(report.has_blocking());

    const RelationTableSet ok(schema, {RelationTable(0, 1.0, 5.0, OrderingMode::strict, {}),
                                       RelationTable(1, 5.5, 8.0, OrderingMode::strict, {})});
    EXPECT_TRUE(audit_tables(ok, schema).ok());

    const RelationTableSet lenient(schema, {RelationTable(0, 1.0, 5.0, OrderingMode::lenient, {}),
                                            RelationTable(1, 5.0, 8.0, OrderingMode::lenient, {})});
    EXPECT_EQ(audit_tables(lenient, schema).count(AuditKind::ordering), 0u);
}

TEST(Audit, SymmetryAndBadBands) {
    const ElementSchema schema = scale_schema(1);
    const RelationTableSet conflicting(schema,
                                       {RelationTable(0, 1.0, 9.0, OrderingMode::strict, {{1, 2, 3.0}, {2, 1, 4.0}})});
    EXPECT_GE(audit_tables(conflicting, schema).count(AuditKind::symmetry), 1u);
    const RelationTableSet self(schema, {RelationTable(0, 1.0, 9.0, OrderingMode::strict, {{4, 4, 2.0}})});
    EXPECT_GE(audit_tables(self, schema).count(AuditKind::symmetry), 1u);
    const RelationTableSet inverted(schema, {RelationTable(0, 5.0, 2.0, OrderingMode::strict, {})});
    EXPECT_GE(audit_tables(inverted, schema).count(AuditKind::band), 1u);
    const RelationTableSet zero(schema, {RelationTable(0, 0.0, 2.0, OrderingMode::strict, {})});
    EXPECT_GE(audit_tables(zero, schema).count(AuditKind::band), 1u);
}

TEST(Audit, JsonIsOneBased) {
    const ElementSchema schema = scale_schema(1);
    const RelationTableSet ts(schema, {RelationTable(0, 1.0, 9.0, OrderingMode::strict, {{2, 3, 0.5}})});
    const nlohmann::json j = to_json(audit_tables(ts, schema));
    EXPECT_EQ(j.at("ok"), false);
    EXPECT_EQ(j.at("blocking"), true);
    EXPECT_EQ(j.at("violations").at(0).at("kind"), "BAND");
    EXPECT_EQ(j.at("violations").at(0).at("element_index"), 1);
}

TEST(Metric, ScalingMultipliesEveryDistance) {
    const KnowledgeBase& kb = test::fixture_kb();
    const RelationTableSet scaled = kb.relations().scaled(3.0);
    const Symptom a{{100, 2, 3, 4}}, b{{621, 404, 0, 9}};
    EXPECT_NEAR(symptom_distance(a, b, scaled), 3.0 * symptom_distance(a, b, kb.relations()), 1e-9);
    EXPECT_TRUE(audit_tables(scaled, kb.schema()).ok());
}

}  // namespace
}  // namespace symdist
