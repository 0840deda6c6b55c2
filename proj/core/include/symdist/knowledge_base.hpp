#pragma once

#include "symdist/bundle_io.hpp"
#include "symdist/codec.hpp"
#include "symdist/metric.hpp"
#include "symdist/ontology.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace symdist {

/// Symptoms are kept as a set: sorted by characteristic value, no repeats.
struct DiseaseRecord {
    std::string id;
    std::string name;
    std::string category;  ///< opaque family label ("internal", "surgical", ...)
    std::vector<Symptom> symptoms;
    std::vector<CharacteristicValue> codes;  ///< parallel to `symptoms`

    bool operator==(const DiseaseRecord&) const = default;
};

struct PatientCase {
    std::string case_id;
    std::vector<Symptom> symptoms;  ///< deduplicated, sorted by code
    std::vector<CharacteristicValue> codes;

    bool operator==(const PatientCase&) const = default;
};

struct LoadOptions {
    /// Reject bundles whose audit has blocking violations. The `audit` tool
    /// turns this off so it can print the report instead.
    bool enforce_audit = true;
};

class KnowledgeBase {
public:
    KnowledgeBase() = default;
    KnowledgeBase(ElementSchema schema, BodyOntology ontology, RelationTableSet relations,
                  std::vector<DiseaseRecord> diseases, AuditReport audit, std::string bundle_version);

    /// Schema with the WHERE element bound to the ontology.
    const ElementSchema& schema() const noexcept { return schema_; }
    const BodyOntology& ontology() const noexcept { return ontology_; }
    const RelationTableSet& relations() const noexcept { return relations_; }
    std::span<const DiseaseRecord> diseases() const noexcept { return diseases_; }
    const AuditReport& audit() const noexcept { return audit_; }
    const std::string& bundle_version() const noexcept { return bundle_version_; }

    /// Throws `Error(not_found)`.
    const DiseaseRecord& lookup(std::string_view id) const;

    /// Same knowledge base with every relation distance multiplied by `factor`.
    KnowledgeBase with_scaled_relations(double factor) const;

private:
    ElementSchema schema_;
    BodyOntology ontology_;
    RelationTableSet relations_;
    std::vector<DiseaseRecord> diseases_;
    std::unordered_map<std::string, std::size_t> by_id_;
    AuditReport audit_;
    std::string bundle_version_;
};

/// Parses and validates a bundle: every disease symptom is decoded, checked
/// against schema and ontology, and re-encoded to confirm the round trip; the
/// relation tables are audited.
///
/// Errors: FORMAT (parse), VALIDATION (record id, symptom and element index in
/// the witness), AUDIT (duplicate disease id, or a blocking audit violation,
/// whose kind and witness are carried in the error witness), CONFIG (missing
/// relation table, empty disease list).
KnowledgeBase load_bundle(const BundleTexts& texts, const LoadOptions& options = {});
KnowledgeBase load_bundle(const std::filesystem::path& dir, const LoadOptions& options = {});

/// diseases.json rendering; `render_json(diseases_to_json(kb))` reproduces a
/// canonical diseases file.
nlohmann::json diseases_to_json(std::span<const DiseaseRecord> diseases, const ElementSchema& schema);
nlohmann::json to_json(const DiseaseRecord& record, const ElementSchema& schema);

/// A patient symptom as supplied by a client: a packed code or an element vector.
using RawSymptom = std::variant<CharacteristicValue, Symptom>;

/// Decodes or encodes each raw symptom, validates it against the bundle,
/// removes duplicates and sorts by code. Throws `Error(validation)` with the
/// 0-based `symptom_index` in the witness; an empty list is also VALIDATION.
PatientCase ingest_case(std::string case_id, std::span<const RawSymptom> raw, const KnowledgeBase& kb);

/// `{case_id?, symptoms: [code string | code number | [element values]]}`.
PatientCase ingest_case(const nlohmann::json& raw, const KnowledgeBase& kb);

/// Parses the `symptoms` array of a case or request body.
std::vector<RawSymptom> raw_symptoms_from_json(const nlohmann::json& list);

nlohmann::json to_json(const PatientCase& c, const ElementSchema& schema);

}  // namespace symdist
