#include "symdist/knowledge_base.hpp"

#include "symdist/error.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <utility>

namespace symdist {

using nlohmann::json;

KnowledgeBase::KnowledgeBase(ElementSchema schema, BodyOntology ontology, RelationTableSet relations,
                             std::vector<DiseaseRecord> diseases, AuditReport audit, std::string bundle_version)
    : schema_(std::move(schema)),
      ontology_(std::move(ontology)),
      relations_(std::move(relations)),
      diseases_(std::move(diseases)),
      audit_(std::move(audit)),
      bundle_version_(std::move(bundle_version)) {
    for (std::size_t i = 0; i < diseases_.size(); ++i) {
        if (!by_id_.emplace(diseases_[i].id, i).second) {
            throw Error(ErrorKind::audit, "duplicate disease id '" + diseases_[i].id + "'",
                        {{"id", diseases_[i].id}, {"kind", "DUPLICATE_ID"}});
        }
    }
}

const DiseaseRecord& KnowledgeBase::lookup(std::string_view id) const {
    const auto it = by_id_.find(std::string(id));
    if (it == by_id_.end()) {
        throw Error(ErrorKind::not_found, "no disease with id '" + std::string(id) + "'", {{"id", std::string(id)}});
    }
    return diseases_[it->second];
}

KnowledgeBase KnowledgeBase::with_scaled_relations(double factor) const {
    KnowledgeBase out = *this;
    out.relations_ = relations_.scaled(factor);
    return out;
}

namespace {

/// Sorts symptoms by code and drops repeats; returns the number dropped.
std::size_t normalize(std::vector<Symptom>& symptoms, std::vector<CharacteristicValue>& codes) {
    std::vector<std::size_t> order(codes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t l, std::size_t r) { return codes[l] < codes[r]; });
    std::vector<Symptom> s;
    std::vector<CharacteristicValue> c;
    for (std::size_t i : order) {
        if (!c.empty() && c.back() == codes[i]) {
            continue;
        }
        s.push_back(std::move(symptoms[i]));
        c.push_back(codes[i]);
    }
    const std::size_t dropped = codes.size() - c.size();
    symptoms = std::move(s);
    codes = std::move(c);
    return dropped;
}

std::vector<DiseaseRecord> parse_diseases(const json& value, const ElementSchema& schema, const BodyOntology& ontology) {
    if (!value.is_array()) {
        throw Error(ErrorKind::format, "diseases.json must be a JSON array", {{"file", diseases_file}});
    }
    std::vector<DiseaseRecord> out;
    std::set<std::string> seen;
    for (const json& item : value) {
        if (!item.is_object() || !item.contains("id") || !item.at("id").is_string()) {
            throw Error(ErrorKind::format, "diseases.json: every record needs a string id", {{"file", diseases_file}});
        }
        DiseaseRecord rec;
        rec.id = item.at("id").get<std::string>();
        if (!seen.insert(rec.id).second) {
            throw Error(ErrorKind::audit, "duplicate disease id '" + rec.id + "'",
                        {{"id", rec.id}, {"kind", "DUPLICATE_ID"}});
        }
        rec.name = item.value("name", rec.id);
        rec.category = item.value("category", std::string());
        if (!item.contains("symptoms") || !item.at("symptoms").is_array() || item.at("symptoms").empty()) {
            throw Error(ErrorKind::validation, "disease '" + rec.id + "' needs a non-empty symptom list",
                        {{"id", rec.id}});
        }
        std::size_t index = 0;
        for (const json& code_json : item.at("symptoms")) {
            const CharacteristicValue code = json_code(code_json, "symptoms");
            Symptom s;
            try {
                s = decode_symptom(code, schema);
            } catch (const Error& e) {
                json witness = e.witness();
                witness["id"] = rec.id;
                witness["symptom_index"] = index;
                witness["cause"] = to_string(e.kind());
                throw Error(ErrorKind::validation, "disease '" + rec.id + "' symptom " + std::to_string(index) + ": " + e.detail(),
                            witness);
            }
            const ValidationReport report = validate_symptom(s, schema, &ontology);
            if (!report.ok()) {
                const SymptomViolation& v = report.violations.front();
                throw Error(ErrorKind::validation,
                            "disease '" + rec.id + "' symptom " + std::to_string(index) + ": " + v.detail,
                            {{"id", rec.id},
                             {"symptom_index", index},
                             {"element_index", v.element_index + 1},
                             {"value", v.value},
                             {"violation", to_string(v.kind)}});
            }
            if (encode_symptom(s, schema) != code) {
                throw Error(ErrorKind::validation, "disease '" + rec.id + "' symptom does not round-trip",
                            {{"id", rec.id}, {"symptom_index", index}});
            }
            rec.symptoms.push_back(std::move(s));
            rec.codes.push_back(code);
            ++index;
        }
        if (normalize(rec.symptoms, rec.codes) != 0) {
            throw Error(ErrorKind::validation, "disease '" + rec.id + "' lists a symptom twice", {{"id", rec.id}});
        }
        out.push_back(std::move(rec));
    }
    if (out.empty()) {
        throw Error(ErrorKind::config, "knowledge base has no diseases");
    }
    return out;
}

}  // namespace

KnowledgeBase load_bundle(const BundleTexts& texts, const LoadOptions& options) {
    const ElementSchema raw_schema = schema_from_json(parse_json_text(texts.schema, schema_file));
    BodyOntology ontology = ontology_from_json(parse_json_text(texts.ontology, ontology_file));
    if (raw_schema.where_index() && ontology.empty()) {
        throw Error(ErrorKind::config, "schema has a WHERE element but the ontology is empty");
    }
    ElementSchema schema = ontology.empty() ? raw_schema : raw_schema.bound_to(ontology);

    RelationTableSet relations(schema, relations_from_json(parse_json_text(texts.relations, relations_file), schema));
    if (!relations.complete()) {
        for (std::size_t k = 0; k < schema.size(); ++k) {
            if (!relations.has_table(k)) {
                throw Error(ErrorKind::config, "relations.json has no table for element " + std::to_string(k + 1),
                            {{"element_index", k + 1}});
            }
        }
    }
    AuditReport audit = audit_tables(relations, schema);
    if (options.enforce_audit && audit.has_blocking()) {
        const AuditViolation* first = nullptr;
        for (const AuditViolation& v : audit.violations) {
            if (v.blocking) {
                first = &v;
                break;
            }
        }
        json witness = first->witness;
        witness["kind"] = to_string(first->kind);
        witness["violations"] = to_json(audit)["violations"];
        throw Error(ErrorKind::audit, std::string(to_string(first->kind)) + ": " + first->detail, witness);
    }

    std::vector<DiseaseRecord> diseases = parse_diseases(parse_json_text(texts.diseases, diseases_file), schema, ontology);
    return KnowledgeBase(std::move(schema), std::move(ontology), std::move(relations), std::move(diseases),
                         std::move(audit), bundle_hash(texts));
}

KnowledgeBase load_bundle(const std::filesystem::path& dir, const LoadOptions& options) {
    return load_bundle(read_bundle_dir(dir), options);
}

json to_json(const DiseaseRecord& record, const ElementSchema& schema) {
    json codes = json::array();
    for (const CharacteristicValue& c : record.codes) {
        codes.push_back(c.to_string(schema.total_width()));
    }
    return {{"id", record.id}, {"name", record.name}, {"category", record.category}, {"symptoms", std::move(codes)}};
}

json diseases_to_json(std::span<const DiseaseRecord> diseases, const ElementSchema& schema) {
    json out = json::array();
    for (const DiseaseRecord& d : diseases) {
        out.push_back(to_json(d, schema));
    }
    return out;
}

PatientCase ingest_case(std::string case_id, std::span<const RawSymptom> raw, const KnowledgeBase& kb) {
    if (raw.empty()) {
        throw Error(ErrorKind::validation, "case has no symptoms", {{"case_id", case_id}});
    }
    PatientCase out;
    out.case_id = std::move(case_id);
    const ElementSchema& schema = kb.schema();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        try {
            Symptom s;
            CharacteristicValue code;
            if (const auto* c = std::get_if<CharacteristicValue>(&raw[i])) {
                code = *c;
                s = decode_symptom(code, schema);
            } else {
                s = std::get<Symptom>(raw[i]);
                code = encode_symptom(s, schema);
            }
            const ValidationReport report = validate_symptom(s, schema, &kb.ontology());
            if (!report.ok()) {
                const SymptomViolation& v = report.violations.front();
                throw Error(ErrorKind::validation, v.detail,
                            {{"element_index", v.element_index + 1}, {"value", v.value}, {"violation", to_string(v.kind)}});
            }
            out.symptoms.push_back(std::move(s));
            out.codes.push_back(code);
        } catch (const Error& e) {
            json witness = e.witness().is_object() ? e.witness() : json::object();
            witness["symptom_index"] = i;
            witness["cause"] = to_string(e.kind());
            throw Error(ErrorKind::validation, "symptom " + std::to_string(i) + ": " + e.detail(), witness);
        }
    }
    normalize(out.symptoms, out.codes);
    return out;
}

std::vector<RawSymptom> raw_symptoms_from_json(const json& list) {
    if (!list.is_array()) {
        throw Error(ErrorKind::validation, "symptoms must be an array");
    }
    std::vector<RawSymptom> raw;
    raw.reserve(list.size());
    for (std::size_t i = 0; i < list.size(); ++i) {
        const json& item = list[i];
        try {
            if (item.is_array()) {
                Symptom s;
                for (const json& v : item) {
                    const std::uint64_t value = json_uint(v, "element value");
                    if (value > 0xffffffffu) {
                        throw Error(ErrorKind::range, "element value too large", {{"value", v}});
                    }
                    s.values.push_back(static_cast<ElementValue>(value));
                }
                raw.emplace_back(std::move(s));
            } else {
                raw.emplace_back(json_code(item, "symptom"));
            }
        } catch (const Error& e) {
            json witness = e.witness().is_object() ? e.witness() : json::object();
            witness["symptom_index"] = i;
            witness["cause"] = to_string(e.kind());
            throw Error(ErrorKind::validation, "symptom " + std::to_string(i) + ": " + e.detail(), witness);
        }
    }
    return raw;
}

PatientCase ingest_case(const json& raw, const KnowledgeBase& kb) {
    if (!raw.is_object()) {
        throw Error(ErrorKind::format, "case must be a JSON object");
    }
    std::string case_id = "anonymous";
    if (raw.contains("case_id")) {
        if (!raw.at("case_id").is_string()) {
            throw Error(ErrorKind::format, "case_id must be a string");
        }
        case_id = raw.at("case_id").get<std::string>();
    }
    if (!raw.contains("symptoms")) {
        throw Error(ErrorKind::validation, "case has no symptoms", {{"case_id", case_id}});
    }
    const std::vector<RawSymptom> symptoms = raw_symptoms_from_json(raw.at("symptoms"));
    return ingest_case(std::move(case_id), symptoms, kb);
}

json to_json(const PatientCase& c, const ElementSchema& schema) {
    json codes = json::array();
    for (const CharacteristicValue& code : c.codes) {
        codes.push_back(code.to_string(schema.total_width()));
    }
    return {{"case_id", c.case_id}, {"symptoms", std::move(codes)}};
}

}  // namespace symdist
