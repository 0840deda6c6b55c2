#include "symdist/diagnosis.hpp"

#include "symdist/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace symdist {

using nlohmann::json;

void ListDistanceParams::validate() const {
    if (!std::isfinite(lambda) || lambda < 0.0) {
        throw Error(ErrorKind::validation, "lambda must be a finite non-negative number", {{"lambda", lambda}});
    }
    if (k < 1) {
        throw Error(ErrorKind::validation, "k must be at least 1", {{"k", k}});
    }
}

namespace {

struct PairDistances {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

PairDistances pair_distances(std::span<const Symptom> patient, std::span<const Symptom> disease,
                             const RelationTableSet& ts) {
    PairDistances out{patient.size(), disease.size(), std::vector<double>(patient.size() * disease.size())};
    for (std::size_t i = 0; i < patient.size(); ++i) {
        for (std::size_t j = 0; j < disease.size(); ++j) {
            out.values[i * out.cols + j] = symptom_distance(patient[i], disease[j], ts);
        }
    }
    return out;
}

double combine(const PairDistances& m, double lambda) {
    double forward = 0.0;
    for (std::size_t i = 0; i < m.rows; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j < m.cols; ++j) {
            best = std::min(best, m.at(i, j));
        }
        forward += best;
    }
    double backward = 0.0;
    for (std::size_t j = 0; j < m.cols; ++j) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < m.rows; ++i) {
            best = std::min(best, m.at(i, j));
        }
        backward += best;
    }
    return forward / static_cast<double>(m.rows) + lambda * (backward / static_cast<double>(m.cols));
}

}  // namespace

double list_distance(std::span<const Symptom> patient, std::span<const Symptom> disease, const RelationTableSet& ts,
                     const ListDistanceParams& params) {
    if (patient.empty() || disease.empty()) {
        throw Error(ErrorKind::validation, "list distance needs two non-empty symptom lists",
                    {{"patient_size", patient.size()}, {"disease_size", disease.size()}});
    }
    params.validate();
    return combine(pair_distances(patient, disease, ts), params.lambda);
}

void rank_entries(std::vector<DiagnosisEntry>& entries) {
    std::sort(entries.begin(), entries.end(), [](const DiagnosisEntry& l, const DiagnosisEntry& r) {
        if (l.distance != r.distance) {
            return l.distance < r.distance;
        }
        return l.disease_id < r.disease_id;
    });
    std::size_t block = 0;
    for (std::size_t i = 1; i <= entries.size(); ++i) {
        if (i == entries.size() || entries[i].distance - entries[i - 1].distance > distance_tolerance) {
            std::stable_sort(entries.begin() + static_cast<std::ptrdiff_t>(block),
                             entries.begin() + static_cast<std::ptrdiff_t>(i),
                             [](const DiagnosisEntry& l, const DiagnosisEntry& r) { return l.disease_id < r.disease_id; });
            block = i;
        }
    }
}

RankedDiagnosis diagnose(const PatientCase& patient, const KnowledgeBase& kb, const ListDistanceParams& params) {
    params.validate();
    if (patient.symptoms.empty()) {
        throw Error(ErrorKind::validation, "case has no symptoms", {{"case_id", patient.case_id}});
    }
    if (kb.diseases().empty()) {
        throw Error(ErrorKind::config, "knowledge base has no diseases");
    }
    for (std::size_t i = 0; i < patient.symptoms.size(); ++i) {
        if (patient.symptoms[i].values.size() != kb.schema().size()) {
            throw Error(ErrorKind::validation, "case symptom does not match the bundle schema",
                        {{"symptom_index", i}, {"expected", kb.schema().size()}});
        }
    }
    std::vector<CharacteristicValue> patient_codes = patient.codes;
    if (patient_codes.size() != patient.symptoms.size()) {
        patient_codes.clear();
        for (const Symptom& s : patient.symptoms) {
            patient_codes.push_back(encode_symptom(s, kb.schema()));
        }
    }

    std::vector<DiagnosisEntry> entries;
    entries.reserve(kb.diseases().size());
    for (const DiseaseRecord& disease : kb.diseases()) {
        const PairDistances m = pair_distances(patient.symptoms, disease.symptoms, kb.relations());
        DiagnosisEntry entry{disease.id, disease.name, combine(m, params.lambda), {}};
        entry.trace.reserve(m.rows);
        for (std::size_t i = 0; i < m.rows; ++i) {
            std::size_t best = 0;
            for (std::size_t j = 1; j < m.cols; ++j) {
                if (m.at(i, j) < m.at(i, best)) {
                    best = j;
                }
            }
            entry.trace.push_back({patient_codes[i], disease.codes[best], m.at(i, best)});
        }
        entries.push_back(std::move(entry));
    }
    rank_entries(entries);
    if (entries.size() > params.k) {
        entries.resize(params.k);
    }
    return {patient.case_id, std::move(entries), params, kb.bundle_version()};
}

json to_json(const RankedDiagnosis& result, const ElementSchema& schema) {
    const int width = schema.total_width();
    json entries = json::array();
    for (std::size_t r = 0; r < result.entries.size(); ++r) {
        const DiagnosisEntry& e = result.entries[r];
        json trace = json::array();
        for (const SymptomMatch& m : e.trace) {
            trace.push_back({{"patient_symptom", m.patient_symptom.to_string(width)},
                             {"nearest_disease_symptom", m.nearest_disease_symptom.to_string(width)},
                             {"distance", m.distance}});
        }
        entries.push_back({{"rank", r + 1},
                           {"disease_id", e.disease_id},
                           {"name", e.name},
                           {"distance", e.distance},
                           {"trace", std::move(trace)}});
    }
    return {{"case_id", result.case_id},
            {"bundle_version", result.bundle_version},
            {"engine_version", engine_version},
            {"list_distance",
             {{"definition", "symmetric average-minimum"},
              {"provenance", "engine-defined; symptom-list distance is a design choice of this engine"},
              {"lambda", result.params.lambda},
              {"k", result.params.k}}},
            {"entries", std::move(entries)}};
}

}  // namespace symdist
