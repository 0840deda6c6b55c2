#pragma once

#include "symdist/codec.hpp"
#include "symdist/knowledge_base.hpp"
#include "symdist/metric.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symdist {

inline constexpr std::string_view engine_version = "1.0.0";

/// Free parameters of the list distance.
struct ListDistanceParams {
    double lambda = 1.0;  ///< weight of the disease -> patient term
    std::size_t k = 10;   ///< number of ranked entries returned

    /// Throws `Error(validation)` unless lambda >= 0 (finite) and k >= 1.
    void validate() const;
};

/// Symmetric average-minimum distance between two symptom sets:
///
///   (1/|P|) sum_{x in P} min_{y in D} d(x,y)
///     + lambda * ((1/|D|) sum_{y in D} min_{x in P} d(y,x))
///
/// with d the symptom distance. Sums run in list order. Zero exactly on equal
/// sets; reduces to (1 + lambda) d(x,y) on singletons. Throws
/// `Error(validation)` on an empty list.
double list_distance(std::span<const Symptom> patient, std::span<const Symptom> disease, const RelationTableSet& ts,
                     const ListDistanceParams& params);

struct SymptomMatch {
    CharacteristicValue patient_symptom;
    CharacteristicValue nearest_disease_symptom;
    double distance = 0.0;

    bool operator==(const SymptomMatch&) const = default;
};

struct DiagnosisEntry {
    std::string disease_id;
    std::string name;
    double distance = 0.0;
    /// One match per patient symptom, in patient order.
    std::vector<SymptomMatch> trace;

    bool operator==(const DiagnosisEntry&) const = default;
};

struct RankedDiagnosis {
    std::string case_id;
    std::vector<DiagnosisEntry> entries;
    ListDistanceParams params;
    std::string bundle_version;
};

/// Sorts ascending by distance. Distances within `distance_tolerance` of their
/// neighbour form a tie block ordered by disease id.
void rank_entries(std::vector<DiagnosisEntry>& entries);

/// Scores every disease and returns the `params.k` nearest.
/// Throws `Error(validation)` on an empty case, `Error(config)` on an empty
/// knowledge base.
RankedDiagnosis diagnose(const PatientCase& patient, const KnowledgeBase& kb, const ListDistanceParams& params);

nlohmann::json to_json(const RankedDiagnosis& result, const ElementSchema& schema);

}  // namespace symdist
