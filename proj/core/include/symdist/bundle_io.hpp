#pragma once

#include "symdist/codec.hpp"
#include "symdist/metric.hpp"
#include "symdist/ontology.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace symdist {

/// Raw text of the four bundle files. The bundle version hashes these bytes.
struct BundleTexts {
    std::string schema;
    std::string ontology;
    std::string relations;
    std::string diseases;

    bool operator==(const BundleTexts&) const = default;
};

inline constexpr const char* schema_file = "schema.json";
inline constexpr const char* ontology_file = "ontology.json";
inline constexpr const char* relations_file = "relations.json";
inline constexpr const char* diseases_file = "diseases.json";

/// Throws `Error(not_found)` if the file cannot be opened.
std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

BundleTexts read_bundle_dir(const std::filesystem::path& dir);
void write_bundle_dir(const std::filesystem::path& dir, const BundleTexts& texts);

/// "sha256:<hex>" over the four texts, each framed by name and length.
std::string bundle_hash(const BundleTexts& texts);

/// Throws `Error(format)` naming `what` on malformed JSON.
nlohmann::json parse_json_text(std::string_view text, std::string_view what);

/// Stable pretty rendering used for every file and payload the tools emit.
std::string render_json(const nlohmann::json& value);

/// Non-negative integer from a JSON number or decimal string
/// (zero-padded strings allowed).
std::uint64_t json_uint(const nlohmann::json& value, std::string_view what);

/// Characteristic value from a JSON number or zero-padded string.
CharacteristicValue json_code(const nlohmann::json& value, std::string_view what);

// schema.json: [{name, kind, width, domain?: [value | {value, label}]}]
ElementSchema schema_from_json(const nlohmann::json& value);
nlohmann::json to_json(const ElementSchema& schema);

// ontology.json: [{code: "123", label, parent: "120" | null}]
BodyOntology ontology_from_json(const nlohmann::json& value);
nlohmann::json to_json(const BodyOntology& ontology);
/// Nested `{code, label, children: [...]}` forest for browsing.
nlohmann::json ontology_tree(const BodyOntology& ontology);

// relations.json: [{element_index (1-based), d_min, d_max, mode, derive?,
//                   entries: [{a, b, d}]}]
// `derive` defaults to "ontology" for the WHERE element and "none" otherwise.
std::vector<RelationTable> relations_from_json(const nlohmann::json& value, const ElementSchema& schema);
nlohmann::json to_json(const RelationTableSet& tables);

}  // namespace symdist
