#pragma once

#include "symdist/codec.hpp"
#include "symdist/ontology.hpp"

#include <nlohmann/json.hpp>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace symdist {

/// Absolute tolerance for every distance comparison in the engine.
inline constexpr double distance_tolerance = 1e-9;

/// STRICT tables must sit strictly above the previous element's band
/// (d_min_k > d_max_{k-1}) and must be free of triangle violations; LENIENT
/// tables skip the ordering check and only warn on triangle violations.
enum class OrderingMode { strict, lenient };
std::string_view to_string(OrderingMode mode) noexcept;
OrderingMode parse_ordering_mode(std::string_view text);

/// How a table fills in related pairs that are not listed explicitly.
///   none      only explicit entries are related
///   ontology  WHERE codes under the same level-1 part are related, at
///             d_min + (d_max - d_min) * (tree_distance - 1) / 3
///   linear    every pair is related, at d_min + (d_max - d_min) *
///             (rank_gap - 1) / (n - 2) over the n sorted domain values
/// Explicit entries always override derived ones.
enum class Derivation { none, ontology, linear };
std::string_view to_string(Derivation derivation) noexcept;
Derivation parse_derivation(std::string_view text);

struct RelationEntry {
    ElementValue a = 0;
    ElementValue b = 0;
    double d = 0.0;

    bool operator==(const RelationEntry&) const = default;
};

/// Bounded distance table for one element. Pairs are unordered: {a,b} and
/// {b,a} name the same entry. Unlisted pairs of distinct values are unrelated
/// and cost d_max.
class RelationTable {
public:
    RelationTable() = default;
    RelationTable(std::size_t element, double d_min, double d_max, OrderingMode mode,
                  std::vector<RelationEntry> entries, Derivation derivation = Derivation::none);

    std::size_t element() const noexcept { return element_; }
    double d_min() const noexcept { return d_min_; }
    double d_max() const noexcept { return d_max_; }
    OrderingMode mode() const noexcept { return mode_; }
    Derivation derivation() const noexcept { return derivation_; }

    /// Entries as declared, including any self-pairs or conflicting repeats
    /// the audit is expected to flag.
    std::span<const RelationEntry> declared() const noexcept { return declared_; }
    /// Derived plus explicit related pairs with a < b, sorted.
    std::vector<RelationEntry> related_pairs() const;

    std::optional<double> lookup(ElementValue a, ElementValue b) const;
    /// 0 for a == b, the related distance if listed, d_max otherwise.
    /// No domain checks.
    double distance(ElementValue a, ElementValue b) const;

    /// Derived entries for `def`; called once when the table joins a set.
    void materialize(const ElementDef& def);

    /// Every distance, band edge and entry multiplied by `factor`.
    RelationTable scaled(double factor) const;

private:
    static std::uint64_t key(ElementValue a, ElementValue b) noexcept;
    void index_declared();

    std::size_t element_ = 0;
    double d_min_ = 1.0;
    double d_max_ = 1.0;
    OrderingMode mode_ = OrderingMode::strict;
    Derivation derivation_ = Derivation::none;
    std::vector<RelationEntry> declared_;
    std::unordered_map<std::uint64_t, double> related_;
};

/// One table per schema element, bound to the schema so lookups can validate
/// element values. Immutable after construction.
class RelationTableSet {
public:
    RelationTableSet() = default;

    /// `schema` should already be bound to the ontology. Tables may be missing
    /// (lookups on them raise CONFIG); a duplicate or out-of-range element
    /// index is a CONFIG error, an entry outside the element domain a
    /// VALIDATION error.
    RelationTableSet(ElementSchema schema, std::vector<RelationTable> tables);

    const ElementSchema& schema() const noexcept { return schema_; }
    std::size_t size() const noexcept { return tables_.size(); }
    bool has_table(std::size_t element) const noexcept;
    /// Throws `Error(config)` if no table was supplied for the element.
    const RelationTable& table(std::size_t element) const;
    bool complete() const noexcept;

    /// STRICT iff every present table is STRICT.
    OrderingMode ordering_mode() const noexcept;

    RelationTableSet scaled(double factor) const;

private:
    ElementSchema schema_;
    std::vector<std::optional<RelationTable>> tables_;
};

/// Element distance for element `k` (0-based). Throws `Error(validation)` if a
/// value is outside the element domain and `Error(config)` if the table is
/// missing.
double element_distance(std::size_t k, ElementValue a, ElementValue b, const RelationTableSet& ts);

/// Per-element distances d_k(x, y), in element order.
std::vector<double> element_distances(const Symptom& x, const Symptom& y, const RelationTableSet& ts);

/// Euclidean norm of the per-element distance vector.
double symptom_distance(const Symptom& x, const Symptom& y, const RelationTableSet& ts);

enum class AuditKind { band, ordering, triangle, symmetry };
std::string_view to_string(AuditKind kind) noexcept;

struct AuditViolation {
    AuditKind kind = AuditKind::band;
    std::size_t element_index = 0;  ///< 0-based
    nlohmann::json witness;
    std::string detail;
    /// False only for LENIENT-table triangle violations, which are warnings.
    bool blocking = true;
};

struct AuditReport {
    std::vector<AuditViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
    bool has_blocking() const noexcept;
    std::size_t count(AuditKind kind) const noexcept;
};

/// Checks every table of `ts` against `schema`:
///  - band: 0 < d_min <= d_max, every entry inside [d_min, d_max]
///  - ordering: d_min_k > d_max_{k-1} for STRICT tables
///  - triangle: d(a,b) <= d(a,c) + d(c,b) + tolerance over every triple of
///    the element domain
///  - symmetry: no self-pair entries, no pair listed twice with different
///    distances
///
/// Values that appear in no related pair are interchangeable for the triangle
/// scan, so it runs over the related values plus up to three of the others
/// (O(m^3) for m related values). The verdict matches a scan of the full
/// domain; a witness involving such a value names the representative.
AuditReport audit_tables(const RelationTableSet& ts, const ElementSchema& schema);

nlohmann::json to_json(const AuditReport& report);

}  // namespace symdist
