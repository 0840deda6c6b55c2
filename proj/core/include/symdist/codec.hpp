#pragma once

#include "symdist/ontology.hpp"

#include <compare>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace symdist {

enum class ElementKind {
    where,     ///< body-part code from the ontology
    scale,     ///< graded 0..9 value (when, how serious, how long)
    category,  ///< categorical code (what is the trouble, direction)
};

std::string_view to_string(ElementKind kind) noexcept;
/// Accepts "WHERE", "SCALE", "CATEGORY" (case-insensitive). Throws `Error(format)`.
ElementKind parse_element_kind(std::string_view text);

using ElementValue = std::uint32_t;

struct DomainValue {
    ElementValue value = 0;
    std::string label;

    bool operator==(const DomainValue&) const = default;
};

struct ElementDef {
    std::string name;
    ElementKind kind = ElementKind::scale;
    int width = 1;
    /// Sorted, unique admissible values. `nullopt` admits every value below
    /// `10^width`.
    std::optional<std::vector<DomainValue>> domain;

    ElementValue limit() const noexcept;
    bool in_range(ElementValue v) const noexcept { return v < limit(); }
    bool admits(ElementValue v) const noexcept;
    std::size_t domain_size() const noexcept;
    /// i-th admissible value in ascending order; `i < domain_size()`.
    ElementValue value_at(std::size_t i) const noexcept;
    std::vector<ElementValue> admissible_values() const;
    /// Label of an enumerated value, empty if none.
    std::string_view label_of(ElementValue v) const noexcept;

    bool operator==(const ElementDef&) const = default;
};

/// Ordered element definitions. Element order is significant: the first
/// element occupies the most significant digits of a characteristic value.
class ElementSchema {
public:
    static constexpr std::size_t max_elements = 8;
    static constexpr int max_width = 4;

    ElementSchema() = default;
    /// Throws `Error(config)` unless 1 <= p <= 8, widths in 1..4, at most one
    /// WHERE element (of width 3), and every enumerated value fits its width.
    explicit ElementSchema(std::vector<ElementDef> elements);

    std::span<const ElementDef> elements() const noexcept { return elements_; }
    const ElementDef& element(std::size_t i) const { return elements_.at(i); }
    std::size_t size() const noexcept { return elements_.size(); }
    int total_width() const noexcept { return total_width_; }
    /// Decimal exponent of element i: sum of the widths of all later elements.
    int exponent(std::size_t i) const { return exponents_.at(i); }
    std::optional<std::size_t> where_index() const noexcept { return where_index_; }

    /// Copy whose WHERE element (if any, and if it has no explicit domain)
    /// admits exactly the ontology codes.
    ElementSchema bound_to(const BodyOntology& ontology) const;

    bool operator==(const ElementSchema&) const = default;

private:
    std::vector<ElementDef> elements_;
    std::vector<int> exponents_;
    int total_width_ = 0;
    std::optional<std::size_t> where_index_;
};

struct Symptom {
    std::vector<ElementValue> values;

    auto operator<=>(const Symptom&) const = default;
};

/// Packed decimal form of a symptom. Up to 8 elements of 4 digits each need
/// 32 decimal digits, so the representation is 128 bits wide.
class CharacteristicValue {
public:
    __extension__ typedef unsigned __int128 Rep;

    static constexpr int max_digits = 38;

    constexpr CharacteristicValue() = default;
    constexpr explicit CharacteristicValue(Rep value) : value_(value) {}

    /// Parses a string of decimal digits (leading zeros allowed).
    /// Throws `Error(format)` on an empty or non-digit string and
    /// `Error(range)` past `max_digits` significant digits.
    static CharacteristicValue parse(std::string_view digits);

    constexpr Rep value() const noexcept { return value_; }
    /// Number of significant decimal digits; 0 has one digit.
    int digits() const noexcept;
    /// Zero-padded to at least `width` digits.
    std::string to_string(int width = 0) const;

    auto operator<=>(const CharacteristicValue&) const = default;

private:
    Rep value_ = 0;
};

CharacteristicValue pow10(int exponent) noexcept;

enum class SymptomViolationKind { arity, range, domain, ontology };
std::string_view to_string(SymptomViolationKind kind) noexcept;

struct SymptomViolation {
    SymptomViolationKind kind;
    std::size_t element_index = 0;  ///< 0-based; reported 1-based in text and JSON
    std::int64_t value = 0;
    std::string detail;
};

struct ValidationReport {
    std::vector<SymptomViolation> violations;

    bool ok() const noexcept { return violations.empty(); }
};

/// Violations are returned as data; nothing throws.
ValidationReport validate_symptom(const Symptom& s, const ElementSchema& schema,
                                  const BodyOntology* ontology = nullptr);

/// sum_i values[i] * 10^{r_i}. Throws `Error(validation)` naming the element
/// index and value of the first violation.
CharacteristicValue encode_symptom(const Symptom& s, const ElementSchema& schema);

/// Splits the zero-padded total_width-digit rendering of `code` into fields.
/// Throws `Error(range)` if `code` is wider than the schema and
/// `Error(validation)` if a field is outside its element domain.
Symptom decode_symptom(CharacteristicValue code, const ElementSchema& schema);

/// Comma-separated values, optionally zero-padded to each element's width.
std::string format_symptom(const Symptom& s, const ElementSchema& schema, bool padded = false);

/// Parses "100,002,3,4". Throws `Error(format)`.
Symptom parse_symptom(std::string_view text);

}  // namespace symdist
