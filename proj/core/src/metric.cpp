#include "symdist/metric.hpp"

#include "symdist/error.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <utility>

namespace symdist {

namespace {

std::string upper(std::string_view text) {
    std::string out(text);
    std::transform(out.begin(), out.end(), out.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return out;
}

}  // namespace

std::string_view to_string(OrderingMode mode) noexcept {
    return mode == OrderingMode::strict ? "STRICT" : "LENIENT";
}

OrderingMode parse_ordering_mode(std::string_view text) {
    const std::string u = upper(text);
    if (u == "STRICT") return OrderingMode::strict;
    if (u == "LENIENT") return OrderingMode::lenient;
    throw Error(ErrorKind::format, "unknown ordering mode '" + std::string(text) + "'",
                {{"mode", std::string(text)}});
}

std::string_view to_string(Derivation derivation) noexcept {
    switch (derivation) {
        case Derivation::none: return "none";
        case Derivation::ontology: return "ontology";
        case Derivation::linear: return "linear";
    }
    return "none";
}

Derivation parse_derivation(std::string_view text) {
    const std::string u = upper(text);
    if (u == "NONE") return Derivation::none;
    if (u == "ONTOLOGY") return Derivation::ontology;
    if (u == "LINEAR") return Derivation::linear;
    throw Error(ErrorKind::format, "unknown derivation '" + std::string(text) + "'",
                {{"derive", std::string(text)}});
}

// --- RelationTable ----------------------------------------------------------

RelationTable::RelationTable(std::size_t element, double d_min, double d_max, OrderingMode mode,
                             std::vector<RelationEntry> entries, Derivation derivation)
    : element_(element),
      d_min_(d_min),
      d_max_(d_max),
      mode_(mode),
      derivation_(derivation),
      declared_(std::move(entries)) {
    index_declared();
}

std::uint64_t RelationTable::key(ElementValue a, ElementValue b) noexcept {
    if (a > b) {
        std::swap(a, b);
    }
    return (static_cast<std::uint64_t>(a) << 32) | b;
}

void RelationTable::index_declared() {
    // First declaration of a pair wins; conflicting repeats are audit findings.
    for (const RelationEntry& e : declared_) {
        if (e.a != e.b) {
            related_.try_emplace(key(e.a, e.b), e.d);
        }
    }
}

void RelationTable::materialize(const ElementDef& def) {
    if (derivation_ == Derivation::none) {
        return;
    }
    std::unordered_map<std::uint64_t, double> derived;
    const std::vector<ElementValue> values = def.admissible_values();
    const double span = d_max_ - d_min_;

    if (derivation_ == Derivation::ontology) {
        if (def.kind != ElementKind::where) {
            throw Error(ErrorKind::config,
                        "ontology derivation requires a WHERE element (element " +
                            std::to_string(element_ + 1) + ")",
                        {{"element_index", element_ + 1}});
        }
        for (std::size_t i = 0; i < values.size(); ++i) {
            for (std::size_t j = i + 1; j < values.size(); ++j) {
                const auto a = static_cast<BodyCode>(values[i]);
                const auto b = static_cast<BodyCode>(values[j]);
                if (body_level(a) == 0 || body_level(b) == 0 || a / 100 != b / 100) {
                    continue;
                }
                const int t = body_tree_distance(a, b);
                derived.emplace(key(values[i], values[j]), d_min_ + span * static_cast<double>(t - 1) / 3.0);
            }
        }
    } else {
        const std::size_t n = values.size();
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                const double frac = n > 2 ? static_cast<double>(j - i - 1) / static_cast<double>(n - 2) : 0.0;
                derived.emplace(key(values[i], values[j]), d_min_ + span * frac);
            }
        }
    }
    for (const auto& [k, d] : related_) {
        derived[k] = d;
    }
    related_ = std::move(derived);
}

std::vector<RelationEntry> RelationTable::related_pairs() const {
    std::vector<RelationEntry> out;
    out.reserve(related_.size());
    for (const auto& [k, d] : related_) {
        out.push_back({static_cast<ElementValue>(k >> 32), static_cast<ElementValue>(k & 0xffffffffu), d});
    }
    std::sort(out.begin(), out.end(), [](const RelationEntry& l, const RelationEntry& r) {
        return std::pair(l.a, l.b) < std::pair(r.a, r.b);
    });
    return out;
}

std::optional<double> RelationTable::lookup(ElementValue a, ElementValue b) const {
    const auto it = related_.find(key(a, b));
    if (it == related_.end()) {
        return std::nullopt;
    }
    return it->second;
}

double RelationTable::distance(ElementValue a, ElementValue b) const {
    if (a == b) {
        return 0.0;
    }
    const auto it = related_.find(key(a, b));
    return it == related_.end() ? d_max_ : it->second;
}

RelationTable RelationTable::scaled(double factor) const {
    RelationTable out = *this;
    out.d_min_ *= factor;
    out.d_max_ *= factor;
    for (RelationEntry& e : out.declared_) {
        e.d *= factor;
    }
    for (auto& [k, d] : out.related_) {
        d *= factor;
    }
    return out;
}

// --- RelationTableSet -------------------------------------------------------

RelationTableSet::RelationTableSet(ElementSchema schema, std::vector<RelationTable> tables)
    : schema_(std::move(schema)), tables_(schema_.size()) {
    for (RelationTable& t : tables) {
        const std::size_t k = t.element();
        if (k >= schema_.size()) {
            throw Error(ErrorKind::config,
                        "relation table for element " + std::to_string(k + 1) + " but schema has " +
                            std::to_string(schema_.size()) + " elements",
                        {{"element_index", k + 1}});
        }
        if (tables_[k]) {
            throw Error(ErrorKind::config, "two relation tables for element " + std::to_string(k + 1),
                        {{"element_index", k + 1}});
        }
        const ElementDef& def = schema_.element(k);
        for (const RelationEntry& e : t.declared()) {
            for (ElementValue v : {e.a, e.b}) {
                if (!def.admits(v)) {
                    throw Error(ErrorKind::validation,
                                "relation entry value " + std::to_string(v) + " is outside element " +
                                    std::to_string(k + 1) + " domain",
                                {{"element_index", k + 1}, {"a", e.a}, {"b", e.b}, {"value", v}});
                }
            }
        }
        t.materialize(def);
        tables_[k] = std::move(t);
    }
}

bool RelationTableSet::has_table(std::size_t element) const noexcept {
    return element < tables_.size() && tables_[element].has_value();
}

const RelationTable& RelationTableSet::table(std::size_t element) const {
    if (!has_table(element)) {
        throw Error(ErrorKind::config, "no relation table for element " + std::to_string(element + 1),
                    {{"element_index", element + 1}});
    }
    return *tables_[element];
}

bool RelationTableSet::complete() const noexcept {
    return !tables_.empty() &&
           std::all_of(tables_.begin(), tables_.end(), [](const auto& t) { return t.has_value(); });
}

OrderingMode RelationTableSet::ordering_mode() const noexcept {
    for (const auto& t : tables_) {
        if (t && t->mode() == OrderingMode::lenient) {
            return OrderingMode::lenient;
        }
    }
    return OrderingMode::strict;
}

RelationTableSet RelationTableSet::scaled(double factor) const {
    RelationTableSet out = *this;
    for (auto& t : out.tables_) {
        if (t) {
            t = t->scaled(factor);
        }
    }
    return out;
}

// --- distances --------------------------------------------------------------

double element_distance(std::size_t k, ElementValue a, ElementValue b, const RelationTableSet& ts) {
    const RelationTable& table = ts.table(k);
    const ElementDef& def = ts.schema().element(k);
    for (ElementValue v : {a, b}) {
        if (!def.admits(v)) {
            throw Error(ErrorKind::validation,
                        "value " + std::to_string(v) + " is outside element " + std::to_string(k + 1) +
                            " domain",
                        {{"element_index", k + 1}, {"value", v}});
        }
    }
    return table.distance(a, b);
}

std::vector<double> element_distances(const Symptom& x, const Symptom& y, const RelationTableSet& ts) {
    const std::size_t p = ts.schema().size();
    if (x.values.size() != p || y.values.size() != p) {
        throw Error(ErrorKind::validation, "symptoms must have " + std::to_string(p) + " element values",
                    {{"expected", p}, {"x", x.values.size()}, {"y", y.values.size()}});
    }
    std::vector<double> out(p);
    for (std::size_t k = 0; k < p; ++k) {
        out[k] = element_distance(k, x.values[k], y.values[k], ts);
    }
    return out;
}

double symptom_distance(const Symptom& x, const Symptom& y, const RelationTableSet& ts) {
    double sum = 0.0;
    for (double d : element_distances(x, y, ts)) {
        sum += d * d;
    }
    return std::sqrt(sum);
}

// --- audit ------------------------------------------------------------------

std::string_view to_string(AuditKind kind) noexcept {
    switch (kind) {
        case AuditKind::band: return "BAND";
        case AuditKind::ordering: return "ORDERING";
        case AuditKind::triangle: return "TRIANGLE";
        case AuditKind::symmetry: return "SYMMETRY";
    }
    return "UNKNOWN";
}

bool AuditReport::has_blocking() const noexcept {
    return std::any_of(violations.begin(), violations.end(), [](const AuditViolation& v) { return v.blocking; });
}

std::size_t AuditReport::count(AuditKind kind) const noexcept {
    return static_cast<std::size_t>(std::count_if(violations.begin(), violations.end(),
                                                  [kind](const AuditViolation& v) { return v.kind == kind; }));
}

namespace {

void audit_band(const RelationTable& t, std::size_t k, AuditReport& report) {
    if (!(t.d_min() > 0.0) || !(t.d_min() <= t.d_max())) {
        report.violations.push_back({AuditKind::band, k,
                                     {{"element_index", k + 1}, {"d_min", t.d_min()}, {"d_max", t.d_max()}},
                                     "band must satisfy 0 < d_min <= d_max",
                                     true});
    }
    for (const RelationEntry& e : t.related_pairs()) {
        if (e.d < t.d_min() - distance_tolerance || e.d > t.d_max() + distance_tolerance || !std::isfinite(e.d)) {
            report.violations.push_back(
                {AuditKind::band, k,
                 {{"element_index", k + 1}, {"a", e.a}, {"b", e.b}, {"d", e.d}, {"d_min", t.d_min()}, {"d_max", t.d_max()}},
                 "entry {" + std::to_string(e.a) + "," + std::to_string(e.b) + "} outside [d_min, d_max]",
                 true});
        }
    }
}

void audit_symmetry(const RelationTable& t, std::size_t k, AuditReport& report) {
    std::unordered_map<std::uint64_t, double> seen;
    for (const RelationEntry& e : t.declared()) {
        if (e.a == e.b) {
            report.violations.push_back({AuditKind::symmetry, k,
                                         {{"element_index", k + 1}, {"a", e.a}, {"b", e.b}, {"d", e.d}},
                                         "self-pair entry; identical values are at distance 0",
                                         true});
            continue;
        }
        const auto lo = std::min(e.a, e.b);
        const auto hi = std::max(e.a, e.b);
        const std::uint64_t key = (static_cast<std::uint64_t>(lo) << 32) | hi;
        const auto [it, fresh] = seen.emplace(key, e.d);
        if (!fresh && std::abs(it->second - e.d) > distance_tolerance) {
            report.violations.push_back(
                {AuditKind::symmetry, k,
                 {{"element_index", k + 1}, {"a", lo}, {"b", hi}, {"d", it->second}, {"d_other", e.d}},
                 "pair listed twice with different distances",
                 true});
        }
    }
}

void audit_triangle(const RelationTable& t, const ElementDef& def, std::size_t k, AuditReport& report) {
    std::vector<ElementValue> scan;
    for (const RelationEntry& e : t.related_pairs()) {
        scan.push_back(e.a);
        scan.push_back(e.b);
    }
    std::sort(scan.begin(), scan.end());
    scan.erase(std::unique(scan.begin(), scan.end()), scan.end());
    const std::size_t related_count = scan.size();
    int spare = 0;
    for (std::size_t i = 0; i < def.domain_size() && spare < 3; ++i) {
        const ElementValue v = def.value_at(i);
        if (!std::binary_search(scan.begin(), scan.begin() + static_cast<std::ptrdiff_t>(related_count), v)) {
            scan.push_back(v);
            ++spare;
        }
    }
    std::sort(scan.begin(), scan.end());

    const std::size_t m = scan.size();
    std::vector<double> dist(m * m);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            dist[i * m + j] = t.distance(scan[i], scan[j]);
        }
    }
    const bool blocking = t.mode() == OrderingMode::strict;
    for (std::size_t a = 0; a < m; ++a) {
        for (std::size_t b = a + 1; b < m; ++b) {
            const double direct = dist[a * m + b];
            for (std::size_t c = 0; c < m; ++c) {
                if (c == a || c == b) {
                    continue;
                }
                const double via = dist[a * m + c] + dist[c * m + b];
                if (direct > via + distance_tolerance) {
                    report.violations.push_back(
                        {AuditKind::triangle, k,
                         {{"element_index", k + 1},
                          {"a", scan[a]},
                          {"b", scan[b]},
                          {"c", scan[c]},
                          {"d_ab", direct},
                          {"d_ac", dist[a * m + c]},
                          {"d_cb", dist[c * m + b]}},
                         "d(" + std::to_string(scan[a]) + "," + std::to_string(scan[b]) + ") exceeds the path via " +
                             std::to_string(scan[c]),
                         blocking});
                }
            }
        }
    }
}

}  // namespace

AuditReport audit_tables(const RelationTableSet& ts, const ElementSchema& schema) {
    AuditReport report;
    for (std::size_t k = 0; k < schema.size(); ++k) {
        if (!ts.has_table(k)) {
            continue;
        }
        const RelationTable& t = ts.table(k);
        audit_band(t, k, report);
        audit_symmetry(t, k, report);
        if (k > 0 && t.mode() == OrderingMode::strict && ts.has_table(k - 1)) {
            const RelationTable& prev = ts.table(k - 1);
            if (!(t.d_min() > prev.d_max())) {
                report.violations.push_back({AuditKind::ordering, k,
                                             {{"element_index", k + 1},
                                              {"d_min", t.d_min()},
                                              {"previous_element_index", k},
                                              {"previous_d_max", prev.d_max()}},
                                             "d_min of element " + std::to_string(k + 1) +
                                                 " must exceed d_max of element " + std::to_string(k),
                                             true});
            }
        }
        audit_triangle(t, schema.element(k), k, report);
    }
    return report;
}

nlohmann::json to_json(const AuditReport& report) {
    nlohmann::json violations = nlohmann::json::array();
    for (const AuditViolation& v : report.violations) {
        violations.push_back({{"kind", to_string(v.kind)},
                              {"element_index", v.element_index + 1},
                              {"blocking", v.blocking},
                              {"detail", v.detail},
                              {"witness", v.witness}});
    }
    return {{"ok", report.ok()}, {"blocking", report.has_blocking()}, {"violations", violations}};
}

}  // namespace symdist
