#include "symdist/codec.hpp"

#include "symdist/error.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <utility>

namespace symdist {

std::string_view to_string(ElementKind kind) noexcept {
    switch (kind) {
        case ElementKind::where: return "WHERE";
        case ElementKind::scale: return "SCALE";
        case ElementKind::category: return "CATEGORY";
    }
    return "UNKNOWN";
}

ElementKind parse_element_kind(std::string_view text) {
    std::string upper(text);
    std::transform(upper.begin(), upper.end(), upper.begin(),
                   [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    if (upper == "WHERE") return ElementKind::where;
    if (upper == "SCALE") return ElementKind::scale;
    if (upper == "CATEGORY") return ElementKind::category;
    throw Error(ErrorKind::format, "unknown element kind '" + std::string(text) + "'",
                {{"kind", std::string(text)}});
}

// --- ElementDef -------------------------------------------------------------

ElementValue ElementDef::limit() const noexcept {
    ElementValue out = 1;
    for (int i = 0; i < width; ++i) {
        out *= 10;
    }
    return out;
}

bool ElementDef::admits(ElementValue v) const noexcept {
    if (!in_range(v)) {
        return false;
    }
    if (!domain) {
        return true;
    }
    return std::binary_search(domain->begin(), domain->end(), DomainValue{v, {}},
                              [](const DomainValue& l, const DomainValue& r) { return l.value < r.value; });
}

std::size_t ElementDef::domain_size() const noexcept {
    return domain ? domain->size() : static_cast<std::size_t>(limit());
}

ElementValue ElementDef::value_at(std::size_t i) const noexcept {
    return domain ? (*domain)[i].value : static_cast<ElementValue>(i);
}

std::vector<ElementValue> ElementDef::admissible_values() const {
    std::vector<ElementValue> out;
    out.reserve(domain_size());
    for (std::size_t i = 0; i < domain_size(); ++i) {
        out.push_back(value_at(i));
    }
    return out;
}

std::string_view ElementDef::label_of(ElementValue v) const noexcept {
    if (!domain) {
        return {};
    }
    const auto it = std::lower_bound(domain->begin(), domain->end(), v,
                                     [](const DomainValue& d, ElementValue x) { return d.value < x; });
    return it != domain->end() && it->value == v ? std::string_view(it->label) : std::string_view();
}

// --- ElementSchema ----------------------------------------------------------

ElementSchema::ElementSchema(std::vector<ElementDef> elements) : elements_(std::move(elements)) {
    if (elements_.empty() || elements_.size() > max_elements) {
        throw Error(ErrorKind::config, "schema must define 1 to 8 elements",
                    {{"elements", elements_.size()}});
    }
    for (std::size_t i = 0; i < elements_.size(); ++i) {
        ElementDef& e = elements_[i];
        const nlohmann::json where = {{"element_index", i + 1}, {"name", e.name}};
        if (e.width < 1 || e.width > max_width) {
            throw Error(ErrorKind::config, "element " + std::to_string(i + 1) + " width must be 1..4",
                        where);
        }
        if (e.kind == ElementKind::where) {
            if (where_index_) {
                throw Error(ErrorKind::config, "schema has more than one WHERE element", where);
            }
            if (e.width != 3) {
                throw Error(ErrorKind::config, "WHERE element must be 3 digits wide", where);
            }
            where_index_ = i;
        }
        if (e.domain) {
            auto& d = *e.domain;
            std::sort(d.begin(), d.end(),
                      [](const DomainValue& l, const DomainValue& r) { return l.value < r.value; });
            for (std::size_t j = 0; j < d.size(); ++j) {
                if (d[j].value >= e.limit()) {
                    throw Error(ErrorKind::config,
                                "domain value " + std::to_string(d[j].value) + " does not fit element " +
                                    std::to_string(i + 1) + " width",
                                {{"element_index", i + 1}, {"value", d[j].value}});
                }
                if (j > 0 && d[j].value == d[j - 1].value) {
                    throw Error(ErrorKind::config, "duplicate domain value " + std::to_string(d[j].value),
                                {{"element_index", i + 1}, {"value", d[j].value}});
                }
            }
            if (d.empty()) {
                throw Error(ErrorKind::config, "element " + std::to_string(i + 1) + " has an empty domain",
                            where);
            }
        }
    }
    exponents_.assign(elements_.size(), 0);
    int acc = 0;
    for (std::size_t i = elements_.size(); i-- > 0;) {
        exponents_[i] = acc;
        acc += elements_[i].width;
    }
    total_width_ = acc;
}

ElementSchema ElementSchema::bound_to(const BodyOntology& ontology) const {
    ElementSchema out = *this;
    if (where_index_ && !out.elements_[*where_index_].domain) {
        std::vector<DomainValue> d;
        d.reserve(ontology.size());
        for (const BodyNode& n : ontology.nodes()) {
            d.push_back({n.code, n.label});
        }
        if (d.empty()) {
            throw Error(ErrorKind::config, "cannot bind WHERE element to an empty ontology");
        }
        out.elements_[*where_index_].domain = std::move(d);
    }
    return out;
}

// --- CharacteristicValue ----------------------------------------------------

CharacteristicValue pow10(int exponent) noexcept {
    CharacteristicValue::Rep out = 1;
    for (int i = 0; i < exponent; ++i) {
        out *= 10;
    }
    return CharacteristicValue(out);
}

CharacteristicValue CharacteristicValue::parse(std::string_view digits) {
    if (digits.empty()) {
        throw Error(ErrorKind::format, "empty characteristic value");
    }
    Rep out = 0;
    int significant = 0;
    for (char c : digits) {
        if (c < '0' || c > '9') {
            throw Error(ErrorKind::format, "characteristic value must be decimal digits",
                        {{"code", std::string(digits)}});
        }
        if (significant > 0 || c != '0') {
            if (++significant > max_digits) {
                throw Error(ErrorKind::range, "characteristic value has too many digits",
                            {{"code", std::string(digits)}});
            }
        }
        out = out * 10 + static_cast<Rep>(c - '0');
    }
    return CharacteristicValue(out);
}

int CharacteristicValue::digits() const noexcept {
    int n = 1;
    for (Rep v = value_ / 10; v != 0; v /= 10) {
        ++n;
    }
    return n;
}

std::string CharacteristicValue::to_string(int width) const {
    std::string out;
    Rep v = value_;
    do {
        out.push_back(static_cast<char>('0' + static_cast<int>(v % 10)));
        v /= 10;
    } while (v != 0);
    while (static_cast<int>(out.size()) < width) {
        out.push_back('0');
    }
    std::reverse(out.begin(), out.end());
    return out;
}

// --- validation / packing ---------------------------------------------------

std::string_view to_string(SymptomViolationKind kind) noexcept {
    switch (kind) {
        case SymptomViolationKind::arity: return "ARITY";
        case SymptomViolationKind::range: return "RANGE";
        case SymptomViolationKind::domain: return "DOMAIN";
        case SymptomViolationKind::ontology: return "ONTOLOGY";
    }
    return "UNKNOWN";
}

ValidationReport validate_symptom(const Symptom& s, const ElementSchema& schema,
                                  const BodyOntology* ontology) {
    ValidationReport report;
    if (s.values.size() != schema.size()) {
        report.violations.push_back({SymptomViolationKind::arity, 0,
                                     static_cast<std::int64_t>(s.values.size()),
                                     "expected " + std::to_string(schema.size()) + " element values, got " +
                                         std::to_string(s.values.size())});
        return report;
    }
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        const ElementDef& e = schema.element(i);
        const ElementValue v = s.values[i];
        const auto value = static_cast<std::int64_t>(v);
        if (!e.in_range(v)) {
            report.violations.push_back({SymptomViolationKind::range, i, value,
                                         std::to_string(v) + " does not fit in " + std::to_string(e.width) +
                                             " digit(s)"});
        } else if (e.kind == ElementKind::where && ontology != nullptr && !ontology->contains(
                                                                                  static_cast<BodyCode>(v))) {
            report.violations.push_back(
                {SymptomViolationKind::ontology, i, value, format_body_code(static_cast<BodyCode>(v)) +
                                                               " is not a body-part code"});
        } else if (!e.admits(v)) {
            const auto kind = e.kind == ElementKind::where ? SymptomViolationKind::ontology
                                                           : SymptomViolationKind::domain;
            report.violations.push_back(
                {kind, i, value, std::to_string(v) + " is not admissible for element '" + e.name + "'"});
        }
    }
    return report;
}

namespace {

[[noreturn]] void throw_first_violation(const ValidationReport& report) {
    const SymptomViolation& v = report.violations.front();
    throw Error(ErrorKind::validation,
                "element " + std::to_string(v.element_index + 1) + ": " + v.detail,
                {{"element_index", v.element_index + 1},
                 {"value", v.value},
                 {"violation", to_string(v.kind)}});
}

}  // namespace

CharacteristicValue encode_symptom(const Symptom& s, const ElementSchema& schema) {
    const ValidationReport report = validate_symptom(s, schema);
    if (!report.ok()) {
        throw_first_violation(report);
    }
    CharacteristicValue::Rep acc = 0;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        acc += static_cast<CharacteristicValue::Rep>(s.values[i]) * pow10(schema.exponent(i)).value();
    }
    return CharacteristicValue(acc);
}

Symptom decode_symptom(CharacteristicValue code, const ElementSchema& schema) {
    if (code >= pow10(schema.total_width())) {
        throw Error(ErrorKind::range,
                    "code " + code.to_string() + " is wider than " + std::to_string(schema.total_width()) +
                        " digits",
                    {{"code", code.to_string()}, {"total_width", schema.total_width()}});
    }
    Symptom s;
    s.values.resize(schema.size());
    CharacteristicValue::Rep rest = code.value();
    for (std::size_t i = schema.size(); i-- > 0;) {
        const auto limit = static_cast<CharacteristicValue::Rep>(schema.element(i).limit());
        s.values[i] = static_cast<ElementValue>(rest % limit);
        rest /= limit;
    }
    const ValidationReport report = validate_symptom(s, schema);
    if (!report.ok()) {
        throw_first_violation(report);
    }
    return s;
}

std::string format_symptom(const Symptom& s, const ElementSchema& schema, bool padded) {
    std::string out;
    for (std::size_t i = 0; i < s.values.size(); ++i) {
        if (i > 0) {
            out.push_back(',');
        }
        std::string v = std::to_string(s.values[i]);
        if (padded && i < schema.size()) {
            const auto width = static_cast<std::size_t>(schema.element(i).width);
            if (v.size() < width) {
                v.insert(0, width - v.size(), '0');
            }
        }
        out += v;
    }
    return out;
}

Symptom parse_symptom(std::string_view text) {
    Symptom s;
    std::size_t pos = 0;
    while (true) {
        const std::size_t comma = text.find(',', pos);
        std::string_view field = text.substr(pos, comma == std::string_view::npos ? text.npos : comma - pos);
        while (!field.empty() && field.front() == ' ') field.remove_prefix(1);
        while (!field.empty() && field.back() == ' ') field.remove_suffix(1);
        ElementValue v = 0;
        const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
        if (field.empty() || ec != std::errc() || ptr != field.data() + field.size()) {
            throw Error(ErrorKind::format, "element value '" + std::string(field) + "' is not a non-negative integer",
                        {{"field", std::string(field)}, {"element_index", s.values.size() + 1}});
        }
        s.values.push_back(v);
        if (comma == std::string_view::npos) {
            break;
        }
        pos = comma + 1;
    }
    return s;
}

}  // namespace symdist
