#include "symdist/bundle_io.hpp"

#include "symdist/error.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <memory>
#include <sstream>

namespace symdist {

using nlohmann::json;

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(ErrorKind::not_found, "cannot open " + path.string(), {{"path", path.string()}});
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw Error(ErrorKind::config, "cannot write " + path.string(), {{"path", path.string()}});
    }
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

BundleTexts read_bundle_dir(const std::filesystem::path& dir) {
    return {read_text_file(dir / schema_file), read_text_file(dir / ontology_file),
            read_text_file(dir / relations_file), read_text_file(dir / diseases_file)};
}

void write_bundle_dir(const std::filesystem::path& dir, const BundleTexts& texts) {
    std::filesystem::create_directories(dir);
    write_text_file(dir / schema_file, texts.schema);
    write_text_file(dir / ontology_file, texts.ontology);
    write_text_file(dir / relations_file, texts.relations);
    write_text_file(dir / diseases_file, texts.diseases);
}

std::string bundle_hash(const BundleTexts& texts) {
    std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
    EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr);
    const std::array<std::pair<const char*, const std::string*>, 4> parts{{
        {schema_file, &texts.schema},
        {ontology_file, &texts.ontology},
        {relations_file, &texts.relations},
        {diseases_file, &texts.diseases},
    }};
    for (const auto& [name, body] : parts) {
        const std::string frame = std::string(name) + "\n" + std::to_string(body->size()) + "\n";
        EVP_DigestUpdate(ctx.get(), frame.data(), frame.size());
        EVP_DigestUpdate(ctx.get(), body->data(), body->size());
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx.get(), digest.data(), &length);
    std::string out = "sha256:";
    static constexpr char hex[] = "0123456789abcdef";
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

json parse_json_text(std::string_view text, std::string_view what) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::format, std::string(what) + ": " + e.what(), {{"file", std::string(what)}});
    }
}

std::string render_json(const json& value) {
    return value.dump(2) + "\n";
}

std::uint64_t json_uint(const json& value, std::string_view what) {
    if (value.is_number_unsigned()) {
        return value.get<std::uint64_t>();
    }
    if (value.is_number_integer() && value.get<std::int64_t>() >= 0) {
        return static_cast<std::uint64_t>(value.get<std::int64_t>());
    }
    if (value.is_string()) {
        const auto& s = value.get_ref<const std::string&>();
        std::uint64_t out = 0;
        const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
        if (!s.empty() && ec == std::errc() && ptr == s.data() + s.size()) {
            return out;
        }
    }
    throw Error(ErrorKind::format, std::string(what) + " must be a non-negative integer",
                {{"field", std::string(what)}, {"value", value}});
}

CharacteristicValue json_code(const json& value, std::string_view what) {
    if (value.is_string()) {
        try {
            return CharacteristicValue::parse(value.get_ref<const std::string&>());
        } catch (const Error& e) {
            throw Error(e.kind(), std::string(what) + ": " + e.detail(), {{"field", std::string(what)}, {"value", value}});
        }
    }
    return CharacteristicValue(json_uint(value, what));
}

namespace {

const json& require(const json& object, const char* key, std::string_view where) {
    if (!object.is_object() || !object.contains(key)) {
        throw Error(ErrorKind::format, std::string(where) + ": missing field '" + key + "'",
                    {{"field", key}, {"file", std::string(where)}});
    }
    return object.at(key);
}

std::string require_string(const json& object, const char* key, std::string_view where) {
    const json& v = require(object, key, where);
    if (!v.is_string()) {
        throw Error(ErrorKind::format, std::string(where) + ": field '" + key + "' must be a string",
                    {{"field", key}, {"file", std::string(where)}});
    }
    return v.get<std::string>();
}

double require_number(const json& object, const char* key, std::string_view where) {
    const json& v = require(object, key, where);
    if (!v.is_number()) {
        throw Error(ErrorKind::format, std::string(where) + ": field '" + key + "' must be a number",
                    {{"field", key}, {"file", std::string(where)}});
    }
    return v.get<double>();
}

void require_array(const json& value, std::string_view where) {
    if (!value.is_array()) {
        throw Error(ErrorKind::format, std::string(where) + " must be a JSON array", {{"file", std::string(where)}});
    }
}

std::string pad(std::uint64_t v, int width) {
    std::string s = std::to_string(v);
    if (static_cast<int>(s.size()) < width) {
        s.insert(0, static_cast<std::size_t>(width) - s.size(), '0');
    }
    return s;
}

}  // namespace

ElementSchema schema_from_json(const json& value) {
    require_array(value, schema_file);
    std::vector<ElementDef> defs;
    for (const json& item : value) {
        ElementDef def;
        def.name = require_string(item, "name", schema_file);
        def.kind = parse_element_kind(require_string(item, "kind", schema_file));
        def.width = static_cast<int>(json_uint(require(item, "width", schema_file), "width"));
        if (item.contains("domain") && !item.at("domain").is_null()) {
            const json& domain = item.at("domain");
            require_array(domain, "schema.json domain");
            std::vector<DomainValue> values;
            for (const json& d : domain) {
                if (d.is_object()) {
                    values.push_back({static_cast<ElementValue>(json_uint(require(d, "value", schema_file), "value")),
                                      d.value("label", std::string())});
                } else {
                    values.push_back({static_cast<ElementValue>(json_uint(d, "domain value")), {}});
                }
            }
            def.domain = std::move(values);
        }
        defs.push_back(std::move(def));
    }
    return ElementSchema(std::move(defs));
}

json to_json(const ElementSchema& schema) {
    json out = json::array();
    for (const ElementDef& e : schema.elements()) {
        json item = {{"name", e.name}, {"kind", to_string(e.kind)}, {"width", e.width}};
        if (e.domain) {
            json domain = json::array();
            for (const DomainValue& d : *e.domain) {
                if (d.label.empty()) {
                    domain.push_back(d.value);
                } else {
                    domain.push_back({{"value", d.value}, {"label", d.label}});
                }
            }
            item["domain"] = std::move(domain);
        }
        out.push_back(std::move(item));
    }
    return out;
}

BodyOntology ontology_from_json(const json& value) {
    require_array(value, ontology_file);
    std::vector<BodyNode> nodes;
    for (const json& item : value) {
        BodyNode n;
        const std::uint64_t code = json_uint(require(item, "code", ontology_file), "code");
        if (code > 999) {
            throw Error(ErrorKind::format, "body code must have 3 digits", {{"code", item.at("code")}});
        }
        n.code = static_cast<BodyCode>(code);
        n.label = require_string(item, "label", ontology_file);
        if (item.contains("parent") && !item.at("parent").is_null()) {
            const std::uint64_t parent = json_uint(item.at("parent"), "parent");
            if (parent > 999) {
                throw Error(ErrorKind::format, "parent code must have 3 digits", {{"parent", item.at("parent")}});
            }
            n.parent = static_cast<BodyCode>(parent);
        }
        nodes.push_back(std::move(n));
    }
    return BodyOntology(std::move(nodes));
}

json to_json(const BodyOntology& ontology) {
    json out = json::array();
    for (const BodyNode& n : ontology.nodes()) {
        out.push_back({{"code", format_body_code(n.code)},
                       {"label", n.label},
                       {"parent", n.parent == 0 ? json(nullptr) : json(format_body_code(n.parent))}});
    }
    return out;
}

namespace {

json subtree(const BodyOntology& ontology, BodyCode code) {
    json children = json::array();
    for (BodyCode child : ontology.children(code)) {
        children.push_back(subtree(ontology, child));
    }
    const BodyNode& n = ontology.node(code);
    return {{"code", format_body_code(n.code)}, {"label", n.label}, {"children", std::move(children)}};
}

}  // namespace

json ontology_tree(const BodyOntology& ontology) {
    json out = json::array();
    for (BodyCode root : ontology.children(0)) {
        out.push_back(subtree(ontology, root));
    }
    return out;
}

std::vector<RelationTable> relations_from_json(const json& value, const ElementSchema& schema) {
    require_array(value, relations_file);
    std::vector<RelationTable> tables;
    for (const json& item : value) {
        const std::uint64_t index = json_uint(require(item, "element_index", relations_file), "element_index");
        if (index < 1 || index > schema.size()) {
            throw Error(ErrorKind::config,
                        "element_index " + std::to_string(index) + " outside 1.." + std::to_string(schema.size()),
                        {{"element_index", index}});
        }
        const std::size_t k = index - 1;
        const OrderingMode mode =
            item.contains("mode") ? parse_ordering_mode(require_string(item, "mode", relations_file))
                                  : OrderingMode::strict;
        Derivation derive = schema.element(k).kind == ElementKind::where ? Derivation::ontology : Derivation::none;
        if (item.contains("derive")) {
            derive = parse_derivation(require_string(item, "derive", relations_file));
        }
        std::vector<RelationEntry> entries;
        if (item.contains("entries")) {
            const json& list = item.at("entries");
            require_array(list, "relations.json entries");
            for (const json& e : list) {
                entries.push_back({static_cast<ElementValue>(json_uint(require(e, "a", relations_file), "a")),
                                   static_cast<ElementValue>(json_uint(require(e, "b", relations_file), "b")),
                                   require_number(e, "d", relations_file)});
            }
        }
        tables.emplace_back(k, require_number(item, "d_min", relations_file),
                            require_number(item, "d_max", relations_file), mode, std::move(entries), derive);
    }
    return tables;
}

json to_json(const RelationTableSet& tables) {
    json out = json::array();
    for (std::size_t k = 0; k < tables.size(); ++k) {
        if (!tables.has_table(k)) {
            continue;
        }
        const RelationTable& t = tables.table(k);
        const int width = tables.schema().element(k).width;
        json entries = json::array();
        for (const RelationEntry& e : t.declared()) {
            entries.push_back({{"a", pad(e.a, width)}, {"b", pad(e.b, width)}, {"d", e.d}});
        }
        out.push_back({{"element_index", k + 1},
                       {"d_min", t.d_min()},
                       {"d_max", t.d_max()},
                       {"mode", to_string(t.mode())},
                       {"derive", to_string(t.derivation())},
                       {"entries", std::move(entries)}});
    }
    return out;
}

}  // namespace symdist
