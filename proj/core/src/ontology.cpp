#include "symdist/ontology.hpp"

#include "symdist/error.hpp"

#include <algorithm>
#include <set>
#include <utility>

namespace symdist {

namespace {

BodyCode truncate_to_level(BodyCode code, int level) noexcept {
    switch (level) {
        case 1: return static_cast<BodyCode>(code / 100 * 100);
        case 2: return static_cast<BodyCode>(code / 10 * 10);
        default: return code;
    }
}

}  // namespace

int body_level(BodyCode code) noexcept {
    if (code == 0 || code > 999) {
        return 0;
    }
    const int d1 = code / 100;
    const int d2 = code / 10 % 10;
    const int d3 = code % 10;
    if (d1 == 0) {
        return 0;
    }
    if (d3 != 0) {
        return d2 != 0 ? 3 : 0;
    }
    return d2 != 0 ? 2 : 1;
}

BodyCode body_parent(BodyCode code) noexcept {
    if (code % 10 != 0) {
        return static_cast<BodyCode>(code / 10 * 10);
    }
    if (code / 10 % 10 != 0) {
        return static_cast<BodyCode>(code / 100 * 100);
    }
    return 0;
}

int body_tree_distance(BodyCode a, BodyCode b) noexcept {
    const int la = body_level(a);
    const int lb = body_level(b);
    int common = 0;
    for (int level = std::min(la, lb); level >= 1; --level) {
        if (truncate_to_level(a, level) == truncate_to_level(b, level)) {
            common = level;
            break;
        }
    }
    return la + lb - 2 * common;
}

std::string format_body_code(BodyCode code) {
    std::string out = std::to_string(code);
    if (out.size() < 3) {
        out.insert(0, 3 - out.size(), '0');
    }
    return out;
}

BodyOntology::BodyOntology(std::vector<BodyNode> nodes) : nodes_(std::move(nodes)) {
    std::sort(nodes_.begin(), nodes_.end(),
              [](const BodyNode& l, const BodyNode& r) { return l.code < r.code; });

    for (std::size_t i = 0; i < nodes_.size(); ++i) {
        const BodyNode& n = nodes_[i];
        if (body_level(n.code) == 0) {
            throw Error(ErrorKind::config, "malformed body code " + format_body_code(n.code),
                        {{"code", format_body_code(n.code)}});
        }
        if (!index_.emplace(n.code, i).second) {
            throw Error(ErrorKind::config, "duplicate body code " + format_body_code(n.code),
                        {{"code", format_body_code(n.code)}});
        }
        if (n.label.empty()) {
            throw Error(ErrorKind::config, "empty label for body code " + format_body_code(n.code),
                        {{"code", format_body_code(n.code)}});
        }
    }

    std::set<std::pair<BodyCode, std::string>> sibling_labels;
    for (const BodyNode& n : nodes_) {
        const BodyCode expected = body_parent(n.code);
        if (n.parent != expected) {
            throw Error(ErrorKind::config,
                        "body code " + format_body_code(n.code) + " declares parent " +
                            format_body_code(n.parent) + ", expected " + format_body_code(expected),
                        {{"code", format_body_code(n.code)}, {"parent", format_body_code(n.parent)}});
        }
        if (expected != 0 && !index_.contains(expected)) {
            throw Error(ErrorKind::config,
                        "parent " + format_body_code(expected) + " of " + format_body_code(n.code) +
                            " does not exist",
                        {{"code", format_body_code(n.code)}, {"parent", format_body_code(expected)}});
        }
        if (!sibling_labels.emplace(n.parent, n.label).second) {
            throw Error(ErrorKind::config, "label '" + n.label + "' repeated among siblings",
                        {{"code", format_body_code(n.code)}, {"label", n.label}});
        }
    }
}

const BodyNode& BodyOntology::node(BodyCode code) const {
    const auto it = index_.find(code);
    if (it == index_.end()) {
        throw Error(ErrorKind::not_found, "body code " + format_body_code(code) + " not in ontology",
                    {{"code", format_body_code(code)}});
    }
    return nodes_[it->second];
}

std::vector<BodyCode> BodyOntology::codes() const {
    std::vector<BodyCode> out;
    out.reserve(nodes_.size());
    for (const BodyNode& n : nodes_) {
        out.push_back(n.code);
    }
    return out;
}

std::vector<BodyCode> BodyOntology::children(BodyCode parent) const {
    std::vector<BodyCode> out;
    for (const BodyNode& n : nodes_) {
        if (n.parent == parent) {
            out.push_back(n.code);
        }
    }
    return out;
}

std::optional<BodyCode> BodyOntology::find_child(BodyCode parent, std::string_view label) const {
    for (const BodyNode& n : nodes_) {
        if (n.parent == parent && n.label == label) {
            return n.code;
        }
    }
    return std::nullopt;
}

BodyCode body_code(std::span<const std::string> path, const BodyOntology& ontology) {
    if (path.empty() || path.size() > 3) {
        throw Error(ErrorKind::validation, "body path must have 1 to 3 labels",
                    {{"length", path.size()}});
    }
    BodyCode current = 0;
    for (std::size_t i = 0; i < path.size(); ++i) {
        const auto next = ontology.find_child(current, path[i]);
        if (!next) {
            throw Error(ErrorKind::not_found,
                        "no body part '" + path[i] + "' at level " + std::to_string(i + 1),
                        {{"level", i + 1}, {"label", path[i]}});
        }
        current = *next;
    }
    return current;
}

}  // namespace symdist
