#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace symdist {

/// Three-digit hierarchical body-part code `d1 d2 d3`.
///
///   d1 != 0, d2 == d3 == 0   part        (level 1, e.g. 100 head)
///   d2 != 0, d3 == 0         small part  (level 2, e.g. 120 eye)
///   d2 != 0, d3 != 0         mini part   (level 3, e.g. 123 iris)
///
/// A zero digit means "unspecified at this granularity": 120 is the eye as a
/// whole. The parent of a code is the code with its lowest nonzero digit zeroed.
using BodyCode = std::uint16_t;

struct BodyNode {
    BodyCode code = 0;
    std::string label;
    BodyCode parent = 0;  ///< 0 for level-1 parts.

    bool operator==(const BodyNode&) const = default;
};

/// Returns 1..3 for a well-formed code, 0 otherwise (including 000).
int body_level(BodyCode code) noexcept;

/// Zeroes the lowest nonzero digit. `body_parent(100) == 0`.
BodyCode body_parent(BodyCode code) noexcept;

/// Edge count between two well-formed codes in the forest of parts; codes under
/// different level-1 parts are joined through a virtual root.
int body_tree_distance(BodyCode a, BodyCode b) noexcept;

/// Renders a code as its three-digit string ("020" style padding).
std::string format_body_code(BodyCode code);

class BodyOntology {
public:
    BodyOntology() = default;

    /// Validates level structure, parent existence, global code uniqueness and
    /// per-sibling label uniqueness. Throws `Error(config)` with a witness.
    explicit BodyOntology(std::vector<BodyNode> nodes);

    bool contains(BodyCode code) const noexcept { return index_.contains(code); }
    const BodyNode& node(BodyCode code) const;

    /// Sorted ascending by code.
    std::span<const BodyNode> nodes() const noexcept { return nodes_; }
    std::vector<BodyCode> codes() const;
    std::vector<BodyCode> children(BodyCode parent) const;
    std::optional<BodyCode> find_child(BodyCode parent, std::string_view label) const;

    std::size_t size() const noexcept { return nodes_.size(); }
    bool empty() const noexcept { return nodes_.empty(); }

private:
    std::vector<BodyNode> nodes_;
    std::unordered_map<BodyCode, std::size_t> index_;
};

/// Resolves a root-to-node label chain (1 to 3 labels) to its code.
/// Throws `Error(not_found)` whose witness names the failing level (1-based).
BodyCode body_code(std::span<const std::string> path, const BodyOntology& ontology);

}  // namespace symdist
