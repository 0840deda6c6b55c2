#pragma once

#include "symdist/bundle_io.hpp"
#include "symdist/error.hpp"
#include "symdist/knowledge_base.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <optional>
#include <string>

namespace symdist::test {

inline std::filesystem::path fixture_dir() {
    return SYMDIST_FIXTURE_DIR;
}

inline std::filesystem::path prior_art_dir() {
    return SYMDIST_PRIOR_ART_DIR;
}

inline BundleTexts fixture_texts() {
    return read_bundle_dir(fixture_dir());
}

inline const KnowledgeBase& fixture_kb() {
    static const KnowledgeBase kb = load_bundle(fixture_dir());
    return kb;
}

inline nlohmann::json fixture_json(const char* file) {
    return parse_json_text(read_text_file(fixture_dir() / file), file);
}

/// Kind of the `Error` thrown by `fn`, or nullopt when it returns normally.
template <typename F>
std::optional<ErrorKind> error_kind(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    return std::nullopt;
}

/// The `Error` thrown by `fn`; fails loudly if nothing is thrown.
template <typename F>
Error caught(F&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e;
    }
    throw std::logic_error("expected symdist::Error");
}

}  // namespace symdist::test
