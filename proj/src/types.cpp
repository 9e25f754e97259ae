#include "conceptbase/types.hpp"

#include <charconv>

namespace conceptbase {

namespace {

std::uint64_t parse_prefixed(std::string_view text, char prefix, std::string_view what) {
    std::string_view digits = text;
    if (!digits.empty() && (digits.front() == prefix || digits.front() == prefix + ('a' - 'A'))) {
        digits.remove_prefix(1);
    }
    std::uint64_t value = 0;
    auto [end, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (digits.empty() || ec != std::errc{} || end != digits.data() + digits.size()) {
        throw ConceptBaseError(ErrorCode::InvalidArgument,
                               "malformed " + std::string(what) + " '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace

std::string to_string(TreeId id) { return "T" + std::to_string(value_of(id)); }
std::string to_string(LinkKey key) { return "L" + std::to_string(value_of(key)); }

TreeId parse_tree_id(std::string_view text) { return TreeId{parse_prefixed(text, 'T', "tree id")}; }
LinkKey parse_link_key(std::string_view text) { return LinkKey{parse_prefixed(text, 'L', "link key")}; }

std::string join_path(const NodePath& path, std::string_view separator) {
    std::string out;
    for (std::size_t i = 0; i < path.size(); ++i) {
        if (i > 0) out += separator;
        out += path[i];
    }
    return out;
}

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidEvent: return "InvalidEvent";
        case ErrorCode::BaseMismatch: return "BaseMismatch";
        case ErrorCode::PathNotFound: return "PathNotFound";
        case ErrorCode::CannotDetachBase: return "CannotDetachBase";
        case ErrorCode::UnknownTree: return "UnknownTree";
        case ErrorCode::UnknownLink: return "UnknownLink";
        case ErrorCode::NotLinked: return "NotLinked";
        case ErrorCode::DanglingEndpoint: return "DanglingEndpoint";
        case ErrorCode::EmptyQuery: return "EmptyQuery";
        case ErrorCode::EmptyList: return "EmptyList";
        case ErrorCode::CorruptSnapshot: return "CorruptSnapshot";
        case ErrorCode::VersionMismatch: return "VersionMismatch";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

}  // namespace conceptbase
