#pragma once

// Shared vocabulary for the concept base: labels, counts, identifiers and
// the error type every module throws.

#include <compare>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace conceptbase {

using Label = std::string;
using Count = std::int64_t;
using Tick = std::int64_t;

// Labels from a tree's base down to one node, base label included. Sibling
// labels are unique, so a label path names at most one node.
using NodePath = std::vector<Label>;

enum class TreeId : std::uint64_t {};
enum class LinkKey : std::uint64_t {};

constexpr std::uint64_t value_of(TreeId id) { return static_cast<std::uint64_t>(id); }
constexpr std::uint64_t value_of(LinkKey key) { return static_cast<std::uint64_t>(key); }

// "T3" / "L7", the rendering used in dumps, snapshots and the CLI.
std::string to_string(TreeId id);
std::string to_string(LinkKey key);
// Accepts "T3" or "3"; throws ConceptBaseError{InvalidArgument} otherwise.
TreeId parse_tree_id(std::string_view text);
LinkKey parse_link_key(std::string_view text);

std::string join_path(const NodePath& path, std::string_view separator = " ");

enum class ErrorCode {
    InvalidArgument,
    InvalidConfig,
    InvalidEvent,
    BaseMismatch,
    PathNotFound,
    CannotDetachBase,
    UnknownTree,
    UnknownLink,
    NotLinked,
    DanglingEndpoint,
    EmptyQuery,
    EmptyList,
    CorruptSnapshot,
    VersionMismatch,
    Io,
};

std::string_view to_string(ErrorCode code);

class ConceptBaseError : public std::runtime_error {
public:
    ConceptBaseError(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(conceptbase::to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace conceptbase
