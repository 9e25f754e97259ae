#pragma once

// A single counted concept tree. Every addition starts at the base; counts
// narrow from the base towards the leaves (the triangular rule) and each
// node's count is exactly split between its children and the sequences that
// ended there.

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "conceptbase/types.hpp"

namespace conceptbase {

struct ConceptNode {
    Label label;
    Count pos = 0;         // sequences that reached this node
    Count neg = 0;         // stop-short evidence against this node
    Count terminated = 0;  // sequences that left the tree here
    std::vector<ConceptNode> children;  // insertion order, unique labels

    ConceptNode* find_child(std::string_view child_label);
    const ConceptNode* find_child(std::string_view child_label) const;

    bool operator==(const ConceptNode&) const = default;
};

struct ConceptTree {
    TreeId id{};
    ConceptNode base;

    bool operator==(const ConceptTree&) const = default;
};

struct PrefixMatch {
    NodePath path;          // deepest matched node, empty when the base does not match
    std::size_t length = 0;
};

struct AddOutcome {
    std::size_t matched_depth = 0;
    bool extended = false;          // a new child chain was grown
    bool terminated_short = false;  // sequence ended at a node that has children
    std::optional<NodePath> branch_created_at;
    // Set when the walk stopped at a node because a link carries the rest of
    // the sequence; `consumed` labels were applied to this tree.
    std::optional<NodePath> exited_at;
    std::size_t consumed = 0;
};

// Hooks the forest supplies so a walk can cooperate with links. Defaults make
// add_from_base a pure single-tree operation.
struct AddHooks {
    // True when the walk should leave the tree at `at` because a link continues
    // with `next`. Consulted only when `at` has no child labelled `next`.
    std::function<bool(const NodePath& at, const Label& next)> leaves_via_link;
    // Sequences that stopped exactly at `node` (as opposed to continuing
    // elsewhere). A freshly grown branch starts with this much negative
    // evidence. Defaults to node.terminated.
    std::function<Count(const ConceptNode& node, const NodePath& path)> prior_stops;
};

enum class TreeRule {
    NonPositiveCount,
    NegativeCount,
    SumViolation,
    TriangularViolation,
    DuplicateSibling,
    InvalidLabel,
};

std::string_view to_string(TreeRule rule);

struct Violation {
    NodePath path;
    TreeRule rule;
    std::string detail;
};

ConceptNode make_chain(std::span<const Label> labels, Count pos = 1);

ConceptNode* find_node(ConceptTree& tree, const NodePath& path);
const ConceptNode* find_node(const ConceptTree& tree, const NodePath& path);

PrefixMatch match_prefix(const ConceptTree& tree, std::span<const Label> concepts);

// Throws BaseMismatch unless concepts[0] is the base label.
AddOutcome add_from_base(ConceptTree& tree, std::span<const Label> concepts, const AddHooks& hooks = {});

// Removes the subtree at `path`, lowering every ancestor's pos by the removed
// root's pos. The removed subtree keeps its counts.
ConceptTree detach_branch(ConceptTree& tree, const NodePath& path, TreeId new_id);
// Inverse of detach_branch: merges `branch` under `parent` and raises every
// ancestor (parent included) by branch.pos.
void attach_branch(ConceptTree& tree, const NodePath& parent, const ConceptNode& branch);

// Removes the subtree at `path` but keeps the evidence that sequences reached
// the cut point: the parent's terminated absorbs the removed pos, ancestors
// are untouched. Used when the removed branch lives on behind a link.
ConceptNode cut_branch(ConceptTree& tree, const NodePath& path);
// Inverse of cut_branch.
void restore_branch(ConceptTree& tree, const NodePath& parent, const ConceptNode& branch);

// Adds every count of `source` into `target` (labels must match), merging
// children by label and appending new ones in source order.
void merge_counts(ConceptNode& target, const ConceptNode& source);

void clear_negative(ConceptNode& node);

std::vector<Violation> validate(const ConceptTree& tree);

// Pre-order visit with the path of each node.
void for_each_node(const ConceptTree& tree, const std::function<void(const ConceptNode&, const NodePath&)>& visit);

std::size_t node_count(const ConceptNode& node);
// True when the subtree rooted at `node` is a single unbranched chain.
bool is_chain(const ConceptNode& node);
std::vector<Label> chain_labels(const ConceptNode& node);

}  // namespace conceptbase
