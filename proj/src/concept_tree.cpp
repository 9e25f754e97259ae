#include "conceptbase/concept_tree.hpp"

#include <algorithm>
#include <set>

#include "conceptbase/text_ingest.hpp"

namespace conceptbase {

namespace {

void add_negative_below(ConceptNode& node, Count amount) {
    for (auto& child : node.children) {
        child.neg += amount;
        add_negative_below(child, amount);
    }
}

// Walks to the parent of `path`'s last node, calling on_ancestor for every
// node from the base down to that parent.
template <typename OnAncestor>
ConceptNode& walk_to_parent(ConceptTree& tree, const NodePath& path, OnAncestor&& on_ancestor) {
    if (path.empty() || path.front() != tree.base.label) {
        throw ConceptBaseError(ErrorCode::PathNotFound, "no node at '" + join_path(path) + "'");
    }
    if (path.size() == 1) {
        throw ConceptBaseError(ErrorCode::CannotDetachBase, "cannot detach the base of " + to_string(tree.id));
    }
    if (find_node(tree, path) == nullptr) {
        throw ConceptBaseError(ErrorCode::PathNotFound, "no node at '" + join_path(path) + "'");
    }
    ConceptNode* node = &tree.base;
    on_ancestor(*node);
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        node = node->find_child(path[i]);
        on_ancestor(*node);
    }
    return *node;
}

ConceptNode take_child(ConceptNode& parent, std::string_view label) {
    auto it = std::find_if(parent.children.begin(), parent.children.end(),
                           [&](const ConceptNode& c) { return c.label == label; });
    ConceptNode removed = std::move(*it);
    parent.children.erase(it);
    return removed;
}

void put_child(ConceptNode& parent, const ConceptNode& branch) {
    if (auto* existing = parent.find_child(branch.label)) {
        merge_counts(*existing, branch);
    } else {
        parent.children.push_back(branch);
    }
}

void validate_node(const ConceptNode& node, NodePath& path, std::vector<Violation>& out) {
    path.push_back(node.label);
    if (!is_valid_label(node.label)) {
        out.push_back({path, TreeRule::InvalidLabel, "label '" + node.label + "' is not a valid concept label"});
    }
    if (node.pos < 1) {
        out.push_back({path, TreeRule::NonPositiveCount, "pos " + std::to_string(node.pos) + " < 1"});
    }
    if (node.neg < 0 || node.terminated < 0) {
        out.push_back({path, TreeRule::NegativeCount,
                       "neg " + std::to_string(node.neg) + ", terminated " + std::to_string(node.terminated)});
    }
    Count child_sum = 0;
    std::set<std::string_view> seen;
    for (const auto& child : node.children) {
        child_sum += child.pos;
        if (!seen.insert(child.label).second) {
            NodePath child_path = path;
            child_path.push_back(child.label);
            out.push_back({child_path, TreeRule::DuplicateSibling, "label repeated among siblings"});
        }
        if (child.pos > node.pos) {
            NodePath child_path = path;
            child_path.push_back(child.label);
            out.push_back({child_path, TreeRule::TriangularViolation,
                           "child pos " + std::to_string(child.pos) + " exceeds parent pos " +
                               std::to_string(node.pos)});
        }
    }
    if (child_sum + node.terminated != node.pos) {
        out.push_back({path, TreeRule::SumViolation,
                       "children " + std::to_string(child_sum) + " + terminated " +
                           std::to_string(node.terminated) + " != pos " + std::to_string(node.pos)});
    }
    for (const auto& child : node.children) validate_node(child, path, out);
    path.pop_back();
}

void visit_nodes(const ConceptNode& node, NodePath& path,
                 const std::function<void(const ConceptNode&, const NodePath&)>& visit) {
    path.push_back(node.label);
    visit(node, path);
    for (const auto& child : node.children) visit_nodes(child, path, visit);
    path.pop_back();
}

}  // namespace

ConceptNode* ConceptNode::find_child(std::string_view child_label) {
    for (auto& child : children) {
        if (child.label == child_label) return &child;
    }
    return nullptr;
}

const ConceptNode* ConceptNode::find_child(std::string_view child_label) const {
    for (const auto& child : children) {
        if (child.label == child_label) return &child;
    }
    return nullptr;
}

std::string_view to_string(TreeRule rule) {
    switch (rule) {
        case TreeRule::NonPositiveCount: return "NonPositiveCount";
        case TreeRule::NegativeCount: return "NegativeCount";
        case TreeRule::SumViolation: return "SumViolation";
        case TreeRule::TriangularViolation: return "TriangularViolation";
        case TreeRule::DuplicateSibling: return "DuplicateSibling";
        case TreeRule::InvalidLabel: return "InvalidLabel";
    }
    return "Unknown";
}

ConceptNode make_chain(std::span<const Label> labels, Count pos) {
    if (labels.empty()) throw ConceptBaseError(ErrorCode::InvalidArgument, "empty chain");
    ConceptNode root{labels.front(), pos, 0, 0, {}};
    ConceptNode* tail = &root;
    for (std::size_t i = 1; i < labels.size(); ++i) {
        tail->children.push_back(ConceptNode{labels[i], pos, 0, 0, {}});
        tail = &tail->children.back();
    }
    tail->terminated = pos;
    return root;
}

ConceptNode* find_node(ConceptTree& tree, const NodePath& path) {
    return const_cast<ConceptNode*>(find_node(std::as_const(tree), path));
}

const ConceptNode* find_node(const ConceptTree& tree, const NodePath& path) {
    if (path.empty() || path.front() != tree.base.label) return nullptr;
    const ConceptNode* node = &tree.base;
    for (std::size_t i = 1; i < path.size() && node != nullptr; ++i) node = node->find_child(path[i]);
    return node;
}

PrefixMatch match_prefix(const ConceptTree& tree, std::span<const Label> concepts) {
    PrefixMatch match;
    if (concepts.empty() || concepts.front() != tree.base.label) return match;
    const ConceptNode* node = &tree.base;
    match.path.push_back(node->label);
    match.length = 1;
    for (std::size_t i = 1; i < concepts.size(); ++i) {
        const ConceptNode* child = node->find_child(concepts[i]);
        if (child == nullptr) break;
        node = child;
        match.path.push_back(node->label);
        ++match.length;
    }
    return match;
}

AddOutcome add_from_base(ConceptTree& tree, std::span<const Label> concepts, const AddHooks& hooks) {
    if (concepts.empty() || concepts.front() != tree.base.label) {
        throw ConceptBaseError(ErrorCode::BaseMismatch,
                               "sequence does not start with base '" + tree.base.label + "' of " + to_string(tree.id));
    }
    AddOutcome outcome;
    ConceptNode* node = &tree.base;
    NodePath path{node->label};
    ++node->pos;
    outcome.matched_depth = 1;

    for (std::size_t i = 1; i < concepts.size(); ++i) {
        if (ConceptNode* child = node->find_child(concepts[i])) {
            ++child->pos;
            node = child;
            path.push_back(node->label);
            ++outcome.matched_depth;
            continue;
        }
        if (hooks.leaves_via_link && hooks.leaves_via_link(path, concepts[i])) {
            ++node->terminated;
            outcome.exited_at = path;
            outcome.consumed = i;
            return outcome;
        }
        const Count stops = hooks.prior_stops ? hooks.prior_stops(*node, path) : node->terminated;
        ConceptNode branch = make_chain(concepts.subspan(i), 1);
        for (ConceptNode* n = &branch;; n = &n->children.front()) {
            n->neg = stops;
            if (n->children.empty()) break;
        }
        node->children.push_back(std::move(branch));
        outcome.extended = true;
        outcome.branch_created_at = path;
        outcome.consumed = concepts.size();
        return outcome;
    }

    ++node->terminated;
    if (!node->children.empty()) {
        outcome.terminated_short = true;
        add_negative_below(*node, 1);
    }
    outcome.consumed = concepts.size();
    return outcome;
}

ConceptTree detach_branch(ConceptTree& tree, const NodePath& path, TreeId new_id) {
    const Count removed_pos = find_node(std::as_const(tree), path) ? find_node(tree, path)->pos : 0;
    ConceptNode& parent = walk_to_parent(tree, path, [&](ConceptNode& ancestor) { ancestor.pos -= removed_pos; });
    return ConceptTree{new_id, take_child(parent, path.back())};
}

void attach_branch(ConceptTree& tree, const NodePath& parent_path, const ConceptNode& branch) {
    if (find_node(std::as_const(tree), parent_path) == nullptr) {
        throw ConceptBaseError(ErrorCode::PathNotFound, "no node at '" + join_path(parent_path) + "'");
    }
    ConceptNode* node = &tree.base;
    node->pos += branch.pos;
    for (std::size_t i = 1; i < parent_path.size(); ++i) {
        node = node->find_child(parent_path[i]);
        node->pos += branch.pos;
    }
    put_child(*node, branch);
}

ConceptNode cut_branch(ConceptTree& tree, const NodePath& path) {
    ConceptNode& parent = walk_to_parent(tree, path, [](ConceptNode&) {});
    ConceptNode removed = take_child(parent, path.back());
    parent.terminated += removed.pos;
    return removed;
}

void restore_branch(ConceptTree& tree, const NodePath& parent_path, const ConceptNode& branch) {
    ConceptNode* parent = find_node(tree, parent_path);
    if (parent == nullptr) {
        throw ConceptBaseError(ErrorCode::PathNotFound, "no node at '" + join_path(parent_path) + "'");
    }
    parent->terminated -= branch.pos;
    put_child(*parent, branch);
}

void merge_counts(ConceptNode& target, const ConceptNode& source) {
    target.pos += source.pos;
    target.neg += source.neg;
    target.terminated += source.terminated;
    for (const auto& child : source.children) put_child(target, child);
}

void clear_negative(ConceptNode& node) {
    node.neg = 0;
    for (auto& child : node.children) clear_negative(child);
}

std::vector<Violation> validate(const ConceptTree& tree) {
    std::vector<Violation> out;
    NodePath path;
    validate_node(tree.base, path, out);
    return out;
}

void for_each_node(const ConceptTree& tree, const std::function<void(const ConceptNode&, const NodePath&)>& visit) {
    NodePath path;
    visit_nodes(tree.base, path, visit);
}

std::size_t node_count(const ConceptNode& node) {
    std::size_t n = 1;
    for (const auto& child : node.children) n += node_count(child);
    return n;
}

bool is_chain(const ConceptNode& node) {
    const ConceptNode* n = &node;
    while (!n->children.empty()) {
        if (n->children.size() > 1) return false;
        n = &n->children.front();
    }
    return true;
}

std::vector<Label> chain_labels(const ConceptNode& node) {
    std::vector<Label> labels;
    const ConceptNode* n = &node;
    for (;;) {
        labels.push_back(n->label);
        if (n->children.empty()) break;
        n = &n->children.front();
    }
    return labels;
}

}  // namespace conceptbase
