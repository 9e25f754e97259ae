#include "conceptbase/query_engine.hpp"

#include <algorithm>

namespace conceptbase {

namespace {

struct Walker {
    const ConceptBase& base;
    const Capability& capability;
    Grouping& out;
    std::set<LinkKey> spent;
    std::set<TreeId> visited;

    void visit(TreeId tree, const ConceptNode& node, NodePath& in_tree, std::vector<Label>& labels) {
        visited.insert(tree);
        in_tree.push_back(node.label);
        labels.push_back(node.label);
        out.closure.insert(node.label);
        bool extended = false;
        for (const auto& child : node.children) {
            extended = true;
            visit(tree, child, in_tree, labels);
        }
        for (const Link* link : base.links().outgoing(LinkEndpoint{tree, in_tree})) {
            if (!capability.link_keys.contains(link->key) || spent.contains(link->key)) continue;
            const ConceptTree* target = base.find_tree(link->to);
            if (target == nullptr) continue;
            extended = true;
            spent.insert(link->key);
            out.used_links.insert(link->key);
            NodePath target_path;
            visit(target->id, target->base, target_path, labels);
        }
        if (!extended) out.paths.push_back(labels);
        labels.pop_back();
        in_tree.pop_back();
    }
};

void collect(QueryResult& result, Grouping grouping, const std::set<TreeId>& visited) {
    result.paths.insert(result.paths.end(), grouping.paths.begin(), grouping.paths.end());
    result.used_links.insert(grouping.used_links.begin(), grouping.used_links.end());
    for (const auto id : visited) {
        if (!std::binary_search(result.matched_trees.begin(), result.matched_trees.end(), id)) {
            result.matched_trees.insert(std::upper_bound(result.matched_trees.begin(), result.matched_trees.end(), id),
                                        id);
        }
    }
    result.groupings.push_back(std::move(grouping));
}

std::pair<Grouping, std::set<TreeId>> expand_tracking(const ConceptBase& base, TreeId start,
                                                      const Capability& capability, const std::string& entity) {
    Grouping grouping;
    grouping.entity = entity;
    grouping.start = start;
    const ConceptTree* tree = base.find_tree(start);
    if (tree == nullptr) return {std::move(grouping), {}};
    Walker walker{base, capability, grouping, {}, {}};
    NodePath in_tree;
    std::vector<Label> labels;
    walker.visit(start, tree->base, in_tree, labels);
    return {std::move(grouping), std::move(walker.visited)};
}

const ConceptNode& node_at(const ConceptBase& base, const std::vector<Label>& path) {
    const auto [tree, in_tree] = resolve_path(base, path);
    return *find_node(*base.find_tree(tree), in_tree);
}

}  // namespace

Grouping expand(const ConceptBase& base, TreeId start, const Capability& capability, const std::string& entity) {
    return expand_tracking(base, start, capability, entity).first;
}

QueryResult traverse(const ConceptBase& base, const Capability& capability, const std::string& entity) {
    QueryResult result;
    for (const auto start : capability.start_trees) {
        auto [grouping, visited] = expand_tracking(base, start, capability, entity);
        if (visited.empty()) continue;
        collect(result, std::move(grouping), visited);
    }
    return result;
}

QueryResult traverse(const ConceptBase& base, const std::string& entity) {
    return traverse(base, base.resolve(entity), entity);
}

QueryResult query_all(const ConceptBase& base, const std::optional<std::string>& entity,
                      const std::set<Label>& required) {
    if (required.empty()) throw ConceptBaseError(ErrorCode::EmptyQuery, "no required concepts");
    std::vector<std::string> entities;
    if (entity) {
        entities.push_back(*entity);
    } else {
        for (const auto& [name, keyset] : base.links().keysets()) entities.push_back(name);
    }
    QueryResult result;
    for (const auto& name : entities) {
        const Capability capability = base.resolve(name);
        for (const auto start : capability.start_trees) {
            auto [grouping, visited] = expand_tracking(base, start, capability, name);
            const bool satisfied = std::all_of(required.begin(), required.end(),
                                               [&](const Label& l) { return grouping.closure.contains(l); });
            if (satisfied) collect(result, std::move(grouping), visited);
        }
    }
    return result;
}

std::pair<TreeId, NodePath> resolve_path(const ConceptBase& base, const std::vector<Label>& path) {
    const Route route = base.trace(path);
    if (!route.complete) {
        throw ConceptBaseError(ErrorCode::PathNotFound, "no node at '" + join_path(path) + "'");
    }
    return route.nodes.back();
}

double concept_confidence(const ConceptBase& base, const std::vector<Label>& path, const Label& candidate) {
    const ConceptNode& node = node_at(base, path);
    const ConceptNode* child = node.find_child(candidate);
    if (child == nullptr || node.pos <= 0) return 0.0;
    return static_cast<double>(child->pos) / static_cast<double>(node.pos);
}

double termination_share(const ConceptBase& base, const std::vector<Label>& path) {
    const ConceptNode& node = node_at(base, path);
    if (node.pos <= 0) return 0.0;
    return static_cast<double>(node.terminated) / static_cast<double>(node.pos);
}

}  // namespace conceptbase
