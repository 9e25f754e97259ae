#include "conceptbase/metrics.hpp"

#include <algorithm>
#include <vector>

namespace conceptbase {

namespace {

void path_energy(const ConceptNode& node, std::vector<Count>& trail, Count& total) {
    trail.push_back(node.pos);
    if (node.children.empty()) {
        total += energy(trail);
    } else {
        for (const auto& child : node.children) path_energy(child, trail, total);
    }
    trail.pop_back();
}

std::size_t depth(const ConceptNode& node) {
    std::size_t deepest = 0;
    for (const auto& child : node.children) deepest = std::max(deepest, depth(child));
    return deepest + 1;
}

}  // namespace

Count energy(std::span<const Count> values) {
    if (values.empty()) throw ConceptBaseError(ErrorCode::EmptyList, "energy of an empty list");
    Count total = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
        const Count step = values[i] - values[i - 1];
        total += step < 0 ? -step : step;
    }
    return total;
}

Count tree_energy(const ConceptTree& tree) {
    std::vector<Count> trail;
    Count total = 0;
    path_energy(tree.base, trail, total);
    return total;
}

ForestStats stats(const ConceptBase& base) {
    ForestStats s;
    s.tree_count = base.trees().size();
    s.total_links = base.links().links().size();
    for (const auto& [id, tree] : base.trees()) {
        s.node_count += node_count(tree.base);
        s.max_depth = std::max(s.max_depth, depth(tree.base));
        s.violation_count += validate(tree).size();
        s.energy_per_tree[id] = tree_energy(tree);
    }
    if (s.tree_count > 0) s.mean_tree_size = static_cast<double>(s.node_count) / static_cast<double>(s.tree_count);
    return s;
}

}  // namespace conceptbase
