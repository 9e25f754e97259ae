#pragma once

// Structural measurements over a concept base.

#include <map>
#include <span>

#include "conceptbase/concept_base.hpp"

namespace conceptbase {

// Sum of absolute differences between neighbours. Throws EmptyList.
Count energy(std::span<const Count> values);
// energy() of the pos counts along every base-to-leaf path, summed.
Count tree_energy(const ConceptTree& tree);

struct ForestStats {
    std::size_t tree_count = 0;
    std::size_t node_count = 0;
    std::size_t max_depth = 0;  // nodes on the longest base-to-leaf path
    double mean_tree_size = 0;
    std::size_t violation_count = 0;
    std::size_t total_links = 0;
    std::map<TreeId, Count> energy_per_tree;

    bool operator==(const ForestStats&) const = default;
};

ForestStats stats(const ConceptBase& base);

}  // namespace conceptbase
