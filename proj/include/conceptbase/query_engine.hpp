#pragma once

// Key-gated traversal, conjunctive queries and count-based confidence.

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "conceptbase/concept_base.hpp"

namespace conceptbase {

// Everything reachable from one start tree under one capability.
struct Grouping {
    std::string entity;  // empty for an anonymous capability
    TreeId start{};
    std::vector<std::vector<Label>> paths;
    std::set<Label> closure;
    std::set<LinkKey> used_links;
};

struct QueryResult {
    std::vector<std::vector<Label>> paths;
    std::vector<TreeId> matched_trees;  // ascending, no repeats
    std::optional<double> confidence;
    std::vector<Grouping> groupings;
    std::set<LinkKey> used_links;
};

// Depth first from each start tree base. Children are tried before links, in
// insertion order; links in key order. A key is spent once crossed and stays
// spent until the next start tree. Only maximal paths are returned.
Grouping expand(const ConceptBase& base, TreeId start, const Capability& capability, const std::string& entity = {});
QueryResult traverse(const ConceptBase& base, const Capability& capability, const std::string& entity = {});
QueryResult traverse(const ConceptBase& base, const std::string& entity);

// Keeps the (entity, start tree) groupings whose closure holds every required
// label. Without an entity every keyset is tried. Throws EmptyQuery.
QueryResult query_all(const ConceptBase& base, const std::optional<std::string>& entity,
                      const std::set<Label>& required);

// The node a label path leads to, following children first and then links.
// Throws PathNotFound.
std::pair<TreeId, NodePath> resolve_path(const ConceptBase& base, const std::vector<Label>& path);

// child(candidate).pos / n.pos for the node n at `path`, 0 when the candidate
// is not a child.
double concept_confidence(const ConceptBase& base, const std::vector<Label>& path, const Label& candidate);
// n.terminated / n.pos, the share of sequences that stop at n.
double termination_share(const ConceptBase& base, const std::vector<Label>& path);

}  // namespace conceptbase
