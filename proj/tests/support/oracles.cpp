#include "oracles.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <sstream>

namespace oracle {

using conceptbase::BaseState;
using conceptbase::ConceptNode;
using conceptbase::ConceptTree;

namespace {

const ConceptTree* tree_based_at(const BaseState& state, const Label& label) {
    for (const auto& [id, tree] : state.trees) {
        if (tree.base.label == label) return &tree;
    }
    return nullptr;
}

const ConceptNode* child_of(const ConceptNode& node, const Label& label) {
    for (const auto& child : node.children) {
        if (child.label == label) return &child;
    }
    return nullptr;
}

const ConceptTree* linked_tree(const BaseState& state, TreeId tree, const NodePath& path, const Label& next) {
    for (const auto& [key, link] : state.links.links()) {
        if (link.from.tree != tree || link.from.path != path) continue;
        const auto it = state.trees.find(link.to);
        if (it != state.trees.end() && it->second.base.label == next) return &it->second;
    }
    return nullptr;
}

void gather(const ConceptTree& tree, const ConceptNode& node, NodePath& path,
            std::vector<std::pair<std::pair<TreeId, NodePath>, const ConceptNode*>>& out) {
    path.push_back(node.label);
    out.push_back({{tree.id, path}, &node});
    for (const auto& child : node.children) gather(tree, child, path, out);
    path.pop_back();
}

}  // namespace

std::optional<Tally> replay(const BaseState& state) {
    Tally tally;
    for (const auto& event : state.ledger) {
        const ConceptTree* tree = tree_based_at(state, event.concepts.front());
        if (tree == nullptr) return std::nullopt;
        const ConceptNode* node = &tree->base;
        NodePath path{node->label};
        ++tally[{tree->id, path}].pos;
        for (std::size_t i = 1; i < event.concepts.size(); ++i) {
            const Label& next = event.concepts[i];
            if (const ConceptNode* child = child_of(*node, next)) {
                node = child;
                path.push_back(next);
            } else if (const ConceptTree* target = linked_tree(state, tree->id, path, next)) {
                ++tally[{tree->id, path}].terminated;
                tree = target;
                node = &tree->base;
                path = NodePath{next};
            } else {
                return std::nullopt;
            }
            ++tally[{tree->id, path}].pos;
        }
        ++tally[{tree->id, path}].terminated;
    }
    return tally;
}

std::string compare_with_replay(const BaseState& state) {
    const auto tally = replay(state);
    if (!tally) return "some ledger event cannot be routed through the forest";
    std::vector<std::pair<std::pair<TreeId, NodePath>, const ConceptNode*>> nodes;
    for (const auto& [id, tree] : state.trees) {
        NodePath path;
        gather(tree, tree.base, path, nodes);
    }
    for (const auto& [where, node] : nodes) {
        const auto it = tally->find(where);
        const NodeTally expected = it == tally->end() ? NodeTally{} : it->second;
        if (expected.pos != node->pos || expected.terminated != node->terminated) {
            std::ostringstream msg;
            msg << conceptbase::to_string(where.first) << " [" << conceptbase::join_path(where.second)
                << "]: stored pos/terminated " << node->pos << "/" << node->terminated << ", replay "
                << expected.pos << "/" << expected.terminated;
            return msg.str();
        }
    }
    for (const auto& [where, counts] : *tally) {
        const bool present = std::any_of(nodes.begin(), nodes.end(), [&](const auto& n) { return n.first == where; });
        if (!present) return "replay touched a node that does not exist";
    }
    return {};
}

std::vector<double> confidence_sums(const conceptbase::ConceptBase& base) {
    std::vector<double> sums;
    for (const auto& [id, tree] : base.trees()) {
        std::vector<std::pair<std::pair<TreeId, NodePath>, const ConceptNode*>> nodes;
        NodePath path;
        gather(tree, tree.base, path, nodes);
        for (const auto& [where, node] : nodes) {
            if (node->children.empty()) continue;
            double sum = static_cast<double>(node->terminated) / static_cast<double>(node->pos);
            for (const auto& child : node->children) {
                sum += static_cast<double>(child.pos) / static_cast<double>(node->pos);
            }
            sums.push_back(sum);
        }
    }
    return sums;
}

Count brute_energy(const std::vector<Count>& values) {
    Count total = 0;
    for (std::size_t i = 0; i + 1 < values.size(); ++i) {
        total += values[i] > values[i + 1] ? values[i] - values[i + 1] : values[i + 1] - values[i];
    }
    return total;
}

std::vector<SequenceEvent> random_stream(std::mt19937_64& rng, const StreamShape& shape) {
    auto pick = [&](std::size_t lo, std::size_t hi) { return std::uniform_int_distribution<std::size_t>(lo, hi)(rng); };
    static const std::vector<std::string> pool{"ant", "bee", "cat", "dog", "eel", "fox", "gnu", "hen",
                                               "ibis", "jay", "kiwi", "lynx"};
    static const std::vector<std::string> entities{"x", "y", "z"};
    const std::size_t alphabet = pick(shape.alphabet_min, shape.alphabet_max);
    const std::size_t events = pick(shape.events_min, shape.events_max);
    std::vector<SequenceEvent> stream;
    for (std::size_t e = 0; e < events; ++e) {
        SequenceEvent event;
        const std::size_t length = pick(shape.length_min, shape.length_max);
        for (std::size_t i = 0; i < length; ++i) event.concepts.push_back(pool[pick(0, alphabet - 1)]);
        event.timestamp = static_cast<conceptbase::Tick>(e);
        if (shape.with_entities) {
            const std::size_t who = pick(0, entities.size());
            if (who < entities.size()) event.entity = entities[who];
        }
        stream.push_back(std::move(event));
    }
    return stream;
}

std::map<std::string, Count> count_words(const std::string& text, const std::vector<std::string>& stopwords) {
    std::string lowered = text;
    std::transform(lowered.begin(), lowered.end(), lowered.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    const std::set<std::string> stop(stopwords.begin(), stopwords.end());
    static const std::regex word("[a-z0-9]+(-[a-z0-9]+)*");
    std::map<std::string, Count> counts;
    for (auto it = std::sregex_iterator(lowered.begin(), lowered.end(), word); it != std::sregex_iterator(); ++it) {
        const std::string w = it->str();
        if (!stop.contains(w)) ++counts[w];
    }
    return counts;
}

}  // namespace oracle
