#include "conceptbase/concept_base.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <sstream>

namespace conceptbase {

namespace {

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

[[noreturn]] void config_error(int line, const std::string& what) {
    throw ConceptBaseError(ErrorCode::InvalidConfig, "config line " + std::to_string(line) + ": " + what);
}

double parse_double(std::string_view text, int line) {
    std::string owned(text);
    std::size_t used = 0;
    double value = 0;
    try {
        value = std::stod(owned, &used);
    } catch (const std::exception&) {
        config_error(line, "expected a number, got '" + owned + "'");
    }
    if (used != owned.size()) config_error(line, "expected a number, got '" + owned + "'");
    return value;
}

std::int64_t parse_int(std::string_view text, int line) {
    std::string owned(text);
    std::size_t used = 0;
    std::int64_t value = 0;
    try {
        value = std::stoll(owned, &used);
    } catch (const std::exception&) {
        config_error(line, "expected an integer, got '" + owned + "'");
    }
    if (used != owned.size()) config_error(line, "expected an integer, got '" + owned + "'");
    return value;
}

bool parse_bool(std::string_view text, int line) {
    if (text == "true" || text == "1" || text == "yes") return true;
    if (text == "false" || text == "0" || text == "no") return false;
    config_error(line, "expected true or false, got '" + std::string(text) + "'");
}

NodePath parent_of(const NodePath& path) { return NodePath(path.begin(), path.end() - 1); }

std::string node_name(TreeId tree, const NodePath& path) { return to_string(tree) + " [" + join_path(path) + "]"; }

// Placeholder trees used while several branches are re-homed at once, so that
// link paths from different branches never mix mid-move.
TreeId staging_id(std::size_t i) { return TreeId{std::numeric_limits<std::uint64_t>::max() - i}; }

struct Cut {
    TreeId tree;
    NodePath path;
    ConceptNode branch;
};

}  // namespace

Config parse_config(std::istream& in, Config config) {
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        std::string_view body = raw;
        if (const auto hash = body.find('#'); hash != std::string_view::npos) body = body.substr(0, hash);
        body = trim(body);
        if (body.empty()) continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) config_error(line, "expected key = value");
        const auto key = trim(body.substr(0, eq));
        const auto value = trim(body.substr(eq + 1));
        if (key == "min_share") {
            config.min_share = parse_int(value, line);
        } else if (key == "falsity_ratio") {
            config.falsity_ratio = parse_double(value, line);
        } else if (key == "decay_half_life") {
            config.decay_half_life = parse_double(value, line);
        } else if (key == "strength_floor") {
            config.strength_floor = parse_double(value, line);
        } else if (key == "eager_scans") {
            config.eager_scans = parse_bool(value, line);
        } else {
            config_error(line, "unknown key '" + std::string(key) + "'");
        }
    }
    check_config(config);
    return config;
}

Config load_config(const std::string& path, Config base) {
    std::ifstream in(path);
    if (!in) throw ConceptBaseError(ErrorCode::Io, "cannot open config file " + path);
    return parse_config(in, base);
}

void check_config(const Config& config) {
    if (config.min_share < 1) throw ConceptBaseError(ErrorCode::InvalidConfig, "min_share must be >= 1");
    if (!std::isfinite(config.falsity_ratio) || config.falsity_ratio <= 0) {
        throw ConceptBaseError(ErrorCode::InvalidConfig, "falsity_ratio must be a positive number");
    }
    if (!std::isfinite(config.decay_half_life) || config.decay_half_life <= 0) {
        throw ConceptBaseError(ErrorCode::InvalidConfig, "decay_half_life must be a positive number");
    }
    if (!(config.strength_floor >= 0 && config.strength_floor < 1)) {
        throw ConceptBaseError(ErrorCode::InvalidConfig, "strength_floor must lie in [0, 1)");
    }
}

std::string_view to_string(RejoinRule rule) {
    switch (rule) {
        case RejoinRule::EqualEntityLinks: return "equal-entity-links";
        case RejoinRule::ExtraEntityLinks: return "extra-entity-links";
        case RejoinRule::ContainedBranch: return "contained-branch";
        case RejoinRule::PartialCapability: return "partial-capability";
        case RejoinRule::MultipleReferences: return "multiple-references";
        case RejoinRule::UnreferencedBase: return "unreferenced-base";
        case RejoinRule::DistinctEntityLinks: return "distinct-entity-links";
        case RejoinRule::SharedEntityLinks: return "shared-entity-links";
        case RejoinRule::InvariantGuard: return "invariant-guard";
        case RejoinRule::SelfReference: return "self-reference";
    }
    return "unknown";
}

void RestructureReport::append(const RestructureReport& other) {
    auto extend = [](auto& into, const auto& from) { into.insert(into.end(), from.begin(), from.end()); };
    extend(created, other.created);
    extend(pruned, other.pruned);
    extend(links_added, other.links_added);
    extend(splits, other.splits);
    extend(rejoins, other.rejoins);
    extend(links_removed, other.links_removed);
    extend(trees_removed, other.trees_removed);
    extend(rejoin_decisions, other.rejoin_decisions);
}

bool RestructureReport::empty() const {
    return created.empty() && pruned.empty() && links_added.empty() && splits.empty() && rejoins.empty() &&
           links_removed.empty() && trees_removed.empty() && rejoin_decisions.empty();
}

ConceptBase::ConceptBase(Config config) {
    check_config(config);
    state_.config = config;
}

ConceptBase ConceptBase::from_state(BaseState state, Check check) {
    check_config(state.config);
    ConceptBase base;
    base.state_ = std::move(state);
    if (check == Check::Strict) {
        const auto problems = base.validate();
        if (!problems.empty()) {
            throw ConceptBaseError(ErrorCode::CorruptSnapshot,
                                   problems.front() + (problems.size() > 1
                                                           ? " (and " + std::to_string(problems.size() - 1) + " more)"
                                                           : std::string{}));
        }
    }
    return base;
}

void ConceptBase::set_config(const Config& config) {
    check_config(config);
    state_.config = config;
}

const ConceptTree* ConceptBase::find_tree(TreeId id) const {
    const auto it = state_.trees.find(id);
    return it == state_.trees.end() ? nullptr : &it->second;
}

ConceptTree* ConceptBase::mutable_tree(TreeId id) {
    const auto it = state_.trees.find(id);
    return it == state_.trees.end() ? nullptr : &it->second;
}

const ConceptTree* ConceptBase::tree_with_base(std::string_view label) const {
    for (const auto& [id, tree] : state_.trees) {
        if (tree.base.label == label) return &tree;
    }
    return nullptr;
}

ConceptTree& ConceptBase::new_tree(ConceptNode base) {
    const TreeId id{state_.next_tree++};
    auto [it, inserted] = state_.trees.emplace(id, ConceptTree{id, std::move(base)});
    return it->second;
}

const Link* ConceptBase::link_towards(const LinkEndpoint& from, std::string_view next_label) const {
    for (const Link* link : state_.links.outgoing(from)) {
        const ConceptTree* target = find_tree(link->to);
        if (target != nullptr && target->base.label == next_label) return link;
    }
    return nullptr;
}

Count ConceptBase::link_exits(const LinkEndpoint& at) const {
    Count total = 0;
    for (const Link* link : state_.links.outgoing(at)) total += link->flow;
    return total;
}

RestructureReport ConceptBase::ingest(const SequenceEvent& event) {
    if (event.concepts.empty()) throw ConceptBaseError(ErrorCode::InvalidEvent, "empty concept sequence");
    for (const auto& label : event.concepts) {
        if (!is_valid_label(label)) {
            throw ConceptBaseError(ErrorCode::InvalidEvent, "invalid concept label '" + label + "'");
        }
    }
    if (event.entity && !is_valid_entity(*event.entity)) {
        throw ConceptBaseError(ErrorCode::InvalidEvent, "invalid entity id '" + *event.entity + "'");
    }
    if (event.timestamp < 0 || event.timestamp + 1 < state_.clock) {
        throw ConceptBaseError(ErrorCode::InvalidEvent, "timestamp " + std::to_string(event.timestamp) +
                                                            " precedes the current tick " +
                                                            std::to_string(state_.clock - 1));
    }

    RestructureReport report;
    std::vector<LinkKey> crossed;
    std::span<const Label> remaining(event.concepts);
    TreeId entry{};

    if (const ConceptTree* existing = tree_with_base(remaining.front())) {
        entry = existing->id;
        ConceptTree* tree = mutable_tree(entry);
        for (;;) {
            const TreeId here = tree->id;
            AddHooks hooks;
            hooks.leaves_via_link = [&](const NodePath& at, const Label& next) {
                return link_towards(LinkEndpoint{here, at}, next) != nullptr;
            };
            hooks.prior_stops = [&](const ConceptNode& node, const NodePath& at) {
                return node.terminated - link_exits(LinkEndpoint{here, at});
            };
            const AddOutcome outcome = add_from_base(*tree, remaining, hooks);
            if (!outcome.exited_at) break;
            remaining = remaining.subspan(outcome.consumed);
            const Link* via = link_towards(LinkEndpoint{here, *outcome.exited_at}, remaining.front());
            Link* link = state_.links.find(via->key);
            ++link->flow;
            link->strength = 1.0;
            crossed.push_back(link->key);
            tree = mutable_tree(link->to);
        }
    } else {
        ConceptTree& created = new_tree(make_chain(remaining));
        entry = created.id;
        report.created.push_back(entry);
    }

    state_.ledger.push_back(event);
    state_.clock = std::max(state_.clock, event.timestamp + 1);

    if (event.entity) {
        state_.links.grant(*event.entity, entry);
        for (const auto key : crossed) state_.links.grant(*event.entity, key);
    }
    if (state_.config.eager_scans) report.append(end_batch());
    return report;
}

RestructureReport ConceptBase::end_batch() {
    RestructureReport report;
    for (;;) {
        const bool factored = factor_once(report);
        const bool split = !factored && split_once(report);
        if (!factored && !split) break;
    }
    return report;
}

RestructureReport ConceptBase::factor_scan() {
    RestructureReport report;
    while (factor_once(report)) {
    }
    return report;
}

RestructureReport ConceptBase::falsity_scan() {
    RestructureReport report;
    while (split_once(report)) {
    }
    return report;
}

ConceptBase::NodeOwners ConceptBase::ledger_owners() const {
    NodeOwners owners;
    for (const auto& event : state_.ledger) {
        if (!event.entity) continue;
        for (const auto& node : trace(event.concepts).nodes) owners[node].insert(*event.entity);
    }
    return owners;
}

void ConceptBase::grant_from_owners(const NodeOwners& owners, TreeId tree, const NodePath& path, LinkKey key) {
    const auto it = owners.find({tree, path});
    if (it == owners.end()) return;
    for (const auto& entity : it->second) state_.links.grant(entity, key);
}

TreeId ConceptBase::target_for(const Label& label, RestructureReport& report) {
    if (const ConceptTree* existing = tree_with_base(label)) return existing->id;
    ConceptTree& created = new_tree(ConceptNode{label, 0, 0, 0, {}});
    report.created.push_back(created.id);
    return created.id;
}

// Moves already-cut branches into `target`, re-homing any links that hung off
// them and linking each cut point to the target base.
static void relocate_cuts(BaseState& state, std::vector<Cut>& cuts, TreeId target,
                          const std::function<void(TreeId, const NodePath&, LinkKey)>& on_link,
                          RestructureReport& report) {
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        state.links.rehome(cuts[i].tree, cuts[i].path, staging_id(i), {cuts[i].branch.label});
    }
    ConceptTree& into = state.trees.at(target);
    for (std::size_t i = 0; i < cuts.size(); ++i) {
        const auto& cut = cuts[i];
        merge_counts(into.base, cut.branch);
        state.links.rehome(staging_id(i), {cut.branch.label}, target, {into.base.label});
        const std::uint64_t fresh = state.links.next_key();
        Link& link = state.links.add(LinkEndpoint{cut.tree, parent_of(cut.path)}, target);
        link.flow += cut.branch.pos;
        if (value_of(link.key) == fresh) report.links_added.push_back(link.key);
        on_link(cut.tree, cut.path, link.key);
    }
}

bool ConceptBase::factor_once(RestructureReport& report) {
    struct Occurrence {
        TreeId tree;
        NodePath path;
    };
    std::map<std::vector<Label>, std::vector<Occurrence>> occurrences;
    std::map<std::vector<Label>, TreeId> bodies;
    for (const auto& [id, tree] : state_.trees) {
        if (is_chain(tree.base)) bodies.emplace(chain_labels(tree.base), id);
        for_each_node(tree, [&, tree_id = id](const ConceptNode& node, const NodePath& path) {
            if (path.size() > 1 && is_chain(node)) occurrences[chain_labels(node)].push_back({tree_id, path});
        });
    }

    const std::vector<Label>* chosen = nullptr;
    for (const auto& [labels, found] : occurrences) {
        std::set<TreeId> distinct;
        for (const auto& occ : found) distinct.insert(occ.tree);
        bool qualifies = static_cast<std::int64_t>(distinct.size()) >= state_.config.min_share;
        if (!qualifies) {
            const auto body = bodies.find(labels);
            qualifies = body != bodies.end() &&
                        std::any_of(found.begin(), found.end(),
                                    [&](const Occurrence& occ) { return occ.tree != body->second; });
        }
        if (!qualifies) continue;
        // Longest first; the map already orders equal lengths lexicographically.
        if (chosen == nullptr || labels.size() > chosen->size()) chosen = &labels;
    }
    if (chosen == nullptr) return false;

    const std::vector<Label> labels = *chosen;
    const auto owners = ledger_owners();
    const TreeId target = target_for(labels.front(), report);
    std::vector<Cut> cuts;
    for (const auto& occ : occurrences.at(labels)) {
        cuts.push_back(Cut{occ.tree, occ.path, cut_branch(*mutable_tree(occ.tree), occ.path)});
        report.pruned.emplace_back(occ.tree, occ.path);
    }
    relocate_cuts(state_, cuts, target,
                  [&](TreeId tree, const NodePath& path, LinkKey key) { grant_from_owners(owners, tree, path, key); },
                  report);
    fold_link_conflicts(report);
    return true;
}

bool ConceptBase::split_once(RestructureReport& report) {
    const double ratio = state_.config.falsity_ratio;
    std::optional<std::pair<TreeId, NodePath>> found;
    for (const auto& [id, tree] : state_.trees) {
        for_each_node(tree, [&, tree_id = id](const ConceptNode& node, const NodePath& path) {
            if (found || path.size() < 2) return;
            if (node.neg > 0 && node.pos > 0 &&
                static_cast<double>(node.neg) >= ratio * static_cast<double>(node.pos)) {
                found.emplace(tree_id, path);
            }
        });
        if (found) break;
    }
    if (!found) return false;

    const auto& [tree_id, path] = *found;
    const auto owners = ledger_owners();
    std::vector<Cut> cuts{Cut{tree_id, path, cut_branch(*mutable_tree(tree_id), path)}};
    clear_negative(cuts.front().branch);
    const TreeId target = target_for(path.back(), report);
    report.splits.emplace_back(tree_id, path);
    relocate_cuts(state_, cuts, target,
                  [&](TreeId tree, const NodePath& at, LinkKey key) { grant_from_owners(owners, tree, at, key); },
                  report);
    fold_link_conflicts(report);
    return true;
}

void ConceptBase::fold_link_conflicts(RestructureReport& report) {
    for (;;) {
        std::optional<std::tuple<TreeId, NodePath, TreeId>> conflict;
        for (const auto& [id, tree] : state_.trees) {
            for_each_node(tree, [&, tree_id = id](const ConceptNode& node, const NodePath& path) {
                if (conflict) return;
                for (const auto& child : node.children) {
                    if (const Link* link = link_towards(LinkEndpoint{tree_id, path}, child.label)) {
                        NodePath child_path = path;
                        child_path.push_back(child.label);
                        conflict.emplace(tree_id, std::move(child_path), link->to);
                        return;
                    }
                }
            });
            if (conflict) break;
        }
        if (!conflict) return;
        const auto& [tree_id, path, target] = *conflict;
        const auto owners = ledger_owners();
        std::vector<Cut> cuts{Cut{tree_id, path, cut_branch(*mutable_tree(tree_id), path)}};
        report.pruned.emplace_back(tree_id, path);
        relocate_cuts(state_, cuts, target,
                      [&](TreeId tree, const NodePath& at, LinkKey key) { grant_from_owners(owners, tree, at, key); },
                      report);
    }
}

void ConceptBase::remove_tree(TreeId id, RestructureReport& report) {
    const auto removed = state_.links.remove_tree(id);
    report.links_removed.insert(report.links_removed.end(), removed.begin(), removed.end());
    state_.trees.erase(id);
    report.trees_removed.push_back(id);
}

RestructureReport ConceptBase::try_rejoin(TreeId t1, TreeId t2) {
    if (find_tree(t1) == nullptr) throw ConceptBaseError(ErrorCode::UnknownTree, to_string(t1));
    if (find_tree(t2) == nullptr) throw ConceptBaseError(ErrorCode::UnknownTree, to_string(t2));

    RestructureReport report;
    RejoinDecision decision;
    if (t1 == t2) {
        decision = RejoinDecision{t1, t2, false, RejoinRule::SelfReference, "a tree cannot be joined to itself"};
    } else {
        const auto inbound = state_.links.inbound(t2);
        const bool linked = std::any_of(inbound.begin(), inbound.end(),
                                        [&](const Link* link) { return link->from.tree == t1; });
        if (linked) {
            decision = rejoin_linked(t1, t2, report);
        } else {
            decision = rejoin_branch(t1, t2, report);
        }
    }
    if (decision.joined) report.rejoins.emplace_back(t1, t2);
    report.rejoin_decisions.push_back(decision);
    return report;
}

RejoinDecision ConceptBase::rejoin_linked(TreeId t1, TreeId t2, RestructureReport& report) {
    RejoinDecision decision{t1, t2, false, RejoinRule::MultipleReferences, {}};
    const auto inbound = state_.links.inbound(t2);
    const Link* via = *std::find_if(inbound.begin(), inbound.end(),
                                    [&](const Link* link) { return link->from.tree == t1; });
    const LinkKey key = via->key;

    const auto e1 = entities_reaching(t1);
    const auto e2 = entities_reaching(t2);
    std::vector<std::string> extra;
    std::set_difference(e2.begin(), e2.end(), e1.begin(), e1.end(), std::back_inserter(extra));
    if (!extra.empty()) {
        ++state_.links.find(key)->compound.negative;
        decision.rule = RejoinRule::ExtraEntityLinks;
        decision.reason = to_string(t2) + " is also reached by " + extra.front() +
                          (extra.size() > 1 ? " and " + std::to_string(extra.size() - 1) + " more" : std::string{});
        return decision;
    }

    const ConceptTree& child_tree = *find_tree(t2);
    if (inbound.size() != 1 || via->flow != child_tree.base.pos) {
        decision.rule = RejoinRule::MultipleReferences;
        decision.reason = to_string(t2) + " is referenced from outside " + to_string(key);
        return decision;
    }

    if (e1 == e2) {
        decision.rule = RejoinRule::EqualEntityLinks;
    } else if (is_chain(child_tree.base)) {
        decision.rule = RejoinRule::ContainedBranch;
    } else {
        decision.rule = RejoinRule::PartialCapability;
        decision.reason = "entities reaching " + to_string(t1) + " without " + to_string(key) +
                          " would gain a branched tree";
        return decision;
    }

    const BaseState backup = state_;
    const NodePath cut_point = via->from.path;
    const ConceptNode moved = child_tree.base;
    NodePath landing = cut_point;
    landing.push_back(moved.label);

    RestructureReport local;
    state_.links.remove(key);
    local.links_removed.push_back(key);
    state_.links.rehome(t2, {moved.label}, t1, landing);
    remove_tree(t2, local);
    restore_branch(*mutable_tree(t1), cut_point, moved);
    fold_link_conflicts(local);

    if (!conceptbase::validate(*find_tree(t1)).empty()) {
        state_ = backup;
        const auto rule = decision.rule;
        decision.rule = RejoinRule::InvariantGuard;
        decision.reason = std::string("join under ") + std::string(to_string(rule)) +
                          " would break the count invariants; rolled back";
        return decision;
    }
    report.append(local);
    decision.joined = true;
    return decision;
}

RejoinDecision ConceptBase::rejoin_branch(TreeId t1, TreeId t2, RestructureReport& report) {
    const ConceptTree& branch_tree = *find_tree(t2);
    std::optional<NodePath> match;
    for_each_node(*find_tree(t1), [&](const ConceptNode& node, const NodePath& path) {
        if (!match && path.size() > 1 && node.label == branch_tree.base.label) match = path;
    });
    if (!match) {
        throw ConceptBaseError(ErrorCode::NotLinked, to_string(t1) + " neither links to " + to_string(t2) +
                                                         " nor holds a branch matching its base");
    }

    RejoinDecision decision{t1, t2, false, RejoinRule::MultipleReferences, {}};
    if (!state_.links.inbound(t2).empty()) {
        decision.reason = to_string(t2) + " is reached through links, its base must stay accessible";
        return decision;
    }
    const auto e1 = entities_reaching(t1);
    const auto e2 = entities_reaching(t2);
    if (e2.empty()) {
        decision.rule = RejoinRule::UnreferencedBase;
    } else if (e1 == e2) {
        decision.rule = RejoinRule::SharedEntityLinks;
    } else {
        decision.rule = RejoinRule::DistinctEntityLinks;
        decision.reason = to_string(t2) + " has its own entity links, its base must stay accessible";
        return decision;
    }

    const BaseState backup = state_;
    const ConceptNode moved = branch_tree.base;
    RestructureReport local;
    state_.links.rehome(t2, {moved.label}, t1, *match);
    remove_tree(t2, local);
    attach_branch(*mutable_tree(t1), parent_of(*match), moved);
    fold_link_conflicts(local);

    if (!conceptbase::validate(*find_tree(t1)).empty()) {
        state_ = backup;
        const auto rule = decision.rule;
        decision.rule = RejoinRule::InvariantGuard;
        decision.reason = std::string("join under ") + std::string(to_string(rule)) +
                          " would break the count invariants; rolled back";
        return decision;
    }
    report.append(local);
    decision.joined = true;
    return decision;
}

RestructureReport ConceptBase::decay_tick() {
    RestructureReport report;
    const double factor = std::exp2(-1.0 / state_.config.decay_half_life);
    std::vector<LinkKey> weak;
    for (const auto& [key, link] : state_.links.links()) {
        Link* mutable_link = state_.links.find(key);
        mutable_link->strength *= factor;
        if (mutable_link->strength < state_.config.strength_floor) weak.push_back(key);
    }
    for (const auto key : weak) {
        state_.links.remove(key);
        report.links_removed.push_back(key);
    }
    ++state_.clock;
    return report;
}

const Link& ConceptBase::create_link(const LinkEndpoint& from, TreeId to) {
    const ConceptTree* source = find_tree(from.tree);
    if (source == nullptr || find_node(*source, from.path) == nullptr) {
        throw ConceptBaseError(ErrorCode::DanglingEndpoint, "no node " + node_name(from.tree, from.path));
    }
    const ConceptTree* target = find_tree(to);
    if (target == nullptr) throw ConceptBaseError(ErrorCode::DanglingEndpoint, "no tree " + to_string(to));
    if (find_node(*source, from.path)->find_child(target->base.label) != nullptr) {
        throw ConceptBaseError(ErrorCode::InvalidArgument, node_name(from.tree, from.path) +
                                                               " already has a child '" + target->base.label + "'");
    }
    return state_.links.add(from, to);
}

const EntityKeyset& ConceptBase::grant(const std::string& entity, const Grantable& what) {
    if (!is_valid_entity(entity)) throw ConceptBaseError(ErrorCode::InvalidArgument, "invalid entity id");
    if (const auto* key = std::get_if<LinkKey>(&what); key != nullptr && state_.links.find(*key) == nullptr) {
        throw ConceptBaseError(ErrorCode::DanglingEndpoint, "no link " + to_string(*key));
    }
    if (const auto* tree = std::get_if<TreeId>(&what); tree != nullptr && find_tree(*tree) == nullptr) {
        throw ConceptBaseError(ErrorCode::DanglingEndpoint, "no tree " + to_string(*tree));
    }
    return state_.links.grant(entity, what);
}

void ConceptBase::revoke(const std::string& entity, const Grantable& what) { state_.links.revoke(entity, what); }

Capability ConceptBase::resolve(const std::string& entity) const { return state_.links.resolve(entity); }

void ConceptBase::refresh_links(std::span<const LinkKey> keys) {
    for (const auto key : keys) {
        if (Link* link = state_.links.find(key)) link->strength = 1.0;
    }
}

Route ConceptBase::trace(std::span<const Label> concepts) const {
    Route route;
    if (concepts.empty()) return route;
    const ConceptTree* tree = tree_with_base(concepts.front());
    if (tree == nullptr) return route;
    const ConceptNode* node = &tree->base;
    NodePath path{node->label};
    route.nodes.emplace_back(tree->id, path);
    for (std::size_t i = 1; i < concepts.size(); ++i) {
        if (const ConceptNode* child = node->find_child(concepts[i])) {
            node = child;
            path.push_back(child->label);
        } else if (const Link* link = link_towards(LinkEndpoint{tree->id, path}, concepts[i])) {
            route.links.push_back(link->key);
            tree = find_tree(link->to);
            node = &tree->base;
            path = NodePath{node->label};
        } else {
            return route;
        }
        route.nodes.emplace_back(tree->id, path);
    }
    route.complete = true;
    return route;
}

std::set<TreeId> ConceptBase::reachable_trees(const Capability& capability) const {
    std::set<TreeId> reached;
    std::vector<TreeId> frontier;
    for (const auto id : capability.start_trees) {
        if (find_tree(id) != nullptr && reached.insert(id).second) frontier.push_back(id);
    }
    while (!frontier.empty()) {
        const TreeId id = frontier.back();
        frontier.pop_back();
        for (const Link* link : state_.links.outgoing_from_tree(id)) {
            if (capability.link_keys.contains(link->key) && reached.insert(link->to).second) {
                frontier.push_back(link->to);
            }
        }
    }
    return reached;
}

std::set<std::string> ConceptBase::entities_reaching(TreeId tree) const {
    std::set<std::string> entities;
    for (const auto& [entity, keyset] : state_.links.keysets()) {
        if (reachable_trees(Capability{keyset.start_trees, keyset.link_keys}).contains(tree)) entities.insert(entity);
    }
    return entities;
}

std::vector<std::string> ConceptBase::validate() const {
    std::vector<std::string> problems;
    std::set<std::string_view> base_labels;
    Count base_mass = 0;
    for (const auto& [id, tree] : state_.trees) {
        if (tree.id != id) problems.push_back(to_string(id) + ": stored under a different id");
        if (value_of(id) == 0 || value_of(id) >= state_.next_tree) {
            problems.push_back(to_string(id) + ": id outside the allocated range");
        }
        if (!base_labels.insert(tree.base.label).second) {
            problems.push_back(to_string(id) + ": base label '" + tree.base.label + "' is shared with another tree");
        }
        for (const auto& v : conceptbase::validate(tree)) {
            problems.push_back(node_name(id, v.path) + ": " + std::string(to_string(v.rule)) + ": " + v.detail);
        }
        base_mass += tree.base.pos;
    }

    std::map<LinkEndpoint, Count> exits;
    std::set<std::pair<LinkEndpoint, TreeId>> pairs;
    for (const auto& [key, link] : state_.links.links()) {
        const std::string name = to_string(key);
        if (link.key != key) problems.push_back(name + ": stored under a different key");
        if (value_of(key) == 0 || value_of(key) >= state_.links.next_key()) {
            problems.push_back(name + ": key outside the allocated range");
        }
        const ConceptTree* source = find_tree(link.from.tree);
        const ConceptNode* node = source ? find_node(*source, link.from.path) : nullptr;
        if (node == nullptr) problems.push_back(name + ": source " + node_name(link.from.tree, link.from.path) + " missing");
        const ConceptTree* target = find_tree(link.to);
        if (target == nullptr) problems.push_back(name + ": target " + to_string(link.to) + " missing");
        if (node != nullptr && target != nullptr && node->find_child(target->base.label) != nullptr) {
            problems.push_back(name + ": source already has a child '" + target->base.label + "'");
        }
        if (!(link.strength > 0 && link.strength <= 1)) problems.push_back(name + ": strength outside (0,1]");
        if (link.compound.positive < 0 || link.compound.negative < 0 || link.flow < 0) {
            problems.push_back(name + ": negative counter");
        }
        if (!pairs.insert({link.from, link.to}).second) problems.push_back(name + ": duplicates another link");
        exits[link.from] += link.flow;
    }
    for (const auto& [from, flow] : exits) {
        const ConceptTree* source = find_tree(from.tree);
        const ConceptNode* node = source ? find_node(*source, from.path) : nullptr;
        if (node != nullptr && flow > node->terminated) {
            problems.push_back(node_name(from.tree, from.path) + ": link flow " + std::to_string(flow) +
                               " exceeds terminated " + std::to_string(node->terminated));
        }
    }

    for (const auto& [entity, keyset] : state_.links.keysets()) {
        if (keyset.primary != entity || !is_valid_entity(entity)) {
            problems.push_back("keyset '" + entity + "': bad primary key");
        }
        for (const auto key : keyset.link_keys) {
            if (state_.links.find(key) == nullptr) problems.push_back("keyset '" + entity + "': dangling " + to_string(key));
        }
        for (const auto id : keyset.start_trees) {
            if (find_tree(id) == nullptr) problems.push_back("keyset '" + entity + "': dangling " + to_string(id));
        }
    }

    Tick previous = std::numeric_limits<Tick>::min();
    for (std::size_t i = 0; i < state_.ledger.size(); ++i) {
        const auto& event = state_.ledger[i];
        const std::string name = "ledger event " + std::to_string(i);
        if (event.concepts.empty() ||
            !std::all_of(event.concepts.begin(), event.concepts.end(), [](const Label& l) { return is_valid_label(l); })) {
            problems.push_back(name + ": invalid concepts");
        }
        if (event.entity && !is_valid_entity(*event.entity)) problems.push_back(name + ": invalid entity");
        if (event.timestamp < previous) problems.push_back(name + ": timestamp goes backwards");
        if (event.timestamp >= state_.clock) problems.push_back(name + ": timestamp beyond the clock");
        previous = event.timestamp;
    }
    if (base_mass < static_cast<Count>(state_.ledger.size())) {
        problems.push_back("base counts " + std::to_string(base_mass) + " fall below the ledger size " +
                           std::to_string(state_.ledger.size()));
    }
    return problems;
}

}  // namespace conceptbase
