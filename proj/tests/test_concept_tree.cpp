#include <doctest.h>

#include <algorithm>
#include <map>
#include <random>

#include "conceptbase/concept_tree.hpp"
#include "support/oracles.hpp"

using namespace conceptbase;
using Labels = std::vector<Label>;

namespace {

ConceptTree cat_milk_tree() {
    ConceptTree tree{TreeId{1}, make_chain(Labels{"black", "cat", "sat", "mat"})};
    add_from_base(tree, Labels{"black", "cat", "drank", "milk"});
    return tree;
}

Count pos_at(const ConceptTree& tree, const NodePath& path) { return find_node(tree, path)->pos; }

void canonicalize(ConceptNode& node) {
    std::sort(node.children.begin(), node.children.end(),
              [](const ConceptNode& a, const ConceptNode& b) { return a.label < b.label; });
    for (auto& child : node.children) canonicalize(child);
}

}  // namespace

TEST_CASE("match_prefix walks from the base only") {
    const ConceptTree tree = cat_milk_tree();
    CHECK(match_prefix(tree, Labels{"black", "cat", "drank", "milk"}).length == 4);
    const auto miss = match_prefix(tree, Labels{"cat", "sat"});
    CHECK(miss.length == 0);
    CHECK(miss.path.empty());
    const auto partial = match_prefix(tree, Labels{"black", "cat", "ran"});
    CHECK(partial.length == 2);
    CHECK(partial.path == NodePath{"black", "cat"});
}

TEST_CASE("add_from_base extends along a branch") {
    ConceptTree tree{TreeId{1}, make_chain(Labels{"black", "cat", "sat", "mat"})};
    const auto outcome = add_from_base(tree, Labels{"black", "cat", "drank", "milk"});
    CHECK(outcome.matched_depth == 2);
    CHECK(outcome.extended);
    CHECK(outcome.branch_created_at == std::optional<NodePath>(NodePath{"black", "cat"}));
    CHECK(pos_at(tree, {"black"}) == 2);
    CHECK(pos_at(tree, {"black", "cat"}) == 2);
    CHECK(pos_at(tree, {"black", "cat", "sat"}) == 1);
    CHECK(pos_at(tree, {"black", "cat", "sat", "mat"}) == 1);
    CHECK(pos_at(tree, {"black", "cat", "drank"}) == 1);
    CHECK(pos_at(tree, {"black", "cat", "drank", "milk"}) == 1);
    CHECK(validate(tree).empty());
}

TEST_CASE("repeating a sequence only reinforces") {
    ConceptTree tree{TreeId{1}, make_chain(Labels{"a", "b", "c"})};
    const auto outcome = add_from_base(tree, Labels{"a", "b", "c"});
    CHECK_FALSE(outcome.extended);
    CHECK(node_count(tree.base) == 3);
    CHECK(pos_at(tree, {"a"}) == 2);
    CHECK(pos_at(tree, {"a", "b", "c"}) == 2);
    CHECK(find_node(tree, {"a", "b", "c"})->terminated == 2);
}

TEST_CASE("stopping short marks descendants negative") {
    ConceptTree tree{TreeId{1}, make_chain(Labels{"drank", "milk", "long", "trunk"})};
    const auto outcome = add_from_base(tree, Labels{"drank", "milk"});
    CHECK(outcome.terminated_short);
    CHECK(pos_at(tree, {"drank"}) == 2);
    CHECK(pos_at(tree, {"drank", "milk"}) == 2);
    CHECK(find_node(tree, {"drank", "milk"})->terminated == 1);
    CHECK(find_node(tree, {"drank", "milk", "long"})->neg == 1);
    CHECK(find_node(tree, {"drank", "milk", "long", "trunk"})->neg == 1);
    CHECK(find_node(tree, {"drank"})->neg == 0);
    CHECK(validate(tree).empty());
}

TEST_CASE("stopping short marks every branch below") {
    ConceptTree tree{TreeId{1}, make_chain(Labels{"a", "b", "c"})};
    add_from_base(tree, Labels{"a", "b", "d"});
    add_from_base(tree, Labels{"a", "b"});
    CHECK(find_node(tree, {"a", "b", "c"})->neg == 1);
    CHECK(find_node(tree, {"a", "b", "d"})->neg == 1);
}

TEST_CASE("add_from_base rejects a foreign base") {
    ConceptTree tree = cat_milk_tree();
    try {
        add_from_base(tree, Labels{"cat", "sat"});
        FAIL("expected BaseMismatch");
    } catch (const ConceptBaseError& e) {
        CHECK(e.code() == ErrorCode::BaseMismatch);
    }
    CHECK_THROWS_AS(add_from_base(tree, Labels{}), ConceptBaseError);
}

TEST_CASE("link hooks stop the walk at an exit") {
    ConceptTree tree{TreeId{1}, make_chain(Labels{"a", "b"})};
    AddHooks hooks;
    hooks.leaves_via_link = [](const NodePath& at, const Label& next) { return at.back() == "b" && next == "x"; };
    const auto outcome = add_from_base(tree, Labels{"a", "b", "x", "y"}, hooks);
    REQUIRE(outcome.exited_at);
    CHECK(*outcome.exited_at == NodePath{"a", "b"});
    CHECK(outcome.consumed == 2);
    CHECK(find_node(tree, {"a", "b"})->terminated == 2);
    CHECK(find_node(tree, {"a", "b", "x"}) == nullptr);
}

TEST_CASE("a new branch inherits the prior stops as negative evidence") {
    ConceptTree tree{TreeId{1}, make_chain(Labels{"a", "b"})};
    add_from_base(tree, Labels{"a", "b"});
    add_from_base(tree, Labels{"a", "b", "c", "d"});
    CHECK(find_node(tree, {"a", "b", "c"})->neg == 2);
    CHECK(find_node(tree, {"a", "b", "c", "d"})->neg == 2);

    ConceptTree hooked{TreeId{2}, make_chain(Labels{"a", "b"})};
    AddHooks hooks;
    hooks.prior_stops = [](const ConceptNode&, const NodePath&) { return Count{0}; };
    add_from_base(hooked, Labels{"a", "b", "c"}, hooks);
    CHECK(find_node(hooked, {"a", "b", "c"})->neg == 0);
}

TEST_CASE("detach_branch lowers the ancestors") {
    ConceptTree tree = cat_milk_tree();
    const ConceptTree detached = detach_branch(tree, {"black", "cat", "drank"}, TreeId{9});
    CHECK(detached.id == TreeId{9});
    CHECK(detached.base.label == "drank");
    CHECK(detached.base.pos == 1);
    CHECK(detached.base.children.front().label == "milk");
    CHECK(pos_at(tree, {"black"}) == 1);
    CHECK(pos_at(tree, {"black", "cat"}) == 1);
    CHECK(find_node(tree, {"black", "cat"})->terminated == 0);
    CHECK(find_node(tree, {"black", "cat", "drank"}) == nullptr);
    CHECK(validate(tree).empty());
    CHECK(validate(detached).empty());
}

TEST_CASE("detach_branch of a heavier leaf") {
    ConceptTree tree{TreeId{1}, make_chain(Labels{"a", "b", "c"}, 3)};
    add_from_base(tree, Labels{"a", "b"});
    detach_branch(tree, {"a", "b", "c"}, TreeId{2});
    CHECK(pos_at(tree, {"a"}) == 1);
    CHECK(pos_at(tree, {"a", "b"}) == 1);
    CHECK(find_node(tree, {"a", "b"})->terminated == 1);
}

TEST_CASE("detach_branch errors") {
    ConceptTree tree = cat_milk_tree();
    auto code_of = [&](const NodePath& path) {
        try {
            detach_branch(tree, path, TreeId{2});
        } catch (const ConceptBaseError& e) {
            return e.code();
        }
        return ErrorCode::Io;
    };
    CHECK(code_of({"black"}) == ErrorCode::CannotDetachBase);
    CHECK(code_of({"black", "dog"}) == ErrorCode::PathNotFound);
    CHECK(code_of({"white", "cat"}) == ErrorCode::PathNotFound);
    CHECK(code_of({}) == ErrorCode::PathNotFound);
}

TEST_CASE("cut_branch keeps ancestors and moves the mass to terminated") {
    ConceptTree tree = cat_milk_tree();
    const ConceptNode cut = cut_branch(tree, {"black", "cat", "drank"});
    CHECK(cut.label == "drank");
    CHECK(pos_at(tree, {"black"}) == 2);
    CHECK(pos_at(tree, {"black", "cat"}) == 2);
    CHECK(find_node(tree, {"black", "cat"})->terminated == 1);
    CHECK(validate(tree).empty());
    restore_branch(tree, {"black", "cat"}, cut);
    CHECK(tree == cat_milk_tree());
}

TEST_CASE("validate reports forced violations") {
    ConceptTree tree{TreeId{1}, ConceptNode{"a", 2, 0, 0, {ConceptNode{"b", 3, 0, 3, {}}}}};
    const auto v = validate(tree);
    CHECK(std::any_of(v.begin(), v.end(), [](const Violation& x) {
        return x.rule == TreeRule::TriangularViolation && x.path == NodePath{"a", "b"};
    }));

    ConceptTree sums{TreeId{1}, ConceptNode{"a", 3, 0, 1, {ConceptNode{"b", 1, 0, 1, {}}}}};
    const auto s = validate(sums);
    REQUIRE(s.size() == 1);
    CHECK(s.front().rule == TreeRule::SumViolation);
    CHECK(s.front().path == NodePath{"a"});

    ConceptTree dup{TreeId{1},
                    ConceptNode{"a", 2, 0, 0, {ConceptNode{"b", 1, 0, 1, {}}, ConceptNode{"b", 1, 0, 1, {}}}}};
    const auto d = validate(dup);
    CHECK(std::any_of(d.begin(), d.end(), [](const Violation& x) { return x.rule == TreeRule::DuplicateSibling; }));

    ConceptTree zero{TreeId{1}, ConceptNode{"A", 0, -1, 0, {}}};
    const auto z = validate(zero);
    CHECK(std::any_of(z.begin(), z.end(), [](const Violation& x) { return x.rule == TreeRule::NonPositiveCount; }));
    CHECK(std::any_of(z.begin(), z.end(), [](const Violation& x) { return x.rule == TreeRule::NegativeCount; }));
    CHECK(std::any_of(z.begin(), z.end(), [](const Violation& x) { return x.rule == TreeRule::InvalidLabel; }));

    CHECK(validate(cat_milk_tree()).empty());
}

TEST_CASE("random additions sharing a base keep every invariant and match a recount") {
    std::mt19937_64 rng(11);
    for (int round = 0; round < 300; ++round) {
        oracle::StreamShape shape;
        shape.with_entities = false;
        auto events = oracle::random_stream(rng, shape);
        ConceptTree tree{TreeId{1}, ConceptNode{"root", 0, 0, 0, {}}};
        std::map<NodePath, std::pair<Count, Count>> expected;
        bool first = true;
        for (auto& event : events) {
            event.concepts.insert(event.concepts.begin(), "root");
            if (first) {
                tree.base = make_chain(event.concepts);
                first = false;
            } else {
                add_from_base(tree, event.concepts);
            }
            REQUIRE(validate(tree).empty());
            NodePath prefix;
            for (const auto& label : event.concepts) {
                prefix.push_back(label);
                ++expected[prefix].first;
            }
            ++expected[prefix].second;
        }
        std::size_t nodes = 0;
        for_each_node(tree, [&](const ConceptNode& node, const NodePath& path) {
            ++nodes;
            CHECK(expected[path].first == node.pos);
            CHECK(expected[path].second == node.terminated);
        });
        CHECK(nodes == expected.size());
    }
}

TEST_CASE("detach then attach restores the tree") {
    std::mt19937_64 rng(23);
    for (int round = 0; round < 200; ++round) {
        oracle::StreamShape shape;
        shape.with_entities = false;
        ConceptTree tree{TreeId{1}, ConceptNode{"root", 0, 0, 0, {}}};
        bool first = true;
        for (auto event : oracle::random_stream(rng, shape)) {
            event.concepts.insert(event.concepts.begin(), "root");
            if (first) {
                tree.base = make_chain(event.concepts);
                first = false;
            } else {
                add_from_base(tree, event.concepts);
            }
        }
        std::vector<NodePath> candidates;
        for_each_node(tree, [&](const ConceptNode&, const NodePath& path) {
            if (path.size() > 1) candidates.push_back(path);
        });
        if (candidates.empty()) continue;
        const NodePath path = candidates[std::uniform_int_distribution<std::size_t>(0, candidates.size() - 1)(rng)];
        const ConceptTree original = tree;
        const ConceptNode& parent = *find_node(std::as_const(tree), NodePath(path.begin(), path.end() - 1));
        const bool last_child = parent.children.back().label == path.back();
        const ConceptTree detached = detach_branch(tree, path, TreeId{2});
        // Ancestors whose whole mass went with the branch drop to zero; that is
        // the only rule a detach may break.
        for (const auto& v : validate(tree)) {
            CHECK(v.rule == TreeRule::NonPositiveCount);
            CHECK(find_node(std::as_const(tree), v.path)->pos == 0);
        }
        CHECK(validate(detached).empty());
        attach_branch(tree, NodePath(path.begin(), path.end() - 1), detached.base);
        if (last_child) {
            CHECK(tree == original);
        } else {
            ConceptTree a = tree;
            ConceptTree b = original;
            canonicalize(a.base);
            canonicalize(b.base);
            CHECK(a == b);
        }
    }
}

TEST_CASE("merge_counts sums and appends") {
    ConceptNode target{"a", 2, 1, 0, {ConceptNode{"b", 2, 0, 2, {}}}};
    const ConceptNode source{"a", 3, 2, 1, {ConceptNode{"b", 1, 0, 1, {}}, ConceptNode{"c", 1, 0, 1, {}}}};
    merge_counts(target, source);
    CHECK(target.pos == 5);
    CHECK(target.neg == 3);
    CHECK(target.terminated == 1);
    REQUIRE(target.children.size() == 2);
    CHECK(target.children[0].pos == 3);
    CHECK(target.children[1].label == "c");
}

TEST_CASE("chain helpers") {
    const ConceptNode chain = make_chain(Labels{"x", "y", "z"}, 2);
    CHECK(is_chain(chain));
    CHECK(chain_labels(chain) == Labels{"x", "y", "z"});
    CHECK(node_count(chain) == 3);
    CHECK_FALSE(is_chain(cat_milk_tree().base));
    CHECK_THROWS_AS(make_chain(Labels{}), ConceptBaseError);
}
