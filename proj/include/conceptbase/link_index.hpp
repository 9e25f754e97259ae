#pragma once

// Keyed links between trees and the entity keysets that decide which links an
// entity may cross. Links always land on a tree base.

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "conceptbase/types.hpp"

namespace conceptbase {

struct LinkEndpoint {
    TreeId tree{};
    NodePath path;

    auto operator<=>(const LinkEndpoint&) const = default;
    bool operator==(const LinkEndpoint&) const = default;
};

struct CompoundCount {
    Count positive = 0;
    Count negative = 0;

    bool operator==(const CompoundCount&) const = default;
};

// Reserved; carried through snapshots but given no semantics.
struct GroupIndividual {
    Count group = 0;
    Count individual = 0;

    bool operator==(const GroupIndividual&) const = default;
};

struct Link {
    LinkKey key{};
    LinkEndpoint from;
    TreeId to{};
    double strength = 1.0;
    CompoundCount compound;
    Count flow = 0;  // sequence segments routed across this link
    std::optional<GroupIndividual> group_individual;

    bool operator==(const Link&) const = default;
};

struct EntityKeyset {
    std::string primary;
    std::set<LinkKey> link_keys;
    std::set<TreeId> start_trees;

    bool operator==(const EntityKeyset&) const = default;
};

struct Capability {
    std::set<TreeId> start_trees;
    std::set<LinkKey> link_keys;

    bool operator==(const Capability&) const = default;
};

using Grantable = std::variant<LinkKey, TreeId>;

// Storage and bookkeeping only; endpoint existence is checked by the owning
// ConceptBase, which knows the trees.
class LinkIndex {
public:
    // New link with strength 1 and compound (0,0), or, when (from, to) is
    // already linked, that link with compound.positive reinforced.
    Link& add(const LinkEndpoint& from, TreeId to);

    const std::map<LinkKey, Link>& links() const { return links_; }
    const std::map<std::string, EntityKeyset>& keysets() const { return keysets_; }
    std::uint64_t next_key() const { return next_key_; }

    const Link* find(LinkKey key) const;
    Link* find(LinkKey key);
    const Link* find(const LinkEndpoint& from, TreeId to) const;
    std::vector<const Link*> outgoing(const LinkEndpoint& from) const;
    std::vector<const Link*> inbound(TreeId to) const;
    std::vector<const Link*> outgoing_from_tree(TreeId tree) const;

    // Removes the link and purges its key from every keyset.
    void remove(LinkKey key);
    // Removes every link touching `tree` and purges the tree from keysets.
    std::vector<LinkKey> remove_tree(TreeId tree);

    // Rewrites link sources that sit at or below `old_prefix` in `old_tree`
    // so they hang off `new_prefix` in `new_tree`. Links that collide with an
    // existing (from, to) pair are folded into the lower key and the higher
    // key is replaced in every keyset.
    void rehome(TreeId old_tree, const NodePath& old_prefix, TreeId new_tree, const NodePath& new_prefix);
    // Retargets links pointing at `from` to `to`, folding collisions.
    void retarget(TreeId from, TreeId to);

    EntityKeyset& grant(const std::string& entity, const Grantable& what);
    // Revoking something the entity lacks, or an unknown entity, is a no-op.
    void revoke(const std::string& entity, const Grantable& what);
    Capability resolve(const std::string& entity) const;

    // Used when restoring a snapshot.
    void restore(std::map<LinkKey, Link> links, std::map<std::string, EntityKeyset> keysets, std::uint64_t next_key);

    bool operator==(const LinkIndex&) const = default;

private:
    void fold_duplicates();
    void replace_key(LinkKey from, LinkKey to);

    std::map<LinkKey, Link> links_;
    std::map<std::string, EntityKeyset> keysets_;
    std::uint64_t next_key_ = 1;
};

}  // namespace conceptbase
