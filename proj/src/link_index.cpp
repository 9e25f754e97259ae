#include "conceptbase/link_index.hpp"

#include <algorithm>

namespace conceptbase {

namespace {

bool has_prefix(const NodePath& path, const NodePath& prefix) {
    return path.size() >= prefix.size() && std::equal(prefix.begin(), prefix.end(), path.begin());
}

}  // namespace

Link& LinkIndex::add(const LinkEndpoint& from, TreeId to) {
    for (auto& [key, link] : links_) {
        if (link.from == from && link.to == to) {
            ++link.compound.positive;
            return link;
        }
    }
    const LinkKey key{next_key_++};
    auto [it, inserted] = links_.emplace(key, Link{key, from, to, 1.0, {}, 0, std::nullopt});
    return it->second;
}

const Link* LinkIndex::find(LinkKey key) const {
    const auto it = links_.find(key);
    return it == links_.end() ? nullptr : &it->second;
}

Link* LinkIndex::find(LinkKey key) {
    const auto it = links_.find(key);
    return it == links_.end() ? nullptr : &it->second;
}

const Link* LinkIndex::find(const LinkEndpoint& from, TreeId to) const {
    for (const auto& [key, link] : links_) {
        if (link.from == from && link.to == to) return &link;
    }
    return nullptr;
}

std::vector<const Link*> LinkIndex::outgoing(const LinkEndpoint& from) const {
    std::vector<const Link*> out;
    for (const auto& [key, link] : links_) {
        if (link.from == from) out.push_back(&link);
    }
    return out;
}

std::vector<const Link*> LinkIndex::inbound(TreeId to) const {
    std::vector<const Link*> out;
    for (const auto& [key, link] : links_) {
        if (link.to == to) out.push_back(&link);
    }
    return out;
}

std::vector<const Link*> LinkIndex::outgoing_from_tree(TreeId tree) const {
    std::vector<const Link*> out;
    for (const auto& [key, link] : links_) {
        if (link.from.tree == tree) out.push_back(&link);
    }
    return out;
}

void LinkIndex::remove(LinkKey key) {
    links_.erase(key);
    for (auto& [entity, keyset] : keysets_) keyset.link_keys.erase(key);
}

std::vector<LinkKey> LinkIndex::remove_tree(TreeId tree) {
    std::vector<LinkKey> removed;
    for (const auto& [key, link] : links_) {
        if (link.from.tree == tree || link.to == tree) removed.push_back(key);
    }
    for (const auto key : removed) remove(key);
    for (auto& [entity, keyset] : keysets_) keyset.start_trees.erase(tree);
    return removed;
}

void LinkIndex::rehome(TreeId old_tree, const NodePath& old_prefix, TreeId new_tree, const NodePath& new_prefix) {
    for (auto& [key, link] : links_) {
        if (link.from.tree != old_tree || !has_prefix(link.from.path, old_prefix)) continue;
        NodePath moved = new_prefix;
        moved.insert(moved.end(), link.from.path.begin() + static_cast<std::ptrdiff_t>(old_prefix.size()),
                     link.from.path.end());
        link.from = LinkEndpoint{new_tree, std::move(moved)};
    }
    fold_duplicates();
}

void LinkIndex::retarget(TreeId from, TreeId to) {
    for (auto& [key, link] : links_) {
        if (link.to == from) link.to = to;
    }
    fold_duplicates();
}

void LinkIndex::fold_duplicates() {
    std::map<std::pair<LinkEndpoint, TreeId>, LinkKey> first_seen;
    std::vector<std::pair<LinkKey, LinkKey>> folds;  // (dropped, kept)
    for (auto& [key, link] : links_) {
        auto [it, inserted] = first_seen.emplace(std::make_pair(link.from, link.to), key);
        if (inserted) continue;
        Link& kept = links_.at(it->second);
        kept.compound.positive += link.compound.positive;
        kept.compound.negative += link.compound.negative;
        kept.flow += link.flow;
        kept.strength = std::max(kept.strength, link.strength);
        if (!kept.group_individual) kept.group_individual = link.group_individual;
        folds.emplace_back(key, it->second);
    }
    for (const auto& [dropped, kept] : folds) {
        links_.erase(dropped);
        replace_key(dropped, kept);
    }
}

void LinkIndex::replace_key(LinkKey from, LinkKey to) {
    for (auto& [entity, keyset] : keysets_) {
        if (keyset.link_keys.erase(from) > 0) keyset.link_keys.insert(to);
    }
}

EntityKeyset& LinkIndex::grant(const std::string& entity, const Grantable& what) {
    auto [it, inserted] = keysets_.try_emplace(entity);
    EntityKeyset& keyset = it->second;
    keyset.primary = entity;
    if (const auto* key = std::get_if<LinkKey>(&what)) {
        keyset.link_keys.insert(*key);
    } else {
        keyset.start_trees.insert(std::get<TreeId>(what));
    }
    return keyset;
}

void LinkIndex::revoke(const std::string& entity, const Grantable& what) {
    const auto it = keysets_.find(entity);
    if (it == keysets_.end()) return;
    if (const auto* key = std::get_if<LinkKey>(&what)) {
        it->second.link_keys.erase(*key);
    } else {
        it->second.start_trees.erase(std::get<TreeId>(what));
    }
}

Capability LinkIndex::resolve(const std::string& entity) const {
    const auto it = keysets_.find(entity);
    if (it == keysets_.end()) return {};
    return Capability{it->second.start_trees, it->second.link_keys};
}

void LinkIndex::restore(std::map<LinkKey, Link> links, std::map<std::string, EntityKeyset> keysets,
                        std::uint64_t next_key) {
    links_ = std::move(links);
    keysets_ = std::move(keysets);
    next_key_ = next_key;
}

}  // namespace conceptbase
