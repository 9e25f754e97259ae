#include "conceptbase/dot_export.hpp"

#include <ostream>
#include <sstream>

namespace conceptbase {

namespace {

std::string quoted(std::string_view text) {
    std::string out = "\"";
    for (const char c : text) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    out += '"';
    return out;
}

std::string node_id(TreeId tree, const NodePath& path) { return quoted(to_string(tree) + ":" + join_path(path, "/")); }

void write_nodes(std::ostream& out, TreeId tree, const ConceptNode& node, NodePath& path) {
    path.push_back(node.label);
    const std::string id = node_id(tree, path);
    out << "    " << id << " [label=" << quoted(node.label + " " + std::to_string(node.pos) + "/" +
                                               std::to_string(node.neg) + "/" + std::to_string(node.terminated))
        << "];\n";
    for (const auto& child : node.children) {
        path.push_back(child.label);
        out << "    " << id << " -> " << node_id(tree, path) << ";\n";
        path.pop_back();
        write_nodes(out, tree, child, path);
    }
    path.pop_back();
}

}  // namespace

void write_dot(const ConceptBase& base, std::ostream& out) {
    out << "digraph conceptbase {\n";
    out << "  node [shape=box];\n";
    for (const auto& [id, tree] : base.trees()) {
        out << "  subgraph " << quoted("cluster_" + to_string(id)) << " {\n";
        out << "    label=" << quoted(to_string(id)) << ";\n";
        NodePath path;
        write_nodes(out, id, tree.base, path);
        out << "  }\n";
    }
    for (const auto& [key, link] : base.links().links()) {
        const ConceptTree* target = base.find_tree(link.to);
        if (target == nullptr) continue;
        out << "  " << node_id(link.from.tree, link.from.path) << " -> " << node_id(link.to, {target->base.label})
            << " [style=dashed, label=" << quoted(to_string(key)) << "];\n";
    }
    out << "}\n";
}

std::string to_dot(const ConceptBase& base) {
    std::ostringstream out;
    write_dot(base, out);
    return out.str();
}

}  // namespace conceptbase
