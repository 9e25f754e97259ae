#pragma once

// Graphviz rendering: one cluster per tree, dashed edges for links labelled
// with their key.

#include <iosfwd>
#include <string>

#include "conceptbase/concept_base.hpp"

namespace conceptbase {

void write_dot(const ConceptBase& base, std::ostream& out);
std::string to_dot(const ConceptBase& base);

}  // namespace conceptbase
