#pragma once

// Line-oriented text snapshots. Trees are written by id, children in
// insertion order, links by key, keysets by entity; two equal bases always
// produce the same bytes.
//
//   conceptbase v1
//   config<TAB>min_share<TAB>2            (one line per config key)
//   clock<TAB>2
//   next_tree<TAB>2
//   next_link<TAB>1
//   tree<TAB>T1
//     black<TAB>2<TAB>0<TAB>0             (two spaces per level, base at one level)
//   link<TAB>L1<TAB>T1<TAB>black cat<TAB>T3<TAB>strength<TAB>pos<TAB>neg<TAB>flow<TAB>group:individual or -
//   keyset<TAB>cat<TAB>T1<TAB>L1
//   event<TAB>0<TAB>cat<TAB>black cat sat mat
//   end

#include <iosfwd>
#include <string>
#include <string_view>

#include "conceptbase/concept_base.hpp"

namespace conceptbase {

inline constexpr std::string_view kSnapshotHeader = "conceptbase v1";

struct SaveOptions {
    bool ledger = true;
};

void save(const ConceptBase& base, std::ostream& out, SaveOptions options = {});
std::string to_snapshot(const ConceptBase& base, SaveOptions options = {});

// Throws CorruptSnapshot naming the offending line, or VersionMismatch. The
// loaded base is re-validated unless `check` is Unchecked.
ConceptBase load(std::istream& in, ConceptBase::Check check = ConceptBase::Check::Strict);
ConceptBase from_snapshot(std::string_view text, ConceptBase::Check check = ConceptBase::Check::Strict);

// A missing or zero-length file loads as an empty base with `fallback` config.
ConceptBase load_file(const std::string& path, const Config& fallback = {},
                      ConceptBase::Check check = ConceptBase::Check::Strict);
// Writes a sibling temporary file and renames it over `path`.
void save_file(const ConceptBase& base, const std::string& path, SaveOptions options = {});

std::string format_double(double value);

}  // namespace conceptbase
