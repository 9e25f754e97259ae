#pragma once

// Command-line front end over a snapshot file.
//
//   conceptbase [--db FILE] [--config FILE] [--no-ledger] <command> ...
//
//   ingest    --file F... | --stdin  [--entity E] [--reorder-lexicon F] [--stopwords F] [--batch]
//   query     [--entity E] [--all a,b,...] [--confidence path,labels:candidate]
//   stats
//   dump      [--dot]
//   rejoin    --t1 T --t2 T
//   decay     [--ticks N]
//   validate
//
// Exit status: 0 success, 1 usage or input error, 2 corrupt snapshot.

#include <iosfwd>
#include <string>
#include <vector>

namespace conceptbase {

// `args` excludes the program name.
int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in);

}  // namespace conceptbase
