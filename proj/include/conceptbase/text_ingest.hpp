#pragma once

// Text to concept sequences: tokenizing, sentence extraction, optional
// lexicon-driven reordering and bag-of-words counting.

#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "conceptbase/types.hpp"

namespace conceptbase {

// One ingestion unit. Concepts presented together are taken to be related.
struct SequenceEvent {
    std::vector<Label> concepts;
    Tick timestamp = 0;
    std::optional<std::string> entity;

    bool operator==(const SequenceEvent&) const = default;
};

using StopWords = std::set<std::string, std::less<>>;

// Heavier labels are placed nearer the base. Unknown labels weigh 0.
struct OrderingLexicon {
    std::map<Label, std::int64_t, std::less<>> weights;

    std::int64_t weight(std::string_view label) const;
};

// Monotonic tick counter. Not synchronized; confine to one ingestion thread.
class TickSource {
public:
    explicit TickSource(Tick start = 0) : next_(start) {}

    Tick next() { return next_++; }
    Tick peek() const { return next_; }

private:
    Tick next_;
};

// Non-empty, no whitespace, no ASCII upper case.
bool is_valid_label(std::string_view label);
bool is_valid_entity(std::string_view entity);

// Lowercases, splits on whitespace and punctuation (hyphens inside a word are
// kept) and drops stop words. Order is preserved.
std::vector<Label> tokenize(std::string_view text, const StopWords& stopwords);

// Splits at '.', '!' and '?'. Sentences that tokenize to nothing are dropped
// and do not consume a tick.
std::vector<SequenceEvent> extract_sequences(std::string_view document, const StopWords& stopwords,
                                             TickSource& clock,
                                             const std::optional<std::string>& entity = std::nullopt);

// Stable sort by descending lexicon weight.
SequenceEvent reorder(SequenceEvent event, const OrderingLexicon& lexicon);

std::map<Label, Count> bag_of_words(std::span<const SequenceEvent> events);

// Articles, conjunctions, prepositions, pronouns and the copula. Matches
// data/stopwords.txt.
const StopWords& default_stopwords();

// One word per line, '#' starts a comment, blank lines ignored.
StopWords parse_stopwords(std::istream& in);
// `word<TAB>integer` per line, '#' comments. Throws InvalidConfig on bad lines.
OrderingLexicon parse_lexicon(std::istream& in);

StopWords load_stopwords(const std::string& path);
OrderingLexicon load_lexicon(const std::string& path);

}  // namespace conceptbase
