#include "conceptbase/text_ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>

namespace conceptbase {

namespace {

bool is_word_byte(char c) {
    const auto u = static_cast<unsigned char>(c);
    return u >= 0x80 || (u >= '0' && u <= '9') || (u >= 'a' && u <= 'z') || (u >= 'A' && u <= 'Z');
}

char fold(char c) {
    return (c >= 'A' && c <= 'Z') ? static_cast<char>(c - 'A' + 'a') : c;
}

bool is_sentence_end(char c) { return c == '.' || c == '!' || c == '?'; }

std::string_view trim(std::string_view s) {
    const auto* ws = " \t\r\n";
    const auto first = s.find_first_not_of(ws);
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(ws);
    return s.substr(first, last - first + 1);
}

std::string_view strip_comment(std::string_view line) {
    const auto hash = line.find('#');
    return hash == std::string_view::npos ? line : line.substr(0, hash);
}

}  // namespace

std::int64_t OrderingLexicon::weight(std::string_view label) const {
    const auto it = weights.find(label);
    return it == weights.end() ? 0 : it->second;
}

bool is_valid_label(std::string_view label) {
    if (label.empty()) return false;
    return std::none_of(label.begin(), label.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f' ||
               (c >= 'A' && c <= 'Z');
    });
}

bool is_valid_entity(std::string_view entity) {
    if (entity.empty()) return false;
    return std::none_of(entity.begin(), entity.end(), [](char c) {
        return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' || c == '\f';
    });
}

std::vector<Label> tokenize(std::string_view text, const StopWords& stopwords) {
    std::vector<Label> tokens;
    Label current;
    auto flush = [&] {
        if (!current.empty() && !stopwords.contains(current)) tokens.push_back(current);
        current.clear();
    };
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (is_word_byte(c)) {
            current.push_back(fold(c));
        } else if (c == '-' && !current.empty() && i + 1 < text.size() && is_word_byte(text[i + 1])) {
            current.push_back('-');
        } else {
            flush();
        }
    }
    flush();
    return tokens;
}

std::vector<SequenceEvent> extract_sequences(std::string_view document, const StopWords& stopwords,
                                             TickSource& clock, const std::optional<std::string>& entity) {
    std::vector<SequenceEvent> events;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= document.size(); ++i) {
        if (i < document.size() && !is_sentence_end(document[i])) continue;
        auto concepts = tokenize(document.substr(start, i - start), stopwords);
        if (!concepts.empty()) {
            events.push_back(SequenceEvent{std::move(concepts), clock.next(), entity});
        }
        start = i + 1;
    }
    return events;
}

SequenceEvent reorder(SequenceEvent event, const OrderingLexicon& lexicon) {
    std::stable_sort(event.concepts.begin(), event.concepts.end(),
                     [&](const Label& a, const Label& b) { return lexicon.weight(a) > lexicon.weight(b); });
    return event;
}

std::map<Label, Count> bag_of_words(std::span<const SequenceEvent> events) {
    std::map<Label, Count> counts;
    for (const auto& event : events) {
        for (const auto& label : event.concepts) ++counts[label];
    }
    return counts;
}

const StopWords& default_stopwords() {
    static const StopWords words = {
        // articles and determiners
        "a", "an", "the", "some", "any", "each", "every",
        // conjunctions
        "and", "or", "but", "nor", "so", "yet", "if", "because", "although", "while", "than",
        // prepositions
        "about", "above", "across", "after", "against", "along", "among", "around", "as", "at",
        "before", "behind", "below", "beneath", "beside", "between", "beyond", "by", "down",
        "during", "except", "for", "from", "in", "inside", "into", "near", "of", "off", "on",
        "onto", "out", "outside", "over", "past", "since", "through", "throughout", "to",
        "toward", "towards", "under", "until", "up", "upon", "with", "within", "without",
        // pronouns
        "i", "me", "my", "mine", "myself", "you", "your", "yours", "yourself", "he", "him", "his",
        "himself", "she", "her", "hers", "herself", "it", "its", "itself", "we", "us", "our",
        "ours", "ourselves", "they", "them", "their", "theirs", "themselves", "this", "that",
        "these", "those", "who", "whom", "whose", "which", "what",
        // copula
        "am", "is", "are", "was", "were", "be", "been", "being",
    };
    return words;
}

StopWords parse_stopwords(std::istream& in) {
    StopWords words;
    std::string line;
    while (std::getline(in, line)) {
        const auto word = trim(strip_comment(line));
        if (!word.empty()) words.emplace(word);
    }
    return words;
}

OrderingLexicon parse_lexicon(std::istream& in) {
    OrderingLexicon lexicon;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(strip_comment(line));
        if (body.empty()) continue;
        const auto tab = body.find('\t');
        if (tab == std::string_view::npos) {
            throw ConceptBaseError(ErrorCode::InvalidConfig,
                                   "lexicon line " + std::to_string(line_no) + ": expected word<TAB>integer");
        }
        const auto word = trim(body.substr(0, tab));
        const auto number = trim(body.substr(tab + 1));
        std::int64_t weight = 0;
        auto [end, ec] = std::from_chars(number.data(), number.data() + number.size(), weight);
        if (!is_valid_label(word) || number.empty() || ec != std::errc{} ||
            end != number.data() + number.size()) {
            throw ConceptBaseError(ErrorCode::InvalidConfig,
                                   "lexicon line " + std::to_string(line_no) + ": malformed entry");
        }
        lexicon.weights[std::string(word)] = weight;
    }
    return lexicon;
}

StopWords load_stopwords(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConceptBaseError(ErrorCode::Io, "cannot open stop-word file " + path);
    return parse_stopwords(in);
}

OrderingLexicon load_lexicon(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConceptBaseError(ErrorCode::Io, "cannot open lexicon file " + path);
    return parse_lexicon(in);
}

}  // namespace conceptbase
