#include <doctest.h>

#include <algorithm>
#include <fstream>
#include <random>
#include <sstream>

#include "conceptbase/text_ingest.hpp"
#include "support/oracles.hpp"

using namespace conceptbase;
using Labels = std::vector<Label>;

namespace {

std::vector<std::string> stopword_list() { return {default_stopwords().begin(), default_stopwords().end()}; }

}  // namespace

TEST_CASE("tokenize drops stop words and punctuation") {
    const auto& sw = default_stopwords();
    CHECK(tokenize("The black cat sat on the mat.", sw) == Labels{"black", "cat", "sat", "mat"});
    CHECK(tokenize("", sw).empty());
    CHECK(tokenize("The thirsty boy drank some milk.", sw) == Labels{"thirsty", "boy", "drank", "milk"});
}

TEST_CASE("tokenize folds case and keeps inner hyphens only") {
    const StopWords none;
    CHECK(tokenize("Well-Known -dash- a--b x-", none) == Labels{"well-known", "dash", "a", "b", "x"});
    CHECK(tokenize("tab\tnew\nline,comma;semi", none) == Labels{"tab", "new", "line", "comma", "semi"});
    CHECK(tokenize("R2D2 42", none) == Labels{"r2d2", "42"});
}

TEST_CASE("tokenize keeps non-ASCII bytes inside words") {
    const StopWords none;
    CHECK(tokenize("Café crème", none) == Labels{"café", "crème"});
}

TEST_CASE("tokenize is idempotent on its own output") {
    const auto& sw = default_stopwords();
    for (const char* text : {"The black cat sat on the mat.", "Well-known facts, e.g. X-rays!", "ÉCOLE and école"}) {
        const Labels once = tokenize(text, sw);
        std::string rejoined;
        for (const auto& l : once) rejoined += l + " ";
        CHECK(tokenize(rejoined, sw) == once);
    }
}

TEST_CASE("extract_sequences splits sentences and assigns ticks") {
    const auto& sw = default_stopwords();
    TickSource ticks;
    const auto events = extract_sequences("The black cat sat on the mat. The black cat drank some milk.", sw, ticks);
    REQUIRE(events.size() == 2);
    CHECK(events[0].concepts == Labels{"black", "cat", "sat", "mat"});
    CHECK(events[0].timestamp == 0);
    CHECK(events[1].concepts == Labels{"black", "cat", "drank", "milk"});
    CHECK(events[1].timestamp == 1);
    CHECK(ticks.peek() == 2);
}

TEST_CASE("extract_sequences drops empty sentences without spending ticks") {
    const auto& sw = default_stopwords();
    TickSource ticks(5);
    CHECK(extract_sequences("On the. The a.", sw, ticks).empty());
    CHECK(ticks.peek() == 5);
    const auto events = extract_sequences("Thirsty elephant drank milk and ate grass!", sw, ticks, "elephant");
    REQUIRE(events.size() == 1);
    CHECK(events[0].concepts == Labels{"thirsty", "elephant", "drank", "milk", "ate", "grass"});
    CHECK(events[0].timestamp == 5);
    CHECK(events[0].entity == std::optional<std::string>("elephant"));
}

TEST_CASE("extract_sequences of a concatenation concatenates") {
    const auto& sw = default_stopwords();
    const std::string a = "The black cat sat on the mat. Birds sing?";
    const std::string b = "Dogs bark! The end.";
    TickSource t1;
    auto left = extract_sequences(a, sw, t1);
    const auto right = extract_sequences(b, sw, t1);
    left.insert(left.end(), right.begin(), right.end());
    TickSource t2;
    CHECK(extract_sequences(a + " " + b, sw, t2) == left);
}

TEST_CASE("reorder is a stable sort by descending weight") {
    const SequenceEvent e{{"black", "cat", "sat", "mat"}, 0, std::nullopt};
    CHECK(reorder(e, OrderingLexicon{}).concepts == e.concepts);
    OrderingLexicon lex;
    lex.weights = {{"cat", 3}, {"mat", 2}, {"sat", 1}, {"black", 0}};
    CHECK(reorder(e, lex).concepts == Labels{"cat", "mat", "sat", "black"});
    OrderingLexicon tie;
    tie.weights = {{"a", 1}, {"b", 1}};
    CHECK(reorder(SequenceEvent{{"a", "b"}, 0, std::nullopt}, tie).concepts == Labels{"a", "b"});
}

TEST_CASE("reorder is a permutation") {
    std::mt19937_64 rng(7);
    OrderingLexicon lex;
    lex.weights = {{"ant", 4}, {"bee", -2}, {"cat", 4}, {"dog", 1}};
    for (int i = 0; i < 200; ++i) {
        for (auto event : oracle::random_stream(rng)) {
            auto sorted_before = event.concepts;
            auto sorted_after = reorder(event, lex).concepts;
            std::sort(sorted_before.begin(), sorted_before.end());
            std::sort(sorted_after.begin(), sorted_after.end());
            CHECK(sorted_before == sorted_after);
        }
    }
}

TEST_CASE("bag_of_words counts every occurrence") {
    const auto& sw = default_stopwords();
    TickSource ticks;
    const auto events = extract_sequences(
        "The black cat sat on the mat. The black cat drank some milk. The thirsty boy drank some milk. "
        "The thirsty elephant drank some milk.",
        sw, ticks);
    const std::map<Label, Count> expected{{"drank", 3}, {"milk", 3},   {"black", 2},    {"cat", 2},
                                          {"thirsty", 2}, {"sat", 1}, {"mat", 1}, {"boy", 1}, {"elephant", 1}};
    CHECK(bag_of_words(events) == expected);
    CHECK(bag_of_words({}).empty());
    const std::vector<SequenceEvent> twice{SequenceEvent{{"x", "x"}, 0, std::nullopt}};
    CHECK(bag_of_words(twice) == std::map<Label, Count>{{"x", 2}});
}

TEST_CASE("bag_of_words agrees with an independent word count") {
    const std::string text =
        "The black cat sat on the mat. The black cat drank some milk. Thirsty boys drank milk-shakes! "
        "Some elephants ate grass? A long trunk, a long tail.";
    TickSource ticks;
    const auto events = extract_sequences(text, default_stopwords(), ticks);
    const auto expected = oracle::count_words(text, stopword_list());
    CHECK(bag_of_words(events) == std::map<Label, Count>(expected.begin(), expected.end()));
}

TEST_CASE("shipped stop word file matches the built-in list") {
    const StopWords from_file = load_stopwords(std::string(CB_DATA_DIR) + "/stopwords.txt");
    CHECK(from_file == default_stopwords());
}

TEST_CASE("stop word and lexicon parsing") {
    std::istringstream words("# header\nthe\n\n  and  \n# more\nof # trailing\n");
    CHECK(parse_stopwords(words) == StopWords{"the", "and", "of"});

    std::istringstream lex("# weights\ncat\t3\nmat\t-2\n\n");
    const auto parsed = parse_lexicon(lex);
    CHECK(parsed.weight("cat") == 3);
    CHECK(parsed.weight("mat") == -2);
    CHECK(parsed.weight("unknown") == 0);

    std::istringstream bad("cat\t3\nmat two\n");
    try {
        parse_lexicon(bad);
        FAIL("expected InvalidConfig");
    } catch (const ConceptBaseError& e) {
        CHECK(e.code() == ErrorCode::InvalidConfig);
        CHECK(std::string(e.what()).find("2") != std::string::npos);
    }
    CHECK_THROWS_AS(load_lexicon("/nonexistent/lexicon.tsv"), ConceptBaseError);
    CHECK_THROWS_AS(load_stopwords("/nonexistent/stop.txt"), ConceptBaseError);
}

TEST_CASE("label and entity validity") {
    CHECK(is_valid_label("cat"));
    CHECK(is_valid_label("well-known"));
    CHECK_FALSE(is_valid_label(""));
    CHECK_FALSE(is_valid_label("Cat"));
    CHECK_FALSE(is_valid_label("two words"));
    CHECK(is_valid_entity("Elephant-7"));
    CHECK_FALSE(is_valid_entity(""));
    CHECK_FALSE(is_valid_entity("a b"));
}
