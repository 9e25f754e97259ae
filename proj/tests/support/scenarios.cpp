#include "scenarios.hpp"

#include "conceptbase/text_ingest.hpp"

namespace scenario {

using namespace conceptbase;

RestructureReport feed(ConceptBase& base, const std::string& text, const std::optional<std::string>& entity) {
    TickSource ticks(base.clock());
    RestructureReport report;
    for (const auto& event : extract_sequences(text, default_stopwords(), ticks, entity)) {
        report.append(base.ingest(event));
    }
    return report;
}

ConceptBase cat_milk(Config config) {
    ConceptBase base(config);
    feed(base, kCatText, "cat");
    return base;
}

ConceptBase milk_drinkers(Config config) {
    ConceptBase base = cat_milk(config);
    feed(base, kBoyText, "boy");
    feed(base, kElephantText, "elephant");
    return base;
}

ConceptBase grazing_elephant(Config config) {
    ConceptBase base = milk_drinkers(config);
    for (int i = 0; i < 3; ++i) feed(base, kGrassText, "elephant");
    return base;
}

ConceptBase long_trunk(Config config) {
    ConceptBase base = milk_drinkers(config);
    feed(base, kTrunkText, "elephant");
    feed(base, kShortBoyText, "boy");
    return base;
}

}  // namespace scenario
