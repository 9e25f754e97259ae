#include <doctest.h>

#include <atomic>
#include <random>
#include <thread>

#include "conceptbase/query_engine.hpp"
#include "conceptbase/snapshot.hpp"
#include "support/oracles.hpp"

using namespace conceptbase;

TEST_CASE("readers never see a half-applied restructure") {
    ConceptStore store;
    std::atomic<bool> done{false};
    std::atomic<std::size_t> reads{0};
    std::atomic<std::size_t> bad{0};

    std::thread writer([&] {
        std::mt19937_64 rng(41);
        oracle::StreamShape shape;
        shape.events_min = 40;
        shape.events_max = 40;
        Tick offset = 0;
        for (int round = 0; round < 20; ++round) {
            for (auto event : oracle::random_stream(rng, shape)) {
                event.timestamp += offset;
                store.write([&](ConceptBase& base) { base.ingest(event); });
            }
            offset = store.read([](const ConceptBase& base) { return base.clock(); });
            store.write([](ConceptBase& base) { base.decay_tick(); });
        }
        done = true;
    });

    std::vector<std::thread> readers;
    for (int r = 0; r < 4; ++r) {
        readers.emplace_back([&, r] {
            while (!done) {
                store.read([&](const ConceptBase& base) {
                    if (!base.validate().empty()) ++bad;
                    if (r % 2 == 0) {
                        for (const auto& [entity, keyset] : base.links().keysets()) traverse(base, entity);
                    } else {
                        to_snapshot(base);
                    }
                });
                ++reads;
            }
        });
    }
    writer.join();
    for (auto& t : readers) t.join();
    CHECK(bad == 0);
    CHECK(reads > 0);
    store.read([](const ConceptBase& base) {
        CHECK(base.ledger().size() == 800);
        CHECK(oracle::compare_with_replay(base.state()) == "");
    });
}
