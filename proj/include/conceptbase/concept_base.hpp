#pragma once

// The forest manager. Routes sequences to trees (always from a base), factors
// branches that recur across trees into one linked tree, splits branches that
// carry too much negative evidence, re-joins split trees on request and decays
// unused links.

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <string>
#include <vector>

#include "conceptbase/concept_tree.hpp"
#include "conceptbase/link_index.hpp"
#include "conceptbase/text_ingest.hpp"

namespace conceptbase {

struct Config {
    std::int64_t min_share = 2;    // distinct trees a branch must recur in before it is factored
    double falsity_ratio = 1.0;    // split when neg >= falsity_ratio * pos
    double decay_half_life = 8.0;  // ticks for a link strength to halve
    double strength_floor = 0.05;  // links weaker than this are dropped
    bool eager_scans = true;       // false defers scans to end_batch()

    bool operator==(const Config&) const = default;
};

// `key = value` lines, '#' comments. Unknown keys and bad values throw
// InvalidConfig naming the line.
Config parse_config(std::istream& in, Config base = {});
Config load_config(const std::string& path, Config base = {});
void check_config(const Config& config);

// Which branch of the re-join rule cascade decided an attempt.
enum class RejoinRule {
    EqualEntityLinks,      // same entities on both sides: join
    ExtraEntityLinks,      // t2 reached by entities t1 lacks: refuse, compound count on the link
    ContainedBranch,       // t2 is a chain every t2 entity reaches through t1: join
    PartialCapability,     // some t1 entities lack the link: refuse
    MultipleReferences,    // t2 is fed by more than this one link: refuse
    UnreferencedBase,      // t2 base reached by no entity: join
    DistinctEntityLinks,   // t2 base has entity links of its own: refuse
    SharedEntityLinks,     // both reached by the same entities: join
    InvariantGuard,        // join rolled back by validation
    SelfReference,         // t1 == t2: refuse
};

std::string_view to_string(RejoinRule rule);

struct RejoinDecision {
    TreeId t1{};
    TreeId t2{};
    bool joined = false;
    RejoinRule rule{};
    std::string reason;
};

struct RestructureReport {
    std::vector<TreeId> created;
    std::vector<std::pair<TreeId, NodePath>> pruned;  // factoring cut points
    std::vector<LinkKey> links_added;
    std::vector<std::pair<TreeId, NodePath>> splits;  // falsity cut points
    std::vector<std::pair<TreeId, TreeId>> rejoins;
    std::vector<LinkKey> links_removed;
    std::vector<TreeId> trees_removed;
    std::vector<RejoinDecision> rejoin_decisions;

    void append(const RestructureReport& other);
    bool empty() const;
};

// Everything a snapshot persists.
struct BaseState {
    Config config;
    std::map<TreeId, ConceptTree> trees;
    LinkIndex links;
    std::vector<SequenceEvent> ledger;
    Tick clock = 0;  // next free tick
    std::uint64_t next_tree = 1;

    bool operator==(const BaseState&) const = default;
};

// How one sequence threads through the current forest.
struct Route {
    std::vector<std::pair<TreeId, NodePath>> nodes;
    std::vector<LinkKey> links;
    bool complete = false;  // every concept was placed
};

class ConceptBase {
public:
    enum class Check { Strict, Unchecked };

    explicit ConceptBase(Config config = {});

    // Strict rejects states that fail validate() with CorruptSnapshot.
    static ConceptBase from_state(BaseState state, Check check = Check::Strict);
    const BaseState& state() const { return state_; }

    const Config& config() const { return state_.config; }
    void set_config(const Config& config);
    const std::map<TreeId, ConceptTree>& trees() const { return state_.trees; }
    const ConceptTree* find_tree(TreeId id) const;
    const ConceptTree* tree_with_base(std::string_view label) const;
    const LinkIndex& links() const { return state_.links; }
    const std::vector<SequenceEvent>& ledger() const { return state_.ledger; }
    Tick clock() const { return state_.clock; }

    // Throws InvalidEvent for empty sequences, bad labels or a timestamp
    // earlier than the last one ingested.
    RestructureReport ingest(const SequenceEvent& event);
    // Runs factor and falsity scans to a fixpoint. Needed after ingesting with
    // eager_scans off.
    RestructureReport end_batch();
    RestructureReport factor_scan();
    RestructureReport falsity_scan();
    RestructureReport try_rejoin(TreeId t1, TreeId t2);
    RestructureReport decay_tick();

    const Link& create_link(const LinkEndpoint& from, TreeId to);
    const EntityKeyset& grant(const std::string& entity, const Grantable& what);
    void revoke(const std::string& entity, const Grantable& what);
    Capability resolve(const std::string& entity) const;
    // Traversal use pins strength back to 1.
    void refresh_links(std::span<const LinkKey> keys);

    Route trace(std::span<const Label> concepts) const;
    // Trees reachable from the capability, following only held link keys.
    std::set<TreeId> reachable_trees(const Capability& capability) const;
    std::set<std::string> entities_reaching(TreeId tree) const;

    // Empty iff every tree passes validate() and links, keysets and ledger are
    // mutually consistent.
    std::vector<std::string> validate() const;

private:
    ConceptTree* mutable_tree(TreeId id);
    ConceptTree& new_tree(ConceptNode base);
    const Link* link_towards(const LinkEndpoint& from, std::string_view next_label) const;
    Count link_exits(const LinkEndpoint& at) const;

    using NodeOwners = std::map<std::pair<TreeId, NodePath>, std::set<std::string>>;
    NodeOwners ledger_owners() const;
    void grant_from_owners(const NodeOwners& owners, TreeId tree, const NodePath& path, LinkKey key);

    // The tree based at `label`, created empty when missing.
    TreeId target_for(const Label& label, RestructureReport& report);
    void fold_link_conflicts(RestructureReport& report);
    void remove_tree(TreeId id, RestructureReport& report);

    bool factor_once(RestructureReport& report);
    bool split_once(RestructureReport& report);
    RejoinDecision rejoin_linked(TreeId t1, TreeId t2, RestructureReport& report);
    RejoinDecision rejoin_branch(TreeId t1, TreeId t2, RestructureReport& report);

    BaseState state_;
};

// Single writer, many readers. Every mutation runs to completion under the
// exclusive lock, so readers never observe a half-applied restructure. A
// waiting writer holds the gate, so new readers queue behind it instead of
// starving it.
class ConceptStore {
public:
    explicit ConceptStore(ConceptBase base = ConceptBase{}) : base_(std::move(base)) {}

    template <typename Fn>
    decltype(auto) read(Fn&& fn) const {
        std::shared_lock<std::shared_mutex> lock;
        {
            std::lock_guard gate(gate_);
            lock = std::shared_lock(mutex_);
        }
        return fn(static_cast<const ConceptBase&>(base_));
    }

    template <typename Fn>
    decltype(auto) write(Fn&& fn) {
        std::lock_guard gate(gate_);
        std::unique_lock lock(mutex_);
        return fn(base_);
    }

private:
    mutable std::mutex gate_;
    mutable std::shared_mutex mutex_;
    ConceptBase base_;
};

}  // namespace conceptbase
