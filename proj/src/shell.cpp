#include "conceptbase/shell.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <CLI11.hpp>
#include <algorithm>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "conceptbase/dot_export.hpp"
#include "conceptbase/metrics.hpp"
#include "conceptbase/query_engine.hpp"
#include "conceptbase/snapshot.hpp"

namespace conceptbase {

namespace {

// Advisory lock on a sibling "<db>.lock" file, shared for readers and
// exclusive for writers.
class FileLock {
public:
    FileLock(const std::string& db, bool exclusive) {
        const std::string path = db + ".lock";
        fd_ = ::open(path.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd_ < 0) throw ConceptBaseError(ErrorCode::Io, "cannot open lock file " + path);
        if (::flock(fd_, exclusive ? LOCK_EX : LOCK_SH) != 0) {
            ::close(fd_);
            throw ConceptBaseError(ErrorCode::Io, "cannot lock " + path);
        }
    }
    FileLock(const FileLock&) = delete;
    FileLock& operator=(const FileLock&) = delete;
    ~FileLock() {
        ::flock(fd_, LOCK_UN);
        ::close(fd_);
    }

private:
    int fd_ = -1;
};

struct Options {
    std::string db = "conceptbase.cb";
    std::string config;
    bool no_ledger = false;

    std::vector<std::string> files;
    bool from_stdin = false;
    std::string entity;
    std::string lexicon;
    std::string stopwords;
    bool batch = false;

    std::string all;
    std::string confidence;

    bool dot = false;
    std::string t1;
    std::string t2;
    std::int64_t ticks = 1;
};

std::vector<std::string> split_labels(std::string_view text) {
    std::vector<std::string> labels;
    std::string current;
    for (const char c : text) {
        if (c == ',' || c == ' ' || c == '\t') {
            if (!current.empty()) labels.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    if (!current.empty()) labels.push_back(std::move(current));
    return labels;
}

template <typename Range, typename Fn>
std::string listed(const Range& range, Fn&& render) {
    std::string text;
    for (const auto& item : range) {
        if (!text.empty()) text += ' ';
        text += render(item);
    }
    return text;
}

std::string cut_point(const std::pair<TreeId, NodePath>& at) { return to_string(at.first) + ":" + join_path(at.second, "/"); }

void print_report(std::ostream& out, const RestructureReport& r) {
    out << "created = " << listed(r.created, [](TreeId id) { return to_string(id); }) << '\n';
    out << "pruned = " << listed(r.pruned, cut_point) << '\n';
    out << "links_added = " << listed(r.links_added, [](LinkKey k) { return to_string(k); }) << '\n';
    out << "splits = " << listed(r.splits, cut_point) << '\n';
    out << "rejoins = "
        << listed(r.rejoins, [](const auto& p) { return to_string(p.first) + "+" + to_string(p.second); }) << '\n';
    out << "links_removed = " << listed(r.links_removed, [](LinkKey k) { return to_string(k); }) << '\n';
    out << "trees_removed = " << listed(r.trees_removed, [](TreeId id) { return to_string(id); }) << '\n';
}

class Session {
public:
    Session(const Options& opt, std::ostream& out, std::istream& in) : opt_(opt), out_(out), in_(in) {}

    int ingest();
    int query();
    int stats();
    int dump();
    int rejoin();
    int decay();
    int validate();

private:
    ConceptBase open(ConceptBase::Check check = ConceptBase::Check::Strict) const {
        Config fallback;
        if (!opt_.config.empty()) fallback = load_config(opt_.config);
        ConceptBase base = load_file(opt_.db, fallback, check);
        if (!opt_.config.empty()) base.set_config(load_config(opt_.config, base.config()));
        return base;
    }

    void commit(const ConceptBase& base) const { save_file(base, opt_.db, SaveOptions{!opt_.no_ledger}); }

    const Options& opt_;
    std::ostream& out_;
    std::istream& in_;
};

int Session::ingest() {
    if (opt_.files.empty() == !opt_.from_stdin) {
        throw ConceptBaseError(ErrorCode::InvalidArgument, "give either --file or --stdin");
    }
    const StopWords stopwords = opt_.stopwords.empty() ? default_stopwords() : load_stopwords(opt_.stopwords);
    std::optional<OrderingLexicon> lexicon;
    if (!opt_.lexicon.empty()) lexicon = load_lexicon(opt_.lexicon);
    std::optional<std::string> entity;
    if (!opt_.entity.empty()) entity = opt_.entity;

    std::vector<std::string> documents;
    if (opt_.from_stdin) {
        documents.emplace_back(std::istreambuf_iterator<char>(in_), std::istreambuf_iterator<char>());
    }
    for (const auto& file : opt_.files) {
        std::ifstream doc(file, std::ios::binary);
        if (!doc) throw ConceptBaseError(ErrorCode::Io, "cannot open " + file);
        documents.emplace_back(std::istreambuf_iterator<char>(doc), std::istreambuf_iterator<char>());
    }

    FileLock lock(opt_.db, true);
    ConceptBase base = open();
    Config config = base.config();
    const bool eager = config.eager_scans;
    if (opt_.batch && eager) {
        config.eager_scans = false;
        base.set_config(config);
    }
    TickSource ticks(base.clock());
    RestructureReport report;
    std::size_t events = 0;
    for (const auto& text : documents) {
        for (auto event : extract_sequences(text, stopwords, ticks, entity)) {
            if (lexicon) event = reorder(std::move(event), *lexicon);
            report.append(base.ingest(event));
            ++events;
        }
    }
    if (opt_.batch || !eager) report.append(base.end_batch());
    if (opt_.batch && eager) {
        config.eager_scans = true;
        base.set_config(config);
    }
    commit(base);
    out_ << "events = " << events << '\n';
    print_report(out_, report);
    return 0;
}

int Session::query() {
    if (opt_.all.empty() && opt_.confidence.empty() && opt_.entity.empty()) {
        throw ConceptBaseError(ErrorCode::InvalidArgument, "give --entity, --all or --confidence");
    }
    FileLock lock(opt_.db, true);
    ConceptBase base = open();
    if (!opt_.confidence.empty()) {
        const auto colon = opt_.confidence.rfind(':');
        if (colon == std::string::npos) {
            throw ConceptBaseError(ErrorCode::InvalidArgument, "--confidence expects path:candidate");
        }
        const auto path = split_labels(std::string_view(opt_.confidence).substr(0, colon));
        const std::string candidate = opt_.confidence.substr(colon + 1);
        out_ << "confidence = " << format_double(concept_confidence(base, path, candidate)) << '\n';
        return 0;
    }
    std::optional<std::string> entity;
    if (!opt_.entity.empty()) entity = opt_.entity;
    QueryResult result;
    if (!opt_.all.empty()) {
        const auto labels = split_labels(opt_.all);
        result = query_all(base, entity, std::set<Label>(labels.begin(), labels.end()));
    } else {
        result = traverse(base, *entity);
    }
    for (const auto& g : result.groupings) {
        out_ << "grouping = " << g.entity << ' ' << to_string(g.start) << '\n';
        for (const auto& path : g.paths) out_ << "path = " << join_path(path) << '\n';
    }
    out_ << "matched_trees = " << listed(result.matched_trees, [](TreeId id) { return to_string(id); }) << '\n';
    if (!result.used_links.empty()) {
        const std::vector<LinkKey> used(result.used_links.begin(), result.used_links.end());
        base.refresh_links(used);
        commit(base);
    }
    return 0;
}

int Session::stats() {
    FileLock lock(opt_.db, false);
    const ConceptBase base = open();
    const ForestStats s = conceptbase::stats(base);
    out_ << "tree_count = " << s.tree_count << '\n';
    out_ << "node_count = " << s.node_count << '\n';
    out_ << "max_depth = " << s.max_depth << '\n';
    out_ << "mean_tree_size = " << format_double(s.mean_tree_size) << '\n';
    out_ << "violation_count = " << s.violation_count << '\n';
    out_ << "total_links = " << s.total_links << '\n';
    out_ << "ledger_events = " << base.ledger().size() << '\n';
    for (const auto& [id, units] : s.energy_per_tree) out_ << "energy." << to_string(id) << " = " << units << '\n';
    return 0;
}

int Session::dump() {
    FileLock lock(opt_.db, false);
    const ConceptBase base = open();
    if (opt_.dot) {
        write_dot(base, out_);
    } else {
        save(base, out_, SaveOptions{!opt_.no_ledger});
    }
    return 0;
}

int Session::rejoin() {
    FileLock lock(opt_.db, true);
    ConceptBase base = open();
    const RestructureReport report = base.try_rejoin(parse_tree_id(opt_.t1), parse_tree_id(opt_.t2));
    const RejoinDecision& d = report.rejoin_decisions.front();
    commit(base);
    out_ << "joined = " << (d.joined ? "true" : "false") << '\n';
    out_ << "rule = " << to_string(d.rule) << '\n';
    if (!d.reason.empty()) out_ << "reason = " << d.reason << '\n';
    print_report(out_, report);
    return 0;
}

int Session::decay() {
    if (opt_.ticks < 0) throw ConceptBaseError(ErrorCode::InvalidArgument, "--ticks must be >= 0");
    FileLock lock(opt_.db, true);
    ConceptBase base = open();
    RestructureReport report;
    for (std::int64_t i = 0; i < opt_.ticks; ++i) report.append(base.decay_tick());
    commit(base);
    out_ << "clock = " << base.clock() << '\n';
    out_ << "links_removed = " << listed(report.links_removed, [](LinkKey k) { return to_string(k); }) << '\n';
    return 0;
}

int Session::validate() {
    FileLock lock(opt_.db, false);
    const ConceptBase base = open(ConceptBase::Check::Unchecked);
    const auto problems = base.validate();
    for (const auto& p : problems) out_ << p << '\n';
    if (!problems.empty()) return 2;
    out_ << "ok\n";
    return 0;
}

}  // namespace

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err, std::istream& in) {
    Options opt;
    CLI::App app{"Concept base: counted concept trees linked by entity keys", "conceptbase"};
    app.fallthrough();
    app.require_subcommand(1);
    app.add_option("--db", opt.db, "Snapshot file; a missing or empty file is an empty base");
    app.add_option("--config", opt.config, "Config file of key = value lines");
    app.add_flag("--no-ledger", opt.no_ledger, "Write snapshots without the event ledger");

    auto* ingest = app.add_subcommand("ingest", "Add documents to the base");
    auto* source = ingest->add_option_group("source");
    source->add_option("--file", opt.files, "Document to ingest (repeatable)");
    source->add_flag("--stdin", opt.from_stdin, "Read one document from standard input");
    source->require_option(1);
    ingest->add_option("--entity", opt.entity, "Entity the document describes");
    ingest->add_option("--reorder-lexicon", opt.lexicon, "word<TAB>weight file, heavier words go first");
    ingest->add_option("--stopwords", opt.stopwords, "Stop word list replacing the built-in one");
    ingest->add_flag("--batch", opt.batch, "Defer restructuring scans to the end of the input");

    auto* query = app.add_subcommand("query", "Traverse or query the base");
    query->add_option("--entity", opt.entity, "Entity whose keys gate the traversal");
    query->add_option("--all", opt.all, "Comma-separated concepts that must all be reachable");
    query->add_option("--confidence", opt.confidence, "path,labels:candidate");

    auto* stats = app.add_subcommand("stats", "Print forest statistics");
    auto* dump = app.add_subcommand("dump", "Print the snapshot, or DOT with --dot");
    dump->add_flag("--dot", opt.dot, "Graphviz output");
    auto* rejoin = app.add_subcommand("rejoin", "Try to join tree t2 back into t1");
    rejoin->add_option("--t1", opt.t1, "Tree that links to or contains t2")->required();
    rejoin->add_option("--t2", opt.t2, "Tree to absorb")->required();
    auto* decay = app.add_subcommand("decay", "Advance the clock, weakening links");
    decay->add_option("--ticks", opt.ticks, "Number of ticks")->capture_default_str();
    auto* validate = app.add_subcommand("validate", "Check every invariant");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(std::move(reversed));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? 0 : 1;
    }

    Session session(opt, out, in);
    try {
        if (ingest->parsed()) return session.ingest();
        if (query->parsed()) return session.query();
        if (stats->parsed()) return session.stats();
        if (dump->parsed()) return session.dump();
        if (rejoin->parsed()) return session.rejoin();
        if (decay->parsed()) return session.decay();
        if (validate->parsed()) return session.validate();
    } catch (const ConceptBaseError& e) {
        err << "error: " << e.what() << '\n';
        return e.code() == ErrorCode::CorruptSnapshot || e.code() == ErrorCode::VersionMismatch ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}

}  // namespace conceptbase
