#include "conceptbase/snapshot.hpp"

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace conceptbase {

namespace {

void write_node(std::ostream& out, const ConceptNode& node, std::size_t depth) {
    out << std::string(2 * (depth + 1), ' ') << node.label << '\t' << node.pos << '\t' << node.neg << '\t'
        << node.terminated << '\n';
    for (const auto& child : node.children) write_node(out, child, depth + 1);
}

template <typename Range, typename Fn>
std::string joined(const Range& range, Fn&& render) {
    std::string text;
    for (const auto& item : range) {
        if (!text.empty()) text += ' ';
        text += render(item);
    }
    return text;
}

std::vector<std::string_view> split(std::string_view line, char sep) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const auto at = line.find(sep, start);
        if (at == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, at - start));
        start = at + 1;
    }
}

std::vector<std::string> words(std::string_view text) {
    std::vector<std::string> out;
    if (text.empty()) return out;
    for (const auto part : split(text, ' ')) out.emplace_back(part);
    return out;
}

class Parser {
public:
    explicit Parser(std::istream& in) : in_(in) {}

    BaseState run();

private:
    enum Phase { Header, Config, Clock, NextTree, NextLink, Trees, Links, Keysets, Events, End };

    [[noreturn]] void fail(const std::string& what) const {
        throw ConceptBaseError(ErrorCode::CorruptSnapshot, "line " + std::to_string(line_no_) + ": " + what);
    }

    void advance(Phase to, bool repeatable) {
        if (to < phase_ || (to == phase_ && !repeatable)) fail("record out of order");
        phase_ = to;
    }

    void expect_fields(const std::vector<std::string_view>& fields, std::size_t n) const {
        if (fields.size() != n) {
            fail("expected " + std::to_string(n) + " fields, found " + std::to_string(fields.size()));
        }
    }

    template <typename Int>
    Int integer(std::string_view text) const {
        Int value{};
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
            fail("bad integer '" + std::string(text) + "'");
        }
        return value;
    }

    double real(std::string_view text) const {
        double value{};
        const auto [end, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
        if (text.empty() || ec != std::errc{} || end != text.data() + text.size()) {
            fail("bad number '" + std::string(text) + "'");
        }
        return value;
    }

    TreeId tree_id(std::string_view text) const {
        if (text.size() < 2 || text.front() != 'T') fail("bad tree id '" + std::string(text) + "'");
        return TreeId{integer<std::uint64_t>(text.substr(1))};
    }

    LinkKey link_key(std::string_view text) const {
        if (text.size() < 2 || text.front() != 'L') fail("bad link key '" + std::string(text) + "'");
        return LinkKey{integer<std::uint64_t>(text.substr(1))};
    }

    void config_line(const std::vector<std::string_view>& f);
    void node_line(std::string_view line);
    void link_line(const std::vector<std::string_view>& f);
    void keyset_line(const std::vector<std::string_view>& f);
    void event_line(const std::vector<std::string_view>& f);

    std::istream& in_;
    int line_no_ = 0;
    Phase phase_ = Header;
    BaseState state_;
    std::set<std::string> config_seen_;
    std::uint64_t next_link_ = 1;
    std::map<LinkKey, Link> links_;
    std::map<std::string, EntityKeyset> keysets_;
    ConceptTree* tree_ = nullptr;
    std::vector<ConceptNode*> stack_;
};

void Parser::config_line(const std::vector<std::string_view>& f) {
    expect_fields(f, 3);
    const std::string key(f[1]);
    if (!config_seen_.insert(key).second) fail("config key '" + key + "' repeated");
    auto& c = state_.config;
    if (key == "min_share") {
        c.min_share = integer<std::int64_t>(f[2]);
    } else if (key == "falsity_ratio") {
        c.falsity_ratio = real(f[2]);
    } else if (key == "decay_half_life") {
        c.decay_half_life = real(f[2]);
    } else if (key == "strength_floor") {
        c.strength_floor = real(f[2]);
    } else if (key == "eager_scans") {
        if (f[2] != "true" && f[2] != "false") fail("eager_scans must be true or false");
        c.eager_scans = f[2] == "true";
    } else {
        fail("unknown config key '" + key + "'");
    }
}

void Parser::node_line(std::string_view line) {
    if (tree_ == nullptr) fail("node outside a tree");
    const auto indent = line.find_first_not_of(' ');
    if (indent == std::string_view::npos || indent % 2 != 0 || indent < 2) fail("bad indentation");
    const std::size_t depth = indent / 2 - 1;
    const auto f = split(line.substr(indent), '\t');
    expect_fields(f, 4);
    ConceptNode node{std::string(f[0]), integer<Count>(f[1]), integer<Count>(f[2]), integer<Count>(f[3]), {}};
    if (depth == 0) {
        if (!stack_.empty()) fail("second base in one tree");
        tree_->base = std::move(node);
        stack_.push_back(&tree_->base);
        return;
    }
    if (stack_.empty() || depth > stack_.size()) fail("node nested too deep");
    stack_.resize(depth);
    ConceptNode& parent = *stack_.back();
    parent.children.push_back(std::move(node));
    stack_.push_back(&parent.children.back());
}

void Parser::link_line(const std::vector<std::string_view>& f) {
    expect_fields(f, 10);
    Link link;
    link.key = link_key(f[1]);
    link.from = LinkEndpoint{tree_id(f[2]), words(f[3])};
    link.to = tree_id(f[4]);
    link.strength = real(f[5]);
    link.compound = CompoundCount{integer<Count>(f[6]), integer<Count>(f[7])};
    link.flow = integer<Count>(f[8]);
    if (f[9] != "-") {
        const auto parts = split(f[9], ':');
        if (parts.size() != 2) fail("bad group:individual field");
        link.group_individual = GroupIndividual{integer<Count>(parts[0]), integer<Count>(parts[1])};
    }
    if (!links_.empty() && link.key <= links_.rbegin()->first) fail("link keys not ascending");
    links_.emplace(link.key, std::move(link));
}

void Parser::keyset_line(const std::vector<std::string_view>& f) {
    expect_fields(f, 4);
    EntityKeyset keyset;
    keyset.primary = std::string(f[1]);
    for (const auto& id : words(f[2])) keyset.start_trees.insert(tree_id(id));
    for (const auto& key : words(f[3])) keyset.link_keys.insert(link_key(key));
    if (!keysets_.empty() && keyset.primary <= keysets_.rbegin()->first) fail("keysets not ordered by entity");
    keysets_.emplace(keyset.primary, std::move(keyset));
}

void Parser::event_line(const std::vector<std::string_view>& f) {
    expect_fields(f, 4);
    SequenceEvent event;
    event.timestamp = integer<Tick>(f[1]);
    if (!f[2].empty()) event.entity = std::string(f[2]);
    event.concepts = words(f[3]);
    state_.ledger.push_back(std::move(event));
}

BaseState Parser::run() {
    std::string raw;
    while (std::getline(in_, raw)) {
        ++line_no_;
        std::string_view line = raw;
        if (phase_ == End) {
            if (!line.empty()) fail("content after end");
            continue;
        }
        if (phase_ == Header) {
            if (line == kSnapshotHeader) {
                phase_ = Config;
                continue;
            }
            if (line.starts_with("conceptbase v")) {
                throw ConceptBaseError(ErrorCode::VersionMismatch,
                                       "unsupported snapshot version '" + raw + "', expected '" +
                                           std::string(kSnapshotHeader) + "'");
            }
            fail("missing '" + std::string(kSnapshotHeader) + "' header");
        }
        if (!line.empty() && line.front() == ' ') {
            if (phase_ != Trees) fail("node outside a tree");
            node_line(line);
            continue;
        }
        const auto f = split(line, '\t');
        const auto kind = f.front();
        if (kind == "config") {
            advance(Config, true);
            config_line(f);
        } else if (kind == "clock") {
            if (config_seen_.size() != 5) fail("incomplete config");
            advance(Clock, false);
            expect_fields(f, 2);
            state_.clock = integer<Tick>(f[1]);
        } else if (kind == "next_tree") {
            if (phase_ != Clock) fail("record out of order");
            advance(NextTree, false);
            expect_fields(f, 2);
            state_.next_tree = integer<std::uint64_t>(f[1]);
        } else if (kind == "next_link") {
            if (phase_ != NextTree) fail("record out of order");
            advance(NextLink, false);
            expect_fields(f, 2);
            next_link_ = integer<std::uint64_t>(f[1]);
        } else if (kind == "tree") {
            if (phase_ < NextLink) fail("record out of order");
            advance(Trees, true);
            expect_fields(f, 2);
            if (tree_ != nullptr && stack_.empty()) fail("tree without nodes");
            const TreeId id = tree_id(f[1]);
            if (!state_.trees.empty() && id <= state_.trees.rbegin()->first) fail("tree ids not ascending");
            tree_ = &state_.trees.emplace(id, ConceptTree{id, {}}).first->second;
            stack_.clear();
        } else if (kind == "link") {
            if (phase_ < NextLink) fail("record out of order");
            advance(Links, true);
            link_line(f);
        } else if (kind == "keyset") {
            if (phase_ < NextLink) fail("record out of order");
            advance(Keysets, true);
            keyset_line(f);
        } else if (kind == "event") {
            if (phase_ < NextLink) fail("record out of order");
            advance(Events, true);
            event_line(f);
        } else if (kind == "end") {
            if (phase_ < NextLink) fail("record out of order");
            expect_fields(f, 1);
            phase_ = End;
        } else {
            fail("unknown record '" + std::string(kind) + "'");
        }
        if (kind != "tree" && phase_ > Trees && tree_ != nullptr && stack_.empty()) fail("tree without nodes");
    }
    if (phase_ == Header) fail("missing '" + std::string(kSnapshotHeader) + "' header");
    if (phase_ != End) {
        ++line_no_;
        fail("truncated snapshot, no 'end' record");
    }
    if (tree_ != nullptr && stack_.empty()) fail("tree without nodes");
    state_.links.restore(std::move(links_), std::move(keysets_), next_link_);
    return std::move(state_);
}

}  // namespace

std::string format_double(double value) {
    char buffer[64];
    const auto [end, ec] = std::to_chars(buffer, buffer + sizeof buffer, value);
    return std::string(buffer, ec == std::errc{} ? end : buffer);
}

void save(const ConceptBase& base, std::ostream& out, SaveOptions options) {
    const BaseState& s = base.state();
    out << kSnapshotHeader << '\n';
    out << "config\tmin_share\t" << s.config.min_share << '\n';
    out << "config\tfalsity_ratio\t" << format_double(s.config.falsity_ratio) << '\n';
    out << "config\tdecay_half_life\t" << format_double(s.config.decay_half_life) << '\n';
    out << "config\tstrength_floor\t" << format_double(s.config.strength_floor) << '\n';
    out << "config\teager_scans\t" << (s.config.eager_scans ? "true" : "false") << '\n';
    out << "clock\t" << s.clock << '\n';
    out << "next_tree\t" << s.next_tree << '\n';
    out << "next_link\t" << s.links.next_key() << '\n';
    for (const auto& [id, tree] : s.trees) {
        out << "tree\t" << to_string(id) << '\n';
        write_node(out, tree.base, 0);
    }
    for (const auto& [key, link] : s.links.links()) {
        out << "link\t" << to_string(key) << '\t' << to_string(link.from.tree) << '\t' << join_path(link.from.path)
            << '\t' << to_string(link.to) << '\t' << format_double(link.strength) << '\t' << link.compound.positive
            << '\t' << link.compound.negative << '\t' << link.flow << '\t';
        if (link.group_individual) {
            out << link.group_individual->group << ':' << link.group_individual->individual;
        } else {
            out << '-';
        }
        out << '\n';
    }
    for (const auto& [entity, keyset] : s.links.keysets()) {
        out << "keyset\t" << entity << '\t'
            << joined(keyset.start_trees, [](TreeId id) { return to_string(id); }) << '\t'
            << joined(keyset.link_keys, [](LinkKey key) { return to_string(key); }) << '\n';
    }
    if (options.ledger) {
        for (const auto& event : s.ledger) {
            out << "event\t" << event.timestamp << '\t' << event.entity.value_or("") << '\t'
                << join_path(event.concepts) << '\n';
        }
    }
    out << "end\n";
}

std::string to_snapshot(const ConceptBase& base, SaveOptions options) {
    std::ostringstream out;
    save(base, out, options);
    return out.str();
}

ConceptBase load(std::istream& in, ConceptBase::Check check) {
    BaseState state = Parser(in).run();
    try {
        return ConceptBase::from_state(std::move(state), check);
    } catch (const ConceptBaseError& e) {
        if (e.code() == ErrorCode::InvalidConfig) throw ConceptBaseError(ErrorCode::CorruptSnapshot, e.what());
        throw;
    }
}

ConceptBase from_snapshot(std::string_view text, ConceptBase::Check check) {
    std::istringstream in{std::string(text)};
    return load(in, check);
}

ConceptBase load_file(const std::string& path, const Config& fallback, ConceptBase::Check check) {
    std::error_code ec;
    if (!std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0) {
        return ConceptBase(fallback);
    }
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConceptBaseError(ErrorCode::Io, "cannot open " + path);
    return load(in, check);
}

void save_file(const ConceptBase& base, const std::string& path, SaveOptions options) {
    const std::string temp = path + ".tmp";
    {
        std::ofstream out(temp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConceptBaseError(ErrorCode::Io, "cannot write " + temp);
        save(base, out, options);
        out.flush();
        if (!out) throw ConceptBaseError(ErrorCode::Io, "write to " + temp + " failed");
    }
    std::error_code ec;
    std::filesystem::rename(temp, path, ec);
    if (ec) throw ConceptBaseError(ErrorCode::Io, "cannot replace " + path + ": " + ec.message());
}

}  // namespace conceptbase
