#include "era/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

namespace era {

namespace {

struct Token {
    std::string text;
    int column = 0;
};

std::vector<Token> tokenize(const std::string& line) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        if (line[i] == ' ' || line[i] == '\t') {
            ++i;
            continue;
        }
        if (line[i] == '#') break;
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '#') ++i;
        out.push_back({line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

class LineParser {
public:
    LineParser(int line, std::vector<Token> tokens) : line_(line), tokens_(std::move(tokens)) {}

    bool done() const { return pos_ >= tokens_.size(); }

    const Token& peek() const {
        if (done()) fail("unexpected end of line", last_column());
        return tokens_[pos_];
    }

    Token next() {
        const Token& t = peek();
        ++pos_;
        return t;
    }

    std::string word(const char* what) {
        if (done()) fail(std::string("expected ") + what, last_column());
        return next().text;
    }

    std::uint64_t number(const char* what) {
        if (done()) fail(std::string("expected ") + what, last_column());
        Token t = tokens_[pos_];
        std::uint64_t value = 0;
        auto [ptr, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), value);
        if (ec != std::errc{} || ptr != t.text.data() + t.text.size()) {
            fail(std::string("expected ") + what + ", got '" + t.text + "'", t.column);
        }
        ++pos_;
        return value;
    }

    Role role() {
        if (done()) fail("expected role reader|writer|admin", last_column());
        Token t = tokens_[pos_];
        auto r = role_from_name(t.text);
        if (!r) fail("expected role reader|writer|admin, got '" + t.text + "'", t.column);
        ++pos_;
        return *r;
    }

    void expect_done() const {
        if (!done()) fail("unexpected token '" + tokens_[pos_].text + "'", tokens_[pos_].column);
    }

    [[noreturn]] void fail(const std::string& message, int column) const {
        throw ScenarioParseError(line_, column, message);
    }

    int last_column() const {
        return tokens_.empty() ? 1 : tokens_.back().column + static_cast<int>(tokens_.back().text.size());
    }

    int current_column() const { return done() ? last_column() : tokens_[pos_].column; }

private:
    int line_;
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

std::vector<std::string> split_commas(const std::string& text) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : text) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    return out;
}

/// Parses an operation spec: join | promote <u> <role> | demote <u> <role>
/// | write [payload] | epoch (backdate only; seq filled at execution).
Operation parse_operation(LineParser& p, bool allow_epoch) {
    int kind_col = p.current_column();
    std::string kind = p.word("operation");
    if (kind == "join") return JoinOp{};
    if (kind == "promote") return PromoteOp{UserId{p.word("target user")}, p.role()};
    if (kind == "demote") return DemoteOp{UserId{p.word("target user")}, p.role()};
    if (kind == "write") {
        // Optional single-token payload; "as" starts the label suffix.
        if (!p.done() && p.peek().text != "as" && p.peek().text.rfind("depth=", 0) != 0 &&
            p.peek().text.rfind("preds=", 0) != 0) {
            return WriteOp{p.next().text};
        }
        return WriteOp{};
    }
    if (kind == "epoch") {
        if (!allow_epoch) {
            p.fail("epochs are emitted via the 'epoch <node>' step", kind_col);
        }
        return EpochOp{0};  // seq assigned when the step executes
    }
    p.fail("unknown operation '" + kind + "'", kind_col);
}

std::optional<std::string> parse_label_suffix(LineParser& p) {
    if (!p.done() && p.peek().text == "as") {
        p.next();
        return p.word("label");
    }
    return std::nullopt;
}

}  // namespace

ScenarioParseError::ScenarioParseError(int line, int column, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": " + message),
      line_(line),
      column_(column) {}

bool is_expect_step(const Step& step) {
    return std::holds_alternative<ExpectRoleStep>(step.body) ||
           std::holds_alternative<ExpectVerdictStep>(step.body) ||
           std::holds_alternative<ExpectLayerStep>(step.body) ||
           std::holds_alternative<ExpectEvidenceStep>(step.body) ||
           std::holds_alternative<ExpectActiveNodeStep>(step.body) ||
           std::holds_alternative<ExpectConvergedStep>(step.body);
}

Scenario parse_scenario(const std::string& text) {
    Scenario scenario;
    std::set<std::string> labels;
    std::set<UserId> declared;

    auto known_replica = [&](LineParser& p, const std::string& name, int column) {
        UserId user{name};
        if (!declared.count(user)) p.fail("undeclared replica '" + name + "'", column);
        return user;
    };
    auto known_label = [&](LineParser& p, const std::string& name, int column) {
        if (!labels.count(name)) p.fail("unknown event label '" + name + "'", column);
        return name;
    };

    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        if (!raw.empty() && raw.back() == '\r') raw.pop_back();
        LineParser p(line_no, tokenize(raw));
        if (p.done()) continue;
        int head_col = p.current_column();
        std::string head = p.next().text;

        if (head == "replicas") {
            while (!p.done()) {
                UserId user{p.next().text};
                if (declared.count(user)) p.fail("duplicate replica '" + user.name + "'", head_col);
                declared.insert(user);
                scenario.replicas.push_back(user);
            }
            if (scenario.replicas.empty()) p.fail("replicas: at least one required", head_col);
            continue;
        }
        if (head == "finality-nodes") {
            while (!p.done()) {
                UserId node{p.next().text};
                if (scenario.finality.is_finality_node(node)) {
                    p.fail("duplicate finality node '" + node.name + "'", head_col);
                }
                scenario.finality.node_list.push_back(node);
            }
            continue;
        }
        if (head == "pending-threshold") {
            scenario.finality.pending_threshold = p.number("threshold");
            if (scenario.finality.pending_threshold == 0) {
                p.fail("pending-threshold must be positive", head_col);
            }
            scenario.auto_epochs = true;
            p.expect_done();
            continue;
        }
        if (head == "demote-triggers") {
            std::string v = p.word("on|off");
            if (v == "on") {
                scenario.finality.demote_triggers = true;
                scenario.auto_epochs = true;
            } else if (v != "off") {
                p.fail("demote-triggers expects on|off", head_col);
            }
            p.expect_done();
            continue;
        }
        if (head == "strategy") {
            int col = p.current_column();
            std::string v = p.word("strategy");
            auto s = strategy_from_name(v);
            if (!s) p.fail("unknown strategy '" + v + "'", col);
            scenario.strategy = *s;
            p.expect_done();
            continue;
        }
        if (head == "seed") {
            scenario.seed = p.number("seed");
            p.expect_done();
            continue;
        }

        Step step;
        step.line = line_no;
        if (head == "op") {
            int col = p.current_column();
            OpStep body;
            body.replica = known_replica(p, p.word("replica"), col);
            body.op = parse_operation(p, false);
            body.label = parse_label_suffix(p);
            if (body.label) labels.insert(*body.label);
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "backdate") {
            int col = p.current_column();
            BackdateStep body;
            body.replica = known_replica(p, p.word("replica"), col);
            body.op = parse_operation(p, true);
            int anchor_col = p.current_column();
            std::string anchor = p.word("depth=K or preds=labels");
            if (anchor.rfind("depth=", 0) == 0) {
                std::uint64_t d = 0;
                std::string digits = anchor.substr(6);
                auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), d);
                if (ec != std::errc{} || ptr != digits.data() + digits.size()) {
                    p.fail("bad depth in '" + anchor + "'", anchor_col);
                }
                body.depth = d;
            } else if (anchor.rfind("preds=", 0) == 0) {
                for (const auto& name : split_commas(anchor.substr(6))) {
                    if (name.empty()) p.fail("empty label in preds=", anchor_col);
                    body.pred_labels.push_back(known_label(p, name, anchor_col));
                }
            } else {
                p.fail("expected depth=K or preds=labels", anchor_col);
            }
            body.label = parse_label_suffix(p);
            if (body.label) labels.insert(*body.label);
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "deliver") {
            int col = p.current_column();
            DeliverStep body;
            body.from = known_replica(p, p.word("from replica"), col);
            col = p.current_column();
            body.to = known_replica(p, p.word("to replica"), col);
            col = p.current_column();
            std::string filter = p.word("all or labels");
            if (filter == "all") {
                body.all = true;
            } else {
                body.all = false;
                for (const auto& name : split_commas(filter)) {
                    if (name.empty()) p.fail("empty label in filter", col);
                    body.labels.push_back(known_label(p, name, col));
                }
            }
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "sync") {
            p.expect_done();
            step.body = SyncStep{};
        } else if (head == "partition") {
            PartitionStep body;
            int col = p.current_column();
            std::string groups_token = p.word("groups");
            std::string group;
            auto flush = [&]() {
                std::vector<UserId> members;
                for (const auto& name : split_commas(group)) {
                    if (name.empty()) p.fail("empty replica name in partition", col);
                    members.push_back(known_replica(p, name, col));
                }
                body.groups.push_back(std::move(members));
                group.clear();
            };
            for (char c : groups_token) {
                if (c == '|') {
                    flush();
                } else {
                    group.push_back(c);
                }
            }
            flush();
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "heal") {
            p.expect_done();
            step.body = HealStep{};
        } else if (head == "epoch") {
            int col = p.current_column();
            EmitEpochStep body;
            body.node = known_replica(p, p.word("finality node"), col);
            body.label = parse_label_suffix(p);
            if (body.label) labels.insert(*body.label);
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "expect") {
            int col = p.current_column();
            ExpectRoleStep body;
            body.replica = known_replica(p, p.word("replica"), col);
            std::string what = p.word("role");
            if (what != "role") p.fail("expected 'role', got '" + what + "'", col);
            body.user = UserId{p.word("user")};
            body.role = p.role();
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "expect-applied" || head == "expect-rejected") {
            int col = p.current_column();
            ExpectVerdictStep body;
            body.replica = known_replica(p, p.word("replica"), col);
            col = p.current_column();
            body.label = known_label(p, p.word("event label"), col);
            body.applied = head == "expect-applied";
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "expect-layer") {
            int col = p.current_column();
            ExpectLayerStep body;
            body.replica = known_replica(p, p.word("replica"), col);
            col = p.current_column();
            body.label = known_label(p, p.word("event label"), col);
            col = p.current_column();
            std::string which = p.word("layer index or 'pending'");
            if (which == "pending") {
                body.layer = std::nullopt;
            } else {
                std::uint64_t k = 0;
                auto [ptr, ec] = std::from_chars(which.data(), which.data() + which.size(), k);
                if (ec != std::errc{} || ptr != which.data() + which.size() || k == 0) {
                    p.fail("expected 1-based layer index or 'pending'", col);
                }
                body.layer = static_cast<std::size_t>(k);
            }
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "expect-evidence" || head == "expect-no-evidence") {
            ExpectEvidenceStep body;
            body.expect_present = head == "expect-evidence";
            if (!p.done() && p.peek().text != "at") body.sender = UserId{p.next().text};
            if (!p.done() && p.peek().text == "at") {
                p.next();
                int col = p.current_column();
                body.at = known_replica(p, p.word("replica"), col);
            }
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "expect-active-node") {
            int col = p.current_column();
            ExpectActiveNodeStep body;
            body.replica = known_replica(p, p.word("replica"), col);
            std::string node = p.word("node or 'none'");
            if (node != "none") body.node = UserId{node};
            p.expect_done();
            step.body = std::move(body);
        } else if (head == "expect-converged") {
            p.expect_done();
            step.body = ExpectConvergedStep{};
        } else {
            p.fail("unknown directive or step '" + head + "'", head_col);
        }
        scenario.script.push_back(std::move(step));
    }

    if (scenario.replicas.empty()) {
        throw ScenarioParseError(line_no == 0 ? 1 : line_no, 1, "scenario declares no replicas");
    }
    return scenario;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ScenarioParseError(0, 0, "cannot open scenario file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_scenario(buf.str());
}

}  // namespace era
