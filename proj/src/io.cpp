#include "malcevlab/io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "malcevlab/errors.hpp"

namespace malcevlab {
namespace {

struct Token {
    std::string text;
    int line = 0;
    int col = 0;
};

/// Split into whitespace-separated tokens with positions; `#` starts a
/// comment to end-of-line.  A declared format version other than v1 is
/// rejected up front.
std::vector<Token> lex(const std::string& text, const std::string& source) {
    std::vector<Token> out;
    int line = 1, col = 1;
    bool version_checked = false;
    std::size_t i = 0;
    while (i < text.size()) {
        char ch = text[i];
        if (ch == '\n') {
            ++line;
            col = 1;
            ++i;
            continue;
        }
        if (ch == '#') {
            std::size_t end = text.find('\n', i);
            std::string comment =
                text.substr(i, end == std::string::npos ? std::string::npos
                                                        : end - i);
            if (!version_checked && comment.rfind("# format:", 0) == 0) {
                // Trim trailing whitespace/CR before comparing.
                while (!comment.empty() &&
                       (comment.back() == ' ' || comment.back() == '\t' ||
                        comment.back() == '\r'))
                    comment.pop_back();
                if (comment != kFormatHeader)
                    throw input_error(source + ":" + std::to_string(line) +
                                      ":" + std::to_string(col) +
                                      ": unsupported format version (expected '" +
                                      std::string(kFormatHeader) + "')");
            }
            if (end == std::string::npos) break;
            i = end;
            continue;
        }
        if (ch == ' ' || ch == '\t' || ch == '\r') {
            ++col;
            ++i;
            continue;
        }
        version_checked = true;
        Token t;
        t.line = line;
        t.col = col;
        while (i < text.size() && text[i] != ' ' && text[i] != '\t' &&
               text[i] != '\r' && text[i] != '\n' && text[i] != '#') {
            t.text.push_back(text[i]);
            ++i;
            ++col;
        }
        out.push_back(std::move(t));
    }
    return out;
}

class Cursor {
  public:
    Cursor(std::vector<Token> tokens, std::string source)
        : tokens_(std::move(tokens)), source_(std::move(source)) {}

    bool done() const { return pos_ >= tokens_.size(); }
    const Token& peek() const {
        if (done()) fail_at_end("unexpected end of input");
        return tokens_[pos_];
    }
    Token next(const std::string& what) {
        if (done()) fail_at_end("expected " + what + " but reached end of input");
        return tokens_[pos_++];
    }
    void expect_keyword(const std::string& kw) {
        Token t = next("'" + kw + "'");
        if (t.text != kw)
            fail(t, "expected '" + kw + "' but found '" + t.text + "'");
    }
    int expect_int(const std::string& what, long long lo, long long hi) {
        Token t = next(what);
        long long v = 0;
        auto [p, ec] =
            std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (ec != std::errc() || p != t.text.data() + t.text.size())
            fail(t, "expected " + what + " but found '" + t.text + "'");
        if (v < lo || v > hi)
            fail(t, what + " " + t.text + " is out of range [" +
                        std::to_string(lo) + ", " + std::to_string(hi) + "]");
        return static_cast<int>(v);
    }

    [[noreturn]] void fail(const Token& t, const std::string& msg) const {
        throw input_error(source_ + ":" + std::to_string(t.line) + ":" +
                          std::to_string(t.col) + ": " + msg);
    }
    [[noreturn]] void fail_at_end(const std::string& msg) const {
        int line = tokens_.empty() ? 1 : tokens_.back().line;
        throw input_error(source_ + ":" + std::to_string(line) + ": " + msg);
    }

  private:
    std::vector<Token> tokens_;
    std::string source_;
    std::size_t pos_ = 0;
};

void check_emittable_name(const std::string& name, const std::string& what) {
    if (name.empty()) throw input_error(what + " name is empty");
    for (char c : name)
        if (c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '#')
            throw input_error(what + " name '" + name +
                              "' contains characters the text format cannot hold");
}

std::size_t table_length(int size, int arity, const Cursor& cur, const Token& at) {
    std::size_t len = 1;
    for (int i = 0; i < arity; ++i) {
        if (len > 16'000'000 / static_cast<std::size_t>(size))
            cur.fail(at, "operation table would exceed 16000000 entries");
        len *= static_cast<std::size_t>(size);
    }
    return len;
}

} // namespace

FiniteAlgebra parse_algebra(const std::string& text, const std::string& source) {
    Cursor cur(lex(text, source), source);
    cur.expect_keyword("algebra");
    FiniteAlgebra a;
    a.name = cur.next("an algebra name").text;
    cur.expect_keyword("size");
    a.size = cur.expect_int("universe size", 1, 100'000);
    while (!cur.done()) {
        Token kw = cur.next("'op'");
        if (kw.text != "op")
            cur.fail(kw, "expected 'op' but found '" + kw.text + "'");
        OpTable op;
        op.name = cur.next("an operation name").text;
        op.arity = cur.expect_int("operation arity", 0, 20);
        std::size_t len = table_length(a.size, op.arity, cur, kw);
        op.table.reserve(len);
        for (std::size_t i = 0; i < len; ++i)
            op.table.push_back(
                cur.expect_int("a table entry for operation '" + op.name + "'",
                               0, a.size - 1));
        a.ops.push_back(std::move(op));
    }
    if (a.ops.empty())
        throw input_error(source + ": an algebra needs at least one operation");
    try {
        a.validate();
    } catch (const input_error& e) {
        throw input_error(source + ": " + e.what());
    }
    return a;
}

RelStructure parse_structure(const std::string& text, const std::string& source) {
    Cursor cur(lex(text, source), source);
    cur.expect_keyword("structure");
    RelStructure s;
    s.name = cur.next("a structure name").text;
    cur.expect_keyword("size");
    s.size = cur.expect_int("universe size", 1, 100'000);
    while (!cur.done()) {
        Token kw = cur.next("'rel'");
        if (kw.text != "rel")
            cur.fail(kw, "expected 'rel' but found '" + kw.text + "'");
        Relation r;
        r.name = cur.next("a relation name").text;
        r.arity = cur.expect_int("relation arity", 1, 20);
        for (;;) {
            const Token& first = cur.peek();
            if (first.text == "end") {
                cur.next("'end'");
                break;
            }
            int line = first.line;
            std::vector<int> tuple;
            tuple.reserve(static_cast<std::size_t>(r.arity));
            for (int i = 0; i < r.arity; ++i) {
                const Token& t = cur.peek();
                if (i > 0 && t.line != line)
                    cur.fail(t, "tuple for relation '" + r.name +
                                    "' is split across lines");
                tuple.push_back(cur.expect_int(
                    "a tuple entry for relation '" + r.name + "'", 0,
                    s.size - 1));
            }
            if (!cur.done() && cur.peek().line == line &&
                cur.peek().text != "end")
                cur.fail(cur.peek(), "too many entries on a tuple line for "
                                     "relation '" + r.name + "'");
            r.tuples.push_back(std::move(tuple));
        }
        s.rels.push_back(std::move(r));
    }
    try {
        s.validate_and_normalize();
    } catch (const input_error& e) {
        throw input_error(source + ": " + e.what());
    }
    return s;
}

std::string emit_algebra(const FiniteAlgebra& a) {
    a.validate();
    check_emittable_name(a.name, "algebra");
    std::ostringstream out;
    out << kFormatHeader << "\n";
    out << "algebra " << a.name << "\n";
    out << "size " << a.size << "\n";
    for (const OpTable& op : a.ops) {
        check_emittable_name(op.name, "operation");
        out << "op " << op.name << " " << op.arity << "\n";
        if (op.arity == 0) {
            out << op.table[0] << "\n";
            continue;
        }
        // One line per fixed prefix: rows of `size` entries.
        std::size_t row = static_cast<std::size_t>(a.size);
        for (std::size_t i = 0; i < op.table.size(); i += row) {
            for (std::size_t j = 0; j < row; ++j) {
                if (j) out << " ";
                out << op.table[i + j];
            }
            out << "\n";
        }
    }
    return out.str();
}

std::string emit_structure(const RelStructure& s) {
    RelStructure copy = s;
    copy.validate_and_normalize();
    check_emittable_name(copy.name, "structure");
    std::ostringstream out;
    out << kFormatHeader << "\n";
    out << "structure " << copy.name << "\n";
    out << "size " << copy.size << "\n";
    for (const Relation& r : copy.rels) {
        check_emittable_name(r.name, "relation");
        out << "rel " << r.name << " " << r.arity << "\n";
        for (const auto& t : r.tuples) {
            for (std::size_t j = 0; j < t.size(); ++j) {
                if (j) out << " ";
                out << t[j];
            }
            out << "\n";
        }
        out << "end\n";
    }
    return out.str();
}

FiniteAlgebra load_algebra_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open algebra file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_algebra(ss.str(), path);
}

RelStructure load_structure_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw input_error("cannot open structure file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_structure(ss.str(), path);
}

std::string emit_report(const Report& r) {
    using ordered_json = nlohmann::ordered_json;
    auto opt_bool = [](const std::optional<bool>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };
    auto opt_int = [](const std::optional<int>& v) {
        return v ? ordered_json(*v) : ordered_json(nullptr);
    };

    ordered_json j;
    j["algebra"] = r.algebra;
    j["size"] = r.size;
    j["idempotent"] = r.idempotent;

    ordered_json day;
    day["has_day_terms"] = opt_bool(r.has_day_terms);
    day["authority"] = r.day_authority;
    if (r.day_chain_length) day["chain_length"] = *r.day_chain_length;
    j["day"] = std::move(day);

    ordered_json perm;
    perm["first_n"] = opt_int(r.permutable_first_n);
    perm["checked_up_to"] = r.permutable_checked_up_to;
    j["permutable"] = std::move(perm);

    ordered_json pany;
    pany["is_permutable_for_some_n"] = opt_bool(r.permutable_any);
    pany["authority"] = r.permutable_any_authority;
    j["permutable_any"] = std::move(pany);

    ordered_json ci;
    ci["has_kearnes_kiss"] = opt_bool(r.has_kearnes_kiss);
    ci["authority"] = r.congruence_identity_authority;
    j["congruence_identity"] = std::move(ci);

    ordered_json cube;
    cube["first_n"] = opt_int(r.cube_first_n);
    cube["checked_up_to"] = r.cube_checked_up_to;
    if (r.cube_blocker && r.cube_blocker->found) {
        ordered_json bl;
        bl["subuniverse"] = r.cube_blocker->subuniverse;
        bl["subset"] = r.cube_blocker->subset;
        cube["blocker"] = std::move(bl);
    } else {
        cube["blocker"] = nullptr;
    }
    j["cube"] = std::move(cube);

    ordered_json cols = ordered_json::object();
    for (const ColoringReportEntry& e : r.colorings) {
        ordered_json entry;
        entry["exists"] = e.exists;
        entry["strong"] = e.strong;
        if (e.map) entry["map"] = *e.map;
        cols[e.target] = std::move(entry);
    }
    j["colorings"] = std::move(cols);

    j["inconclusive"] = r.inconclusive;

    if (!r.timings_ms.empty()) {
        ordered_json t = ordered_json::object();
        for (const auto& [name, ms] : r.timings_ms) t[name] = ms;
        j["timings_ms"] = std::move(t);
    }
    return j.dump(2) + "\n";
}

} // namespace malcevlab
