#include "dot_check.hpp"

#include <cctype>
#include <stdexcept>

namespace dotcheck {

namespace {

struct Token {
    enum Kind { id, punct, edgeop, end } kind = end;
    std::string text;
    bool keyword_ok = true;  // false for quoted/HTML ids
};

class Lexer {
public:
    explicit Lexer(std::string_view s) : s_(s) {}

    Token next() {
        skip();
        if (i_ >= s_.size()) return {Token::end, ""};
        const char c = s_[i_];
        if (c == '-' && i_ + 1 < s_.size() && (s_[i_ + 1] == '>' || s_[i_ + 1] == '-')) {
            i_ += 2;
            return {Token::edgeop, std::string(s_.substr(i_ - 2, 2))};
        }
        if (std::string_view("{}[]=;,:").find(c) != std::string_view::npos) {
            ++i_;
            return {Token::punct, std::string(1, c)};
        }
        if (c == '"') return quoted();
        if (c == '<') return html();
        if (c == '-' || c == '.' || std::isdigit(static_cast<unsigned char>(c))) return numeral();
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || static_cast<unsigned char>(c) >= 0x80) {
            const std::size_t start = i_;
            while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_' ||
                                      static_cast<unsigned char>(s_[i_]) >= 0x80)) {
                ++i_;
            }
            return {Token::id, std::string(s_.substr(start, i_ - start))};
        }
        fail(std::string("unexpected character '") + c + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw std::runtime_error("offset " + std::to_string(i_) + ": " + msg);
    }

private:
    void skip() {
        for (;;) {
            while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
            if (s_.substr(i_, 2) == "//" || (i_ < s_.size() && s_[i_] == '#' && (i_ == 0 || s_[i_ - 1] == '\n'))) {
                while (i_ < s_.size() && s_[i_] != '\n') ++i_;
            } else if (s_.substr(i_, 2) == "/*") {
                const auto close = s_.find("*/", i_ + 2);
                if (close == std::string_view::npos) fail("unterminated comment");
                i_ = close + 2;
            } else {
                return;
            }
        }
    }

    Token quoted() {
        std::string out;
        ++i_;
        while (i_ < s_.size() && s_[i_] != '"') {
            if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
                out += s_[i_];
                ++i_;
            }
            out += s_[i_++];
        }
        if (i_ >= s_.size()) fail("unterminated string");
        ++i_;
        return {Token::id, out, false};
    }

    Token html() {
        int depth = 0;
        const std::size_t start = i_;
        do {
            if (i_ >= s_.size()) fail("unterminated HTML id");
            if (s_[i_] == '<') ++depth;
            if (s_[i_] == '>') --depth;
            ++i_;
        } while (depth > 0);
        return {Token::id, std::string(s_.substr(start, i_ - start)), false};
    }

    Token numeral() {
        const std::size_t start = i_;
        if (s_[i_] == '-') ++i_;
        bool digits = false, dot = false;
        while (i_ < s_.size()) {
            if (std::isdigit(static_cast<unsigned char>(s_[i_]))) {
                digits = true;
            } else if (s_[i_] == '.' && !dot) {
                dot = true;
            } else {
                break;
            }
            ++i_;
        }
        if (!digits) fail("malformed numeral");
        return {Token::id, std::string(s_.substr(start, i_ - start))};
    }

    std::string_view s_;
    std::size_t i_ = 0;
};

bool keyword(const Token& t, std::string_view word) {
    if (t.kind != Token::id || !t.keyword_ok || t.text.size() != word.size()) return false;
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (std::tolower(static_cast<unsigned char>(t.text[i])) != word[i]) return false;
    }
    return true;
}

class Parser {
public:
    explicit Parser(std::string_view s) : lex_(s) { advance(); }

    Result graph() {
        Result r;
        if (keyword(tok_, "strict")) advance();
        if (keyword(tok_, "digraph")) {
            r.directed = true;
        } else if (!keyword(tok_, "graph")) {
            lex_.fail("expected 'graph' or 'digraph'");
        }
        advance();
        if (tok_.kind == Token::id) {
            r.graph_id = tok_.text;
            advance();
        }
        expect("{");
        stmt_list(r);
        expect("}");
        if (tok_.kind != Token::end) lex_.fail("trailing input after graph");
        r.ok = true;
        return r;
    }

private:
    void advance() { tok_ = lex_.next(); }

    bool is(std::string_view p) const { return tok_.kind == Token::punct && tok_.text == p; }

    void expect(std::string_view p) {
        if (!is(p)) lex_.fail("expected '" + std::string(p) + "', got '" + tok_.text + "'");
        advance();
    }

    std::string take_id() {
        if (tok_.kind != Token::id) lex_.fail("expected an id, got '" + tok_.text + "'");
        std::string s = tok_.text;
        advance();
        return s;
    }

    void stmt_list(Result& r) {
        while (!is("}")) {
            if (tok_.kind == Token::end) lex_.fail("unexpected end of input");
            stmt(r);
            if (is(";")) advance();
        }
    }

    void attr_list(std::map<std::string, std::string>& attrs) {
        while (is("[")) {
            advance();
            while (!is("]")) {
                const auto key = take_id();
                expect("=");
                attrs[key] = take_id();
                if (is(";") || is(",")) advance();
            }
            advance();
        }
    }

    std::string node_id() {
        auto id = take_id();
        if (is(":")) {
            advance();
            take_id();
            if (is(":")) {
                advance();
                take_id();
            }
        }
        return id;
    }

    void subgraph(Result& r) {
        if (keyword(tok_, "subgraph")) {
            advance();
            if (tok_.kind == Token::id) advance();
        }
        expect("{");
        stmt_list(r);
        expect("}");
    }

    void stmt(Result& r) {
        if (keyword(tok_, "graph") || keyword(tok_, "node") || keyword(tok_, "edge")) {
            advance();
            std::map<std::string, std::string> ignored;
            if (!is("[")) lex_.fail("expected attribute list");
            attr_list(ignored);
            return;
        }
        if (keyword(tok_, "subgraph") || is("{")) {
            subgraph(r);
            return;
        }
        Statement s;
        s.ids.push_back(node_id());
        if (is("=")) {
            advance();
            take_id();
            return;
        }
        while (tok_.kind == Token::edgeop) {
            if ((tok_.text == "->") != r.directed) lex_.fail("edge operator does not match graph kind");
            advance();
            if (keyword(tok_, "subgraph") || is("{")) {
                subgraph(r);
                s.ids.push_back("");
            } else {
                s.ids.push_back(node_id());
            }
        }
        attr_list(s.attrs);
        (s.ids.size() > 1 ? r.edges : r.nodes).push_back(std::move(s));
    }

    Lexer lex_;
    Token tok_;
};

}  // namespace

Result check(std::string_view text) {
    try {
        return Parser(text).graph();
    } catch (const std::exception& e) {
        Result r;
        r.error = e.what();
        return r;
    }
}

}  // namespace dotcheck
