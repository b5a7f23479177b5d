#include <costrec/lexer.hpp>

#include <cctype>

namespace costrec {

namespace {
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\''; }
} // namespace

std::vector<Token> tokenize(std::string_view text) {
    std::vector<Token> out;
    int line = 1;
    int col = 1;
    std::size_t i = 0;
    auto advance = [&](std::size_t n) {
        for (std::size_t k = 0; k < n; ++k) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
            ++i;
        }
    };
    while (i < text.size()) {
        const char c = text[i];
        if (std::isspace(static_cast<unsigned char>(c))) {
            advance(1);
            continue;
        }
        if (c == '#') {
            while (i < text.size() && text[i] != '\n') advance(1);
            continue;
        }
        Token t;
        t.pos = Pos{line, col};
        std::size_t len = 1;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            while (i + len < text.size() && ident_char(text[i + len])) ++len;
            t.kind = std::isupper(static_cast<unsigned char>(c)) ? Token::Kind::UIdent : Token::Kind::LIdent;
        } else if (std::isdigit(static_cast<unsigned char>(c))) {
            while (i + len < text.size() && std::isdigit(static_cast<unsigned char>(text[i + len]))) ++len;
            t.kind = Token::Kind::Number;
        } else if (c == '-' && i + 1 < text.size() && text[i + 1] == '>') {
            len = 2;
            t.kind = Token::Kind::Symbol;
        } else if (std::string_view("(),;:=|*.[]+").find(c) != std::string_view::npos) {
            t.kind = Token::Kind::Symbol;
        } else {
            throw SyntaxError(t.pos, std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(text.substr(i, len));
        advance(len);
        out.push_back(std::move(t));
    }
    Token end;
    end.kind = Token::Kind::End;
    end.pos = Pos{line, col};
    out.push_back(end);
    return out;
}

std::string describe(const Token& t) {
    switch (t.kind) {
    case Token::Kind::End: return "end of input";
    case Token::Kind::LIdent: return "identifier '" + t.text + "'";
    case Token::Kind::UIdent: return "constructor '" + t.text + "'";
    case Token::Kind::Number: return "number '" + t.text + "'";
    case Token::Kind::Symbol: return "'" + t.text + "'";
    }
    return "?";
}

const Token& TokenStream::peek(std::size_t ahead) const {
    const std::size_t j = i_ + ahead;
    return j < toks_.size() ? toks_[j] : toks_.back();
}

const Token& TokenStream::next() {
    const Token& t = peek();
    if (i_ < toks_.size() - 1) ++i_;
    return t;
}

bool TokenStream::accept(std::string_view sym) {
    if (!peek().is(sym)) return false;
    next();
    return true;
}

bool TokenStream::accept_word(std::string_view w) {
    if (!peek().is_word(w)) return false;
    next();
    return true;
}

void TokenStream::expect(std::string_view sym) {
    if (!accept(sym)) fail("expected '" + std::string(sym) + "', found " + describe(peek()));
}

void TokenStream::expect_word(std::string_view w) {
    if (!accept_word(w)) fail("expected '" + std::string(w) + "', found " + describe(peek()));
}

void TokenStream::fail(const std::string& msg) const { throw SyntaxError(peek().pos, msg); }

void TokenStream::fail_at(const Token& t, const std::string& msg) const { throw SyntaxError(t.pos, msg); }

} // namespace costrec
