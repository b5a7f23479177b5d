#pragma once

#include <costrec/error.hpp>

#include <string>
#include <string_view>
#include <vector>

namespace costrec {

struct Token {
    enum class Kind { LIdent, UIdent, Number, Symbol, End };
    Kind kind = Kind::End;
    std::string text;
    Pos pos;

    [[nodiscard]] bool is(std::string_view sym) const { return kind == Kind::Symbol && text == sym; }
    [[nodiscard]] bool is_word(std::string_view w) const { return kind == Kind::LIdent && text == w; }
};

/// Splits text into tokens; `#` starts a line comment.
std::vector<Token> tokenize(std::string_view text);

/// Cursor over a token vector with the usual expect/accept helpers.
class TokenStream {
  public:
    explicit TokenStream(std::vector<Token> tokens) : toks_(std::move(tokens)) {}

    [[nodiscard]] const Token& peek(std::size_t ahead = 0) const;
    const Token& next();
    bool accept(std::string_view sym);
    bool accept_word(std::string_view w);
    void expect(std::string_view sym);
    void expect_word(std::string_view w);
    [[nodiscard]] bool at_end() const { return peek().kind == Token::Kind::End; }
    [[noreturn]] void fail(const std::string& msg) const;
    [[noreturn]] void fail_at(const Token& t, const std::string& msg) const;

  private:
    std::vector<Token> toks_;
    std::size_t i_ = 0;
};

std::string describe(const Token& t);

} // namespace costrec
