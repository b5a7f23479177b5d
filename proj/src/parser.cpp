#include <costrec/lexer.hpp>
#include <costrec/parser.hpp>

#include <functional>
#include <set>
#include <sstream>

namespace costrec::src {

namespace {

const std::set<std::string> kKeywords = {"datatype", "of",    "self", "unit", "susp", "def", "split", "as",
                                         "in",       "fn",    "delay", "force", "rec", "map", "let"};

bool is_keyword(const std::string& w) { return kKeywords.count(w) > 0; }

// Functor parse tree before self-free subtrees are collapsed into constants.
FunctorPtr collapse(const FunctorPtr& f);

TypePtr functor_to_type(const FunctorPtr& f, const TokenStream& ts, const Token& at) {
    switch (f->kind) {
    case Functor::Kind::Self: ts.fail_at(at, "'self' is not allowed in a type position");
    case Functor::Kind::Const: return f->type;
    case Functor::Kind::Prod:
        return Type::prod(functor_to_type(f->left, ts, at), functor_to_type(f->right, ts, at));
    case Functor::Kind::Arrow: return Type::arrow(f->type, functor_to_type(f->left, ts, at));
    }
    return Type::unit();
}

FunctorPtr collapse(const FunctorPtr& f) {
    if (!has_self(f)) {
        // self-free: fold into a constant type
        std::function<TypePtr(const FunctorPtr&)> to_type = [&](const FunctorPtr& g) -> TypePtr {
            switch (g->kind) {
            case Functor::Kind::Const: return g->type;
            case Functor::Kind::Prod: return Type::prod(to_type(g->left), to_type(g->right));
            case Functor::Kind::Arrow: return Type::arrow(g->type, to_type(g->left));
            case Functor::Kind::Self: break;
            }
            return Type::unit();
        };
        return f->kind == Functor::Kind::Const ? f : Functor::constant(to_type(f));
    }
    switch (f->kind) {
    case Functor::Kind::Prod: return Functor::prod(collapse(f->left), collapse(f->right));
    case Functor::Kind::Arrow: return Functor::arrow(f->type, collapse(f->left));
    default: return f;
    }
}

class Parser {
  public:
    explicit Parser(std::string_view text) : ts_(tokenize(text)) {}

    TokenStream& tokens() { return ts_; }

    // ------------------------------------------------------------ types
    TypePtr type() {
        const Token& start = ts_.peek();
        FunctorPtr f = functor_raw();
        return functor_to_type(f, ts_, start);
    }

    FunctorPtr functor() { return collapse(functor_raw()); }

    // fun := pfun ("->" fun)?
    FunctorPtr functor_raw() {
        const Token& start = ts_.peek();
        FunctorPtr left = functor_prod();
        if (ts_.accept("->")) {
            TypePtr dom = functor_to_type(left, ts_, start);
            return Functor::arrow(dom, functor_raw());
        }
        return left;
    }

    FunctorPtr functor_prod() {
        FunctorPtr first = functor_atom();
        if (!ts_.accept("*")) return first;
        return Functor::prod(first, functor_prod());
    }

    FunctorPtr functor_atom() {
        const Token& t = ts_.peek();
        if (ts_.accept_word("self")) return Functor::self();
        if (ts_.accept_word("unit")) return Functor::constant(Type::unit());
        if (ts_.accept_word("susp")) {
            const Token& at = ts_.peek();
            return Functor::constant(Type::susp(functor_to_type(functor_atom(), ts_, at)));
        }
        if (ts_.accept("(")) {
            FunctorPtr inner = functor_raw();
            ts_.expect(")");
            return inner;
        }
        if (t.kind == Token::Kind::LIdent && !is_keyword(t.text)) {
            ts_.next();
            return Functor::constant(Type::data(t.text));
        }
        if (t.kind == Token::Kind::UIdent) ts_.fail("datatype names are lowercase, found " + describe(t));
        ts_.fail("expected a type, found " + describe(t));
    }

    // ------------------------------------------------------------ expressions
    std::string variable() {
        const Token& t = ts_.peek();
        if (t.kind == Token::Kind::UIdent) ts_.fail("expected a variable, found " + describe(t));
        if (t.kind != Token::Kind::LIdent || is_keyword(t.text))
            ts_.fail("expected a variable, found " + describe(t));
        ts_.next();
        return t.text;
    }

    ExprPtr expr() {
        const Token& t = ts_.peek();
        if (ts_.accept_word("fn")) {
            std::string x = variable();
            ts_.expect(".");
            return lam(std::move(x), expr(), t.pos);
        }
        if (ts_.accept_word("split")) {
            ExprPtr scrut = expr();
            ts_.expect_word("as");
            ts_.expect("(");
            std::string x0 = variable();
            ts_.expect(",");
            std::string x1 = variable();
            ts_.expect(")");
            ts_.expect_word("in");
            return split(std::move(scrut), std::move(x0), std::move(x1), expr(), t.pos);
        }
        if (ts_.accept_word("let")) {
            std::string x = variable();
            ts_.expect("=");
            ExprPtr bound = expr();
            ts_.expect_word("in");
            return let(std::move(bound), std::move(x), expr(), t.pos);
        }
        return application();
    }

    bool starts_prefix() const {
        const Token& t = ts_.peek();
        if (t.kind == Token::Kind::UIdent) return true;
        if (t.is("(")) return true;
        if (t.kind == Token::Kind::LIdent)
            return !is_keyword(t.text) || t.text == "delay" || t.text == "force" || t.text == "rec" ||
                   t.text == "map";
        return false;
    }

    ExprPtr application() {
        const Token& t = ts_.peek();
        ExprPtr head = prefix();
        while (starts_prefix()) head = app(head, prefix(), t.pos);
        return head;
    }

    ExprPtr prefix() {
        const Token& t = ts_.peek();
        if (ts_.accept_word("delay")) return delay(prefix(), t.pos);
        if (ts_.accept_word("force")) return force(prefix(), t.pos);
        return atom();
    }

    ExprPtr tuple_tail(std::vector<ExprPtr> items, Pos pos) {
        ExprPtr out = items.back();
        for (std::size_t i = items.size() - 1; i-- > 0;) out = pair(items[i], out, pos);
        return out;
    }

    ExprPtr atom() {
        const Token& t = ts_.peek();
        if (t.kind == Token::Kind::UIdent) {
            ts_.next();
            if (!ts_.accept("(")) ts_.fail("constructor '" + t.text + "' must be applied, as in " + t.text + "()");
            if (ts_.accept(")")) return ctor(t.text, unit(t.pos), t.pos);
            std::vector<ExprPtr> items{expr()};
            while (ts_.accept(",")) items.push_back(expr());
            ts_.expect(")");
            return ctor(t.text, tuple_tail(std::move(items), t.pos), t.pos);
        }
        if (ts_.accept("(")) {
            if (ts_.accept(")")) return unit(t.pos);
            std::vector<ExprPtr> items{expr()};
            while (ts_.accept(",")) items.push_back(expr());
            ts_.expect(")");
            return tuple_tail(std::move(items), t.pos);
        }
        if (ts_.accept_word("rec")) return rec_expr(t.pos);
        if (ts_.accept_word("map")) return map_expr(t.pos);
        if (t.kind == Token::Kind::LIdent && !is_keyword(t.text)) {
            ts_.next();
            return var(t.text, t.pos);
        }
        ts_.fail("expected an expression, found " + describe(t));
    }

    ExprPtr rec_expr(Pos pos) {
        ts_.expect("(");
        ExprPtr scrut = expr();
        ts_.expect(";");
        std::vector<Branch> branches;
        do {
            branches.push_back(branch());
        } while (ts_.accept("|"));
        ts_.expect(")");
        return rec(std::move(scrut), std::move(branches), pos);
    }

    struct Pattern {
        std::string name; // empty for tuples
        std::vector<Pattern> items;
    };

    Pattern pattern() {
        if (ts_.accept("(")) {
            Pattern p;
            p.items.push_back(pattern());
            while (ts_.accept(",")) p.items.push_back(pattern());
            ts_.expect(")");
            if (p.items.size() == 1) return p.items[0];
            return p;
        }
        return Pattern{variable(), {}};
    }

    static void pattern_vars(const Pattern& p, std::set<std::string>& out) {
        if (!p.name.empty()) out.insert(p.name);
        for (const auto& q : p.items) pattern_vars(q, out);
    }

    // Tuple patterns become nested splits on right-nested pairs.
    static ExprPtr desugar(const Pattern& p, const std::string& x, ExprPtr body, std::set<std::string>& avoid,
                           Pos pos) {
        if (p.items.empty()) return body; // caller binds names directly
        auto component = [&](const Pattern& q) {
            if (!q.name.empty()) return q.name;
            std::string n = fresh_name("u", avoid);
            avoid.insert(n);
            return n;
        };
        std::vector<Pattern> rest(p.items.begin() + 1, p.items.end());
        Pattern right = rest.size() == 1 ? rest[0] : Pattern{"", rest};
        const std::string x0 = component(p.items[0]);
        const std::string x1 = component(right);
        ExprPtr inner = desugar(right, x1, std::move(body), avoid, pos);
        inner = desugar(p.items[0], x0, std::move(inner), avoid, pos);
        return split(var(x, pos), x0, x1, std::move(inner), pos);
    }

    Branch branch() {
        const Token& t = ts_.peek();
        if (t.kind != Token::Kind::UIdent) ts_.fail("expected a constructor, found " + describe(t));
        ts_.next();
        ts_.expect("->");
        Pattern p = pattern();
        ts_.expect(".");
        ExprPtr body = expr();
        if (!p.name.empty()) return Branch{t.text, p.name, body};
        std::set<std::string> avoid = free_vars(body);
        pattern_vars(p, avoid);
        std::string x = fresh_name("x", avoid);
        avoid.insert(x);
        return Branch{t.text, x, desugar(p, x, body, avoid, t.pos)};
    }

    ExprPtr map_expr(Pos pos) {
        ts_.expect("[");
        FunctorPtr phi = functor();
        ts_.expect("]");
        ts_.expect("(");
        std::string x = variable();
        ts_.expect(".");
        const Token& body_tok = ts_.peek();
        ExprPtr body = expr();
        if (!is_value_or_var(body)) ts_.fail_at(body_tok, "map binder body must be a value or a variable");
        ts_.expect(";");
        const Token& target_tok = ts_.peek();
        ExprPtr target = expr();
        if (!is_value_or_var(target)) ts_.fail_at(target_tok, "map target must be a value or a variable");
        ts_.expect(")");
        return map(std::move(phi), std::move(x), std::move(body), std::move(target), pos);
    }

    // ------------------------------------------------------------ declarations
    void program(Program& prog) {
        while (!ts_.at_end()) {
            const Token& t = ts_.peek();
            if (ts_.accept_word("datatype")) {
                Datatype d;
                d.name = variable();
                ts_.expect("=");
                do {
                    const Token& c = ts_.peek();
                    if (c.kind != Token::Kind::UIdent)
                        ts_.fail("constructor names must be capitalized, found " + describe(c));
                    ts_.next();
                    ts_.expect_word("of");
                    d.ctors.push_back(Constructor{c.text, functor()});
                } while (ts_.accept("|"));
                ts_.expect(";");
                prog.signature.datatypes.push_back(std::move(d));
            } else if (ts_.accept_word("def")) {
                Definition def;
                def.pos = t.pos;
                def.name = variable();
                if (ts_.accept(":")) def.ascription = type();
                ts_.expect("=");
                def.body = expr();
                ts_.expect(";");
                prog.defs.push_back(std::move(def));
            } else {
                ts_.fail("expected 'datatype' or 'def', found " + describe(t));
            }
        }
    }

  private:
    TokenStream ts_;
};

bool uses_int_library(std::string_view text) {
    for (const auto& t : tokenize(text))
        if (t.kind == Token::Kind::LIdent && (t.text == "int" || t.text == "eqint")) return true;
    return false;
}

} // namespace

std::string int_library_text(int width, bool include_bool) {
    std::ostringstream os;
    if (include_bool) os << "datatype bool = True of unit | False of unit;\n";
    os << "datatype int =";
    for (int i = 0; i < width; ++i) os << (i ? " | K" : " K") << i << " of unit";
    os << ";\n";
    os << "def eqint : int * int -> bool = fn p. split p as (a, b) in rec(a;";
    for (int i = 0; i < width; ++i) {
        os << (i ? " | K" : " K") << i << " -> u. rec(b;";
        for (int j = 0; j < width; ++j) os << (j ? " | K" : " K") << j << " -> v. " << (i == j ? "True()" : "False()");
        os << ")";
    }
    os << ");\n";
    return os.str();
}

Program parse_program(std::string_view text, const ParseOptions& opts) {
    Program prog;
    Parser(text).program(prog);
    if (!prog.signature.find("int") && uses_int_library(text)) {
        const Datatype* user_bool = prog.signature.find("bool");
        if (user_bool) {
            auto t = prog.signature.find_ctor("True");
            auto f = prog.signature.find_ctor("False");
            if (!t || !f || t->datatype != user_bool || f->datatype != user_bool)
                throw SyntaxError(Pos{1, 1}, "the int library needs bool with constructors True and False");
        }
        Program lib;
        Parser(int_library_text(opts.int_width, user_bool == nullptr)).program(lib);
        for (auto& d : prog.signature.datatypes) lib.signature.datatypes.push_back(std::move(d));
        for (auto& d : prog.defs) lib.defs.push_back(std::move(d));
        return lib;
    }
    return prog;
}

ExprPtr parse_expr(std::string_view text) {
    Parser p(text);
    ExprPtr e = p.expr();
    if (!p.tokens().at_end()) p.tokens().fail("unexpected " + describe(p.tokens().peek()) + " after expression");
    return e;
}

TypePtr parse_type(std::string_view text) {
    Parser p(text);
    TypePtr t = p.type();
    if (!p.tokens().at_end()) p.tokens().fail("unexpected " + describe(p.tokens().peek()) + " after type");
    return t;
}

FunctorPtr parse_functor(std::string_view text) {
    Parser p(text);
    FunctorPtr f = p.functor();
    if (!p.tokens().at_end()) p.tokens().fail("unexpected " + describe(p.tokens().peek()) + " after functor");
    return f;
}

} // namespace costrec::src
