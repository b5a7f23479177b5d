#include <costrec/complexity.hpp>
#include <costrec/lexer.hpp>

#include <functional>
#include <map>
#include <sstream>

namespace costrec::cplx {

// ---------------------------------------------------------------- types

namespace {
TypePtr make_type(Type::Kind k, TypePtr l = nullptr, TypePtr r = nullptr, std::string name = {}, int meta = -1) {
    auto t = std::make_shared<Type>();
    t->kind = k;
    t->left = std::move(l);
    t->right = std::move(r);
    t->name = std::move(name);
    t->meta = meta;
    return t;
}
} // namespace

TypePtr Type::cost() {
    static const TypePtr c = make_type(Kind::Cost);
    return c;
}
TypePtr Type::unit() {
    static const TypePtr u = make_type(Kind::Unit);
    return u;
}
TypePtr Type::prod(TypePtr l, TypePtr r) { return make_type(Kind::Prod, std::move(l), std::move(r)); }
TypePtr Type::arrow(TypePtr dom, TypePtr cod) { return make_type(Kind::Arrow, std::move(dom), std::move(cod)); }
TypePtr Type::data(std::string name) { return make_type(Kind::Data, nullptr, nullptr, std::move(name)); }
TypePtr Type::meta_var(int id) { return make_type(Kind::Meta, nullptr, nullptr, {}, id); }

bool equal(const TypePtr& a, const TypePtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
    case Type::Kind::Cost:
    case Type::Kind::Unit: return true;
    case Type::Kind::Data: return a->name == b->name;
    case Type::Kind::Meta: return a->meta == b->meta;
    case Type::Kind::Prod:
    case Type::Kind::Arrow: return equal(a->left, b->left) && equal(a->right, b->right);
    }
    return false;
}

namespace {
// 0: arrow position, 1: product operand, 2: atom
void print_type(std::ostream& os, const TypePtr& t, int prec) {
    switch (t->kind) {
    case Type::Kind::Cost: os << "C"; return;
    case Type::Kind::Unit: os << "unit"; return;
    case Type::Kind::Data: os << t->name; return;
    case Type::Kind::Meta: os << "?" << t->meta; return;
    case Type::Kind::Prod:
        if (prec > 1) os << "(";
        print_type(os, t->left, 2);
        os << " * ";
        print_type(os, t->right, 1);
        if (prec > 1) os << ")";
        return;
    case Type::Kind::Arrow:
        if (prec > 0) os << "(";
        print_type(os, t->left, 1);
        os << " -> ";
        print_type(os, t->right, 0);
        if (prec > 0) os << ")";
        return;
    }
}
} // namespace

std::string to_string(const TypePtr& t) {
    std::ostringstream os;
    print_type(os, t, 0);
    return os.str();
}

// ---------------------------------------------------------------- functors

namespace {
FunctorPtr make_functor(Functor::Kind k, TypePtr t, FunctorPtr l, FunctorPtr r) {
    auto f = std::make_shared<Functor>();
    f->kind = k;
    f->type = std::move(t);
    f->left = std::move(l);
    f->right = std::move(r);
    return f;
}
} // namespace

FunctorPtr Functor::self() {
    static const FunctorPtr s = make_functor(Kind::Self, nullptr, nullptr, nullptr);
    return s;
}
FunctorPtr Functor::constant(TypePtr t) { return make_functor(Kind::Const, std::move(t), nullptr, nullptr); }
FunctorPtr Functor::prod(FunctorPtr l, FunctorPtr r) {
    return make_functor(Kind::Prod, nullptr, std::move(l), std::move(r));
}
FunctorPtr Functor::arrow(TypePtr dom, FunctorPtr cod) {
    return make_functor(Kind::Arrow, std::move(dom), std::move(cod), nullptr);
}

TypePtr apply(const FunctorPtr& f, const TypePtr& arg) {
    switch (f->kind) {
    case Functor::Kind::Self: return arg;
    case Functor::Kind::Const: return f->type;
    case Functor::Kind::Prod: return Type::prod(cplx::apply(f->left, arg), cplx::apply(f->right, arg));
    case Functor::Kind::Arrow: return Type::arrow(f->type, cplx::apply(f->left, arg));
    }
    return arg;
}

bool equal(const FunctorPtr& a, const FunctorPtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
    case Functor::Kind::Self: return true;
    case Functor::Kind::Const: return equal(a->type, b->type);
    case Functor::Kind::Prod: return equal(a->left, b->left) && equal(a->right, b->right);
    case Functor::Kind::Arrow: return equal(a->type, b->type) && equal(a->left, b->left);
    }
    return false;
}

namespace {
void print_functor(std::ostream& os, const FunctorPtr& f, int prec) {
    switch (f->kind) {
    case Functor::Kind::Self: os << "self"; return;
    case Functor::Kind::Const: print_type(os, f->type, prec); return;
    case Functor::Kind::Prod:
        if (prec > 1) os << "(";
        print_functor(os, f->left, 2);
        os << " * ";
        print_functor(os, f->right, 1);
        if (prec > 1) os << ")";
        return;
    case Functor::Kind::Arrow:
        if (prec > 0) os << "(";
        print_type(os, f->type, 1);
        os << " -> ";
        print_functor(os, f->left, 0);
        if (prec > 0) os << ")";
        return;
    }
}
} // namespace

std::string to_string(const FunctorPtr& f) {
    std::ostringstream os;
    print_functor(os, f, 0);
    return os.str();
}

const Datatype* Signature::find(const std::string& name) const {
    for (const auto& d : datatypes)
        if (d.name == name) return &d;
    return nullptr;
}

std::optional<CtorRef> Signature::find_ctor(const std::string& name) const {
    for (const auto& d : datatypes)
        for (std::size_t i = 0; i < d.ctors.size(); ++i)
            if (d.ctors[i].name == name) return CtorRef{&d, i};
    return std::nullopt;
}

std::string to_string(const Signature& sig) {
    std::ostringstream os;
    for (const auto& d : sig.datatypes) {
        os << "datatype " << d.name << " =";
        for (std::size_t i = 0; i < d.ctors.size(); ++i)
            os << (i ? " | " : " ") << d.ctors[i].name << " of " << to_string(d.ctors[i].arg);
        os << ";\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- expressions

namespace {
std::shared_ptr<Expr> node(Expr::Kind k) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    return e;
}
} // namespace

ExprPtr var(std::string name) {
    auto e = node(Expr::Kind::Var);
    e->name = std::move(name);
    return e;
}
ExprPtr zero() {
    static const ExprPtr z = node(Expr::Kind::Zero);
    return z;
}
ExprPtr one() {
    static const ExprPtr o = node(Expr::Kind::One);
    return o;
}
ExprPtr plus(ExprPtr l, ExprPtr r) {
    auto e = node(Expr::Kind::Plus);
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
}
ExprPtr unit() {
    static const ExprPtr u = node(Expr::Kind::Unit);
    return u;
}
ExprPtr pair(ExprPtr l, ExprPtr r) {
    auto e = node(Expr::Kind::Pair);
    e->a = std::move(l);
    e->b = std::move(r);
    return e;
}
ExprPtr proj(int i, ExprPtr x) {
    auto e = node(Expr::Kind::Proj);
    e->index = i;
    e->a = std::move(x);
    return e;
}
ExprPtr lam(std::string x, ExprPtr body) {
    auto e = node(Expr::Kind::Lam);
    e->var = std::move(x);
    e->a = std::move(body);
    return e;
}
ExprPtr app(ExprPtr fn, ExprPtr arg) {
    auto e = node(Expr::Kind::App);
    e->a = std::move(fn);
    e->b = std::move(arg);
    return e;
}
ExprPtr ctor(std::string name, ExprPtr arg) {
    auto e = node(Expr::Kind::Ctor);
    e->name = std::move(name);
    e->a = std::move(arg);
    return e;
}
ExprPtr rec(ExprPtr scrut, std::vector<Branch> branches) {
    auto e = node(Expr::Kind::Rec);
    e->a = std::move(scrut);
    e->branches = std::move(branches);
    return e;
}

ExprPtr numeral(std::uint64_t n) {
    if (n == 0) return zero();
    ExprPtr out = one();
    for (std::uint64_t i = 1; i < n; ++i) out = plus(one(), out);
    return out;
}

std::optional<std::uint64_t> numeral_value(const ExprPtr& e) {
    if (e->kind == Expr::Kind::Zero) return 0;
    std::uint64_t n = 0;
    const Expr* cur = e.get();
    while (cur->kind == Expr::Kind::Plus && cur->a->kind == Expr::Kind::One) {
        ++n;
        cur = cur->b.get();
    }
    if (cur->kind != Expr::Kind::One) return std::nullopt;
    return n + 1;
}

namespace {
using FvSet = std::shared_ptr<const std::set<std::string>>;

// Free variables per node; translated terms share subterms heavily.
class FreeVars {
  public:
    FvSet of(const ExprPtr& e) {
        if (auto it = memo_.find(e.get()); it != memo_.end()) return it->second;
        auto out = std::make_shared<std::set<std::string>>();
        using K = Expr::Kind;
        switch (e->kind) {
        case K::Var: out->insert(e->name); break;
        case K::Zero:
        case K::One:
        case K::Unit: break;
        case K::Lam:
            *out = *of(e->a);
            out->erase(e->var);
            break;
        case K::Rec:
            *out = *of(e->a);
            for (const auto& br : e->branches) {
                auto body = *of(br.body);
                body.erase(br.var);
                out->insert(body.begin(), body.end());
            }
            break;
        default:
            if (e->a) *out = *of(e->a);
            if (e->b) {
                auto r = of(e->b);
                out->insert(r->begin(), r->end());
            }
            break;
        }
        memo_.emplace(e.get(), out);
        keep_.push_back(e);
        return out;
    }

  private:
    std::unordered_map<const Expr*, FvSet> memo_;
    std::vector<ExprPtr> keep_;
};

using Scope = std::vector<std::pair<std::string, std::string>>;

bool vars_match(const Scope& scope, const std::string& x, const std::string& y) {
    for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
        const bool hx = it->first == x;
        const bool hy = it->second == y;
        if (hx || hy) return hx && hy;
    }
    return x == y;
}

bool alpha_eq(const ExprPtr& a, const ExprPtr& b, Scope& scope) {
    if (a == b && scope.empty()) return true;
    if (a->kind != b->kind) return false;
    using K = Expr::Kind;
    switch (a->kind) {
    case K::Var: return vars_match(scope, a->name, b->name);
    case K::Zero:
    case K::One:
    case K::Unit: return true;
    case K::Proj: return a->index == b->index && alpha_eq(a->a, b->a, scope);
    case K::Ctor: return a->name == b->name && alpha_eq(a->a, b->a, scope);
    case K::Lam: {
        scope.emplace_back(a->var, b->var);
        const bool r = alpha_eq(a->a, b->a, scope);
        scope.pop_back();
        return r;
    }
    case K::Rec: {
        if (!alpha_eq(a->a, b->a, scope) || a->branches.size() != b->branches.size()) return false;
        for (std::size_t i = 0; i < a->branches.size(); ++i) {
            if (a->branches[i].ctor != b->branches[i].ctor) return false;
            scope.emplace_back(a->branches[i].var, b->branches[i].var);
            const bool r = alpha_eq(a->branches[i].body, b->branches[i].body, scope);
            scope.pop_back();
            if (!r) return false;
        }
        return true;
    }
    default: return alpha_eq(a->a, b->a, scope) && alpha_eq(a->b, b->b, scope);
    }
}
} // namespace

std::set<std::string> free_vars(const ExprPtr& e) { return *FreeVars().of(e); }

bool alpha_equal(const ExprPtr& a, const ExprPtr& b) {
    Scope scope;
    return alpha_eq(a, b, scope);
}

bool same(const ExprPtr& a, const ExprPtr& b) {
    if (a == b) return true;
    if (a->kind != b->kind || a->name != b->name || a->var != b->var || a->index != b->index) return false;
    if (static_cast<bool>(a->a) != static_cast<bool>(b->a) || static_cast<bool>(a->b) != static_cast<bool>(b->b))
        return false;
    if (a->a && !same(a->a, b->a)) return false;
    if (a->b && !same(a->b, b->b)) return false;
    if (a->branches.size() != b->branches.size()) return false;
    for (std::size_t i = 0; i < a->branches.size(); ++i) {
        const auto& x = a->branches[i];
        const auto& y = b->branches[i];
        if (x.ctor != y.ctor || x.var != y.var || !same(x.body, y.body)) return false;
    }
    return true;
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string candidate = base;
    while (avoid.count(candidate)) candidate += "'";
    return candidate;
}

namespace {
std::size_t tree_size(const ExprPtr& e, std::unordered_map<const Expr*, std::size_t>& memo) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    std::size_t n = 1;
    if (e->a) n += tree_size(e->a, memo);
    if (e->b) n += tree_size(e->b, memo);
    for (const auto& br : e->branches) n += tree_size(br.body, memo);
    memo.emplace(e.get(), n);
    return n;
}
} // namespace

std::size_t size(const ExprPtr& e) {
    std::unordered_map<const Expr*, std::size_t> memo;
    return tree_size(e, memo);
}

namespace {

class Substituter {
  public:
    Substituter(std::string x, ExprPtr v) : x_(std::move(x)), v_(std::move(v)), fv_(*fvs_.of(v_)) {}

    ExprPtr go(const ExprPtr& e) {
        auto it = memo_.find(e.get());
        if (it != memo_.end()) return it->second;
        ExprPtr r = step(e);
        memo_.emplace(e.get(), r);
        keep_.push_back(e);
        return r;
    }

  private:
    // Binder y over body; returns the (possibly renamed) binder and new body.
    std::pair<std::string, ExprPtr> under(const std::string& y, const ExprPtr& body) {
        if (y == x_) return {y, body};
        if (!fv_.count(y)) return {y, go(body)};
        auto body_fv = *fvs_.of(body);
        if (!body_fv.count(x_)) return {y, body};
        body_fv.insert(fv_.begin(), fv_.end());
        body_fv.insert(x_);
        const std::string fresh = fresh_name(y, body_fv);
        ExprPtr renamed = subst(body, y, var(fresh));
        return {fresh, go(renamed)};
    }

    ExprPtr step(const ExprPtr& e) {
        using K = Expr::Kind;
        switch (e->kind) {
        case K::Var: return e->name == x_ ? v_ : e;
        case K::Zero:
        case K::One:
        case K::Unit: return e;
        case K::Lam: {
            auto [y, body] = under(e->var, e->a);
            if (y == e->var && body == e->a) return e;
            return lam(y, body);
        }
        case K::Rec: {
            ExprPtr scrut = go(e->a);
            bool changed = scrut != e->a;
            std::vector<Branch> branches;
            for (const auto& br : e->branches) {
                auto [y, body] = under(br.var, br.body);
                changed = changed || y != br.var || body != br.body;
                branches.push_back({br.ctor, y, body});
            }
            return changed ? rec(scrut, std::move(branches)) : e;
        }
        default: {
            ExprPtr a = e->a ? go(e->a) : nullptr;
            ExprPtr b = e->b ? go(e->b) : nullptr;
            if (a == e->a && b == e->b) return e;
            auto n = std::make_shared<Expr>(*e);
            n->a = a;
            n->b = b;
            return n;
        }
        }
    }

    FreeVars fvs_;
    std::string x_;
    ExprPtr v_;
    std::set<std::string> fv_;
    std::unordered_map<const Expr*, ExprPtr> memo_;
    std::vector<ExprPtr> keep_;
};

} // namespace

ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& v) { return Substituter(x, v).go(e); }

ExprPtr cmap_expand(const FunctorPtr& phi, const std::string& x, const ExprPtr& body, const ExprPtr& target) {
    switch (phi->kind) {
    case Functor::Kind::Self: return subst(body, x, target);
    case Functor::Kind::Const: return target;
    case Functor::Kind::Prod:
        return pair(cmap_expand(phi->left, x, body, proj(0, target)),
                    cmap_expand(phi->right, x, body, proj(1, target)));
    case Functor::Kind::Arrow: {
        std::set<std::string> avoid = free_vars(target);
        auto body_fv = free_vars(body);
        body_fv.erase(x);
        avoid.insert(body_fv.begin(), body_fv.end());
        const std::string y = fresh_name("y", avoid);
        return lam(y, cmap_expand(phi->left, x, body, app(target, var(y))));
    }
    }
    return target;
}

// ---------------------------------------------------------------- printing

namespace {

// 0: fn, 1: sum, 2: application, 3: prefix (fst/snd), 4: atom
void print_expr(std::ostream& os, const ExprPtr& e, int prec);

void print_items(std::ostream& os, const ExprPtr& e) {
    print_expr(os, e->a, 0);
    os << ", ";
    if (e->b->kind == Expr::Kind::Pair)
        print_items(os, e->b);
    else
        print_expr(os, e->b, 0);
}

// Leading 1s of a right-nested sum print as one numeral.
void print_sum(std::ostream& os, const ExprPtr& e, int prec) {
    std::uint64_t ones = 0;
    const Expr* cur = e.get();
    ExprPtr rest = e;
    while (cur->kind == Expr::Kind::Plus && cur->a->kind == Expr::Kind::One) {
        ++ones;
        rest = cur->b;
        cur = rest.get();
    }
    if (rest->kind == Expr::Kind::One) {
        ++ones;
        rest = nullptr;
    }
    const bool parens = prec > 1;
    if (parens) os << "(";

    if (ones >= 2 || (ones == 1 && rest)) {
        os << ones;
        if (rest) {
            os << " + ";
            print_expr(os, rest, 1);
        }
    } else {
        print_expr(os, e->a, 2);
        os << " + ";
        print_expr(os, e->b, 1);
    }
    if (parens) os << ")";
}

void print_expr(std::ostream& os, const ExprPtr& e, int prec) {
    using K = Expr::Kind;
    switch (e->kind) {
    case K::Var: os << e->name; return;
    case K::Zero: os << "0"; return;
    case K::One: os << "1"; return;
    case K::Unit: os << "()"; return;
    case K::Plus: print_sum(os, e, prec); return;
    case K::Pair:
        os << "(";
        print_items(os, e);
        os << ")";
        return;
    case K::Proj:
        if (prec > 3) os << "(";
        os << (e->index == 0 ? "fst " : "snd ");
        print_expr(os, e->a, 3);
        if (prec > 3) os << ")";
        return;
    case K::Lam:
        if (prec > 0) os << "(";
        os << "fn " << e->var << ". ";
        print_expr(os, e->a, 0);
        if (prec > 0) os << ")";
        return;
    case K::App:
        if (prec > 2) os << "(";
        print_expr(os, e->a, 2);
        os << " ";
        print_expr(os, e->b, 3);
        if (prec > 2) os << ")";
        return;
    case K::Ctor:
        os << e->name << "(";
        if (e->a->kind == K::Pair)
            print_items(os, e->a);
        else if (e->a->kind != K::Unit)
            print_expr(os, e->a, 0);
        os << ")";
        return;
    case K::Rec:
        os << "rec(";
        print_expr(os, e->a, 0);
        os << ";";
        for (std::size_t i = 0; i < e->branches.size(); ++i) {
            const auto& br = e->branches[i];
            os << (i ? " | " : " ") << br.ctor << " -> " << br.var << ". ";
            print_expr(os, br.body, 0);
        }
        os << ")";
        return;
    }
}

} // namespace

std::string to_string(const ExprPtr& e) {
    std::ostringstream os;
    print_expr(os, e, 0);
    return os.str();
}

// ---------------------------------------------------------------- parsing

namespace {

const std::set<std::string> kKeywords = {"fn", "fst", "snd", "rec", "unit", "self", "datatype", "of"};

FunctorPtr collapse(const FunctorPtr& f);

bool functor_has_self(const FunctorPtr& f) {
    if (!f) return false;
    if (f->kind == Functor::Kind::Self) return true;
    return functor_has_self(f->left) || functor_has_self(f->right);
}

TypePtr to_type(const FunctorPtr& f) {
    switch (f->kind) {
    case Functor::Kind::Const: return f->type;
    case Functor::Kind::Prod: return Type::prod(to_type(f->left), to_type(f->right));
    case Functor::Kind::Arrow: return Type::arrow(f->type, to_type(f->left));
    case Functor::Kind::Self: break;
    }
    return Type::unit();
}

FunctorPtr collapse(const FunctorPtr& f) {
    if (!functor_has_self(f)) return f->kind == Functor::Kind::Const ? f : Functor::constant(to_type(f));
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

    TypePtr type() {
        const Token& at = ts_.peek();
        FunctorPtr f = functor_raw();
        if (functor_has_self(f)) ts_.fail_at(at, "'self' is not allowed in a type");
        return to_type(f);
    }

    FunctorPtr functor() { return collapse(functor_raw()); }

    FunctorPtr functor_raw() {
        const Token& at = ts_.peek();
        FunctorPtr left = functor_prod();
        if (ts_.accept("->")) {
            if (functor_has_self(left)) ts_.fail_at(at, "'self' is not allowed left of '->'");
            return Functor::arrow(to_type(left), functor_raw());
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
        if (t.kind == Token::Kind::UIdent && t.text == "C") {
            ts_.next();
            return Functor::constant(Type::cost());
        }
        if (ts_.accept("(")) {
            FunctorPtr inner = functor_raw();
            ts_.expect(")");
            return inner;
        }
        if (t.kind == Token::Kind::LIdent && !kKeywords.count(t.text)) {
            ts_.next();
            return Functor::constant(Type::data(t.text));
        }
        ts_.fail("expected a type, found " + describe(t));
    }

    std::string variable() {
        const Token& t = ts_.peek();
        if (t.kind != Token::Kind::LIdent || kKeywords.count(t.text))
            ts_.fail("expected a variable, found " + describe(t));
        ts_.next();
        return t.text;
    }

    ExprPtr expr() {
        if (ts_.accept_word("fn")) {
            std::string x = variable();
            ts_.expect(".");
            return lam(std::move(x), expr());
        }
        return sum();
    }

    ExprPtr sum() {
        const Token& t = ts_.peek();
        const bool bare_numeral = t.kind == Token::Kind::Number;
        ExprPtr left = application();
        if (!ts_.accept("+")) return left;
        ExprPtr right = ts_.peek().is_word("fn") ? expr() : sum();
        if (bare_numeral && left->kind != Expr::Kind::App) {
            // "n + e" is 1 + (1 + ... + e)
            std::uint64_t n = std::stoull(t.text);
            if (n == 0) return plus(zero(), right);
            ExprPtr out = right;
            for (std::uint64_t i = 0; i < n; ++i) out = plus(one(), out);
            return out;
        }
        return plus(left, right);
    }

    bool starts_prefix() const {
        const Token& t = ts_.peek();
        if (t.kind == Token::Kind::UIdent || t.kind == Token::Kind::Number || t.is("(")) return true;
        if (t.kind == Token::Kind::LIdent) return t.text == "fst" || t.text == "snd" || t.text == "rec" ||
                                                  !kKeywords.count(t.text);
        return false;
    }

    ExprPtr application() {
        ExprPtr head = prefix();
        while (starts_prefix()) head = app(head, prefix());
        return head;
    }

    ExprPtr prefix() {
        if (ts_.accept_word("fst")) return proj(0, prefix());
        if (ts_.accept_word("snd")) return proj(1, prefix());
        return atom();
    }

    ExprPtr tuple(std::vector<ExprPtr> items) {
        ExprPtr out = items.back();
        for (std::size_t i = items.size() - 1; i-- > 0;) out = pair(items[i], out);
        return out;
    }

    ExprPtr atom() {
        const Token& t = ts_.peek();
        if (t.kind == Token::Kind::Number) {
            ts_.next();
            return numeral(std::stoull(t.text));
        }
        if (t.kind == Token::Kind::UIdent) {
            ts_.next();
            ts_.expect("(");
            if (ts_.accept(")")) return ctor(t.text, unit());
            std::vector<ExprPtr> items{expr()};
            while (ts_.accept(",")) items.push_back(expr());
            ts_.expect(")");
            return ctor(t.text, tuple(std::move(items)));
        }
        if (ts_.accept("(")) {
            if (ts_.accept(")")) return unit();
            std::vector<ExprPtr> items{expr()};
            while (ts_.accept(",")) items.push_back(expr());
            ts_.expect(")");
            return tuple(std::move(items));
        }
        if (ts_.accept_word("rec")) {
            ts_.expect("(");
            ExprPtr scrut = expr();
            ts_.expect(";");
            std::vector<Branch> branches;
            do {
                const Token& c = ts_.peek();
                if (c.kind != Token::Kind::UIdent) ts_.fail("expected a constructor, found " + describe(c));
                ts_.next();
                ts_.expect("->");
                std::string x = variable();
                ts_.expect(".");
                branches.push_back({c.text, x, expr()});
            } while (ts_.accept("|"));
            ts_.expect(")");
            return rec(std::move(scrut), std::move(branches));
        }
        return var(variable());
    }

    Signature signature() {
        Signature sig;
        while (!ts_.at_end()) {
            ts_.expect_word("datatype");
            Datatype d;
            d.name = variable();
            ts_.expect("=");
            do {
                const Token& c = ts_.peek();
                if (c.kind != Token::Kind::UIdent) ts_.fail("expected a constructor, found " + describe(c));
                ts_.next();
                ts_.expect_word("of");
                d.ctors.push_back({c.text, functor()});
            } while (ts_.accept("|"));
            ts_.expect(";");
            sig.datatypes.push_back(std::move(d));
        }
        return sig;
    }

  private:
    TokenStream ts_;
};

template <typename T, typename F> T parse_all(std::string_view text, F f, const char* what) {
    Parser p(text);
    T out = f(p);
    if (!p.tokens().at_end())
        p.tokens().fail("unexpected " + describe(p.tokens().peek()) + " after " + what);
    return out;
}

} // namespace

ExprPtr parse_expr(std::string_view text) {
    return parse_all<ExprPtr>(text, [](Parser& p) { return p.expr(); }, "expression");
}
TypePtr parse_type(std::string_view text) {
    return parse_all<TypePtr>(text, [](Parser& p) { return p.type(); }, "type");
}
FunctorPtr parse_functor(std::string_view text) {
    return parse_all<FunctorPtr>(text, [](Parser& p) { return p.functor(); }, "functor");
}
Signature parse_signature(std::string_view text) {
    return parse_all<Signature>(text, [](Parser& p) { return p.signature(); }, "signature");
}

// ---------------------------------------------------------------- typing

namespace {

class Checker {
  public:
    Checker(const Signature& sig, RecTypes* out) : sig_(sig), out_(out) {}

    TypePtr fresh() { return Type::meta_var(next_++); }

    TypePtr resolve(const TypePtr& t) const {
        TypePtr cur = t;
        while (cur->kind == Type::Kind::Meta) {
            auto it = sol_.find(cur->meta);
            if (it == sol_.end()) break;
            cur = it->second;
        }
        return cur;
    }

    TypePtr zonk(const TypePtr& t, bool default_unit = false) const {
        TypePtr r = resolve(t);
        switch (r->kind) {
        case Type::Kind::Prod: return Type::prod(zonk(r->left, default_unit), zonk(r->right, default_unit));
        case Type::Kind::Arrow: return Type::arrow(zonk(r->left, default_unit), zonk(r->right, default_unit));
        case Type::Kind::Meta: return default_unit ? Type::unit() : r;
        default: return r;
        }
    }

    static bool ground(const TypePtr& t) {
        if (!t) return true;
        if (t->kind == Type::Kind::Meta) return false;
        return ground(t->left) && ground(t->right);
    }

    bool occurs(int m, const TypePtr& t) const {
        TypePtr r = resolve(t);
        if (r->kind == Type::Kind::Meta) return r->meta == m;
        return (r->left && occurs(m, r->left)) || (r->right && occurs(m, r->right));
    }

    bool unify(const TypePtr& a, const TypePtr& b) {
        TypePtr x = resolve(a);
        TypePtr y = resolve(b);
        if (x->kind == Type::Kind::Meta && y->kind == Type::Kind::Meta && x->meta == y->meta) return true;
        if (x->kind == Type::Kind::Meta) {
            if (occurs(x->meta, y)) return false;
            sol_[x->meta] = y;
            return true;
        }
        if (y->kind == Type::Kind::Meta) return unify(y, x);
        if (x->kind != y->kind) return false;
        switch (x->kind) {
        case Type::Kind::Cost:
        case Type::Kind::Unit: return true;
        case Type::Kind::Data: return x->name == y->name;
        default: return unify(x->left, y->left) && unify(x->right, y->right);
        }
    }

    [[noreturn]] void mismatch(const ExprPtr& e, const TypePtr& expected, const TypePtr& actual) const {
        std::string shown = to_string(e);
        if (shown.size() > 200) shown = shown.substr(0, 200) + "...";
        throw TypeError("type mismatch: expected " + to_string(zonk(expected)) + ", found " +
                        to_string(zonk(actual)) + " in '" + shown + "'");
    }

    [[noreturn]] static void fail(const ExprPtr& e, const std::string& msg) {
        std::string shown = to_string(e);
        if (shown.size() > 200) shown = shown.substr(0, 200) + "...";
        throw TypeError(msg + " in '" + shown + "'");
    }

    TypePtr check(Context& ctx, const ExprPtr& e, const TypePtr& expected) {
        const bool shared = e.use_count() > 1;
        const std::pair<const Expr*, int> key{e.get(), scopes_.back()};
        if (shared) {
            if (auto it = seen_.find(key); it != seen_.end()) {
                if (!unify(it->second, expected)) mismatch(e, expected, it->second);
                return it->second;
            }
        }
        TypePtr t = infer(ctx, e, expected);
        if (!unify(t, expected)) mismatch(e, expected, t);
        if (shared) seen_.emplace(key, t);
        return t;
    }

    void push(Context& ctx, std::string x, TypePtr t) {
        ctx.emplace_back(std::move(x), std::move(t));
        scopes_.push_back(++scope_counter_);
    }

    void pop(Context& ctx) {
        ctx.pop_back();
        scopes_.pop_back();
    }

    TypePtr infer(Context& ctx, const ExprPtr& e, const TypePtr& expected) {
        using K = Expr::Kind;
        switch (e->kind) {
        case K::Var:
            for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
                if (it->first == e->name) return it->second;
            fail(e, "unknown variable '" + e->name + "'");
        case K::Zero:
        case K::One: return Type::cost();
        case K::Plus:
            check(ctx, e->a, Type::cost());
            check(ctx, e->b, Type::cost());
            return Type::cost();
        case K::Unit: return Type::unit();
        case K::Pair: {
            TypePtr l = fresh();
            TypePtr r = fresh();
            TypePtr want = resolve(expected);
            if (want->kind == Type::Kind::Prod) {
                l = want->left;
                r = want->right;
            }
            check(ctx, e->a, l);
            check(ctx, e->b, r);
            return Type::prod(l, r);
        }
        case K::Proj: {
            TypePtr l = fresh();
            TypePtr r = fresh();
            if (e->index == 0)
                l = expected;
            else
                r = expected;
            check(ctx, e->a, Type::prod(l, r));
            return e->index == 0 ? l : r;
        }
        case K::Lam: {
            TypePtr dom = fresh();
            TypePtr cod = fresh();
            TypePtr want = resolve(expected);
            if (want->kind == Type::Kind::Arrow) {
                dom = want->left;
                cod = want->right;
            } else if (want->kind != Type::Kind::Meta) {
                mismatch(e, expected, Type::arrow(dom, cod));
            }
            push(ctx, e->var, dom);
            check(ctx, e->a, cod);
            pop(ctx);
            return Type::arrow(dom, cod);
        }
        case K::App: {
            TypePtr arg = fresh();
            TypePtr fn = check(ctx, e->a, Type::arrow(arg, expected));
            TypePtr fr = resolve(fn);
            check(ctx, e->b, fr->left);
            return fr->right;
        }
        case K::Ctor: {
            auto ref = sig_.find_ctor(e->name);
            if (!ref) fail(e, "unknown constructor '" + e->name + "'");
            TypePtr self = Type::data(ref->datatype->name);
            check(ctx, e->a, cplx::apply(ref->ctor().arg, self));
            return self;
        }
        case K::Rec: {
            if (e->branches.empty()) fail(e, "rec needs at least one branch");
            auto first = sig_.find_ctor(e->branches.front().ctor);
            if (!first) fail(e, "unknown constructor '" + e->branches.front().ctor + "'");
            const Datatype* dt = first->datatype;
            TypePtr self = Type::data(dt->name);
            check(ctx, e->a, self);
            std::set<std::string> seen;
            for (const auto& br : e->branches) {
                auto ref = sig_.find_ctor(br.ctor);
                if (!ref || ref->datatype != dt)
                    fail(e, "constructor '" + br.ctor + "' does not belong to datatype '" + dt->name + "'");
                if (!seen.insert(br.ctor).second) fail(e, "duplicate branch for constructor '" + br.ctor + "'");
            }
            for (const auto& c : dt->ctors)
                if (!seen.count(c.name)) fail(e, "missing branch for constructor '" + c.name + "'");
            TypePtr result = expected;
            for (const auto& br : e->branches) {
                const auto& c = sig_.find_ctor(br.ctor)->ctor();
                push(ctx, br.var, cplx::apply(c.arg, Type::prod(self, result)));
                check(ctx, br.body, result);
                pop(ctx);
            }
            if (out_) pending_.emplace_back(e.get(), result);
            return result;
        }
        }
        fail(e, "unsupported expression");
    }

    void flush() {
        if (!out_) return;
        for (const auto& [node, t] : pending_) (*out_)[node] = zonk(t, true);
    }

  private:
    const Signature& sig_;
    RecTypes* out_;
    std::vector<std::pair<const Expr*, TypePtr>> pending_;
    std::map<int, TypePtr> sol_;
    int next_ = 0;
    // memo for shared subterms, keyed by node and scope
    std::map<std::pair<const Expr*, int>, TypePtr> seen_;
    std::vector<int> scopes_{0};
    int scope_counter_ = 0;
};

} // namespace

TypePtr ctypecheck(const Signature& sig, const Context& ctx, const ExprPtr& e, const TypePtr& expected,
                   RecTypes* rec_types) {
    Checker c(sig, rec_types);
    Context scope = ctx;
    TypePtr want = expected ? expected : c.fresh();
    TypePtr t = c.zonk(c.check(scope, e, want));
    if (!Checker::ground(t))
        throw TypeError("type of complexity term is not determined (" + to_string(t) + ")");
    c.flush();
    return t;
}

} // namespace costrec::cplx
