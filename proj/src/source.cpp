#include <costrec/source.hpp>

#include <functional>
#include <sstream>

namespace costrec::src {

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

TypePtr Type::unit() {
    static const TypePtr u = make_type(Kind::Unit);
    return u;
}
TypePtr Type::prod(TypePtr l, TypePtr r) { return make_type(Kind::Prod, std::move(l), std::move(r)); }
TypePtr Type::arrow(TypePtr dom, TypePtr cod) { return make_type(Kind::Arrow, std::move(dom), std::move(cod)); }
TypePtr Type::susp(TypePtr body) { return make_type(Kind::Susp, std::move(body)); }
TypePtr Type::data(std::string name) { return make_type(Kind::Data, nullptr, nullptr, std::move(name)); }
TypePtr Type::meta_var(int id) { return make_type(Kind::Meta, nullptr, nullptr, {}, id); }

bool equal(const TypePtr& a, const TypePtr& b) {
    if (a == b) return true;
    if (!a || !b || a->kind != b->kind) return false;
    switch (a->kind) {
    case Type::Kind::Unit: return true;
    case Type::Kind::Data: return a->name == b->name;
    case Type::Kind::Meta: return a->meta == b->meta;
    case Type::Kind::Susp: return equal(a->left, b->left);
    case Type::Kind::Prod:
    case Type::Kind::Arrow: return equal(a->left, b->left) && equal(a->right, b->right);
    }
    return false;
}

namespace {
// prec: 0 = arrow position, 1 = product operand, 2 = atom
void print_type(std::ostream& os, const TypePtr& t, int prec) {
    switch (t->kind) {
    case Type::Kind::Unit: os << "unit"; return;
    case Type::Kind::Data: os << t->name; return;
    case Type::Kind::Meta: os << "?" << t->meta; return;
    case Type::Kind::Susp:
        if (prec > 1) os << "(";
        os << "susp ";
        print_type(os, t->left, 2);
        if (prec > 1) os << ")";
        return;
    case Type::Kind::Prod:
        if (prec > 0) os << "(";
        print_type(os, t->left, 1);
        os << " * ";
        print_type(os, t->right, 0 /* right-nested products need no parens */);
        if (prec > 0) os << ")";
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

bool mentions_datatype(const TypePtr& t, const std::string& name) {
    if (!t) return false;
    if (t->kind == Type::Kind::Data) return t->name == name;
    return mentions_datatype(t->left, name) || mentions_datatype(t->right, name);
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
    case Functor::Kind::Prod: return Type::prod(apply(f->left, arg), apply(f->right, arg));
    case Functor::Kind::Arrow: return Type::arrow(f->type, apply(f->left, arg));
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
    case Functor::Kind::Const: {
        const bool compound = f->type->kind == Type::Kind::Prod || f->type->kind == Type::Kind::Arrow;
        if (compound && prec > 0) os << "(";
        os << to_string(f->type);
        if (compound && prec > 0) os << ")";
        return;
    }
    case Functor::Kind::Prod:
        if (prec > 0) os << "(";
        print_functor(os, f->left, 1);
        os << " * ";
        print_functor(os, f->right, 1);
        if (prec > 0) os << ")";
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

int direct_self_count(const FunctorPtr& f) {
    switch (f->kind) {
    case Functor::Kind::Self: return 1;
    case Functor::Kind::Const: return 0;
    case Functor::Kind::Prod: return direct_self_count(f->left) + direct_self_count(f->right);
    case Functor::Kind::Arrow: return 0;
    }
    return 0;
}

bool has_self(const FunctorPtr& f) {
    switch (f->kind) {
    case Functor::Kind::Self: return true;
    case Functor::Kind::Const: return false;
    case Functor::Kind::Prod: return has_self(f->left) || has_self(f->right);
    case Functor::Kind::Arrow: return has_self(f->left);
    }
    return false;
}

// ---------------------------------------------------------------- signatures

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
        for (std::size_t i = 0; i < d.ctors.size(); ++i) {
            os << (i == 0 ? " " : " | ") << d.ctors[i].name << " of " << to_string(d.ctors[i].arg);
        }
        os << ";\n";
    }
    return os.str();
}

// ---------------------------------------------------------------- expressions

namespace {
std::shared_ptr<Expr> node(Expr::Kind k, Pos pos) {
    auto e = std::make_shared<Expr>();
    e->kind = k;
    e->pos = pos;
    return e;
}
} // namespace

ExprPtr var(std::string name, Pos pos) {
    auto e = node(Expr::Kind::Var, pos);
    e->name = std::move(name);
    return e;
}
ExprPtr unit(Pos pos) { return node(Expr::Kind::Unit, pos); }
ExprPtr pair(ExprPtr e0, ExprPtr e1, Pos pos) {
    auto e = node(Expr::Kind::Pair, pos);
    e->a = std::move(e0);
    e->b = std::move(e1);
    return e;
}
ExprPtr split(ExprPtr scrut, std::string x0, std::string x1, ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::Split, pos);
    e->a = std::move(scrut);
    e->var0 = std::move(x0);
    e->var1 = std::move(x1);
    e->b = std::move(body);
    return e;
}
ExprPtr lam(std::string x, ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::Lam, pos);
    e->var0 = std::move(x);
    e->a = std::move(body);
    return e;
}
ExprPtr app(ExprPtr fn, ExprPtr arg, Pos pos) {
    auto e = node(Expr::Kind::App, pos);
    e->a = std::move(fn);
    e->b = std::move(arg);
    return e;
}
ExprPtr delay(ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::Delay, pos);
    e->a = std::move(body);
    return e;
}
ExprPtr force(ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::Force, pos);
    e->a = std::move(body);
    return e;
}
ExprPtr ctor(std::string name, ExprPtr arg, Pos pos) {
    auto e = node(Expr::Kind::Ctor, pos);
    e->name = std::move(name);
    e->a = std::move(arg);
    return e;
}
ExprPtr rec(ExprPtr scrut, std::vector<Branch> branches, Pos pos) {
    auto e = node(Expr::Kind::Rec, pos);
    e->a = std::move(scrut);
    e->branches = std::move(branches);
    return e;
}
ExprPtr map(FunctorPtr phi, std::string x, ExprPtr body, ExprPtr target, Pos pos) {
    auto e = node(Expr::Kind::Map, pos);
    e->functor = std::move(phi);
    e->var0 = std::move(x);
    e->a = std::move(body);
    e->b = std::move(target);
    return e;
}
ExprPtr let(ExprPtr bound, std::string x, ExprPtr body, Pos pos) {
    auto e = node(Expr::Kind::Let, pos);
    e->a = std::move(bound);
    e->var0 = std::move(x);
    e->b = std::move(body);
    return e;
}

bool is_value(const ExprPtr& e) {
    switch (e->kind) {
    case Expr::Kind::Unit:
    case Expr::Kind::Lam:
    case Expr::Kind::Delay: return true;
    case Expr::Kind::Pair: return is_value(e->a) && is_value(e->b);
    case Expr::Kind::Ctor: return is_value(e->a);
    default: return false;
    }
}

bool is_value_or_var(const ExprPtr& e) {
    switch (e->kind) {
    case Expr::Kind::Var:
    case Expr::Kind::Unit:
    case Expr::Kind::Lam:
    case Expr::Kind::Delay: return true;
    case Expr::Kind::Pair: return is_value_or_var(e->a) && is_value_or_var(e->b);
    case Expr::Kind::Ctor: return is_value_or_var(e->a);
    default: return false;
    }
}

namespace {
void collect_free(const ExprPtr& e, std::vector<std::string>& bound, std::set<std::string>& out) {
    auto is_bound = [&](const std::string& x) {
        for (const auto& b : bound)
            if (b == x) return true;
        return false;
    };
    auto under = [&](std::initializer_list<std::string> xs, const ExprPtr& body) {
        for (const auto& x : xs) bound.push_back(x);
        collect_free(body, bound, out);
        bound.resize(bound.size() - xs.size());
    };
    switch (e->kind) {
    case Expr::Kind::Var:
        if (!is_bound(e->name)) out.insert(e->name);
        return;
    case Expr::Kind::Unit: return;
    case Expr::Kind::Pair:
    case Expr::Kind::App:
        collect_free(e->a, bound, out);
        collect_free(e->b, bound, out);
        return;
    case Expr::Kind::Split:
        collect_free(e->a, bound, out);
        under({e->var0, e->var1}, e->b);
        return;
    case Expr::Kind::Lam: under({e->var0}, e->a); return;
    case Expr::Kind::Delay:
    case Expr::Kind::Force:
    case Expr::Kind::Ctor: collect_free(e->a, bound, out); return;
    case Expr::Kind::Rec:
        collect_free(e->a, bound, out);
        for (const auto& br : e->branches) under({br.var}, br.body);
        return;
    case Expr::Kind::Map:
        under({e->var0}, e->a);
        collect_free(e->b, bound, out);
        return;
    case Expr::Kind::Let:
        collect_free(e->a, bound, out);
        under({e->var0}, e->b);
        return;
    }
}
} // namespace

std::set<std::string> free_vars(const ExprPtr& e) {
    std::set<std::string> out;
    std::vector<std::string> bound;
    collect_free(e, bound, out);
    return out;
}

namespace {
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
    if (a->kind != b->kind) return false;
    auto under = [&](std::initializer_list<std::pair<std::string, std::string>> xs, const ExprPtr& l,
                     const ExprPtr& r) {
        for (const auto& x : xs) scope.push_back(x);
        const bool ok = alpha_eq(l, r, scope);
        scope.resize(scope.size() - xs.size());
        return ok;
    };
    switch (a->kind) {
    case Expr::Kind::Var: return vars_match(scope, a->name, b->name);
    case Expr::Kind::Unit: return true;
    case Expr::Kind::Pair:
    case Expr::Kind::App: return alpha_eq(a->a, b->a, scope) && alpha_eq(a->b, b->b, scope);
    case Expr::Kind::Split:
        return alpha_eq(a->a, b->a, scope) && under({{a->var0, b->var0}, {a->var1, b->var1}}, a->b, b->b);
    case Expr::Kind::Lam: return under({{a->var0, b->var0}}, a->a, b->a);
    case Expr::Kind::Delay:
    case Expr::Kind::Force: return alpha_eq(a->a, b->a, scope);
    case Expr::Kind::Ctor: return a->name == b->name && alpha_eq(a->a, b->a, scope);
    case Expr::Kind::Rec:
        if (a->branches.size() != b->branches.size() || !alpha_eq(a->a, b->a, scope)) return false;
        for (std::size_t i = 0; i < a->branches.size(); ++i) {
            const auto& x = a->branches[i];
            const auto& y = b->branches[i];
            if (x.ctor != y.ctor || !under({{x.var, y.var}}, x.body, y.body)) return false;
        }
        return true;
    case Expr::Kind::Map:
        return equal(a->functor, b->functor) && under({{a->var0, b->var0}}, a->a, b->a) &&
               alpha_eq(a->b, b->b, scope);
    case Expr::Kind::Let: return alpha_eq(a->a, b->a, scope) && under({{a->var0, b->var0}}, a->b, b->b);
    }
    return false;
}
} // namespace

bool alpha_equal(const ExprPtr& a, const ExprPtr& b) {
    Scope scope;
    return alpha_eq(a, b, scope);
}

std::string fresh_name(const std::string& base, const std::set<std::string>& avoid) {
    std::string candidate = base;
    while (avoid.count(candidate)) candidate += "'";
    return candidate;
}

namespace {

class Substituter {
  public:
    Substituter(std::string x, ExprPtr v, bool closed) : x_(std::move(x)), v_(std::move(v)) {
        if (!closed) fv_ = free_vars(v_);
    }

    ExprPtr go(const ExprPtr& e) {
        switch (e->kind) {
        case Expr::Kind::Var: return e->name == x_ ? v_ : e;
        case Expr::Kind::Unit: return e;
        case Expr::Kind::Pair: return rebuild2(e, go(e->a), go(e->b));
        case Expr::Kind::App: return rebuild2(e, go(e->a), go(e->b));
        case Expr::Kind::Delay:
        case Expr::Kind::Force:
        case Expr::Kind::Ctor: {
            auto a = go(e->a);
            if (a == e->a) return e;
            auto n = std::make_shared<Expr>(*e);
            n->a = std::move(a);
            return n;
        }
        case Expr::Kind::Lam: {
            auto [names, body] = binder({e->var0}, e->a);
            if (body == e->a && names[0] == e->var0) return e;
            auto n = std::make_shared<Expr>(*e);
            n->var0 = names[0];
            n->a = std::move(body);
            return n;
        }
        case Expr::Kind::Split: {
            auto scrut = go(e->a);
            auto [names, body] = binder({e->var0, e->var1}, e->b);
            if (scrut == e->a && body == e->b && names[0] == e->var0 && names[1] == e->var1) return e;
            auto n = std::make_shared<Expr>(*e);
            n->a = std::move(scrut);
            n->var0 = names[0];
            n->var1 = names[1];
            n->b = std::move(body);
            return n;
        }
        case Expr::Kind::Let: {
            auto bound = go(e->a);
            auto [names, body] = binder({e->var0}, e->b);
            if (bound == e->a && body == e->b && names[0] == e->var0) return e;
            auto n = std::make_shared<Expr>(*e);
            n->a = std::move(bound);
            n->var0 = names[0];
            n->b = std::move(body);
            return n;
        }
        case Expr::Kind::Map: {
            auto [names, body] = binder({e->var0}, e->a);
            auto target = go(e->b);
            if (body == e->a && target == e->b && names[0] == e->var0) return e;
            auto n = std::make_shared<Expr>(*e);
            n->var0 = names[0];
            n->a = std::move(body);
            n->b = std::move(target);
            return n;
        }
        case Expr::Kind::Rec: {
            auto scrut = go(e->a);
            bool changed = scrut != e->a;
            std::vector<Branch> branches;
            branches.reserve(e->branches.size());
            for (const auto& br : e->branches) {
                auto [names, body] = binder({br.var}, br.body);
                changed = changed || body != br.body || names[0] != br.var;
                branches.push_back(Branch{br.ctor, names[0], std::move(body)});
            }
            if (!changed) return e;
            auto n = std::make_shared<Expr>(*e);
            n->a = std::move(scrut);
            n->branches = std::move(branches);
            return n;
        }
        }
        return e;
    }

  private:
    ExprPtr rebuild2(const ExprPtr& e, ExprPtr a, ExprPtr b) {
        if (a == e->a && b == e->b) return e;
        auto n = std::make_shared<Expr>(*e);
        n->a = std::move(a);
        n->b = std::move(b);
        return n;
    }

    std::pair<std::vector<std::string>, ExprPtr> binder(std::vector<std::string> names, const ExprPtr& body) {
        for (const auto& n : names)
            if (n == x_) return {names, body};
        if (!fv_.empty()) {
            std::set<std::string> body_fv;
            bool computed = false;
            for (auto& n : names) {
                if (!fv_.count(n)) continue;
                if (!computed) {
                    body_fv = free_vars(body);
                    computed = true;
                }
                if (!body_fv.count(x_)) break;
                std::set<std::string> avoid = fv_;
                avoid.insert(body_fv.begin(), body_fv.end());
                avoid.insert(x_);
                for (const auto& m : names) avoid.insert(m);
                const std::string renamed = fresh_name(n, avoid);
                auto new_body = Substituter(n, var(renamed), true).go(body);
                n = renamed;
                return binder_renamed(std::move(names), new_body);
            }
        }
        return {names, go(body)};
    }

    std::pair<std::vector<std::string>, ExprPtr> binder_renamed(std::vector<std::string> names,
                                                                const ExprPtr& body) {
        return binder(std::move(names), body);
    }

    std::string x_;
    ExprPtr v_;
    std::set<std::string> fv_;
};

} // namespace

ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& v) { return Substituter(x, v, false).go(e); }

ExprPtr subst_closed(const ExprPtr& e, const std::string& x, const ExprPtr& v) {
    return Substituter(x, v, true).go(e);
}

// ---------------------------------------------------------------- printing

namespace {

// 0: binder forms, 1: application, 2: prefix (delay/force), 3: atom
void print_expr(std::ostream& os, const ExprPtr& e, int prec);

void print_tuple_items(std::ostream& os, const ExprPtr& e) {
    print_expr(os, e->a, 0);
    os << ", ";
    if (e->b->kind == Expr::Kind::Pair)
        print_tuple_items(os, e->b);
    else
        print_expr(os, e->b, 0);
}

void print_pattern_free_branch(std::ostream& os, const Branch& br) {
    os << br.ctor << " -> " << br.var << ". ";
    print_expr(os, br.body, 0);
}

void print_expr(std::ostream& os, const ExprPtr& e, int prec) {
    auto open = [&](int level) {
        if (prec > level) os << "(";
    };
    auto close = [&](int level) {
        if (prec > level) os << ")";
    };
    switch (e->kind) {
    case Expr::Kind::Var: os << e->name; return;
    case Expr::Kind::Unit: os << "()"; return;
    case Expr::Kind::Pair:
        os << "(";
        print_tuple_items(os, e);
        os << ")";
        return;
    case Expr::Kind::Split:
        open(0);
        os << "split ";
        print_expr(os, e->a, 1);
        os << " as (" << e->var0 << ", " << e->var1 << ") in ";
        print_expr(os, e->b, 0);
        close(0);
        return;
    case Expr::Kind::Lam:
        open(0);
        os << "fn " << e->var0 << ". ";
        print_expr(os, e->a, 0);
        close(0);
        return;
    case Expr::Kind::App:
        open(1);
        print_expr(os, e->a, 1);
        os << " ";
        print_expr(os, e->b, 2);
        close(1);
        return;
    case Expr::Kind::Delay:
    case Expr::Kind::Force:
        open(2);
        os << (e->kind == Expr::Kind::Delay ? "delay " : "force ");
        print_expr(os, e->a, 2);
        close(2);
        return;
    case Expr::Kind::Ctor:
        os << e->name << "(";
        if (e->a->kind == Expr::Kind::Pair)
            print_tuple_items(os, e->a);
        else if (e->a->kind != Expr::Kind::Unit)
            print_expr(os, e->a, 0);
        os << ")";
        return;
    case Expr::Kind::Rec:
        os << "rec(";
        print_expr(os, e->a, 0);
        os << "; ";
        for (std::size_t i = 0; i < e->branches.size(); ++i) {
            if (i) os << " | ";
            print_pattern_free_branch(os, e->branches[i]);
        }
        os << ")";
        return;
    case Expr::Kind::Map:
        os << "map[" << to_string(e->functor) << "](" << e->var0 << ". ";
        print_expr(os, e->a, 0);
        os << "; ";
        print_expr(os, e->b, 0);
        os << ")";
        return;
    case Expr::Kind::Let:
        open(0);
        os << "let " << e->var0 << " = ";
        print_expr(os, e->a, 0);
        os << " in ";
        print_expr(os, e->b, 0);
        close(0);
        return;
    }
}

} // namespace

std::string to_string(const ExprPtr& e) {
    std::ostringstream os;
    print_expr(os, e, 0);
    return os.str();
}

Value::Value(ExprPtr e) : expr_(std::move(e)) {
    if (!is_value(expr_)) throw EvalError("not a syntactic value: " + to_string(expr_));
}

// ---------------------------------------------------------------- programs

const Definition* Program::find_def(const std::string& name) const {
    for (const auto& d : defs)
        if (d.name == name) return &d;
    return nullptr;
}

namespace {
std::vector<ExprPtr> inline_all(const Program& prog) {
    std::vector<ExprPtr> bodies;
    bodies.reserve(prog.defs.size());
    for (std::size_t i = 0; i < prog.defs.size(); ++i) {
        ExprPtr body = prog.defs[i].body;
        const auto fv = free_vars(body);
        // Later defs shadow earlier ones of the same name.
        for (std::size_t j = i; j-- > 0;) {
            if (!fv.count(prog.defs[j].name)) continue;
            bool shadowed = false;
            for (std::size_t k = j + 1; k < i; ++k) shadowed = shadowed || prog.defs[k].name == prog.defs[j].name;
            if (!shadowed) body = subst_closed(body, prog.defs[j].name, bodies[j]);
        }
        bodies.push_back(std::move(body));
    }
    return bodies;
}
} // namespace

ExprPtr inline_defs(const Program& prog, const ExprPtr& e) {
    const auto fv = free_vars(e);
    bool any = false;
    for (const auto& d : prog.defs) any = any || fv.count(d.name);
    if (!any) return e;
    const auto bodies = inline_all(prog);
    ExprPtr out = e;
    std::set<std::string> done;
    for (std::size_t j = prog.defs.size(); j-- > 0;) {
        const auto& name = prog.defs[j].name;
        if (!fv.count(name) || done.count(name)) continue;
        done.insert(name);
        out = subst_closed(out, name, bodies[j]);
    }
    return out;
}

ExprPtr inlined_def(const Program& prog, const std::string& name) {
    const auto bodies = inline_all(prog);
    for (std::size_t j = prog.defs.size(); j-- > 0;)
        if (prog.defs[j].name == name) return bodies[j];
    throw Error("unknown definition '" + name + "'");
}

} // namespace costrec::src
