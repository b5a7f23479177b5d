#include <costrec/typecheck.hpp>

#include <map>
#include <set>

namespace costrec::src {

// ---------------------------------------------------------------- signatures

namespace {

void type_refs(const TypePtr& t, std::vector<std::string>& out) {
    if (!t) return;
    if (t->kind == Type::Kind::Data) out.push_back(t->name);
    type_refs(t->left, out);
    type_refs(t->right, out);
}

void functor_refs(const FunctorPtr& f, std::vector<std::string>& out) {
    if (!f) return;
    type_refs(f->type, out);
    functor_refs(f->left, out);
    functor_refs(f->right, out);
}

} // namespace

std::vector<Violation> wf_signature(const Signature& sig) {
    std::vector<Violation> out;
    std::set<std::string> declared;
    std::set<std::string> ctors;
    std::set<std::string> all;
    for (const auto& d : sig.datatypes) all.insert(d.name);
    for (const auto& d : sig.datatypes) {
        if (declared.count(d.name)) out.push_back({d.name, "", "datatype '" + d.name + "' declared twice"});
        if (d.ctors.empty()) out.push_back({d.name, "", "datatype '" + d.name + "' has no constructors"});
        for (const auto& c : d.ctors) {
            if (!ctors.insert(c.name).second)
                out.push_back({d.name, c.name, "constructor '" + c.name + "' declared twice"});
            std::vector<std::string> refs;
            functor_refs(c.arg, refs);
            for (const auto& r : refs) {
                if (declared.count(r)) continue;
                std::string why;
                if (r == d.name)
                    why = "refers to its own datatype '" + r + "' outside a 'self' position";
                else if (all.count(r))
                    why = "forward reference to datatype '" + r + "'";
                else
                    why = "unknown datatype '" + r + "'";
                out.push_back({d.name, c.name, "constructor '" + c.name + "' " + why});
            }
        }
        declared.insert(d.name);
    }
    return out;
}

void check_type_wf(const Signature& sig, const TypePtr& t) {
    std::vector<std::string> refs;
    type_refs(t, refs);
    for (const auto& r : refs)
        if (!sig.find(r)) throw TypeError("unknown datatype '" + r + "' in type " + to_string(t));
}

// ---------------------------------------------------------------- inference

namespace {

class Checker {
  public:
    explicit Checker(const Signature& sig) : sig_(sig) {}

    TypePtr fresh() { return Type::meta_var(next_meta_++); }

    TypePtr resolve(const TypePtr& t) const {
        TypePtr cur = t;
        while (cur->kind == Type::Kind::Meta) {
            auto it = solution_.find(cur->meta);
            if (it == solution_.end()) break;
            cur = it->second;
        }
        return cur;
    }

    TypePtr zonk(const TypePtr& t) const {
        TypePtr r = resolve(t);
        switch (r->kind) {
        case Type::Kind::Prod: return Type::prod(zonk(r->left), zonk(r->right));
        case Type::Kind::Arrow: return Type::arrow(zonk(r->left), zonk(r->right));
        case Type::Kind::Susp: return Type::susp(zonk(r->left));
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
            solution_[x->meta] = y;
            return true;
        }
        if (y->kind == Type::Kind::Meta) return unify(y, x);
        if (x->kind != y->kind) return false;
        switch (x->kind) {
        case Type::Kind::Unit: return true;
        case Type::Kind::Data: return x->name == y->name;
        case Type::Kind::Susp: return unify(x->left, y->left);
        default: return unify(x->left, y->left) && unify(x->right, y->right);
        }
    }

    [[noreturn]] void mismatch(const ExprPtr& e, const TypePtr& expected, const TypePtr& actual) const {
        std::string where = e->pos.known() ? " at " + e->pos.str() : "";
        throw TypeError("type mismatch" + where + ": expected " + to_string(zonk(expected)) + ", found " +
                        to_string(zonk(actual)) + " in '" + to_string(e) + "'");
    }

    [[noreturn]] void fail(const ExprPtr& e, const std::string& msg) const {
        std::string where = e->pos.known() ? " at " + e->pos.str() : "";
        throw TypeError(msg + where + " in '" + to_string(e) + "'");
    }

    void expect(const ExprPtr& e, const TypePtr& expected, const TypePtr& actual) {
        if (!unify(actual, expected)) mismatch(e, expected, actual);
    }

    TypePtr check(Context& ctx, const ExprPtr& e, const TypePtr& expected) {
        TypePtr t = infer(ctx, e, expected);
        expect(e, expected, t);
        return t;
    }

    TypePtr lookup(const Context& ctx, const ExprPtr& e) const {
        for (auto it = ctx.rbegin(); it != ctx.rend(); ++it)
            if (it->first == e->name) return it->second;
        fail(e, "unknown variable '" + e->name + "'");
    }

    TypePtr with_binding(Context& ctx, const std::string& x, const TypePtr& t, const ExprPtr& body,
                         const TypePtr& expected) {
        ctx.emplace_back(x, t);
        TypePtr r = check(ctx, body, expected);
        ctx.pop_back();
        return r;
    }

    // `expected` is a hint (possibly a meta); callers unify the result with it.
    TypePtr infer(Context& ctx, const ExprPtr& e, const TypePtr& expected) {
        using K = Expr::Kind;
        switch (e->kind) {
        case K::Var: return lookup(ctx, e);
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
        case K::Split: {
            TypePtr l = fresh();
            TypePtr r = fresh();
            check(ctx, e->a, Type::prod(l, r));
            ctx.emplace_back(e->var0, l);
            ctx.emplace_back(e->var1, r);
            TypePtr t = check(ctx, e->b, expected);
            ctx.pop_back();
            ctx.pop_back();
            return t;
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
            with_binding(ctx, e->var0, dom, e->a, cod);
            return Type::arrow(dom, cod);
        }
        case K::App: {
            TypePtr arg = fresh();
            TypePtr fn = infer(ctx, e->a, Type::arrow(arg, expected));
            TypePtr fr = resolve(fn);
            if (fr->kind == Type::Kind::Meta) {
                expect(e->a, Type::arrow(arg, expected), fn);
                fr = resolve(fn);
            }
            if (fr->kind != Type::Kind::Arrow)
                fail(e->a, "expected a function, found type " + to_string(zonk(fn)));
            check(ctx, e->b, fr->left);
            return fr->right;
        }
        case K::Delay: {
            TypePtr body = fresh();
            TypePtr want = resolve(expected);
            if (want->kind == Type::Kind::Susp) body = want->left;
            check(ctx, e->a, body);
            return Type::susp(body);
        }
        case K::Force: {
            TypePtr body = expected;
            check(ctx, e->a, Type::susp(body));
            return body;
        }
        case K::Ctor: {
            auto ref = sig_.find_ctor(e->name);
            if (!ref) fail(e, "unknown constructor '" + e->name + "'");
            TypePtr self = Type::data(ref->datatype->name);
            check(ctx, e->a, src::apply(ref->ctor().arg, self));
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
                if (!ref) fail(e, "unknown constructor '" + br.ctor + "'");
                if (ref->datatype != dt)
                    fail(e, "constructor '" + br.ctor + "' does not belong to datatype '" + dt->name + "'");
                if (!seen.insert(br.ctor).second) fail(e, "duplicate branch for constructor '" + br.ctor + "'");
            }
            for (const auto& c : dt->ctors)
                if (!seen.count(c.name)) fail(e, "missing branch for constructor '" + c.name + "'");
            TypePtr result = expected;
            for (const auto& br : e->branches) {
                const auto& c = sig_.find_ctor(br.ctor)->ctor();
                TypePtr xt = src::apply(c.arg, Type::prod(self, Type::susp(result)));
                with_binding(ctx, br.var, xt, br.body, result);
            }
            return result;
        }
        case K::Map: {
            if (!is_value_or_var(e->a)) fail(e, "map binder body must be a value or a variable");
            if (!is_value_or_var(e->b)) fail(e, "map target must be a value or a variable");
            check_functor(e, e->functor);
            TypePtr t0 = fresh();
            TypePtr t1 = fresh();
            with_binding(ctx, e->var0, t0, e->a, t1);
            check(ctx, e->b, src::apply(e->functor, t0));
            return src::apply(e->functor, t1);
        }
        case K::Let: {
            TypePtr bound = infer(ctx, e->a, fresh());
            return with_binding(ctx, e->var0, bound, e->b, expected);
        }
        }
        fail(e, "unsupported expression");
    }

    void check_functor(const ExprPtr& e, const FunctorPtr& f) const {
        if (!f) return;
        if (f->type) {
            try {
                check_type_wf(sig_, f->type);
            } catch (const TypeError& err) {
                fail(e, err.what());
            }
        }
        check_functor(e, f->left);
        check_functor(e, f->right);
    }

  private:
    const Signature& sig_;
    std::map<int, TypePtr> solution_;
    int next_meta_ = 0;
};

} // namespace

TypePtr typecheck(const Signature& sig, const Context& ctx, const ExprPtr& e, const TypePtr& expected) {
    Checker c(sig);
    Context scope = ctx;
    TypePtr want = expected;
    if (want)
        check_type_wf(sig, want);
    else
        want = c.fresh();
    TypePtr t = c.zonk(c.check(scope, e, want));
    if (!Checker::ground(t))
        throw TypeError("type of '" + to_string(e) + "' is not determined (" + to_string(t) +
                        "); it needs a type annotation");
    return t;
}

std::vector<TypePtr> check_program(const Program& prog) {
    const auto violations = wf_signature(prog.signature);
    if (!violations.empty()) {
        std::string msg = "ill-formed signature:";
        for (const auto& v : violations) msg += "\n  " + v.message;
        throw TypeError(msg);
    }
    Context ctx;
    std::vector<TypePtr> out;
    for (const auto& d : prog.defs) {
        TypePtr t;
        try {
            t = typecheck(prog.signature, ctx, d.body, d.ascription);
        } catch (const TypeError& err) {
            throw TypeError("in def '" + d.name + "': " + err.what());
        }
        ctx.emplace_back(d.name, t);
        out.push_back(t);
    }
    return out;
}

TypePtr def_type(const Program& prog, const std::string& name) {
    const auto types = check_program(prog);
    for (std::size_t j = prog.defs.size(); j-- > 0;)
        if (prog.defs[j].name == name) return types[j];
    throw TypeError("unknown definition '" + name + "'");
}

Context program_context(const Program& prog) {
    const auto types = check_program(prog);
    Context ctx;
    for (std::size_t i = 0; i < prog.defs.size(); ++i) ctx.emplace_back(prog.defs[i].name, types[i]);
    return ctx;
}

} // namespace costrec::src
