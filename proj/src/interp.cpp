#include <costrec/interp.hpp>
#include <costrec/translate.hpp>
#include <costrec/typecheck.hpp>

#include <map>
#include <memory>
#include <set>
#include <unordered_map>

namespace costrec::interp {

namespace {

struct EnvNode;
using EnvPtr = std::shared_ptr<const EnvNode>;
struct EnvNode {
    std::string name;
    SemVal value;
    EnvPtr next;
};

EnvPtr extend(EnvPtr env, std::string name, SemVal v) {
    return std::make_shared<const EnvNode>(EnvNode{std::move(name), std::move(v), std::move(env)});
}

const SemVal& lookup(const EnvNode* env, const std::string& x) {
    for (; env; env = env->next.get())
        if (env->name == x) return env->value;
    throw ModelError("unbound variable '" + x + "' during interpretation");
}

struct Session;

// One activation of a rec node: fixed environment, memo over bounds.
struct RecInstance {
    Session* session;
    const cplx::Expr* node;
    EnvPtr env;
    cplx::TypePtr type;
    std::string datatype;
    std::map<Elem, SemVal> memo;
    std::set<Elem> in_progress;

    SemVal at(const Elem& bound);
    SemVal semrec_at(std::uint64_t n);
    SemVal branch(const std::string& ctor, const SemVal& x);
};

struct KeyHash {
    std::size_t operator()(const std::pair<const cplx::Expr*, const EnvNode*>& k) const {
        return std::hash<const void*>()(k.first) * 31 + std::hash<const void*>()(k.second);
    }
};

struct Session : std::enable_shared_from_this<Session> {
    const size::Models* models;
    cplx::RecTypes types;
    // shared subterms evaluated once per environment
    std::unordered_map<std::pair<const cplx::Expr*, const EnvNode*>, std::pair<SemVal, EnvPtr>, KeyHash> cache;

    // rec activations shared by every environment agreeing on the branches' free variables
    struct Activation {
        std::vector<SemVal> key;
        std::unique_ptr<RecInstance> inst;
    };
    std::unordered_map<const cplx::Expr*, std::vector<std::string>> branch_fvs;
    std::unordered_map<const cplx::Expr*, std::vector<Activation>> activations;

    RecInstance& activation(const cplx::ExprPtr& e, const EnvPtr& env, const std::string& datatype);
    SemVal eval(const cplx::ExprPtr& e, const EnvPtr& env);
    SemVal eval_node(const cplx::ExprPtr& e, const EnvPtr& env);
};

SemVal Session::eval(const cplx::ExprPtr& e, const EnvPtr& env) {
    if (e.use_count() <= 1) return eval_node(e, env);
    const std::pair<const cplx::Expr*, const EnvNode*> key{e.get(), env.get()};
    if (auto it = cache.find(key); it != cache.end()) return it->second.first;
    SemVal v = eval_node(e, env);
    if (cache.size() > 4'000'000) cache.clear();
    cache.emplace(key, std::make_pair(v, env));
    return v;
}

SemVal Session::eval_node(const cplx::ExprPtr& e, const EnvPtr& env) {
    using K = cplx::Expr::Kind;
    switch (e->kind) {
    case K::Var: return lookup(env.get(), e->name);
    case K::Zero: return SemVal::cost(0);
    case K::One: return SemVal::cost(1);
    case K::Plus: return SemVal::cost(eval(e->a, env).as_cost() + eval(e->b, env).as_cost());
    case K::Unit: return SemVal::unit();
    case K::Pair: return SemVal::tuple(eval(e->a, env), eval(e->b, env));
    case K::Proj: {
        SemVal v = eval(e->a, env);
        return e->index == 0 ? v.first() : v.second();
    }
    case K::Lam: {
        std::weak_ptr<Session> weak = weak_from_this();
        return SemVal::fn([weak, e, env](const SemVal& x) {
            auto self = weak.lock();
            if (!self) throw ModelError("function value used after its interpretation ended");
            return self->eval(e->a, extend(env, e->var, x));
        });
    }
    case K::App: {
        SemVal f = eval(e->a, env);
        return f.apply(eval(e->b, env));
    }
    case K::Ctor: return SemVal::size(models->signature().find_ctor(e->name)->datatype->name,
                                      models->size_of(e->name, eval(e->a, env)));
    case K::Rec: {
        SemVal scrut = eval(e->a, env);
        auto it = types.find(e.get());
        if (it == types.end()) throw ModelError("rec node without a recorded result type");
        RecInstance& inst = activation(e, env, scrut.datatype());
        const Elem& bound = scrut.elem();
        if (!sem::elem_finite(bound)) return models->top(inst.type);
        if (models->model(inst.datatype).semrec) return inst.semrec_at(bound.at(0).value());
        return inst.at(bound);
    }
    }
    throw ModelError("unknown expression form");
}

RecInstance& Session::activation(const cplx::ExprPtr& e, const EnvPtr& env, const std::string& datatype) {
    auto fv = branch_fvs.find(e.get());
    if (fv == branch_fvs.end()) {
        std::set<std::string> names;
        for (const auto& b : e->branches) {
            auto inner = cplx::free_vars(b.body);
            inner.erase(b.var);
            names.insert(inner.begin(), inner.end());
        }
        fv = branch_fvs.emplace(e.get(), std::vector<std::string>(names.begin(), names.end())).first;
    }
    std::vector<SemVal> key;
    for (const auto& x : fv->second) key.push_back(lookup(env.get(), x));
    auto& list = activations[e.get()];
    for (auto& a : list)
        if (a.key == key) return *a.inst;
    list.push_back({std::move(key), std::make_unique<RecInstance>(
                                        RecInstance{this, e.get(), env, types.at(e.get()), datatype, {}, {}})});
    return *list.back().inst;
}

SemVal RecInstance::branch(const std::string& ctor, const SemVal& x) {
    for (const auto& b : node->branches)
        if (b.ctor == ctor) return session->eval(b.body, extend(env, b.var, x));
    throw ModelError("rec has no branch for constructor '" + ctor + "'");
}

SemVal RecInstance::at(const Elem& bound) {
    if (auto it = memo.find(bound); it != memo.end()) return it->second;
    const auto& models = *session->models;
    if (in_progress.count(bound)) return models.top(type);
    in_progress.insert(bound);
    std::vector<SemVal> results;
    for (const auto& z : models.unfoldings(datatype, bound)) {
        const auto& phi = models.signature().find_ctor(z.ctor)->ctor().arg;
        SemVal x = fmap(models, phi, z.arg, [&](const SemVal& s) { return SemVal::tuple(s, at(s.elem())); });
        results.push_back(branch(z.ctor, x));
    }
    in_progress.erase(bound);
    SemVal r = results.empty() ? models.bottom(type) : sem::memoize(sem::join_all(results));
    memo.emplace(bound, r);
    return r;
}

SemVal RecInstance::semrec_at(std::uint64_t n) {
    const auto& models = *session->models;
    const auto* d = models.signature().find(datatype);
    auto self_count = [&](const size::AbstractUnfolding& z) {
        std::vector<Elem> seen;
        fmap(models, models.signature().find_ctor(z.ctor)->ctor().arg, z.arg, [&](const SemVal& s) {
            seen.push_back(s.elem());
            return s;
        });
        return seen;
    };
    // nil: the constructor without recursive positions
    std::vector<SemVal> nil_results;
    for (const auto& z : models.unfoldings(datatype, Elem{NInf(0)}))
        if (self_count(z).empty()) nil_results.push_back(branch(z.ctor, z.arg));
    if (nil_results.empty()) throw ModelError("semrec: '" + d->name + "' has no base constructor");
    SemVal a = sem::join_all(nil_results);
    auto step = [&](std::uint64_t k, const SemVal& w) {
        std::vector<SemVal> rs;
        for (const auto& z : models.unfoldings(datatype, Elem{NInf(k + 1)})) {
            auto seen = self_count(z);
            if (seen.size() != 1 || seen[0] != Elem{NInf(k)}) continue;
            const auto& phi = models.signature().find_ctor(z.ctor)->ctor().arg;
            rs.push_back(branch(z.ctor, fmap(models, phi, z.arg, [&](const SemVal& s) { return SemVal::tuple(s, w); })));
        }
        if (rs.empty()) throw ModelError("semrec: no step unfolding for '" + datatype + "'");
        return sem::join_all(rs);
    };
    return semrec(n, a, step);
}

// Closures hold the session weakly so the evaluation cache does not keep
// it alive; values handed out carry a strong reference instead.
SemVal anchor(const SemVal& v, const std::shared_ptr<Session>& s) {
    switch (v.kind()) {
    case SemVal::Kind::Fn: return SemVal::fn([v, s](const SemVal& x) { return anchor(v.apply(x), s); });
    case SemVal::Kind::Tuple:
        if (sem::first_order(v)) return v;
        return SemVal::tuple(anchor(v.first(), s), anchor(v.second(), s));
    default: return v;
    }
}

} // namespace

SemVal semrec(std::uint64_t n, const SemVal& a, const std::function<SemVal(std::uint64_t, const SemVal&)>& f) {
    SemVal acc = a;
    for (std::uint64_t k = 0; k < n; ++k) acc = sem::memoize(sem::join(a, f(k, acc)));
    return acc;
}

SemVal fmap(const size::Models& models, const cplx::FunctorPtr& phi, const SemVal& v,
            const std::function<SemVal(const SemVal&)>& on_self) {
    switch (phi->kind) {
    case cplx::Functor::Kind::Self: return on_self(v);
    case cplx::Functor::Kind::Const: return v;
    case cplx::Functor::Kind::Prod:
        return SemVal::tuple(fmap(models, phi->left, v.first(), on_self), fmap(models, phi->right, v.second(), on_self));
    case cplx::Functor::Kind::Arrow: {
        std::vector<SemVal> points = models.finite_values(phi->type);
        std::vector<SemVal> outs;
        for (const auto& p : points) outs.push_back(fmap(models, phi->left, v.apply(p), on_self));
        return SemVal::fn([points, outs](const SemVal& x) {
            for (std::size_t i = 0; i < points.size(); ++i)
                if (points[i] == x) return outs[i];
            throw ModelError("argument outside a finite domain");
        });
    }
    }
    return v;
}

SemVal interp(const size::Models& models, const Env& env, const cplx::ExprPtr& e, const cplx::TypePtr& expected) {
    auto session = std::make_shared<Session>();
    session->models = &models;
    cplx::Context ctx;
    EnvPtr chain;
    for (const auto& b : env) {
        ctx.emplace_back(b.name, b.type);
        chain = extend(chain, b.name, b.value);
    }
    cplx::ctypecheck(models.signature(), ctx, e, expected, &session->types);
    return anchor(session->eval(e, chain), session);
}

std::vector<SemVal> interp_rec(const size::Models& models, const Env& env, const cplx::ExprPtr& rec,
                               const std::vector<Elem>& bounds, const cplx::TypePtr& expected) {
    if (rec->kind != cplx::Expr::Kind::Rec) throw ModelError("interp_rec needs a rec expression");
    auto session = std::make_shared<Session>();
    session->models = &models;
    cplx::Context ctx;
    EnvPtr chain;
    for (const auto& b : env) {
        ctx.emplace_back(b.name, b.type);
        chain = extend(chain, b.name, b.value);
    }
    cplx::ctypecheck(models.signature(), ctx, rec, expected, &session->types);
    const auto& dt = models.signature().find_ctor(rec->branches.front().ctor)->datatype->name;
    RecInstance inst{session.get(), rec.get(), chain, session->types.at(rec.get()), dt, {}, {}};
    std::vector<SemVal> out;
    for (const auto& b : bounds) {
        if (!sem::elem_finite(b))
            out.push_back(models.top(inst.type));
        else if (models.model(dt).semrec)
            out.push_back(anchor(inst.semrec_at(b.at(0).value()), session));
        else
            out.push_back(anchor(inst.at(b), session));
    }
    return out;
}

std::vector<TabRow> tabulate(const src::Program& prog, const std::string& name, const size::Models& models,
                             std::uint64_t lo, std::uint64_t hi) {
    if (!prog.find_def(name)) throw Error("no def named '" + name + "'");
    const src::TypePtr ty = src::def_type(prog, name);
    if (ty->kind != src::Type::Kind::Arrow || ty->left->kind != src::Type::Kind::Data)
        throw EnumerationError("tabulate needs a def whose argument is a datatype; '" + name + "' has type " +
                               src::to_string(ty));
    const auto out = trans::translate_expr(prog.signature, {}, src::inlined_def(prog, name), ty);
    const SemVal fc = interp(models, {}, out.cexpr, out.ctype);
    const std::string& dt = ty->left->name;
    const auto& carrier = models.model(dt).carrier;
    std::vector<TabRow> rows;
    std::vector<Elem> grid{Elem{}};
    for (std::size_t i = 0; i < carrier.width; ++i) {
        std::vector<Elem> next;
        for (const auto& g : grid)
            for (std::uint64_t k = lo; k <= hi; ++k) {
                Elem e = g;
                e.push_back(NInf(k));
                next.push_back(std::move(e));
            }
        grid = std::move(next);
    }
    for (const auto& s : grid) {
        SemVal r = fc.second().apply(SemVal::size(dt, s));
        rows.push_back({s, NInf(1) + fc.first().as_cost() + r.first().as_cost(), r.second().str()});
    }
    return rows;
}

} // namespace costrec::interp
