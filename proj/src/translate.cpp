#include <costrec/translate.hpp>

namespace costrec::trans {

using cplx::Type;

cplx::TypePtr potential(const src::TypePtr& t) {
    switch (t->kind) {
    case src::Type::Kind::Unit: return Type::unit();
    case src::Type::Kind::Prod: return Type::prod(potential(t->left), potential(t->right));
    case src::Type::Kind::Arrow: return Type::arrow(potential(t->left), complexity(t->right));
    case src::Type::Kind::Susp: return complexity(t->left);
    case src::Type::Kind::Data: return Type::data(t->name);
    case src::Type::Kind::Meta: return Type::meta_var(t->meta);
    }
    return Type::unit();
}

cplx::TypePtr complexity(const src::TypePtr& t) { return Type::prod(Type::cost(), potential(t)); }

std::pair<cplx::TypePtr, cplx::TypePtr> translate_type(const src::TypePtr& t) {
    auto p = potential(t);
    return {Type::prod(Type::cost(), p), p};
}

cplx::FunctorPtr potential(const src::FunctorPtr& f) {
    using F = cplx::Functor;
    switch (f->kind) {
    case src::Functor::Kind::Self: return F::self();
    case src::Functor::Kind::Const: return F::constant(potential(f->type));
    case src::Functor::Kind::Prod: return F::prod(potential(f->left), potential(f->right));
    case src::Functor::Kind::Arrow:
        return F::arrow(potential(f->type), F::prod(F::constant(Type::cost()), potential(f->left)));
    }
    return F::self();
}

cplx::Signature translate_sig(const src::Signature& sig) {
    cplx::Signature out;
    for (const auto& d : sig.datatypes) {
        cplx::Datatype cd;
        cd.name = d.name;
        for (const auto& c : d.ctors) cd.ctors.push_back({c.name, potential(c.arg)});
        out.datatypes.push_back(std::move(cd));
    }
    return out;
}

cplx::Context translate_ctx(const src::Context& ctx) {
    cplx::Context out;
    for (const auto& [x, t] : ctx) out.emplace_back(x, potential(t));
    return out;
}

namespace {
cplx::ExprPtr c_of(const cplx::ExprPtr& e) { return cplx::proj(0, e); }
cplx::ExprPtr p_of(const cplx::ExprPtr& e) { return cplx::proj(1, e); }
} // namespace

cplx::ExprPtr cost_plus(const cplx::ExprPtr& a, const cplx::ExprPtr& e) {
    return cplx::pair(cplx::plus(a, c_of(e)), p_of(e));
}

cplx::ExprPtr translate(const src::ExprPtr& e) {
    using K = src::Expr::Kind;
    using namespace cplx;
    switch (e->kind) {
    case K::Var: return pair(zero(), var(e->name));
    case K::Unit: return pair(zero(), unit());
    case K::Pair: {
        auto t0 = translate(e->a);
        auto t1 = translate(e->b);
        return pair(plus(c_of(t0), c_of(t1)), pair(p_of(t0), p_of(t1)));
    }
    case K::Split: {
        auto t0 = translate(e->a);
        auto t1 = translate(e->b);
        // simultaneous [fst p/x0, snd p/x1], via fresh intermediates
        auto avoid = free_vars(t1);
        for (const auto& n : free_vars(t0)) avoid.insert(n);
        avoid.insert(e->var0);
        avoid.insert(e->var1);
        const std::string f1 = fresh_name(e->var1, avoid);
        avoid.insert(f1);
        ExprPtr body = subst(t1, e->var1, var(f1));
        std::string f0;
        if (e->var0 != e->var1) {
            f0 = fresh_name(e->var0, avoid);
            body = subst(body, e->var0, var(f0));
        }
        auto tp = p_of(t0);
        if (!f0.empty()) body = subst(body, f0, proj(0, tp));
        body = subst(body, f1, proj(1, tp));
        return cost_plus(c_of(t0), body);
    }
    case K::Lam: return pair(zero(), lam(e->var0, translate(e->a)));
    case K::App: {
        auto t0 = translate(e->a);
        auto t1 = translate(e->b);
        return cost_plus(plus(one(), plus(c_of(t0), c_of(t1))), app(p_of(t0), p_of(t1)));
    }
    case K::Delay: return pair(zero(), translate(e->a));
    case K::Force: {
        auto t = translate(e->a);
        return cost_plus(c_of(t), p_of(t));
    }
    case K::Ctor: {
        auto t = translate(e->a);
        return pair(c_of(t), ctor(e->name, p_of(t)));
    }
    case K::Rec: {
        auto t = translate(e->a);
        std::vector<Branch> branches;
        for (const auto& br : e->branches) branches.push_back({br.ctor, br.var, cost_plus(one(), translate(br.body))});
        return cost_plus(c_of(t), rec(p_of(t), std::move(branches)));
    }
    case K::Map: {
        auto body = p_of(translate(e->a));
        auto target = p_of(translate(e->b));
        return pair(zero(), cmap_expand(potential(e->functor), e->var0, body, target));
    }
    case K::Let: {
        auto t0 = translate(e->a);
        auto t1 = translate(e->b);
        return cost_plus(c_of(t0), subst(t1, e->var0, p_of(t0)));
    }
    }
    return pair(zero(), unit());
}

TranslationOutput translate_expr(const src::Signature& sig, const src::Context& ctx, const src::ExprPtr& e,
                                 const src::TypePtr& expected) {
    auto t = src::typecheck(sig, ctx, e, expected);
    return {translate(e), complexity(t)};
}

} // namespace costrec::trans
