#include <costrec/eval.hpp>

namespace costrec::src {

namespace {

class Evaluator {
  public:
    Evaluator(const Signature& sig, const EvalOptions& opts) : sig_(sig), opts_(opts) {}

    std::uint64_t cost = 0;
    std::uint64_t steps = 0;
    std::vector<TraceEntry> trace;

    void rule(const char* name, std::uint64_t delta) {
        if (++steps > opts_.fuel) throw EvalError("evaluation fuel exhausted after " + std::to_string(opts_.fuel) +
                                                  " rule applications (internal invariant failure)");
        cost += delta;
        if (opts_.trace) trace.push_back({name, delta});
    }

    [[noreturn]] static void stuck(const ExprPtr& e, const std::string& why) {
        throw EvalError("stuck term (" + why + "): " + to_string(e));
    }

    ExprPtr eval(const ExprPtr& e) {
        using K = Expr::Kind;
        switch (e->kind) {
        case K::Var: stuck(e, "free variable '" + e->name + "'");
        case K::Unit: rule("unit", 0); return e;
        case K::Lam: rule("lam", 0); return e;
        case K::Delay: rule("delay", 0); return e;
        case K::Pair: {
            rule("pair", 0);
            ExprPtr v0 = eval(e->a);
            ExprPtr v1 = eval(e->b);
            return v0 == e->a && v1 == e->b ? e : pair(v0, v1, e->pos);
        }
        case K::Split: {
            rule("split", 0);
            ExprPtr v = eval(e->a);
            if (v->kind != K::Pair) stuck(e, "split of a non-pair");
            ExprPtr body = e->b;
            if (e->var0 != e->var1) body = subst_closed(body, e->var0, v->a);
            return eval(subst_closed(body, e->var1, v->b));
        }
        case K::App: {
            rule("app", 1);
            ExprPtr fn = eval(e->a);
            if (fn->kind != K::Lam) stuck(e, "application of a non-function");
            ExprPtr arg = eval(e->b);
            return eval(subst_closed(fn->a, fn->var0, arg));
        }
        case K::Force: {
            rule("force", 0);
            ExprPtr s = eval(e->a);
            if (s->kind != K::Delay) stuck(e, "force of a non-suspension");
            return eval(s->a);
        }
        case K::Ctor: {
            rule("ctor", 0);
            ExprPtr v = eval(e->a);
            return v == e->a ? e : ctor(e->name, v, e->pos);
        }
        case K::Rec: {
            rule("rec", 1);
            ExprPtr v = eval(e->a);
            if (v->kind != K::Ctor) stuck(e, "rec on a non-constructor");
            const Branch* br = nullptr;
            for (const auto& b : e->branches)
                if (b.ctor == v->name) br = &b;
            auto ref = sig_.find_ctor(v->name);
            if (!br || !ref) stuck(e, "no branch for constructor '" + v->name + "'");
            // y.(y, delay(rec(y; branches)))
            ExprPtr inner = pair(var("y"), delay(rec(var("y"), e->branches, e->pos)));
            ExprPtr v1 = map_value(ref->ctor().arg, "y", inner, v->a);
            return eval(subst_closed(br->body, br->var, v1));
        }
        case K::Map: {
            if (!is_value(e->b)) stuck(e, "map target is not a value");
            return map_value(e->functor, e->var0, e->a, e->b);
        }
        case K::Let: {
            rule("let", 0);
            ExprPtr v = eval(e->a);
            return eval(subst_closed(e->b, e->var0, v));
        }
        }
        stuck(e, "unknown form");
    }

    ExprPtr map_value(const FunctorPtr& phi, const std::string& x, const ExprPtr& body, const ExprPtr& target) {
        switch (phi->kind) {
        case Functor::Kind::Self:
            rule("map-self", 0);
            return subst_closed(body, x, target);
        case Functor::Kind::Const: rule("map-const", 0); return target;
        case Functor::Kind::Prod: {
            rule("map-prod", 0);
            if (target->kind != Expr::Kind::Pair) stuck(target, "product map on a non-pair");
            return pair(map_value(phi->left, x, body, target->a), map_value(phi->right, x, body, target->b));
        }
        case Functor::Kind::Arrow: {
            rule("map-arrow", 0);
            if (target->kind != Expr::Kind::Lam) stuck(target, "arrow map on a non-function");
            std::set<std::string> avoid = free_vars(target->a);
            for (const auto& n : free_vars(body)) avoid.insert(n);
            avoid.insert(x);
            avoid.insert(target->var0);
            const std::string z = fresh_name("z", avoid);
            return lam(target->var0, let(target->a, z, map(phi->left, x, body, var(z))));
        }
        }
        stuck(target, "unknown functor");
    }

  private:
    const Signature& sig_;
    const EvalOptions& opts_;
};

} // namespace

EvalResult evaluate(const Signature& sig, const ExprPtr& e, const EvalOptions& opts) {
    Evaluator ev(sig, opts);
    ExprPtr v = ev.eval(e);
    EvalResult r;
    r.value = Value(v);
    r.cost = ev.cost;
    r.steps = ev.steps;
    r.trace = std::move(ev.trace);
    return r;
}

ExprPtr eval_map(const Signature& sig, const FunctorPtr& phi, const std::string& x, const ExprPtr& body,
                 const ExprPtr& target) {
    EvalOptions opts;
    Evaluator ev(sig, opts);
    return ev.eval(map(phi, x, body, target));
}

} // namespace costrec::src
