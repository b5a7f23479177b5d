#pragma once

// Random well-typed source terms over a small fixed signature.

#include <costrec/parser.hpp>
#include <costrec/source.hpp>
#include <costrec/typecheck.hpp>

#include <random>
#include <string>
#include <utility>
#include <vector>

namespace costrec::testing {

inline constexpr const char* kPrelude = R"(
datatype nat = Zero of unit | Succ of self;
datatype bool = True of unit | False of unit;
datatype list = Nil of unit | Cons of nat * self;
datatype tree = Leaf of unit | Node of nat * self * self;
datatype fan = Tip of unit | Fork of bool -> self;
)";

inline src::Program prelude_program(const std::string& extra = "") {
    return src::parse_program(std::string(kPrelude) + extra);
}

class TermGen {
  public:
    using Ctx = std::vector<std::pair<std::string, src::TypePtr>>;

    TermGen(const src::Signature& sig, std::uint64_t seed) : sig_(sig), rng_(seed) {}

    int pick(int n) { return std::uniform_int_distribution<int>(0, n - 1)(rng_); }
    bool coin(int percent) { return pick(100) < percent; }

    src::TypePtr data(const std::string& name) { return src::Type::data(name); }

    src::TypePtr type(int depth) {
        const int k = depth <= 0 ? pick(4) : pick(8);
        switch (k) {
        case 0: return src::Type::unit();
        case 1: return data("nat");
        case 2: return data("bool");
        case 3: return data("list");
        case 4: return src::Type::prod(type(depth - 1), type(depth - 1));
        case 5: return src::Type::arrow(type(depth - 1), type(depth - 1));
        case 6: return src::Type::susp(type(depth - 1));
        default: return data("tree");
        }
    }

    /// A closed syntactic value of type t.
    src::ExprPtr value(const src::TypePtr& t, int depth) { return value_in({}, t, depth); }

    /// A term of type t in ctx.
    src::ExprPtr term(const Ctx& ctx, const src::TypePtr& t, int depth) {
        using K = src::Type::Kind;
        if (depth <= 0) {
            if (auto v = var_of(ctx, t); v && coin(60)) return v;
            return value_in(ctx, t, 0);
        }
        switch (pick(9)) {
        case 0:
            if (auto v = var_of(ctx, t)) return v;
            break;
        case 1: {
            auto s = type(1);
            return src::app(term(ctx, src::Type::arrow(s, t), depth - 1), term(ctx, s, depth - 1));
        }
        case 2: {
            auto s = type(1);
            auto x = fresh();
            return src::let(term(ctx, s, depth - 1), x, term(extend(ctx, x, s), t, depth - 1));
        }
        case 3: return src::force(term(ctx, src::Type::susp(t), depth - 1));
        case 4: {
            auto s0 = type(1);
            auto s1 = type(1);
            auto a = fresh();
            auto b = fresh();
            return src::split(term(ctx, src::Type::prod(s0, s1), depth - 1), a, b,
                              term(extend(extend(ctx, a, s0), b, s1), t, depth - 1));
        }
        case 5:
        case 6: return rec_term(ctx, t, depth);
        default: break;
        }
        switch (t->kind) {
        case K::Prod: return src::pair(term(ctx, t->left, depth - 1), term(ctx, t->right, depth - 1));
        case K::Arrow: {
            auto x = fresh();
            return src::lam(x, term(extend(ctx, x, t->left), t->right, depth - 1));
        }
        case K::Susp: return src::delay(term(ctx, t->left, depth - 1));
        case K::Data: {
            const auto* d = sig_.find(t->name);
            const auto& c = d->ctors[pick(static_cast<int>(d->ctors.size()))];
            return src::ctor(c.name, functor_term(ctx, c.arg, t, depth - 1));
        }
        default: return value_in(ctx, t, depth);
        }
    }

    /// rec over a generated scrutinee; branches may use the recursive results.
    src::ExprPtr rec_term(const Ctx& ctx, const src::TypePtr& t, int depth) {
        static const char* kScrut[] = {"nat", "bool", "list", "tree"};
        const std::string dt = kScrut[pick(4)];
        const auto* d = sig_.find(dt);
        std::vector<src::Branch> branches;
        for (const auto& c : d->ctors) {
            auto x = fresh();
            auto xt = src::apply(c.arg, src::Type::prod(data(dt), src::Type::susp(t)));
            branches.push_back({c.name, x, branch_body(extend(ctx, x, xt), x, xt, t, depth - 1)});
        }
        return src::rec(term(ctx, data(dt), depth - 1), std::move(branches));
    }

    /// map^phi(x. v1, v0) with value body and target, closed.
    src::ExprPtr map_instance(int depth) {
        auto phi = functor(2);
        auto t0 = type(1);
        auto t1 = type(1);
        auto x = fresh();
        auto body = value_in({{x, t0}}, t1, depth, x);
        auto target = value(src::apply(phi, t0), depth);
        return src::map(phi, x, body, target);
    }

    src::FunctorPtr functor(int depth) {
        const int k = depth <= 0 ? pick(2) : pick(4);
        switch (k) {
        case 0: return src::Functor::self();
        case 1: return src::Functor::constant(type(0));
        case 2: return src::Functor::prod(functor(depth - 1), functor(depth - 1));
        default: return src::Functor::arrow(type(0), functor(depth - 1));
        }
    }

    std::string fresh() { return "v" + std::to_string(counter_++); }

  private:
    static Ctx extend(Ctx ctx, const std::string& x, const src::TypePtr& t) {
        ctx.emplace_back(x, t);
        return ctx;
    }

    src::ExprPtr var_of(const Ctx& ctx, const src::TypePtr& t) {
        std::vector<std::string> hits;
        for (auto it = ctx.rbegin(); it != ctx.rend(); ++it) {
            bool shadowed = false;
            for (auto jt = ctx.rbegin(); jt != it; ++jt) shadowed = shadowed || jt->first == it->first;
            if (!shadowed && src::equal(it->second, t)) hits.push_back(it->first);
        }
        if (hits.empty()) return nullptr;
        return src::var(hits[pick(static_cast<int>(hits.size()))]);
    }

    // Branch bodies prefer to look inside the pattern so recursive results get forced.
    src::ExprPtr branch_body(const Ctx& ctx, const std::string& x, const src::TypePtr& xt, const src::TypePtr& t,
                             int depth) {
        if (xt->kind == src::Type::Kind::Prod && coin(70)) {
            auto a = fresh();
            auto b = fresh();
            Ctx inner = extend(extend(ctx, a, xt->left), b, xt->right);
            if (xt->right->kind == src::Type::Kind::Susp && src::equal(xt->right->left, t) && coin(50))
                return src::split(src::var(x), a, b, src::force(src::var(b)));
            return src::split(src::var(x), a, b, branch_body(inner, b, xt->right, t, depth));
        }
        return term(ctx, t, depth);
    }

    src::ExprPtr functor_term(const Ctx& ctx, const src::FunctorPtr& phi, const src::TypePtr& self, int depth) {
        switch (phi->kind) {
        case src::Functor::Kind::Self: return term(ctx, self, depth);
        case src::Functor::Kind::Const: return term(ctx, phi->type, depth);
        case src::Functor::Kind::Prod:
            return src::pair(functor_term(ctx, phi->left, self, depth), functor_term(ctx, phi->right, self, depth));
        case src::Functor::Kind::Arrow: {
            auto y = fresh();
            return src::lam(y, functor_term(extend(ctx, y, phi->type), phi->left, self, depth));
        }
        }
        return src::unit();
    }

    // Syntactic value; `must_use` (if set) is a variable that may appear in it.
    src::ExprPtr value_in(const Ctx& ctx, const src::TypePtr& t, int depth, const std::string& must_use = "") {
        using K = src::Type::Kind;
        if (!must_use.empty())
            if (auto v = var_of(ctx, t); v && coin(50)) return v;
        switch (t->kind) {
        case K::Unit: return src::unit();
        case K::Prod:
            return src::pair(value_in(ctx, t->left, depth, must_use), value_in(ctx, t->right, depth, must_use));
        case K::Arrow: {
            auto x = fresh();
            return src::lam(x, term(extend(ctx, x, t->left), t->right, std::min(depth, 2)));
        }
        case K::Susp: return src::delay(term(ctx, t->left, std::min(depth, 2)));
        case K::Data: {
            const auto* d = sig_.find(t->name);
            std::vector<const src::Constructor*> choices;
            for (const auto& c : d->ctors)
                if (depth > 0 || !src::has_self(c.arg)) choices.push_back(&c);
            const auto* c = choices[pick(static_cast<int>(choices.size()))];
            return src::ctor(c->name, functor_value(ctx, c->arg, t, depth - 1, must_use));
        }
        default: return src::unit();
        }
    }

    src::ExprPtr functor_value(const Ctx& ctx, const src::FunctorPtr& phi, const src::TypePtr& self, int depth,
                               const std::string& must_use) {
        switch (phi->kind) {
        case src::Functor::Kind::Self: return value_in(ctx, self, depth, must_use);
        case src::Functor::Kind::Const: return value_in(ctx, phi->type, depth, must_use);
        case src::Functor::Kind::Prod:
            return src::pair(functor_value(ctx, phi->left, self, depth, must_use),
                             functor_value(ctx, phi->right, self, depth, must_use));
        case src::Functor::Kind::Arrow: {
            auto y = fresh();
            return src::lam(y, functor_value(extend(ctx, y, phi->type), phi->left, self, depth, must_use));
        }
        }
        return src::unit();
    }

    const src::Signature& sig_;
    std::mt19937_64 rng_;
    int counter_ = 0;
};

} // namespace costrec::testing
