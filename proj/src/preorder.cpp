#include <costrec/preorder.hpp>

#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <unordered_map>
#include <unordered_set>

namespace costrec::pre {

using cplx::Expr;
using cplx::ExprPtr;
using cplx::Functor;
using cplx::FunctorPtr;

std::string RewriteStep::str() const {
    std::string s = rule + "@";
    if (position.empty()) return s + "root";
    for (std::size_t i = 0; i < position.size(); ++i) s += (i ? "." : "") + std::to_string(position[i]);
    return s;
}

bool AxiomSet::covers(const std::string& datatype) const {
    for (const auto& e : entries)
        if (e.datatype == datatype) return true;
    return false;
}

namespace {

int self_count(const FunctorPtr& f) {
    switch (f->kind) {
    case Functor::Kind::Self: return 1;
    case Functor::Kind::Const: return 0;
    case Functor::Kind::Prod: {
        const int l = self_count(f->left);
        const int r = self_count(f->right);
        return l < 0 || r < 0 ? -1 : l + r;
    }
    case Functor::Kind::Arrow: return self_count(f->left) == 0 ? 0 : -1;
    }
    return 0;
}

} // namespace

AxiomSet::Entry length_quotient(const cplx::Signature& sig, const std::string& datatype) {
    const auto* d = sig.find(datatype);
    if (!d) throw ModelError("unknown datatype '" + datatype + "' in axiom");
    int nil = 0;
    int cons = 0;
    for (const auto& c : d->ctors) {
        const int n = self_count(c.arg);
        if (n == 0) ++nil;
        if (n == 1) ++cons;
    }
    if (d->ctors.size() != 2 || nil != 1 || cons != 1)
        throw ModelError("length-quotient needs a list-shaped datatype; '" + datatype + "' is not");
    return {datatype, "length-quotient"};
}

// ---------------------------------------------------------------- NbE

namespace {

struct NVal;
using NV = std::shared_ptr<const NVal>;
struct NEnv;
using NEnvPtr = std::shared_ptr<const NEnv>;

struct NEnv {
    std::string name;
    NV value;
    NEnvPtr next;
};

struct Atom {
    bool one = true;
    NV neutral;
};

struct NVal {
    enum class Kind { Cost, Unit, Pair, Lam, Ctor, NVar, NApp, NProj, NRec };
    Kind kind = Kind::Unit;
    std::vector<Atom> atoms; // Cost
    NV a, b;                 // Pair; Ctor arg; NApp fn/arg; NProj/NRec scrutinee
    std::string name;        // Ctor name, Lam binder, NVar name
    int index = 0;           // NProj
    std::function<NV(const NV&)> fn;
    const Expr* node = nullptr; // NRec
    NEnvPtr env;                // NRec
};

bool neutral(const NV& v) {
    return v->kind == NVal::Kind::NVar || v->kind == NVal::Kind::NApp || v->kind == NVal::Kind::NProj ||
           v->kind == NVal::Kind::NRec;
}

NV mk(NVal v) { return std::make_shared<const NVal>(std::move(v)); }

NV nvar(std::string name) {
    NVal v;
    v.kind = NVal::Kind::NVar;
    v.name = std::move(name);
    return mk(std::move(v));
}

NV npair(NV a, NV b) {
    NVal v;
    v.kind = NVal::Kind::Pair;
    v.a = std::move(a);
    v.b = std::move(b);
    return mk(std::move(v));
}

NEnvPtr bind(NEnvPtr env, std::string name, NV v) {
    return std::make_shared<const NEnv>(NEnv{std::move(name), std::move(v), std::move(env)});
}

struct KeyHash {
    std::size_t operator()(const std::pair<const Expr*, const NEnv*>& k) const {
        return std::hash<const void*>()(k.first) * 31 + std::hash<const void*>()(k.second);
    }
};

class Nbe {
  public:
    Nbe(const cplx::Signature& sig, std::uint64_t fuel, std::set<std::string> free)
        : sig_(sig), fuel_(fuel), free_(std::move(free)) {}

    NV eval(const ExprPtr& e, const NEnvPtr& env) {
        if (e.use_count() <= 1) return eval_node(e, env);
        const std::pair<const Expr*, const NEnv*> key{e.get(), env.get()};
        if (auto it = cache_.find(key); it != cache_.end()) return it->second.first;
        NV v = eval_node(e, env);
        if (cache_.size() > 4'000'000) cache_.clear();
        cache_.emplace(key, std::make_pair(v, env));
        return v;
    }

    ExprPtr reify(const NV& v, std::vector<std::string>& scope) {
        using K = NVal::Kind;
        switch (v->kind) {
        case K::Cost: {
            if (v->atoms.empty()) return cplx::zero();
            ExprPtr out;
            for (auto it = v->atoms.rbegin(); it != v->atoms.rend(); ++it) {
                ExprPtr atom = it->one ? cplx::one() : reify(it->neutral, scope);
                out = out ? cplx::plus(atom, out) : atom;
            }
            return out;
        }
        case K::Unit: return cplx::unit();
        case K::Pair: return cplx::pair(reify(v->a, scope), reify(v->b, scope));
        case K::Ctor: return cplx::ctor(v->name, reify(v->a, scope));
        case K::Lam: {
            const std::string y = choose(v->name, scope);
            scope.push_back(y);
            ExprPtr body = reify(v->fn(nvar(y)), scope);
            scope.pop_back();
            return cplx::lam(y, body);
        }
        case K::NVar: return cplx::var(v->name);
        case K::NApp: return cplx::app(reify(v->a, scope), reify(v->b, scope));
        case K::NProj: return cplx::proj(v->index, reify(v->a, scope));
        case K::NRec: {
            ExprPtr scrut = reify(v->a, scope);
            std::vector<cplx::Branch> branches;
            for (const auto& br : v->node->branches) {
                const std::string y = choose(br.var, scope);
                scope.push_back(y);
                ExprPtr body = reify(eval(br.body, bind(v->env, br.var, nvar(y))), scope);
                scope.pop_back();
                branches.push_back({br.ctor, y, body});
            }
            return cplx::rec(scrut, std::move(branches));
        }
        }
        throw EvalError("cannot reify value");
    }

  private:
    std::string choose(const std::string& base, const std::vector<std::string>& scope) const {
        std::string c = base;
        auto taken = [&](const std::string& n) {
            if (free_.count(n)) return true;
            for (const auto& s : scope)
                if (s == n) return true;
            return false;
        };
        while (taken(c)) c += "'";
        return c;
    }

    void tick() {
        if (fuel_ == 0) throw EvalError("normalization fuel exhausted");
        --fuel_;
    }

    static std::vector<Atom> atoms(const NV& v) {
        if (v->kind == NVal::Kind::Cost) return v->atoms;
        if (neutral(v)) return {Atom{false, v}};
        throw EvalError("expected a cost during normalization");
    }

    NV apply(const NV& f, const NV& x) {
        if (f->kind == NVal::Kind::Lam) {
            tick();
            return f->fn(x);
        }
        if (!neutral(f)) throw EvalError("application of a non-function during normalization");
        NVal v;
        v.kind = NVal::Kind::NApp;
        v.a = f;
        v.b = x;
        return mk(std::move(v));
    }

    NV proj(int i, const NV& p) {
        if (p->kind == NVal::Kind::Pair) {
            tick();
            return i == 0 ? p->a : p->b;
        }
        if (!neutral(p)) throw EvalError("projection from a non-pair during normalization");
        NVal v;
        v.kind = NVal::Kind::NProj;
        v.index = i;
        v.a = p;
        return mk(std::move(v));
    }

    NV rec(const NV& scrut, const Expr* node, const NEnvPtr& env) {
        if (scrut->kind == NVal::Kind::Ctor) {
            tick();
            for (const auto& br : node->branches)
                if (br.ctor == scrut->name) {
                    const auto& phi = sig_.find_ctor(scrut->name)->ctor().arg;
                    return eval(br.body, bind(env, br.var, fmap(phi, scrut->a, node, env)));
                }
            throw EvalError("rec has no branch for constructor '" + scrut->name + "'");
        }
        if (!neutral(scrut)) throw EvalError("rec on a non-constructor during normalization");
        NVal v;
        v.kind = NVal::Kind::NRec;
        v.a = scrut;
        v.node = node;
        v.env = env;
        return mk(std::move(v));
    }

    // cmap(phi, y.(y, rec(y; branches)), v)
    NV fmap(const FunctorPtr& phi, const NV& v, const Expr* node, const NEnvPtr& env) {
        switch (phi->kind) {
        case Functor::Kind::Self: return npair(v, rec(v, node, env));
        case Functor::Kind::Const: return v;
        case Functor::Kind::Prod:
            return npair(fmap(phi->left, proj(0, v), node, env), fmap(phi->right, proj(1, v), node, env));
        case Functor::Kind::Arrow: {
            NVal lam;
            lam.kind = NVal::Kind::Lam;
            lam.name = "y";
            lam.fn = [this, phi, v, node, env](const NV& y) { return fmap(phi->left, apply(v, y), node, env); };
            return mk(std::move(lam));
        }
        }
        return v;
    }

    NV eval_node(const ExprPtr& e, const NEnvPtr& env) {
        tick();
        using K = Expr::Kind;
        switch (e->kind) {
        case K::Var:
            for (const NEnv* p = env.get(); p; p = p->next.get())
                if (p->name == e->name) return p->value;
            return nvar(e->name);
        case K::Zero: {
            NVal v;
            v.kind = NVal::Kind::Cost;
            return mk(std::move(v));
        }
        case K::One: {
            NVal v;
            v.kind = NVal::Kind::Cost;
            v.atoms.push_back(Atom{});
            return mk(std::move(v));
        }
        case K::Plus: {
            NVal v;
            v.kind = NVal::Kind::Cost;
            v.atoms = atoms(eval(e->a, env));
            auto r = atoms(eval(e->b, env));
            v.atoms.insert(v.atoms.end(), r.begin(), r.end());
            return mk(std::move(v));
        }
        case K::Unit: return mk(NVal{});
        case K::Pair: return npair(eval(e->a, env), eval(e->b, env));
        case K::Proj: return proj(e->index, eval(e->a, env));
        case K::Lam: {
            NVal lam;
            lam.kind = NVal::Kind::Lam;
            lam.name = e->var;
            lam.fn = [this, e, env](const NV& x) { return eval(e->a, bind(env, e->var, x)); };
            return mk(std::move(lam));
        }
        case K::App: {
            NV f = eval(e->a, env);
            return apply(f, eval(e->b, env));
        }
        case K::Ctor: {
            NVal v;
            v.kind = NVal::Kind::Ctor;
            v.name = e->name;
            v.a = eval(e->a, env);
            return mk(std::move(v));
        }
        case K::Rec: return rec(eval(e->a, env), e.get(), env);
        }
        throw EvalError("unknown expression form");
    }

    const cplx::Signature& sig_;
    std::uint64_t fuel_;
    std::set<std::string> free_;
    std::unordered_map<std::pair<const Expr*, const NEnv*>, std::pair<NV, NEnvPtr>, KeyHash> cache_;
};

} // namespace

ExprPtr normalize(const cplx::Signature& sig, const ExprPtr& e, const NormalizeOptions& opts) {
    Nbe nbe(sig, opts.fuel, cplx::free_vars(e));
    NV v = nbe.eval(e, nullptr);
    std::vector<std::string> scope;
    return nbe.reify(v, scope);
}

std::optional<std::uint64_t> cost_literal(const ExprPtr& nf) {
    if (nf->kind != Expr::Kind::Pair) return std::nullopt;
    return cplx::numeral_value(nf->a);
}

// ---------------------------------------------------------------- monoid

namespace {

void flatten(const ExprPtr& e, std::vector<ExprPtr>& out) {
    if (e->kind == Expr::Kind::Plus) {
        flatten(e->a, out);
        flatten(e->b, out);
    } else if (e->kind != Expr::Kind::Zero) {
        out.push_back(e);
    }
}

ExprPtr rebuild(const ExprPtr& e, ExprPtr a, ExprPtr b, std::vector<cplx::Branch> branches) {
    auto n = std::make_shared<Expr>(*e);
    n->a = std::move(a);
    n->b = std::move(b);
    n->branches = std::move(branches);
    return n;
}

ExprPtr canon(const ExprPtr& e, std::unordered_map<const Expr*, ExprPtr>& memo) {
    if (auto it = memo.find(e.get()); it != memo.end()) return it->second;
    ExprPtr out;
    if (e->kind == Expr::Kind::Plus) {
        std::vector<ExprPtr> parts;
        flatten(e, parts);
        if (parts.empty()) {
            out = cplx::zero();
        } else {
            for (auto it = parts.rbegin(); it != parts.rend(); ++it) {
                ExprPtr p = canon(*it, memo);
                out = out ? cplx::plus(p, out) : p;
            }
        }
    } else {
        ExprPtr a = e->a ? canon(e->a, memo) : nullptr;
        ExprPtr b = e->b ? canon(e->b, memo) : nullptr;
        std::vector<cplx::Branch> branches;
        bool changed = a != e->a || b != e->b;
        for (const auto& br : e->branches) {
            ExprPtr body = canon(br.body, memo);
            changed = changed || body != br.body;
            branches.push_back({br.ctor, br.var, body});
        }
        out = changed ? rebuild(e, a, b, std::move(branches)) : e;
    }
    memo.emplace(e.get(), out);
    return out;
}

} // namespace

ExprPtr monoid_canonical(const ExprPtr& e) {
    std::unordered_map<const Expr*, ExprPtr> memo;
    return canon(e, memo);
}

// ---------------------------------------------------------------- stepwise

namespace {

ExprPtr child(const ExprPtr& e, int i) {
    if (i == 0) return e->a;
    if (i == 1) return e->b;
    return e->branches.at(static_cast<std::size_t>(i - 2)).body;
}

ExprPtr replace_at(const ExprPtr& e, const Path& path, std::size_t depth, const ExprPtr& with) {
    if (depth == path.size()) return with;
    const int i = path[depth];
    auto n = std::make_shared<Expr>(*e);
    if (i == 0)
        n->a = replace_at(e->a, path, depth + 1, with);
    else if (i == 1)
        n->b = replace_at(e->b, path, depth + 1, with);
    else
        n->branches[static_cast<std::size_t>(i - 2)].body =
            replace_at(e->branches[static_cast<std::size_t>(i - 2)].body, path, depth + 1, with);
    return n;
}

ExprPtr unroll(const cplx::Signature& sig, const ExprPtr& e) {
    const ExprPtr& scrut = e->a;
    for (const auto& br : e->branches) {
        if (br.ctor != scrut->name) continue;
        const auto& phi = sig.find_ctor(scrut->name)->ctor().arg;
        auto avoid = cplx::free_vars(e);
        auto more = cplx::free_vars(scrut->a);
        avoid.insert(more.begin(), more.end());
        const std::string y = cplx::fresh_name("y", avoid);
        ExprPtr body = cplx::pair(cplx::var(y), cplx::rec(cplx::var(y), e->branches));
        return cplx::subst(br.body, br.var, cplx::cmap_expand(phi, y, body, scrut->a));
    }
    throw EvalError("rec has no branch for constructor '" + scrut->name + "'");
}

// Reduct and rule name when e is a step redex.
std::optional<std::pair<ExprPtr, std::string>> root_step(const cplx::Signature& sig, const ExprPtr& e) {
    using K = Expr::Kind;
    switch (e->kind) {
    case K::App:
        if (e->a->kind == K::Lam) return std::make_pair(cplx::subst(e->a->a, e->a->var, e->b), std::string("beta-fn"));
        break;
    case K::Proj:
        if (e->a->kind == K::Pair)
            return std::make_pair(e->index == 0 ? e->a->a : e->a->b, "beta-pair-" + std::to_string(e->index));
        break;
    case K::Rec:
        if (e->a->kind == K::Ctor) return std::make_pair(unroll(sig, e), std::string("rec-unroll"));
        break;
    default: break;
    }
    return std::nullopt;
}

std::optional<std::pair<ExprPtr, std::string>> root_monoid(const ExprPtr& e) {
    if (e->kind != Expr::Kind::Plus) return std::nullopt;
    if (e->a->kind == Expr::Kind::Zero) return std::make_pair(e->b, std::string("monoid-left-unit"));
    if (e->b->kind == Expr::Kind::Zero) return std::make_pair(e->a, std::string("monoid-right-unit"));
    if (e->a->kind == Expr::Kind::Plus)
        return std::make_pair(cplx::plus(e->a->a, cplx::plus(e->a->b, e->b)), std::string("monoid-assoc"));
    return std::nullopt;
}

std::optional<std::pair<ExprPtr, RewriteStep>> find_step(const cplx::Signature& sig, const ExprPtr& e, Path& path) {
    auto r = root_monoid(e);
    if (!r) r = root_step(sig, e);
    if (r) return std::make_pair(r->first, RewriteStep{r->second, path});
    const int n = 2 + static_cast<int>(e->branches.size());
    for (int i = 0; i < n; ++i) {
        ExprPtr c = child(e, i);
        if (!c) continue;
        path.push_back(i);
        auto found = find_step(sig, c, path);
        path.pop_back();
        if (found) return found;
    }
    return std::nullopt;
}

} // namespace

std::optional<std::pair<ExprPtr, RewriteStep>> step(const cplx::Signature& sig, const ExprPtr& e) {
    Path path;
    auto found = find_step(sig, e, path);
    if (!found) return std::nullopt;
    return std::make_pair(replace_at(e, found->second.position, 0, found->first), found->second);
}

StepwiseResult normalize_stepwise(const cplx::Signature& sig, const ExprPtr& e, std::size_t max_steps) {
    StepwiseResult out{e, {}};
    while (auto s = step(sig, out.normal_form)) {
        if (out.steps.size() >= max_steps) throw EvalError("stepwise normalization exceeded its step bound");
        out.normal_form = s->first;
        out.steps.push_back(s->second);
    }
    return out;
}

// ---------------------------------------------------------------- leq

namespace {

class Search {
  public:
    Search(const cplx::Signature& sig, const AxiomSet& axioms) : sig_(sig), axioms_(axioms) {}

    // Equality up to the label equation, applied along congruence positions.
    bool equiv(const ExprPtr& a, const ExprPtr& b) const {
        if (cplx::alpha_equal(a, b)) return true;
        if (a->kind != b->kind) return false;
        using K = Expr::Kind;
        switch (a->kind) {
        case K::Proj: return a->index == b->index && equiv(a->a, b->a);
        case K::App: return equiv(a->a, b->a) && cplx::alpha_equal(a->b, b->b);
        case K::Plus: return equiv(a->a, b->a) && equiv(a->b, b->b);
        case K::Rec: {
            if (!equiv(a->a, b->a) || a->branches.size() != b->branches.size()) return false;
            auto ra = cplx::rec(cplx::unit(), a->branches);
            auto rb = cplx::rec(cplx::unit(), b->branches);
            return cplx::alpha_equal(ra, rb);
        }
        case K::Ctor: {
            if (a->name != b->name) return false;
            auto ref = sig_.find_ctor(a->name);
            if (!ref || !axioms_.covers(ref->datatype->name)) return false;
            return equiv_arg(ref->ctor().arg, a->a, b->a);
        }
        default: return false;
        }
    }

    // Successors of t at congruence positions: (new term, step).
    void successors(const ExprPtr& t, const ExprPtr& at, Path& path, std::vector<std::pair<ExprPtr, RewriteStep>>& out) {
        if (auto r = root_step(sig_, at)) out.emplace_back(replace_at(t, path, 0, r->first), RewriteStep{r->second, path});
        if (auto tail = axiom_tail(at))
            out.emplace_back(replace_at(t, path, 0, tail->first), RewriteStep{"axiom(length-quotient)", path});
        using K = Expr::Kind;
        auto go = [&](int i) {
            path.push_back(i);
            successors(t, child(at, i), path, out);
            path.pop_back();
        };
        switch (at->kind) {
        case K::Proj:
        case K::App:
        case K::Rec: go(0); break;
        case K::Plus:
            go(0);
            go(1);
            break;
        case K::Ctor: {
            auto ref = sig_.find_ctor(at->name);
            if (!ref || !axioms_.covers(ref->datatype->name)) break;
            Path inner;
            if (!self_path(ref->ctor().arg, at->a, inner)) break;
            path.push_back(0);
            for (int i : inner) path.push_back(i);
            ExprPtr sub = at->a;
            for (int i : inner) sub = child(sub, i);
            successors(t, sub, path, out);
            for (std::size_t k = 0; k <= inner.size(); ++k) path.pop_back();
            break;
        }
        default: break;
        }
    }

  private:
    // Path inside a constructor argument to its single recursive position.
    static bool self_path(const FunctorPtr& f, const ExprPtr& arg, Path& out) {
        switch (f->kind) {
        case Functor::Kind::Self: return true;
        case Functor::Kind::Prod: {
            if (arg->kind != Expr::Kind::Pair) return false;
            if (self_count(f->left) > 0) {
                out.push_back(0);
                return self_path(f->left, arg->a, out);
            }
            if (self_count(f->right) > 0) {
                out.push_back(1);
                return self_path(f->right, arg->b, out);
            }
            return false;
        }
        default: return false;
        }
    }

    bool equiv_arg(const FunctorPtr& f, const ExprPtr& a, const ExprPtr& b) const {
        switch (f->kind) {
        case Functor::Kind::Self: return equiv(a, b);
        case Functor::Kind::Const: return true;
        case Functor::Kind::Prod:
            if (a->kind != Expr::Kind::Pair || b->kind != Expr::Kind::Pair) return cplx::alpha_equal(a, b);
            return equiv_arg(f->left, a->a, b->a) && equiv_arg(f->right, a->b, b->b);
        default: return cplx::alpha_equal(a, b);
        }
    }

    // E <= C(_, E) for an axiomatized constructor with one recursive position.
    std::optional<std::pair<ExprPtr, int>> axiom_tail(const ExprPtr& e) const {
        if (e->kind != Expr::Kind::Ctor) return std::nullopt;
        auto ref = sig_.find_ctor(e->name);
        if (!ref || !axioms_.covers(ref->datatype->name) || self_count(ref->ctor().arg) != 1) return std::nullopt;
        Path inner;
        if (!self_path(ref->ctor().arg, e->a, inner)) return std::nullopt;
        ExprPtr sub = e->a;
        for (int i : inner) sub = child(sub, i);
        return std::make_pair(sub, 0);
    }

    const cplx::Signature& sig_;
    const AxiomSet& axioms_;
};

} // namespace

LeqResult leq(const cplx::Signature& sig, const AxiomSet& axioms, const ExprPtr& e0, const ExprPtr& e1,
              const LeqOptions& opts) {
    Search search(sig, axioms);
    const ExprPtr goal = monoid_canonical(e0);
    struct State {
        ExprPtr term;
        std::vector<RewriteStep> steps;
    };
    std::deque<State> queue;
    std::unordered_set<std::string> seen;
    LeqResult result;
    const ExprPtr start = monoid_canonical(e1);
    queue.push_back({start, {}});
    seen.insert(cplx::to_string(start));
    while (!queue.empty() && result.explored < opts.max_states) {
        State s = std::move(queue.front());
        queue.pop_front();
        ++result.explored;
        if (search.equiv(goal, s.term)) {
            result.derivable = true;
            result.derivation = std::move(s.steps);
            return result;
        }
        if (s.steps.size() >= opts.depth) continue;
        std::vector<std::pair<ExprPtr, RewriteStep>> next;
        Path path;
        search.successors(s.term, s.term, path, next);
        for (auto& [t, st] : next) {
            ExprPtr c = monoid_canonical(t);
            if (!seen.insert(cplx::to_string(c)).second) continue;
            auto steps = s.steps;
            steps.push_back(st);
            queue.push_back({c, std::move(steps)});
        }
    }
    return result;
}

} // namespace costrec::pre
