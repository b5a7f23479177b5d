#include <costrec/harness.hpp>
#include <costrec/parser.hpp>
#include <costrec/translate.hpp>
#include <costrec/typecheck.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>

namespace costrec::harness {

using sem::SemVal;
using src::ExprPtr;
using src::TypePtr;

namespace {

constexpr std::size_t kPoolCap = 20'000; // argument combinations tried per layer
constexpr std::size_t kCaseCap = 400;    // input tuples per def

std::uint64_t mix(std::uint64_t seed, const std::string& s) {
    std::uint64_t h = seed ^ 0x9e3779b97f4a7c15ULL;
    for (unsigned char c : s) h = (h ^ c) * 0x100000001b3ULL;
    return h;
}

template <typename T> std::vector<T> sample(std::vector<T> xs, std::size_t k, std::mt19937_64& rng) {
    if (xs.size() <= k) return xs;
    std::vector<std::size_t> idx(xs.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::shuffle(idx.begin(), idx.end(), rng);
    idx.resize(k);
    std::sort(idx.begin(), idx.end());
    std::vector<T> out;
    for (auto i : idx) out.push_back(std::move(xs[i]));
    return out;
}

// Cartesian product, replaced by random picks when it would exceed cap.
std::vector<std::vector<ExprPtr>> combos(const std::vector<std::vector<ExprPtr>>& opts, std::size_t cap,
                                         std::mt19937_64& rng) {
    double total = 1;
    for (const auto& o : opts) {
        if (o.empty()) return {};
        total *= static_cast<double>(o.size());
    }
    std::vector<std::vector<ExprPtr>> out;
    if (total <= static_cast<double>(cap)) {
        out.push_back({});
        for (const auto& o : opts) {
            std::vector<std::vector<ExprPtr>> next;
            for (const auto& prefix : out)
                for (const auto& x : o) {
                    auto row = prefix;
                    row.push_back(x);
                    next.push_back(std::move(row));
                }
            out = std::move(next);
        }
        return out;
    }
    std::set<std::string> seen;
    for (std::size_t tries = 0; out.size() < cap && tries < cap * 4; ++tries) {
        std::vector<ExprPtr> row;
        std::string key;
        for (const auto& o : opts) {
            row.push_back(o[std::uniform_int_distribution<std::size_t>(0, o.size() - 1)(rng)]);
            key += src::to_string(row.back()) + "|";
        }
        if (seen.insert(key).second) out.push_back(std::move(row));
    }
    return out;
}

bool has_arrow(const TypePtr& t) {
    if (!t) return false;
    if (t->kind == src::Type::Kind::Arrow) return true;
    return has_arrow(t->left) || has_arrow(t->right);
}

bool functor_has_arrow(const src::FunctorPtr& f) {
    switch (f->kind) {
    case src::Functor::Kind::Self: return false;
    case src::Functor::Kind::Const: return has_arrow(f->type);
    case src::Functor::Kind::Prod: return functor_has_arrow(f->left) || functor_has_arrow(f->right);
    case src::Functor::Kind::Arrow: return true;
    }
    return false;
}

class Generator {
  public:
    Generator(const src::Program& prog, const size::Models& models, const GenConfig& cfg)
        : prog_(prog), models_(models), cfg_(cfg) {}

    std::vector<ExprPtr> gen(const TypePtr& t) {
        const std::string key = src::to_string(t);
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        std::mt19937_64 rng(mix(cfg_.seed, key));
        std::vector<ExprPtr> out;
        switch (t->kind) {
        case src::Type::Kind::Unit: out = {src::unit()}; break;
        case src::Type::Kind::Prod: {
            auto rows = combos({gen(t->left), gen(t->right)}, cfg_.samples * cfg_.samples, rng);
            for (auto& r : rows) out.push_back(src::pair(r[0], r[1]));
            break;
        }
        case src::Type::Kind::Susp:
            for (auto& v : gen(t->left)) out.push_back(src::delay(v));
            break;
        case src::Type::Kind::Arrow:
            for (auto& f : library_functions(prog_, models_, t, cfg_)) out.push_back(f.term);
            break;
        case src::Type::Kind::Data: out = gen_data(t->name, rng); break;
        default: throw EnumerationError("cannot generate values of type " + key);
        }
        memo_[key] = out;
        return out;
    }

  private:
    std::vector<ExprPtr> gen_data(const std::string& dt, std::mt19937_64& rng) {
        const auto* d = prog_.signature.find(dt);
        if (!d) throw EnumerationError("unknown datatype '" + dt + "'");
        for (const auto& c : d->ctors)
            if (functor_has_arrow(c.arg))
                throw EnumerationError("type " + dt + " is not generable: constructor " + c.name +
                                       " takes a function argument");
        // size class -> values, in generation order
        std::map<std::string, std::vector<ExprPtr>> classes;
        std::set<std::string> seen;
        std::vector<ExprPtr> pool;
        for (std::uint64_t layer = 0; layer <= cfg_.max_size + 1; ++layer) {
            std::vector<ExprPtr> fresh;
            for (const auto& c : d->ctors) {
                std::vector<std::vector<ExprPtr>> slots;
                std::function<void(const src::FunctorPtr&)> shape = [&](const src::FunctorPtr& f) {
                    switch (f->kind) {
                    case src::Functor::Kind::Self: slots.push_back(pool); break;
                    case src::Functor::Kind::Const: slots.push_back(gen(f->type)); break;
                    case src::Functor::Kind::Prod:
                        shape(f->left);
                        shape(f->right);
                        break;
                    case src::Functor::Kind::Arrow: break;
                    }
                };
                shape(c.arg);
                for (auto& row : combos(slots, kPoolCap, rng)) {
                    std::size_t i = 0;
                    std::function<ExprPtr(const src::FunctorPtr&)> build = [&](const src::FunctorPtr& f) -> ExprPtr {
                        if (f->kind == src::Functor::Kind::Prod) {
                            ExprPtr l = build(f->left);
                            return src::pair(l, build(f->right));
                        }
                        return row[i++];
                    };
                    ExprPtr v = src::ctor(c.name, build(c.arg));
                    const std::string s = src::to_string(v);
                    if (seen.count(s)) continue;
                    const auto sz = size::value_size(models_, prog_.signature, src::Value(v));
                    bool fits = true;
                    for (const auto& x : sz) fits = fits && x.is_finite() && x.value() <= cfg_.max_size;
                    if (!fits) continue;
                    seen.insert(s);
                    classes[sem::elem_str(sz)].push_back(v);
                    fresh.push_back(v);
                }
            }
            if (fresh.empty()) break;
            // next layer draws from a bounded sample of every size class
            pool.clear();
            for (auto& [k, vs] : classes) {
                auto picked = sample(vs, cfg_.samples, rng);
                pool.insert(pool.end(), picked.begin(), picked.end());
            }
        }
        std::vector<ExprPtr> out;
        for (auto& [k, vs] : classes) {
            // keep the first value of each constructor, then a sample
            std::set<std::string> ctors_kept;
            std::vector<ExprPtr> firsts;
            std::vector<ExprPtr> rest;
            for (auto& v : vs)
                (ctors_kept.insert(v->name).second ? firsts : rest).push_back(v);
            auto picked = sample(rest, cfg_.samples > firsts.size() ? cfg_.samples - firsts.size() : 0, rng);
            out.insert(out.end(), firsts.begin(), firsts.end());
            out.insert(out.end(), picked.begin(), picked.end());
        }
        return out;
    }

    const src::Program& prog_;
    const size::Models& models_;
    GenConfig cfg_;
    std::map<std::string, std::vector<ExprPtr>> memo_;
};

bool is_nat(const src::Signature& sig, const TypePtr& t) {
    if (t->kind != src::Type::Kind::Data) return false;
    const auto* d = sig.find(t->name);
    if (!d || d->ctors.size() != 2) return false;
    auto z = sig.find_ctor("Zero");
    auto s = sig.find_ctor("Succ");
    return z && s && z->datatype == d && s->datatype == d &&
           z->ctor().arg->kind == src::Functor::Kind::Const && s->ctor().arg->kind == src::Functor::Kind::Self;
}

} // namespace

std::vector<src::Value> gen_values(const src::Program& prog, const size::Models& models, const TypePtr& t,
                                   const GenConfig& cfg) {
    Generator g(prog, models, cfg);
    std::vector<src::Value> out;
    for (auto& e : g.gen(t)) out.emplace_back(e);
    return out;
}

std::vector<LibraryFn> library_functions(const src::Program& prog, const size::Models& models, const TypePtr& t,
                                         const GenConfig& cfg) {
    if (t->kind != src::Type::Kind::Arrow) throw EnumerationError("library functions need an arrow type");
    std::vector<LibraryFn> out;
    const TypePtr& dom = t->left;
    const TypePtr& cod = t->right;
    if (src::equal(dom, cod)) out.push_back({"id", src::parse_expr("fn x. x")});
    if (is_nat(prog.signature, dom) && is_nat(prog.signature, cod)) {
        out.push_back({"succ", src::parse_expr("fn n. Succ(n)")});
        out.push_back({"pred", src::parse_expr("fn n. rec(n; Zero -> u. Zero() | Succ -> (m, r). m)")});
        out.push_back({"recid", src::parse_expr("fn n. rec(n; Zero -> u. Zero() | Succ -> (m, r). Succ(force r))")});
    }
    if (cfg.fn_depth > 0) {
        GenConfig inner = cfg;
        inner.fn_depth = cfg.fn_depth - 1;
        inner.samples = std::min<std::size_t>(cfg.samples, 4);
        if (cod->kind == src::Type::Kind::Arrow) {
            for (auto& g : library_functions(prog, models, cod, inner))
                out.push_back({"const-" + g.name, src::lam("x", g.term)});
        } else {
            auto vs = Generator(prog, models, inner).gen(cod);
            if (!vs.empty()) {
                out.push_back({"const-min", src::lam("x", vs.front())});
                if (vs.size() > 1) out.push_back({"const-max", src::lam("x", vs.back())});
            }
        }
    }
    for (auto& f : out) src::typecheck(prog.signature, {}, f.term, t);
    return out;
}

// ---------------------------------------------------------------- checking

namespace {

class Checker {
  public:
    Checker(const src::Program& prog, const size::Models& models, const GenConfig& cfg)
        : prog_(prog), models_(models), cfg_(cfg), gen_(prog, models, cfg) {}

    SemVal abstract(const ExprPtr& v, const TypePtr& t) {
        if (!has_arrow(t) && t->kind != src::Type::Kind::Susp)
            return size::abstract_value(models_, prog_.signature, t, v);
        auto out = trans::translate_expr(prog_.signature, {}, v, t);
        return interp::interp(models_, {}, out.cexpr, out.ctype).second();
    }

    // value clause; returns the verdict and appends to note on failure
    std::string value_bound(const ExprPtr& v, const TypePtr& t, const SemVal& a, int depth, std::string& note) {
        switch (t->kind) {
        case src::Type::Kind::Unit: return "pass";
        case src::Type::Kind::Prod: {
            auto l = value_bound(v->a, t->left, a.first(), depth, note);
            auto r = value_bound(v->b, t->right, a.second(), depth, note);
            return combine(l, r);
        }
        case src::Type::Kind::Data: {
            sem::Elem sz;
            try {
                sz = size::value_size(models_, prog_.signature, src::Value(v));
            } catch (const EnumerationError&) {
                return "skipped";
            }
            if (sem::elem_leq(sz, a.elem())) return "pass";
            note += "size " + sem::elem_str(sz) + " exceeds potential " + a.str() + "; ";
            return "fail";
        }
        case src::Type::Kind::Susp: {
            auto r = src::evaluate(prog_.signature, v->a, {cfg_.fuel, false});
            std::string verdict = "pass";
            if (!(NInf(r.cost) <= a.first().as_cost())) {
                note += "forced cost " + std::to_string(r.cost) + " exceeds " + a.first().str() + "; ";
                verdict = "fail";
            }
            return combine(verdict, value_bound(r.value.expr(), t->left, a.second(), depth, note));
        }
        case src::Type::Kind::Arrow: {
            if (depth >= cfg_.fn_depth + 1) return "skipped";
            std::string verdict = "sampled";
            auto args = gen_.gen(t->left);
            std::mt19937_64 rng(mix(cfg_.seed, src::to_string(v)));
            for (auto& w : sample(args, 4, rng)) {
                auto r = src::evaluate(prog_.signature, src::app(v, w), {cfg_.fuel, false});
                SemVal q = a.apply(abstract(w, t->left));
                if (!(NInf(r.cost) <= q.first().as_cost())) {
                    note += "applied to " + src::to_string(w) + " costs " + std::to_string(r.cost) + " > " +
                            q.first().str() + "; ";
                    verdict = "fail";
                }
                verdict = combine(verdict, value_bound(r.value.expr(), t->right, q.second(), depth + 1, note));
            }
            return verdict;
        }
        default: return "skipped";
        }
    }

    static std::string combine(const std::string& a, const std::string& b) {
        if (a == "fail" || b == "fail") return "fail";
        if (a == "sampled" || b == "sampled") return "sampled";
        if (a == "skipped" || b == "skipped") return "skipped";
        return "pass";
    }

    BoundReport run(const std::string& name) {
        BoundReport rep;
        rep.def = name;
        rep.seed = cfg_.seed;
        for (const auto& d : models_.signature().datatypes)
            rep.model += (rep.model.empty() ? "" : ",") + d.name + ":" + models_.model(d.name).spec->str() +
                         (models_.model(d.name).semrec ? "/semrec" : "");
        const TypePtr ty = src::def_type(prog_, name);
        std::vector<TypePtr> args;
        TypePtr res = ty;
        while (res->kind == src::Type::Kind::Arrow) {
            args.push_back(res->left);
            res = res->right;
        }
        std::vector<std::vector<ExprPtr>> inputs;
        for (const auto& a : args) inputs.push_back(gen_.gen(a));
        std::mt19937_64 rng(mix(cfg_.seed, name));
        const auto tuples = combos(inputs, kCaseCap, rng);
        const ExprPtr body = src::inlined_def(prog_, name);
        const auto tr = trans::translate_expr(prog_.signature, {}, body, ty);
        const SemVal den = interp::interp(models_, {}, tr.cexpr, tr.ctype);
        for (const auto& tuple : tuples) {
            BoundCase c;
            c.index = rep.cases.size();
            ExprPtr call = body;
            std::string shown;
            for (const auto& v : tuple) {
                call = src::app(call, v);
                shown += (shown.empty() ? "" : " ") + src::to_string(v);
            }
            c.input = shown.empty() ? name : shown;
            try {
                auto r = src::evaluate(prog_.signature, call, {cfg_.fuel, false});
                c.op_cost = r.cost;
                NInf cost = den.first().as_cost();
                SemVal pot = den.second();
                std::string key;
                for (std::size_t i = 0; i < tuple.size(); ++i) {
                    SemVal arg = abstract(tuple[i], args[i]);
                    key += (sem::first_order(arg) ? arg.str() : src::to_string(tuple[i])) + "|";
                    auto hit = applied_.find(key);
                    if (hit == applied_.end()) hit = applied_.emplace(key, pot.apply(arg)).first;
                    const SemVal& q = hit->second;
                    cost = cost + 1 + q.first().as_cost();
                    pot = q.second();
                }
                c.den_cost = cost;
                if (!(NInf(c.op_cost) <= cost)) {
                    c.pass = false;
                    c.note += "operational cost exceeds denoted cost; ";
                }
                c.potential = value_bound(r.value.expr(), res, pot, 0, c.note);
                if (c.potential == "fail") c.pass = false;
            } catch (const Error& e) {
                c.pass = false;
                c.potential = "fail";
                c.note += e.what();
            }
            (c.pass ? rep.passed : rep.failed)++;
            rep.cases.push_back(std::move(c));
        }
        return rep;
    }

  private:
    const src::Program& prog_;
    const size::Models& models_;
    GenConfig cfg_;
    Generator gen_;
    std::map<std::string, SemVal> applied_; // argument prefix -> complexity
};

std::string quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

} // namespace

BoundReport check_bound(const src::Program& prog, const std::string& name, const size::Models& models,
                        const GenConfig& cfg) {
    if (!prog.find_def(name)) throw Error("no def named '" + name + "'");
    return Checker(prog, models, cfg).run(name);
}

std::vector<BoundReport> check_program(const src::Program& prog, const size::Models& models, const GenConfig& cfg) {
    std::vector<BoundReport> out;
    std::set<std::string> done;
    for (auto it = prog.defs.rbegin(); it != prog.defs.rend(); ++it) {
        if (!done.insert(it->name).second) continue;
        if (src::def_type(prog, it->name)->kind != src::Type::Kind::Arrow) continue;
        out.push_back(check_bound(prog, it->name, models, cfg));
    }
    std::reverse(out.begin(), out.end());
    return out;
}

std::string render(const BoundReport& r) {
    std::ostringstream os;
    for (const auto& c : r.cases) {
        os << "case=" << c.index << " def=" << r.def << " input=" << quote(c.input) << " op_cost=" << c.op_cost
           << " den_cost=" << c.den_cost.str() << " potential=" << c.potential << " result=" << (c.pass ? "pass" : "fail");
        if (!c.pass) os << " seed=" << r.seed << " note=" << quote(c.note);
        os << "\n";
    }
    os << "summary program=" << (r.program.empty() ? "-" : r.program) << " def=" << r.def << " model=" << quote(r.model)
       << " seed=" << r.seed << " cases=" << r.cases.size() << " passed=" << r.passed << " failed=" << r.failed << "\n";
    return os.str();
}

} // namespace costrec::harness
