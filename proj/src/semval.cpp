#include <costrec/error.hpp>
#include <costrec/semval.hpp>

namespace costrec::sem {

bool elem_leq(const Elem& a, const Elem& b) {
    if (a.size() != b.size()) throw ModelError("carrier width mismatch in comparison");
    for (std::size_t i = 0; i < a.size(); ++i)
        if (!(a[i] <= b[i])) return false;
    return true;
}

Elem elem_join(const Elem& a, const Elem& b) {
    if (a.size() != b.size()) throw ModelError("carrier width mismatch in join");
    Elem out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = costrec::join(a[i], b[i]);
    return out;
}

bool elem_finite(const Elem& a) {
    for (const auto& x : a)
        if (x.is_inf()) return false;
    return true;
}

std::string elem_str(const Elem& a) {
    if (a.empty()) return "*";
    if (a.size() == 1) return a[0].str();
    std::string s = "(";
    for (std::size_t i = 0; i < a.size(); ++i) s += (i ? ", " : "") + a[i].str();
    return s + ")";
}

struct SemVal::Node {
    Kind kind = Kind::Unit;
    NInf cost;
    std::vector<SemVal> kids; // Tuple components
    std::string datatype;
    Elem elem;
    Fun fn;
};

SemVal::SemVal() : SemVal(unit()) {}
SemVal::SemVal(std::shared_ptr<const Node> n) : n_(std::move(n)) {}

SemVal SemVal::cost(NInf c) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Cost;
    n->cost = c;
    return SemVal(n);
}

SemVal SemVal::unit() {
    static const SemVal u(std::shared_ptr<const Node>(std::make_shared<Node>()));
    return u;
}

SemVal SemVal::tuple(SemVal a, SemVal b) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Tuple;
    n->kids = {std::move(a), std::move(b)};
    return SemVal(n);
}

SemVal SemVal::size(std::string datatype, Elem e) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Size;
    n->datatype = std::move(datatype);
    n->elem = std::move(e);
    return SemVal(n);
}

SemVal SemVal::fn(Fun f) {
    auto n = std::make_shared<Node>();
    n->kind = Kind::Fn;
    n->fn = std::move(f);
    return SemVal(n);
}

SemVal::Kind SemVal::kind() const { return n_->kind; }

NInf SemVal::as_cost() const {
    if (n_->kind != Kind::Cost) throw ModelError("expected a cost, found " + str());
    return n_->cost;
}

const SemVal& SemVal::first() const {
    if (n_->kind != Kind::Tuple) throw ModelError("expected a tuple, found " + str());
    return n_->kids[0];
}

const SemVal& SemVal::second() const {
    if (n_->kind != Kind::Tuple) throw ModelError("expected a tuple, found " + str());
    return n_->kids[1];
}

const std::string& SemVal::datatype() const {
    if (n_->kind != Kind::Size) throw ModelError("expected a size, found " + str());
    return n_->datatype;
}

const Elem& SemVal::elem() const {
    if (n_->kind != Kind::Size) throw ModelError("expected a size, found " + str());
    return n_->elem;
}

SemVal SemVal::apply(const SemVal& arg) const {
    if (n_->kind != Kind::Fn) throw ModelError("expected a function, found " + str());
    return n_->fn(arg);
}

std::string SemVal::str() const {
    switch (n_->kind) {
    case Kind::Cost: return n_->cost.str();
    case Kind::Unit: return "()";
    case Kind::Fn: return "<fn>";
    case Kind::Size: return elem_str(n_->elem);
    case Kind::Tuple: {
        std::string s = "(" + n_->kids[0].str();
        const SemVal* cur = &n_->kids[1];
        while (cur->kind() == Kind::Tuple) {
            s += ", " + cur->first().str();
            cur = &cur->second();
        }
        return s + ", " + cur->str() + ")";
    }
    }
    return "?";
}

bool operator==(const SemVal& a, const SemVal& b) {
    if (a.n_ == b.n_) return true;
    if (a.kind() != b.kind()) return false;
    switch (a.kind()) {
    case SemVal::Kind::Cost: return a.n_->cost == b.n_->cost;
    case SemVal::Kind::Unit: return true;
    case SemVal::Kind::Tuple: return a.n_->kids[0] == b.n_->kids[0] && a.n_->kids[1] == b.n_->kids[1];
    case SemVal::Kind::Size: return a.n_->datatype == b.n_->datatype && a.n_->elem == b.n_->elem;
    case SemVal::Kind::Fn: return false;
    }
    return false;
}

SemVal join(const SemVal& a, const SemVal& b) {
    if (a.kind() != b.kind()) throw ModelError("join of values of different shapes: " + a.str() + ", " + b.str());
    switch (a.kind()) {
    case SemVal::Kind::Cost: return SemVal::cost(costrec::join(a.as_cost(), b.as_cost()));
    case SemVal::Kind::Unit: return a;
    case SemVal::Kind::Tuple: return SemVal::tuple(join(a.first(), b.first()), join(a.second(), b.second()));
    case SemVal::Kind::Size:
        if (a.datatype() != b.datatype()) throw ModelError("join of sizes of different datatypes");
        return SemVal::size(a.datatype(), elem_join(a.elem(), b.elem()));
    case SemVal::Kind::Fn:
        return SemVal::fn([a, b](const SemVal& x) { return join(a.apply(x), b.apply(x)); });
    }
    return a;
}

SemVal join_all(const std::vector<SemVal>& xs) {
    if (xs.empty()) throw ModelError("join of no values");
    if (xs.size() == 1) return xs[0];
    if (xs[0].kind() == SemVal::Kind::Fn)
        return SemVal::fn([xs](const SemVal& x) {
            std::vector<SemVal> ys;
            ys.reserve(xs.size());
            for (const auto& f : xs) ys.push_back(f.apply(x));
            return join_all(ys);
        });
    if (xs[0].kind() == SemVal::Kind::Tuple) {
        std::vector<SemVal> ls, rs;
        for (const auto& v : xs) {
            ls.push_back(v.first());
            rs.push_back(v.second());
        }
        return SemVal::tuple(join_all(ls), join_all(rs));
    }
    SemVal acc = xs[0];
    for (std::size_t i = 1; i < xs.size(); ++i) acc = join(acc, xs[i]);
    return acc;
}

bool first_order(const SemVal& v) {
    switch (v.kind()) {
    case SemVal::Kind::Fn: return false;
    case SemVal::Kind::Tuple: return first_order(v.first()) && first_order(v.second());
    default: return true;
    }
}

SemVal memoize(const SemVal& f) {
    if (f.kind() != SemVal::Kind::Fn) return f;
    auto cache = std::make_shared<std::vector<std::pair<SemVal, SemVal>>>();
    return SemVal::fn([f, cache](const SemVal& x) {
        if (!first_order(x)) return f.apply(x);
        for (const auto& [k, v] : *cache)
            if (k == x) return v;
        SemVal r = f.apply(x);
        cache->emplace_back(x, r);
        return r;
    });
}

bool leq(const SemVal& a, const SemVal& b) {
    if (a.kind() != b.kind()) throw ModelError("comparison of values of different shapes");
    switch (a.kind()) {
    case SemVal::Kind::Cost: return a.as_cost() <= b.as_cost();
    case SemVal::Kind::Unit: return true;
    case SemVal::Kind::Tuple: return leq(a.first(), b.first()) && leq(a.second(), b.second());
    case SemVal::Kind::Size: return elem_leq(a.elem(), b.elem());
    case SemVal::Kind::Fn: throw ModelError("functions are not compared directly; sample their arguments");
    }
    return false;
}

} // namespace costrec::sem
