#include <costrec/lexer.hpp>
#include <costrec/size_model.hpp>

#include <algorithm>
#include <functional>
#include <sstream>

namespace costrec::size {

// ---------------------------------------------------------------- carriers

bool Carrier::leq(const Elem& a, const Elem& b) const { return sem::elem_leq(a, b); }

bool Carrier::lt(const Elem& a, const Elem& b) const { return leq(a, b) && a != b; }

Elem Carrier::join(const Elem& a, const Elem& b) const { return sem::elem_join(a, b); }

Elem Carrier::join_all(const std::vector<Elem>& xs) const {
    Elem out = bottom();
    for (const auto& x : xs) out = join(out, x);
    return out;
}

Elem Carrier::bottom() const { return Elem(width, NInf(0)); }

Elem Carrier::top() const { return Elem(width, NInf::infinity()); }

std::vector<Elem> Carrier::enumerate_upto(const Elem& b) const {
    if (b.size() != width) throw ModelError("carrier width mismatch in enumeration");
    if (!sem::elem_finite(b)) throw EnumerationError("cannot enumerate below an infinite bound " + sem::elem_str(b));
    std::vector<Elem> out{Elem{}};
    for (std::size_t i = 0; i < width; ++i) {
        std::vector<Elem> next;
        for (const auto& prefix : out)
            for (std::uint64_t k = 0; k <= b[i].value(); ++k) {
                Elem e = prefix;
                e.push_back(NInf(k));
                next.push_back(std::move(e));
            }
        out = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------- specs

std::size_t ModelSpec::width() const {
    switch (kind) {
    case Kind::Unitsize: return 0;
    case Kind::Pair: return left->width() + right->width();
    default: return 1;
    }
}

std::string ModelSpec::str() const {
    switch (kind) {
    case Kind::Ctors: return "ctors";
    case Kind::Length: return "length";
    case Kind::Nodes: return "nodes";
    case Kind::Height: return "height";
    case Kind::Unitsize: return "unitsize";
    case Kind::Ordinal: return "ordinal";
    case Kind::Labelmax: return "labelmax " + label;
    case Kind::Pair: return "pair(" + left->str() + ", " + right->str() + ")";
    }
    return "?";
}

namespace {

ModelSpecPtr parse_spec(TokenStream& ts) {
    const Token& t = ts.peek();
    if (t.kind != Token::Kind::LIdent) ts.fail("expected a size model name, found " + describe(t));
    ts.next();
    auto spec = std::make_shared<ModelSpec>();
    using K = ModelSpec::Kind;
    if (t.text == "ctors")
        spec->kind = K::Ctors;
    else if (t.text == "length")
        spec->kind = K::Length;
    else if (t.text == "nodes")
        spec->kind = K::Nodes;
    else if (t.text == "height")
        spec->kind = K::Height;
    else if (t.text == "unitsize")
        spec->kind = K::Unitsize;
    else if (t.text == "ordinal")
        spec->kind = K::Ordinal;
    else if (t.text == "labelmax") {
        spec->kind = K::Labelmax;
        const bool parens = ts.accept("(");
        const Token& l = ts.peek();
        if (l.kind != Token::Kind::LIdent) ts.fail("labelmax needs a label datatype, found " + describe(l));
        ts.next();
        spec->label = l.text;
        if (parens) ts.expect(")");
    } else if (t.text == "pair") {
        spec->kind = K::Pair;
        ts.expect("(");
        spec->left = parse_spec(ts);
        if (!ts.accept(",")) throw ModelError("pair model needs exactly two components");
        spec->right = parse_spec(ts);
        if (!ts.accept(")")) throw ModelError("pair model needs exactly two components");
    } else {
        throw ModelError("unknown size model '" + t.text + "'");
    }
    return spec;
}

bool functor_has_self(const cplx::FunctorPtr& f) {
    if (!f) return false;
    if (f->kind == cplx::Functor::Kind::Self) return true;
    return functor_has_self(f->left) || functor_has_self(f->right);
}

// Direct self positions; a self under an arrow counts as unbounded (-1).
int self_positions(const cplx::FunctorPtr& f) {
    switch (f->kind) {
    case cplx::Functor::Kind::Self: return 1;
    case cplx::Functor::Kind::Const: return 0;
    case cplx::Functor::Kind::Prod: {
        const int l = self_positions(f->left);
        const int r = self_positions(f->right);
        return l < 0 || r < 0 ? -1 : l + r;
    }
    case cplx::Functor::Kind::Arrow: return functor_has_self(f->left) ? -1 : 0;
    }
    return 0;
}

bool spec_strict(const ModelSpec& s) {
    using K = ModelSpec::Kind;
    switch (s.kind) {
    case K::Unitsize:
    case K::Labelmax: return false;
    case K::Pair: return spec_strict(*s.left) || spec_strict(*s.right);
    default: return true;
    }
}

bool spec_has(const ModelSpec& s, ModelSpec::Kind k) {
    if (s.kind == k) return true;
    if (s.kind == ModelSpec::Kind::Pair) return spec_has(*s.left, k) || spec_has(*s.right, k);
    return false;
}

bool spec_labels(const ModelSpec& s, const std::string& label, std::size_t label_width) {
    using K = ModelSpec::Kind;
    switch (s.kind) {
    case K::Ctors: return label_width > 0;
    case K::Labelmax: return s.label == label && label_width > 0;
    case K::Pair: return spec_labels(*s.left, label, label_width) || spec_labels(*s.right, label, label_width);
    default: return false;
    }
}

NInf scalar(const Elem& e) { return e.empty() ? NInf(0) : e[0]; }

template <typename T> std::vector<std::vector<T>> cartesian(const std::vector<std::vector<T>>& options) {
    std::vector<std::vector<T>> out{{}};
    for (const auto& opts : options) {
        std::vector<std::vector<T>> next;
        for (const auto& prefix : out)
            for (const auto& o : opts) {
                auto row = prefix;
                row.push_back(o);
                next.push_back(std::move(row));
            }
        out = std::move(next);
    }
    return out;
}

SemVal table_fn(std::vector<SemVal> points, std::vector<SemVal> outs) {
    return SemVal::fn([points = std::move(points), outs = std::move(outs)](const SemVal& x) {
        for (std::size_t i = 0; i < points.size(); ++i)
            if (points[i] == x) return outs[i];
        throw ModelError("argument " + x.str() + " outside a finite function table");
    });
}

} // namespace

ModelSpecPtr parse_model_spec(std::string_view text) {
    TokenStream ts(tokenize(text));
    auto spec = parse_spec(ts);
    if (!ts.at_end()) throw ModelError("unexpected " + describe(ts.peek()) + " after model '" + spec->str() + "'");
    return spec;
}

// ---------------------------------------------------------------- models

Models::Models(cplx::Signature csig) : csig_(std::move(csig)) {
    auto ctors = std::make_shared<ModelSpec>();
    for (const auto& d : csig_.datatypes) {
        SizeModel m;
        m.datatype = d.name;
        m.spec = ctors;
        m.carrier.width = 1;
        models_[d.name] = m;
    }
    validate();
}

const SizeModel& Models::model(const std::string& datatype) const {
    auto it = models_.find(datatype);
    if (it == models_.end()) throw ModelError("no size model for datatype '" + datatype + "'");
    return it->second;
}

void Models::set_model(const std::string& datatype, ModelSpecPtr spec) {
    auto it = models_.find(datatype);
    if (it == models_.end()) throw ModelError("unknown datatype '" + datatype + "' in model configuration");
    it->second.spec = std::move(spec);
    it->second.carrier.width = it->second.spec->width();
}

void Models::set_semrec(const std::string& datatype) {
    auto it = models_.find(datatype);
    if (it == models_.end()) throw ModelError("unknown datatype '" + datatype + "' in model configuration");
    it->second.semrec = true;
}

void Models::add_axiom(Axiom a) {
    if (!csig_.find(a.datatype)) throw ModelError("unknown datatype '" + a.datatype + "' in axiom");
    if (a.name != "length-quotient") throw ModelError("unknown axiom set '" + a.name + "'");
    const auto* d = csig_.find(a.datatype);
    int nullary = 0;
    int unary = 0;
    for (const auto& c : d->ctors) {
        const int n = self_positions(c.arg);
        if (n == 0) ++nullary;
        if (n == 1) ++unary;
    }
    if (d->ctors.size() != 2 || nullary != 1 || unary != 1)
        throw ModelError("length-quotient needs a list-shaped datatype; '" + a.datatype + "' is not");
    axioms_.push_back(std::move(a));
}

bool Models::list_shaped(const std::string& datatype) const {
    const auto* d = csig_.find(datatype);
    if (!d || d->ctors.size() != 2) return false;
    int nil = 0;
    int cons = 0;
    for (const auto& c : d->ctors) {
        const int n = self_positions(c.arg);
        if (n == 0) ++nil;
        if (n == 1) ++cons;
    }
    return nil == 1 && cons == 1 && model(datatype).spec->kind == ModelSpec::Kind::Length;
}

void Models::validate() {
    warnings_.clear();
    for (auto& [name, m] : models_) {
        const auto* d = csig_.find(name);
        const ModelSpec& spec = *m.spec;
        if (spec.kind == ModelSpec::Kind::Labelmax)
            throw ModelError("labelmax is only usable inside pair (datatype '" + name + "')");
        std::function<void(const ModelSpec&)> check_labels = [&](const ModelSpec& s) {
            if (s.kind == ModelSpec::Kind::Labelmax && !csig_.find(s.label))
                throw ModelError("labelmax refers to unknown datatype '" + s.label + "'");
            if (s.kind == ModelSpec::Kind::Pair) {
                check_labels(*s.left);
                check_labels(*s.right);
            }
        };
        check_labels(spec);
        bool has_rec = false;
        for (const auto& c : d->ctors) {
            const int n = self_positions(c.arg);
            has_rec = has_rec || n != 0;
            if (spec_has(spec, ModelSpec::Kind::Length) && (n < 0 || n > 1))
                throw ModelError("length model needs at most one recursive position per constructor; '" + c.name +
                                 "' of datatype '" + name + "' has more");
        }
        m.strict_descent = !has_rec || spec_strict(spec);
        if (!m.strict_descent)
            warnings_.push_back("model '" + spec.str() + "' for datatype '" + name +
                                "' is not strictly descending; recursion over it denotes top");
        if (spec_has(spec, ModelSpec::Kind::Ordinal))
            warnings_.push_back("model 'ordinal' for datatype '" + name + "' is recognized but cannot be interpreted");
        if (m.semrec && !list_shaped(name))
            throw ModelError("semrec needs a list-shaped datatype with the length model; '" + name + "' is not");
    }
}

void Models::collect_const(const cplx::TypePtr& t, const SemVal& v, Collected& out) const {
    if (t->kind == cplx::Type::Kind::Data && v.kind() == SemVal::Kind::Size) {
        out.labels.emplace_back(t->name, v.elem());
    } else if (t->kind == cplx::Type::Kind::Prod && v.kind() == SemVal::Kind::Tuple) {
        collect_const(t->left, v.first(), out);
        collect_const(t->right, v.second(), out);
    }
}

void Models::collect(const cplx::FunctorPtr& f, const SemVal& v, const std::string& self, Collected& out) const {
    switch (f->kind) {
    case cplx::Functor::Kind::Self:
        if (v.kind() != SemVal::Kind::Size || v.datatype() != self)
            throw ModelError("expected a size of '" + self + "' at a recursive position, found " + v.str());
        out.rec.push_back(v.elem());
        return;
    case cplx::Functor::Kind::Const: collect_const(f->type, v, out); return;
    case cplx::Functor::Kind::Prod:
        collect(f->left, v.first(), self, out);
        collect(f->right, v.second(), self, out);
        return;
    case cplx::Functor::Kind::Arrow:
        if (!functor_has_self(f->left)) return;
        for (const auto& d : finite_values(f->type)) collect(f->left, v.apply(d), self, out);
        return;
    }
}

Elem Models::apply_spec(const ModelSpec& spec, std::size_t offset, const Collected& c, bool has_rec) const {
    using K = ModelSpec::Kind;
    auto rec_at = [&](const Elem& e) { return e.at(offset); };
    switch (spec.kind) {
    case K::Ctors: {
        NInf n = 1;
        for (const auto& r : c.rec) n += rec_at(r);
        for (const auto& [dt, e] : c.labels) n += scalar(e);
        return {n};
    }
    case K::Length:
        if (!has_rec) return {NInf(0)};
        if (c.rec.size() != 1) throw ModelError("length model applied to a constructor with several recursive positions");
        return {rec_at(c.rec[0]) + 1};
    case K::Nodes: {
        if (!has_rec) return {NInf(0)};
        NInf n = 1;
        for (const auto& r : c.rec) n += rec_at(r);
        return {n};
    }
    case K::Height: {
        if (!has_rec) return {NInf(0)};
        NInf m = 0;
        for (const auto& r : c.rec) m = costrec::join(m, rec_at(r));
        return {m + 1};
    }
    case K::Unitsize: return {};
    case K::Labelmax: {
        NInf m = 0;
        for (const auto& [dt, e] : c.labels)
            if (dt == spec.label) m = costrec::join(m, scalar(e));
        for (const auto& r : c.rec) m = costrec::join(m, rec_at(r));
        return {m};
    }
    case K::Pair: {
        Elem l = apply_spec(*spec.left, offset, c, has_rec);
        Elem r = apply_spec(*spec.right, offset + spec.left->width(), c, has_rec);
        l.insert(l.end(), r.begin(), r.end());
        return l;
    }
    case K::Ordinal: throw ModelError("the ordinal size model is recognized but not interpretable");
    }
    return {};
}

Elem Models::size_of(const std::string& ctor, const SemVal& arg) const {
    auto ref = csig_.find_ctor(ctor);
    if (!ref) throw ModelError("unknown constructor '" + ctor + "'");
    const auto& dt = ref->datatype->name;
    Collected c;
    collect(ref->ctor().arg, arg, dt, c);
    return apply_spec(*model(dt).spec, 0, c, functor_has_self(ref->ctor().arg));
}

bool Models::label_relevant(const std::string& datatype, const std::string& label) const {
    return spec_labels(*model(datatype).spec, label, model(label).carrier.width);
}

std::vector<SemVal> Models::enum_const(const cplx::TypePtr& t, const std::string& self, NInf label_cap) const {
    switch (t->kind) {
    case cplx::Type::Kind::Data: {
        const auto& lm = model(t->name);
        if (!label_relevant(self, t->name)) return {SemVal::size(t->name, lm.carrier.top())};
        std::vector<SemVal> out;
        for (std::uint64_t k = 0; k <= label_cap.value(); ++k) {
            Elem e = lm.carrier.top();
            e[0] = NInf(k);
            out.push_back(SemVal::size(t->name, e));
        }
        return out;
    }
    case cplx::Type::Kind::Prod: {
        std::vector<SemVal> out;
        for (const auto& l : enum_const(t->left, self, label_cap))
            for (const auto& r : enum_const(t->right, self, label_cap)) out.push_back(SemVal::tuple(l, r));
        return out;
    }
    default: return {top(t)};
    }
}

std::vector<SemVal> Models::enum_functor(const cplx::FunctorPtr& f, const std::string& self, const Elem& bound,
                                         NInf label_cap) const {
    switch (f->kind) {
    case cplx::Functor::Kind::Self: {
        std::vector<SemVal> out;
        for (auto& e : model(self).carrier.enumerate_upto(bound)) out.push_back(SemVal::size(self, std::move(e)));
        return out;
    }
    case cplx::Functor::Kind::Const: return enum_const(f->type, self, label_cap);
    case cplx::Functor::Kind::Prod: {
        std::vector<SemVal> out;
        auto rs = enum_functor(f->right, self, bound, label_cap);
        for (const auto& l : enum_functor(f->left, self, bound, label_cap))
            for (const auto& r : rs) out.push_back(SemVal::tuple(l, r));
        return out;
    }
    case cplx::Functor::Kind::Arrow: {
        std::vector<SemVal> points;
        try {
            points = finite_values(f->type);
        } catch (const EnumerationError&) {
            if (!functor_has_self(f->left)) return {top(cplx::apply(f, cplx::Type::data(self)))};
            throw EnumerationError("cannot enumerate unfoldings of '" + self + "': arrow position " +
                                   cplx::to_string(f) + " ranges over an infinite domain " +
                                   cplx::to_string(f->type));
        }
        auto opts = enum_functor(f->left, self, bound, label_cap);
        std::vector<std::vector<SemVal>> per_point(points.size(), opts);
        std::vector<SemVal> out;
        for (auto& row : cartesian(per_point)) out.push_back(table_fn(points, std::move(row)));
        return out;
    }
    }
    return {};
}

std::vector<AbstractUnfolding> Models::unfoldings(const std::string& datatype, const Elem& bound) const {
    const auto* d = csig_.find(datatype);
    if (!d) throw ModelError("unknown datatype '" + datatype + "'");
    const auto& m = model(datatype);
    if (bound.size() != m.carrier.width) throw ModelError("bound has the wrong width for '" + datatype + "'");
    if (!sem::elem_finite(bound))
        throw EnumerationError("cannot enumerate unfoldings of '" + datatype + "' below infinite bound " +
                               sem::elem_str(bound));
    NInf cap = 0;
    for (const auto& b : bound) cap = costrec::join(cap, b);
    std::vector<AbstractUnfolding> out;
    for (const auto& c : d->ctors)
        for (auto& arg : enum_functor(c.arg, datatype, bound, cap))
            if (m.carrier.leq(size_of(c.name, arg), bound)) out.push_back({c.name, std::move(arg)});
    return out;
}

SemVal Models::bottom(const cplx::TypePtr& t) const {
    switch (t->kind) {
    case cplx::Type::Kind::Cost: return SemVal::cost(0);
    case cplx::Type::Kind::Prod: return SemVal::tuple(bottom(t->left), bottom(t->right));
    case cplx::Type::Kind::Arrow: {
        SemVal b = bottom(t->right);
        return SemVal::fn([b](const SemVal&) { return b; });
    }
    case cplx::Type::Kind::Data: return SemVal::size(t->name, model(t->name).carrier.bottom());
    default: return SemVal::unit();
    }
}

SemVal Models::top(const cplx::TypePtr& t) const {
    switch (t->kind) {
    case cplx::Type::Kind::Cost: return SemVal::cost(NInf::infinity());
    case cplx::Type::Kind::Prod: return SemVal::tuple(top(t->left), top(t->right));
    case cplx::Type::Kind::Arrow: {
        SemVal b = top(t->right);
        return SemVal::fn([b](const SemVal&) { return b; });
    }
    case cplx::Type::Kind::Data: return SemVal::size(t->name, model(t->name).carrier.top());
    default: return SemVal::unit();
    }
}

std::vector<SemVal> Models::finite_values(const cplx::TypePtr& t) const {
    switch (t->kind) {
    case cplx::Type::Kind::Unit: return {SemVal::unit()};
    case cplx::Type::Kind::Prod: {
        std::vector<SemVal> out;
        auto rs = finite_values(t->right);
        for (const auto& l : finite_values(t->left))
            for (const auto& r : rs) out.push_back(SemVal::tuple(l, r));
        return out;
    }
    case cplx::Type::Kind::Data:
        if (model(t->name).carrier.width == 0) return {SemVal::size(t->name, {})};
        break;
    default: break;
    }
    throw EnumerationError("type " + cplx::to_string(t) + " has an infinite interpretation");
}

// ---------------------------------------------------------------- config

namespace {
std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}
} // namespace

Models load_models(std::string_view config, const cplx::Signature& csig) {
    Models models(csig);
    std::string text(config);
    std::replace(text.begin(), text.end(), ';', '\n');
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto fail = [&](const std::string& msg) {
            throw ModelError("model configuration line " + std::to_string(lineno) + ": " + msg);
        };
        std::istringstream words(line);
        std::string directive;
        std::string datatype;
        words >> directive >> datatype;
        if (directive == "semrec") {
            std::string extra;
            if (datatype.empty() || (words >> extra)) fail("expected 'semrec <datatype>'");
            if (!csig.find(datatype)) fail("unknown datatype '" + datatype + "'");
            models.set_semrec(datatype);
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) fail("expected '<directive> <datatype> = <value>'");
        datatype = trim(line.substr(directive.size(), eq - directive.size()));
        const std::string rhs = trim(line.substr(eq + 1));
        if (!csig.find(datatype)) fail("unknown datatype '" + datatype + "'");
        if (directive == "model") {
            try {
                models.set_model(datatype, parse_model_spec(rhs));
            } catch (const Error& e) {
                fail(std::string("bad model: ") + e.what());
            }
        } else if (directive == "axiom") {
            try {
                models.add_axiom({datatype, rhs});
            } catch (const ModelError& e) {
                fail(e.what());
            }
        } else {
            fail("unknown directive '" + directive + "'");
        }
    }
    models.validate();
    return models;
}

// ---------------------------------------------------------------- abstraction

namespace {

SemVal abstract(const Models& models, const src::Signature& sig, const src::TypePtr& t, const src::ExprPtr& v,
                bool nested);

SemVal abstract_functor(const Models& models, const src::Signature& sig, const src::FunctorPtr& f,
                        const std::string& self, const src::ExprPtr& v) {
    switch (f->kind) {
    case src::Functor::Kind::Self: return abstract(models, sig, src::Type::data(self), v, true);
    case src::Functor::Kind::Const: return abstract(models, sig, f->type, v, true);
    case src::Functor::Kind::Prod:
        if (v->kind != src::Expr::Kind::Pair) throw ModelError("value does not match its constructor argument");
        return SemVal::tuple(abstract_functor(models, sig, f->left, self, v->a),
                             abstract_functor(models, sig, f->right, self, v->b));
    case src::Functor::Kind::Arrow:
        throw EnumerationError("cannot abstract a value of '" + self + "' with a function at an arrow position");
    }
    return SemVal::unit();
}

SemVal abstract(const Models& models, const src::Signature& sig, const src::TypePtr& t, const src::ExprPtr& v,
                bool nested) {
    switch (t->kind) {
    case src::Type::Kind::Unit: return SemVal::unit();
    case src::Type::Kind::Prod:
        if (v->kind != src::Expr::Kind::Pair) throw ModelError("value " + src::to_string(v) + " is not a pair");
        return SemVal::tuple(abstract(models, sig, t->left, v->a, nested), abstract(models, sig, t->right, v->b, nested));
    case src::Type::Kind::Data: {
        if (v->kind != src::Expr::Kind::Ctor)
            throw ModelError("value " + src::to_string(v) + " is not a constructor of '" + t->name + "'");
        auto ref = sig.find_ctor(v->name);
        if (!ref) throw ModelError("unknown constructor '" + v->name + "'");
        SemVal arg = abstract_functor(models, sig, ref->ctor().arg, t->name, v->a);
        return SemVal::size(t->name, models.size_of(v->name, arg));
    }
    default:
        // functions and suspensions inside constants do not contribute to sizes
        if (nested) return SemVal::unit();
        throw ModelError("cannot abstract a value of higher type " + src::to_string(t));
    }
}

} // namespace

SemVal abstract_value(const Models& models, const src::Signature& sig, const src::TypePtr& t, const src::ExprPtr& v) {
    return abstract(models, sig, t, v, false);
}

Elem value_size(const Models& models, const src::Signature& sig, const src::Value& v) {
    const auto& e = v.expr();
    if (e->kind != src::Expr::Kind::Ctor) throw ModelError("value_size needs a constructor value");
    auto ref = sig.find_ctor(e->name);
    if (!ref) throw ModelError("unknown constructor '" + e->name + "'");
    return abstract_value(models, sig, src::Type::data(ref->datatype->name), e).elem();
}

} // namespace costrec::size
