#pragma once

// Size-based denotational interpreter for the complexity language.

#include <costrec/complexity.hpp>
#include <costrec/semval.hpp>
#include <costrec/size_model.hpp>
#include <costrec/source.hpp>

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace costrec::interp {

using sem::Elem;
using sem::SemVal;

struct Binding {
    std::string name;
    cplx::TypePtr type;
    SemVal value;
};

/// Later bindings shadow earlier ones.
using Env = std::vector<Binding>;

/// [[e]] in env. The returned value may hold closures referring to
/// `models`, which must outlive it.
SemVal interp(const size::Models& models, const Env& env, const cplx::ExprPtr& e,
              const cplx::TypePtr& expected = nullptr);

/// [[rec]] at each scrutinee bound, sharing one memo table. The scrutinee
/// expression of `rec` only fixes its datatype.
std::vector<SemVal> interp_rec(const size::Models& models, const Env& env, const cplx::ExprPtr& rec,
                               const std::vector<Elem>& bounds, const cplx::TypePtr& expected = nullptr);

/// semrec(0, a, f) = a; semrec(n+1, a, f) = a v f(n, semrec(n, a, f)).
SemVal semrec(std::uint64_t n, const SemVal& a, const std::function<SemVal(std::uint64_t, const SemVal&)>& f);

/// Semantic functorial action: applies `on_self` at every recursive position
/// of a value of shape [[phi[X]]]. Arrow positions range over finite domains.
SemVal fmap(const size::Models& models, const cplx::FunctorPtr& phi, const SemVal& v,
            const std::function<SemVal(const SemVal&)>& on_self);

struct TabRow {
    Elem size;
    NInf cost;
    std::string potential;
};

/// Cost and potential of calling def `name` on an argument of each size in
/// [lo, hi]^width. The def's argument must be a datatype.
std::vector<TabRow> tabulate(const src::Program& prog, const std::string& name, const size::Models& models,
                             std::uint64_t lo, std::uint64_t hi);

} // namespace costrec::interp
