#pragma once

// Writer-monad translation from the source language into the complexity
// language. A translated term has type C * <<tau>>: cost, then potential.

#include <costrec/complexity.hpp>
#include <costrec/source.hpp>
#include <costrec/typecheck.hpp>

#include <utility>

namespace costrec::trans {

/// <<tau>>
cplx::TypePtr potential(const src::TypePtr& t);
/// ||tau|| = C * <<tau>>
cplx::TypePtr complexity(const src::TypePtr& t);
/// (||tau||, <<tau>>)
std::pair<cplx::TypePtr, cplx::TypePtr> translate_type(const src::TypePtr& t);

/// <<phi>>; arrows become <<tau>> -> C * <<phi>>.
cplx::FunctorPtr potential(const src::FunctorPtr& f);

cplx::Signature translate_sig(const src::Signature& sig);
cplx::Context translate_ctx(const src::Context& ctx);

/// [[e]], syntax-directed and unsimplified.
cplx::ExprPtr translate(const src::ExprPtr& e);

struct TranslationOutput {
    cplx::ExprPtr cexpr;
    cplx::TypePtr ctype;
};

/// Typechecks `e` and translates it; ctype is C * <<tau>>.
TranslationOutput translate_expr(const src::Signature& sig, const src::Context& ctx, const src::ExprPtr& e,
                                 const src::TypePtr& expected = nullptr);

/// a +_c E = (a + fst E, snd E)
cplx::ExprPtr cost_plus(const cplx::ExprPtr& a, const cplx::ExprPtr& e);

} // namespace costrec::trans
