#include "support/gen_terms.hpp"

#include <costrec/eval.hpp>
#include <costrec/interp.hpp>
#include <costrec/preorder.hpp>
#include <costrec/translate.hpp>

#include <doctest.h>

using namespace costrec;

namespace {

cplx::ExprPtr nf(const char* text) { return pre::normalize({}, cplx::parse_expr(text)); }

struct Lists {
    src::Program prog = src::parse_program(
        "datatype nat = Zero of unit | Succ of self; datatype list = Nil of unit | Cons of nat * self;");
    cplx::Signature csig = trans::translate_sig(prog.signature);
    pre::AxiomSet axioms{{pre::length_quotient(csig, "list")}};

    static std::string list_of(int n) {
        std::string s = "Nil()";
        for (int i = 0; i < n; ++i) s = "Cons((" + std::string(i % 2 ? "Zero()" : "Succ(Zero())") + ", " + s + "))";
        return s;
    }
};

} // namespace

TEST_SUITE("preorder") {

TEST_CASE("monoid laws and projections") {
    CHECK(cplx::alpha_equal(nf("0 + (1 + 0)"), cplx::parse_expr("1")));
    CHECK(cplx::alpha_equal(nf("fst (1, x)"), cplx::parse_expr("1")));
    CHECK(cplx::alpha_equal(nf("(x + 1) + (0 + y)"), cplx::parse_expr("x + (1 + y)")));
    CHECK(cplx::alpha_equal(nf("(fn z. z + z) (1 + 1)"), cplx::numeral(4)));
}

TEST_CASE("sums are not reordered") {
    CHECK(cplx::alpha_equal(nf("y + x"), cplx::parse_expr("y + x")));
    CHECK_FALSE(cplx::alpha_equal(nf("y + x"), nf("x + y")));
}

TEST_CASE("the translation of an application normalizes to its cost") {
    auto out = trans::translate_expr({}, {}, src::parse_expr("(fn x. x) ()"), src::Type::unit());
    auto n = pre::normalize({}, out.cexpr);
    CHECK(cplx::alpha_equal(n, cplx::parse_expr("(1, ())")));
    CHECK(pre::cost_literal(n) == 1u);
}

TEST_CASE("step positions") {
    auto s = pre::step({}, cplx::parse_expr("(1, (fn x. x) 0)"));
    REQUIRE(s);
    CHECK(s->second.str() == "beta-fn@1");
    auto m = pre::step({}, cplx::parse_expr("0 + 1"));
    REQUIRE(m);
    CHECK(m->second.rule.rfind("monoid", 0) == 0);
    CHECK_FALSE(pre::step({}, cplx::parse_expr("x + 1")));
}

TEST_CASE_FIXTURE(Lists, "leq with and without list axioms") {
    auto e = cplx::parse_expr("Cons((Zero(), Nil()))");
    CHECK(pre::leq(csig, {}, e, e).derivable);
    CHECK(pre::leq(csig, axioms, cplx::parse_expr("Nil()"), e).derivable);
    CHECK_FALSE(pre::leq(csig, {}, cplx::parse_expr("Nil()"), e).derivable);
    CHECK_FALSE(pre::leq(csig, axioms, cplx::parse_expr("1"), cplx::parse_expr("0")).derivable);

    const std::string branches = "; Nil -> u. 0 | Cons -> p. 1 + snd snd p)";
    auto r0 = cplx::parse_expr("rec(Nil()" + branches);
    auto r1 = cplx::parse_expr("rec(" + list_of(3) + branches);
    auto r = pre::leq(csig, axioms, r0, r1);
    CHECK(r.derivable);
    REQUIRE_FALSE(r.derivation.empty());
    CHECK(r.derivation.front().position == pre::Path{0});
}

TEST_CASE_FIXTURE(Lists, "length-quotient needs a list-shaped datatype") {
    CHECK_NOTHROW(pre::length_quotient(csig, "nat"));
    auto b = trans::translate_sig(src::parse_program("datatype bool = True of unit | False of unit;").signature);
    CHECK_THROWS_AS(pre::length_quotient(b, "bool"), ModelError);
    CHECK_THROWS_AS(pre::length_quotient(csig, "stack"), ModelError);
}

TEST_CASE_FIXTURE(Lists, "property: derivable inequations hold in the length model") {
    auto m = size::load_models("model list = length", csig);
    const std::string branches = "; Nil -> u. (0, ()) | Cons -> p. (1 + fst snd snd p, ()))";
    for (int a = 0; a <= 4; ++a)
        for (int b = 0; b <= 4; ++b) {
            auto e0 = cplx::parse_expr("rec(" + list_of(a) + branches);
            auto e1 = cplx::parse_expr("rec(" + list_of(b) + branches);
            auto r = pre::leq(csig, axioms, e0, e1);
            if (r.derivable) CHECK(sem::leq(interp::interp(m, {}, e0), interp::interp(m, {}, e1)));
            CHECK(r.derivable == (a <= b));
        }
}

TEST_CASE("property: normalization is exact on closed programs") {
    auto p = testing::prelude_program();
    auto csig = trans::translate_sig(p.signature);
    testing::TermGen gen(p.signature, 606);
    for (int i = 0; i < 150; ++i) {
        auto t = gen.type(1);
        auto e = gen.term({}, t, 4);
        auto ev = src::evaluate(p.signature, e);
        auto out = trans::translate_expr(p.signature, {}, e, t);
        auto n = pre::normalize(csig, out.cexpr);
        REQUIRE_MESSAGE(pre::cost_literal(n).has_value(), cplx::to_string(n));
        CHECK_MESSAGE(*pre::cost_literal(n) == ev.cost, src::to_string(e));
    }
}

TEST_CASE("property: normalization is idempotent") {
    auto p = testing::prelude_program();
    auto csig = trans::translate_sig(p.signature);
    testing::TermGen gen(p.signature, 707);
    for (int i = 0; i < 150; ++i) {
        testing::TermGen::Ctx ctx{{"a", gen.type(1)}, {"b", gen.data("list")}};
        auto t = gen.type(1);
        auto e = gen.term(ctx, t, 3);
        auto out = trans::translate_expr(p.signature, ctx, e, t);
        auto once = pre::normalize(csig, out.cexpr);
        auto twice = pre::normalize(csig, once);
        CHECK_MESSAGE(cplx::alpha_equal(once, twice), cplx::to_string(once));
    }
}

TEST_CASE("property: stepwise rewriting agrees with normalization by evaluation") {
    auto p = testing::prelude_program();
    auto csig = trans::translate_sig(p.signature);
    testing::TermGen gen(p.signature, 808);
    int compared = 0;
    for (int i = 0; i < 300 && compared < 60; ++i) {
        auto t = gen.type(1);
        auto e = gen.term({{"a", gen.data("nat")}}, t, 2);
        auto out = trans::translate_expr(p.signature, {{"a", gen.data("nat")}}, e, t);
        if (cplx::size(out.cexpr) > 400) continue;
        auto slow = pre::normalize_stepwise(csig, out.cexpr, 20'000);
        if (pre::step(csig, slow.normal_form)) continue; // budget exhausted
        auto fast = pre::normalize(csig, out.cexpr);
        CHECK_MESSAGE(cplx::alpha_equal(pre::monoid_canonical(slow.normal_form), fast),
                      cplx::to_string(slow.normal_form) << " vs " << cplx::to_string(fast));
        ++compared;
    }
    CHECK(compared >= 30);
}

} // TEST_SUITE
