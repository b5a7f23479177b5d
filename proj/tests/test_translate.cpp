#include "support/gen_terms.hpp"

#include <costrec/complexity.hpp>
#include <costrec/preorder.hpp>
#include <costrec/translate.hpp>

#include <doctest.h>

using namespace costrec;

namespace {

bool same_type(const cplx::TypePtr& t, const char* text) { return cplx::equal(t, cplx::parse_type(text)); }

} // namespace

TEST_SUITE("complexity") {

TEST_CASE("typing of cost terms") {
    cplx::Signature sig;
    CHECK(same_type(cplx::ctypecheck(sig, {}, cplx::parse_expr("0 + 1")), "C"));
    CHECK(same_type(cplx::ctypecheck(sig, {}, cplx::parse_expr("(0, ())")), "C * unit"));
    CHECK(same_type(cplx::ctypecheck(sig, {{"x", cplx::parse_type("unit")}}, cplx::parse_expr("fst (1, x)")), "C"));
    CHECK_THROWS_AS(cplx::ctypecheck(sig, {}, cplx::parse_expr("1 + ()")), TypeError);
}

TEST_CASE("cmap expansion") {
    auto body = cplx::parse_expr("(x, x)");
    auto e0 = cplx::parse_expr("y");
    CHECK(cplx::alpha_equal(cplx::cmap_expand(cplx::parse_functor("self"), "x", body, e0), cplx::parse_expr("(y, y)")));
    CHECK(cplx::alpha_equal(cplx::cmap_expand(cplx::parse_functor("unit"), "x", body, e0), e0));
    auto arrow = cplx::cmap_expand(cplx::parse_functor("unit -> self"), "x", body, cplx::parse_expr("g"));
    REQUIRE(arrow->kind == cplx::Expr::Kind::Lam);
    CHECK(cplx::alpha_equal(arrow, cplx::parse_expr("fn z. (g z, g z)")));
}

TEST_CASE("numerals") {
    CHECK(cplx::numeral_value(cplx::numeral(4)) == 4u);
    CHECK(cplx::numeral_value(cplx::numeral(0)) == 0u);
    CHECK(cplx::numeral_value(cplx::parse_expr("1 + (1 + 1)")) == 3u);
    CHECK_FALSE(cplx::numeral_value(cplx::parse_expr("x + 1")).has_value());
}

} // TEST_SUITE

TEST_SUITE("translation") {

TEST_CASE("types") {
    CHECK(same_type(trans::complexity(src::Type::unit()), "C * unit"));
    CHECK(same_type(trans::potential(src::parse_type("nat -> bool")), "nat -> C * bool"));
    CHECK(same_type(trans::potential(src::parse_type("susp unit")), "C * unit"));
}

TEST_CASE("signatures keep shape and translate arrow arguments") {
    auto p = src::parse_program(
        "datatype nat = Zero of unit | Succ of self;"
        "datatype list = Nil of unit | Cons of nat * self;"
        "datatype strm = SCons of unit -> nat * self;");
    auto c = trans::translate_sig(p.signature);
    CHECK(cplx::equal(c.find("nat")->ctors[1].arg, cplx::parse_functor("self")));
    CHECK(cplx::equal(c.find("list")->ctors[1].arg, cplx::parse_functor("nat * self")));
    CHECK(cplx::equal(c.find("strm")->ctors[0].arg, cplx::parse_functor("unit -> C * (nat * self)")));
}

TEST_CASE("variables and delays are free") {
    src::Context ctx{{"x", src::Type::unit()}};
    auto x = trans::translate_expr({}, ctx, src::parse_expr("x"));
    CHECK(cplx::alpha_equal(x.cexpr, cplx::parse_expr("(0, x)")));
    auto d = trans::translate_expr({}, ctx, src::parse_expr("delay x"));
    CHECK(cplx::alpha_equal(d.cexpr, cplx::parse_expr("(0, (0, x))")));
}

TEST_CASE("an application costs one") {
    src::Signature sig;
    auto out = trans::translate_expr(sig, {}, src::parse_expr("(fn x. x) ()"), src::Type::unit());
    auto nf = pre::normalize(cplx::Signature{}, out.cexpr);
    CHECK(cplx::alpha_equal(nf, cplx::parse_expr("(1, ())")));
}

TEST_CASE("property: translations are well typed at C * <<tau>>") {
    auto p = testing::prelude_program();
    auto csig = trans::translate_sig(p.signature);
    testing::TermGen gen(p.signature, 31337);
    int checked = 0;
    for (int i = 0; i < 500; ++i) {
        auto t = gen.type(2);
        auto e = gen.term({}, t, 4);
        src::typecheck(p.signature, {}, e, t);
        auto out = trans::translate_expr(p.signature, {}, e, t);
        CHECK(cplx::equal(out.ctype, trans::complexity(t)));
        CHECK_NOTHROW(cplx::ctypecheck(csig, {}, out.cexpr, trans::complexity(t)));
        ++checked;
    }
    CHECK(checked == 500);
}

TEST_CASE("property: open terms translate under the translated context") {
    auto p = testing::prelude_program();
    auto csig = trans::translate_sig(p.signature);
    testing::TermGen gen(p.signature, 99);
    for (int i = 0; i < 100; ++i) {
        testing::TermGen::Ctx ctx{{"a", gen.type(1)}, {"b", gen.type(1)}};
        auto t = gen.type(1);
        auto e = gen.term(ctx, t, 3);
        auto out = trans::translate_expr(p.signature, ctx, e, t);
        CHECK_NOTHROW(cplx::ctypecheck(csig, trans::translate_ctx(ctx), out.cexpr, trans::complexity(t)));
    }
}

} // TEST_SUITE
