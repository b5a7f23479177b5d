#include "support/gen_terms.hpp"

#include <costrec/eval.hpp>
#include <costrec/parser.hpp>
#include <costrec/typecheck.hpp>

#include <doctest.h>

using namespace costrec;

namespace {

const char* kMem = R"(
datatype tree = Emp of unit | Node of int * self * self;

def mem : tree -> int -> bool = fn t. fn x. rec(t;
    Emp -> u. False()
  | Node -> (y, (t0, r0), (t1, r1)).
      rec(eqint (y, x);
          True -> u. True()
        | False -> u. rec(force r0; True -> u. True() | False -> u. force r1)));
)";

src::EvalResult run(const src::Program& p, const std::string& e) {
    auto expr = src::parse_expr(e);
    src::typecheck(p.signature, src::program_context(p), expr);
    return src::evaluate(p.signature, src::inline_defs(p, expr));
}

} // namespace

TEST_SUITE("source") {

TEST_CASE("datatype declarations parse into signatures") {
    auto p = src::parse_program("datatype bool = True of unit | False of unit;");
    REQUIRE(p.signature.datatypes.size() == 1);
    const auto& d = p.signature.datatypes[0];
    CHECK(d.name == "bool");
    REQUIRE(d.ctors.size() == 2);
    for (const auto& c : d.ctors) {
        CHECK(c.arg->kind == src::Functor::Kind::Const);
        CHECK(c.arg->type->kind == src::Type::Kind::Unit);
    }
}

TEST_CASE("defs and recursors parse") {
    auto p = src::parse_program("def id = fn x. x;");
    REQUIRE(p.defs.size() == 1);
    CHECK(p.defs[0].body->kind == src::Expr::Kind::Lam);

    auto e = src::parse_expr("rec(t; Emp -> x. False() | Node -> p. p)");
    REQUIRE(e->kind == src::Expr::Kind::Rec);
    CHECK(e->branches.size() == 2);
    CHECK(e->branches[1].ctor == "Node");
}

TEST_CASE("printing round-trips through the parser") {
    auto prog = testing::prelude_program();
    testing::TermGen gen(prog.signature, 11);
    for (int i = 0; i < 200; ++i) {
        auto t = gen.type(2);
        auto e = gen.term({}, t, 3);
        auto back = src::parse_expr(src::to_string(e));
        CHECK_MESSAGE(src::alpha_equal(e, back), src::to_string(e));
    }
}

TEST_CASE("signature well-formedness") {
    CHECK(src::wf_signature(src::parse_program("datatype nat = Zero of unit | Succ of self;").signature).empty());

    auto fwd = src::wf_signature(src::parse_program("datatype a = A of b; datatype b = B of unit;").signature);
    REQUIRE(fwd.size() == 1);
    CHECK(fwd[0].ctor == "A");

    auto strm = src::parse_program(
        "datatype nat = Zero of unit | Succ of self; datatype strm = Cons of unit -> nat * self;");
    CHECK(src::wf_signature(strm.signature).empty());
    const auto& arg = strm.signature.find("strm")->ctors[0].arg;
    CHECK(arg->kind == src::Functor::Kind::Arrow);
    CHECK(arg->left->kind == src::Functor::Kind::Prod);
}

TEST_CASE("typechecking") {
    src::Signature empty;
    CHECK_THROWS_AS(src::typecheck(empty, {}, src::parse_expr("fn x. x")), TypeError);
    auto uu = src::parse_type("unit -> unit");
    CHECK(src::equal(src::typecheck(empty, {}, src::parse_expr("fn x. x"), uu), uu));
    CHECK(src::equal(src::typecheck(empty, {}, src::parse_expr("force (delay ())")), src::Type::unit()));

    auto mem = src::parse_program(kMem);
    CHECK(src::to_string(src::def_type(mem, "mem")) == "tree -> int -> bool");

    CHECK_THROWS_AS(src::typecheck(empty, {}, src::parse_expr("() ()")), TypeError);
    CHECK_THROWS_AS(src::typecheck(mem.signature, {}, src::parse_expr("rec(Emp(); Emp -> u. ())")), TypeError);
}

TEST_CASE("charged steps") {
    src::Program p = src::parse_program("datatype nat = Zero of unit | Succ of self;");
    auto r = run(p, "(fn x. x) ()");
    CHECK(r.cost == 1);
    CHECK(src::to_string(r.value.expr()) == "()");

    r = run(p, "delay ((fn x. x) ())");
    CHECK(r.cost == 0);
    CHECK(r.value.expr()->kind == src::Expr::Kind::Delay);

    r = run(p, "rec(Zero(); Zero -> u. () | Succ -> q. ())");
    CHECK(r.cost == 1);
}

TEST_CASE("mem on a one-node tree") {
    auto p = src::parse_program(kMem);
    auto r = run(p, "mem (Node((K5(), Emp(), Emp()))) K3()");
    CHECK(r.value.str() == "False()");
    // two applications, one unfolding, eqint (3), the bool case, two empty subtrees and their case
    CHECK(r.cost == 10);
    auto hit = run(p, "mem (Node((K5(), Emp(), Emp()))) K5()");
    CHECK(hit.value.str() == "True()");
    CHECK(hit.cost == 7);
}

TEST_CASE("trace costs add up") {
    auto p = src::parse_program(kMem);
    auto e = src::inline_defs(p, src::parse_expr("mem (Node((K5(), Node((K1(), Emp(), Emp())), Emp()))) K1()"));
    auto r = src::evaluate(p.signature, e, {10'000'000, true});
    std::uint64_t charged = 0;
    std::uint64_t apps = 0;
    std::uint64_t recs = 0;
    for (const auto& s : r.trace) {
        charged += s.delta;
        if (s.delta > 0) (s.rule.find("app") != std::string::npos ? apps : recs) += s.delta;
    }
    CHECK(charged == r.cost);
    CHECK(apps + recs == r.cost);
    CHECK(apps > 0);
    CHECK(recs > 0);
}

TEST_CASE("map is evaluated structurally") {
    auto p = testing::prelude_program();
    auto v = src::parse_expr("Succ(Zero())");
    auto self = src::eval_map(p.signature, src::Functor::self(), "x", src::parse_expr("(x, delay x)"), v);
    CHECK(src::to_string(self) == "(Succ(Zero()), delay Succ(Zero()))");

    auto konst = src::eval_map(p.signature, src::Functor::constant(src::Type::data("bool")), "x",
                               src::parse_expr("()"), src::parse_expr("True()"));
    CHECK(src::to_string(konst) == "True()");

    auto both = src::eval_map(p.signature, src::Functor::prod(src::Functor::self(), src::Functor::self()), "x",
                              src::parse_expr("Succ(x)"), src::parse_expr("(Zero(), Zero())"));
    CHECK(src::to_string(both) == "(Succ(Zero()), Succ(Zero()))");
}

TEST_CASE("property: values evaluate to themselves at zero cost") {
    auto p = testing::prelude_program();
    testing::TermGen gen(p.signature, 2024);
    for (int i = 0; i < 500; ++i) {
        auto t = gen.type(2);
        auto v = gen.value(t, 3);
        REQUIRE(src::is_value(v));
        src::typecheck(p.signature, {}, v, t);
        auto r = src::evaluate(p.signature, v);
        CHECK(r.cost == 0);
        CHECK_MESSAGE(src::alpha_equal(r.value.expr(), v), src::to_string(v));
    }
}

TEST_CASE("property: map of values is total and free") {
    auto p = testing::prelude_program();
    testing::TermGen gen(p.signature, 77);
    int checked = 0;
    for (int i = 0; checked < 100 && i < 1000; ++i) {
        auto m = gen.map_instance(2);
        try {
            src::typecheck(p.signature, {}, m);
        } catch (const TypeError&) {
            continue;
        }
        auto r = src::evaluate(p.signature, m);
        CHECK(r.cost == 0);
        ++checked;
    }
    CHECK(checked == 100);
}

TEST_CASE("property: evaluation is deterministic") {
    auto p = testing::prelude_program();
    testing::TermGen gen(p.signature, 5);
    for (int i = 0; i < 100; ++i) {
        auto t = gen.type(1);
        auto e = gen.term({}, t, 4);
        auto a = src::evaluate(p.signature, e);
        auto b = src::evaluate(p.signature, e);
        CHECK(a.cost == b.cost);
        CHECK(a.value == b.value);
    }
}

} // TEST_SUITE
