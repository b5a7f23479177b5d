#include "support/gen_terms.hpp"

#include <costrec/size_model.hpp>
#include <costrec/translate.hpp>

#include <doctest.h>

#include <algorithm>

using namespace costrec;
using sem::Elem;
using sem::SemVal;

namespace {

const char* kSig = R"(
datatype nat = Zero of unit | Succ of self;
datatype bool = True of unit | False of unit;
datatype tree = Emp of unit | Node of nat * self * self;
datatype list = Nil of unit | Cons of nat * self;
)";

struct Fixture {
    src::Program prog = src::parse_program(kSig);
    cplx::Signature csig = trans::translate_sig(prog.signature);

    size::Models models(const std::string& cfg) const { return size::load_models(cfg, csig); }
    Elem size(const size::Models& m, const std::string& v) const {
        return size::value_size(m, prog.signature, src::Value(src::parse_expr(v)));
    }
};

std::vector<std::string> shapes(const std::vector<size::AbstractUnfolding>& zs) {
    std::vector<std::string> out;
    for (const auto& z : zs) out.push_back(z.ctor + " " + z.arg.str());
    std::sort(out.begin(), out.end());
    return out;
}

} // namespace

TEST_SUITE("size-model") {

TEST_CASE_FIXTURE(Fixture, "builtin size functions") {
    auto m = models("model list = length; model tree = nodes");
    CHECK(m.size_of("Nil", SemVal::unit()) == Elem{0});
    CHECK(m.size_of("Cons", SemVal::tuple(SemVal::size("nat", {NInf::infinity()}), SemVal::size("list", {4}))) == Elem{5});

    CHECK(size(m, "Zero()") == Elem{1});
    CHECK(size(m, "Succ(Succ(Zero()))") == Elem{3});
    CHECK(size(m, "Cons((Zero(), Cons((Zero(), Nil()))))") == Elem{2});
    CHECK(size(m, "Node((Zero(), Emp(), Emp()))") == Elem{1});

    auto h = models("model tree = height");
    CHECK(size(h, "Node((Zero(), Node((Zero(), Emp(), Emp())), Emp()))") == Elem{2});
}

TEST_CASE_FIXTURE(Fixture, "label maximum") {
    auto m = models("model tree = pair(nodes, labelmax nat)");
    CHECK(m.model("tree").carrier.width == 2);
    CHECK(size(m, "Node((Succ(Succ(Succ(Succ(Succ(Zero()))))), Emp(), Emp()))") == Elem{1, 6});
    CHECK(size(m, "Node((Zero(), Node((Succ(Zero()), Emp(), Emp())), Emp()))") == Elem{2, 2});
}

TEST_CASE_FIXTURE(Fixture, "one-point models do not descend") {
    auto m = models("model nat = unitsize");
    CHECK(m.model("nat").carrier.width == 0);
    CHECK_FALSE(m.model("nat").strict_descent);
    CHECK(m.warnings().size() == 1);
    CHECK(models("model nat = ctors").model("nat").strict_descent);
}

TEST_CASE_FIXTURE(Fixture, "unfoldings below a bound") {
    auto m = models("model tree = nodes; model list = length; model bool = unitsize");
    CHECK(shapes(m.unfoldings("tree", {1})) == std::vector<std::string>{"Emp ()", "Node (inf, 0, 0)"});
    CHECK(shapes(m.unfoldings("list", {2})) == std::vector<std::string>{"Cons (inf, 0)", "Cons (inf, 1)", "Nil ()"});
    CHECK(shapes(m.unfoldings("bool", {})) == std::vector<std::string>{"False ()", "True ()"});
    CHECK(m.unfoldings("tree", {0}).size() == 1);
    CHECK_THROWS_AS((void)m.unfoldings("list", {NInf::infinity()}), EnumerationError);
}

TEST_CASE_FIXTURE(Fixture, "every unfolding respects the bound") {
    auto m = models("model tree = pair(nodes, labelmax nat); model list = length");
    for (const auto& [dt, bound] : std::vector<std::pair<std::string, Elem>>{{"tree", {3, 2}}, {"list", {4}}}) {
        for (const auto& z : m.unfoldings(dt, bound))
            CHECK(sem::elem_leq(m.size_of(z.ctor, z.arg), bound));
    }
}

TEST_CASE_FIXTURE(Fixture, "carrier order") {
    size::Carrier c{2};
    CHECK(c.leq({1, 2}, {1, 3}));
    CHECK_FALSE(c.leq({2, 2}, {1, 3}));
    CHECK(c.lt({1, 2}, {1, 3}));
    CHECK(c.join({2, 1}, {1, 3}) == Elem{2, 3});
    CHECK(c.enumerate_upto({1, 2}).size() == 6);
    CHECK(c.top() == Elem{NInf::infinity(), NInf::infinity()});
    CHECK(size::Carrier{0}.enumerate_upto({}).size() == 1);
}

TEST_CASE_FIXTURE(Fixture, "configuration errors") {
    CHECK_THROWS_AS(models("model forest = nodes"), ModelError);
    CHECK_THROWS_AS(models("model tree = length"), ModelError);
    CHECK_THROWS_AS(models("model tree = labelmax nat"), ModelError);
    CHECK_THROWS_AS(models("model tree = nodes\nsemrec tree"), ModelError);
    CHECK_THROWS_AS(models("model list = sideways"), ModelError);
    CHECK_THROWS_AS(models("frobnicate list = length"), ModelError);
    CHECK_NOTHROW(models("model list = length\nsemrec list  # comment\naxiom list = length-quotient"));
    try {
        models("model list = length\nmodel tree = bogus");
        FAIL("no error");
    } catch (const ModelError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
}

TEST_CASE_FIXTURE(Fixture, "property: sizes of generated values lie in the carrier") {
    testing::TermGen gen(prog.signature, 8);
    auto m = models("model tree = pair(nodes, labelmax nat); model list = length");
    for (int i = 0; i < 200; ++i) {
        static const char* kTypes[] = {"nat", "list", "tree"};
        const std::string dt = kTypes[i % 3];
        auto v = gen.value(src::Type::data(dt), 4);
        auto s = size(m, src::to_string(v));
        CHECK(s.size() == m.model(dt).carrier.width);
        CHECK(sem::elem_finite(s));
    }
}

} // TEST_SUITE
