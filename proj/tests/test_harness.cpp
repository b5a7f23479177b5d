#include <costrec/harness.hpp>
#include <costrec/parser.hpp>
#include <costrec/translate.hpp>

#include <doctest.h>

#include <algorithm>

using namespace costrec;

namespace {

const char* kSig = R"(
datatype nat = Zero of unit | Succ of self;
datatype tree = Emp of unit | Node of int * self * self;
datatype list = Nil of unit | Cons of int * self;

def mem : tree -> int -> bool = fn t. fn x. rec(t;
    Emp -> u. False()
  | Node -> (y, (t0, r0), (t1, r1)).
      rec(eqint (y, x);
          True -> u. True()
        | False -> u. rec(force r0; True -> u. True() | False -> u. force r1)));

def id : nat -> nat = fn n. rec(n; Zero -> u. Zero() | Succ -> (m, r). Succ(force r));
)";

struct Fixture {
    src::Program prog = src::parse_program(kSig);
    cplx::Signature csig = trans::translate_sig(prog.signature);

    size::Models models(const std::string& cfg) const { return size::load_models(cfg, csig); }
    std::vector<std::string> values(const size::Models& m, const char* type, std::uint64_t bound) const {
        harness::GenConfig cfg;
        cfg.max_size = bound;
        std::vector<std::string> out;
        for (const auto& v : harness::gen_values(prog, m, src::parse_type(type), cfg)) out.push_back(v.str());
        return out;
    }
};

bool has(const std::vector<std::string>& xs, const std::string& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE_FIXTURE(Fixture, "small values are enumerated") {
    auto m = models("model tree = nodes; model list = length; model int = unitsize; model bool = unitsize");
    auto nats = values(m, "nat", 3);
    CHECK(has(nats, "Zero()"));
    CHECK(has(nats, "Succ(Zero())"));
    CHECK(has(nats, "Succ(Succ(Zero()))"));

    auto trees = values(m, "tree", 2);
    CHECK(has(trees, "Emp()"));
    CHECK(std::any_of(trees.begin(), trees.end(), [](const std::string& s) {
        return s.rfind("Node(", 0) == 0 && s.find("Emp(), Emp()") != std::string::npos;
    }));

    auto lists = values(m, "list", 2);
    CHECK(has(lists, "Nil()"));
    for (const auto& l : lists) {
        const auto conses = std::count(l.begin(), l.end(), 'C');
        CHECK(conses <= 2);
    }
    CHECK(std::any_of(lists.begin(), lists.end(), [](const std::string& s) { return s.find("Nil()))") != std::string::npos && std::count(s.begin(), s.end(), 'C') == 2; }));
}

TEST_CASE_FIXTURE(Fixture, "generation is deterministic in the seed") {
    auto m = models("model tree = nodes; model int = unitsize; model bool = unitsize");
    harness::GenConfig cfg;
    cfg.seed = 9;
    auto a = harness::gen_values(prog, m, src::parse_type("tree"), cfg);
    auto b = harness::gen_values(prog, m, src::parse_type("tree"), cfg);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);

    auto r1 = harness::render(harness::check_bound(prog, "mem", m, cfg));
    auto r2 = harness::render(harness::check_bound(prog, "mem", m, cfg));
    CHECK(r1 == r2);
}

TEST_CASE("arrow arguments under constructors are rejected") {
    auto p = src::parse_program(
        "datatype nat = Zero of unit | Succ of self; datatype strm = Cons of unit -> nat * self;");
    auto m = size::load_models("", trans::translate_sig(p.signature));
    CHECK_THROWS_AS(harness::gen_values(p, m, src::parse_type("strm"), {}), EnumerationError);
}

TEST_CASE_FIXTURE(Fixture, "library functions are well typed") {
    auto m = models("");
    auto fs = harness::library_functions(prog, m, src::parse_type("nat -> nat"), {});
    std::vector<std::string> names;
    for (const auto& f : fs) names.push_back(f.name);
    CHECK(has(names, "id"));
    CHECK(has(names, "succ"));
    CHECK(has(names, "pred"));
    CHECK(has(names, "recid"));
}

TEST_CASE_FIXTURE(Fixture, "mem is bounded on small trees") {
    auto m = models("model tree = nodes; model int = unitsize; model bool = unitsize");
    harness::GenConfig cfg;
    cfg.max_size = 3;
    auto rep = harness::check_bound(prog, "mem", m, cfg);
    CHECK(rep.ok());
    CHECK(rep.cases.size() >= 100);
    for (const auto& c : rep.cases) {
        CHECK(NInf(c.op_cost) <= c.den_cost);
        CHECK(c.den_cost.is_finite());
    }
}

TEST_CASE_FIXTURE(Fixture, "unitsize bounds hold with infinite cost") {
    auto m = models("model nat = unitsize");
    auto rep = harness::check_bound(prog, "id", m, {});
    CHECK(rep.ok());
    REQUIRE_FALSE(rep.cases.empty());
    for (const auto& c : rep.cases) CHECK(c.den_cost.is_inf());
}

TEST_CASE_FIXTURE(Fixture, "reports are line records") {
    auto m = models("model tree = nodes; model int = unitsize; model bool = unitsize");
    harness::GenConfig cfg;
    cfg.max_size = 1;
    auto text = harness::render(harness::check_bound(prog, "mem", m, cfg));
    CHECK(text.rfind("case=0 def=mem input=", 0) == 0);
    CHECK(text.find("\nsummary program=- def=mem ") != std::string::npos);
    CHECK(text.find("failed=0") != std::string::npos);
}

} // TEST_SUITE
