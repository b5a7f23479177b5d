// Acceptance run: one line per criterion, `criterion=<n> result=<PASS|FAIL> ...`.

#include "support/gen_terms.hpp"

#include <costrec/eval.hpp>
#include <costrec/harness.hpp>
#include <costrec/interp.hpp>
#include <costrec/preorder.hpp>
#include <costrec/translate.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace costrec;
using sem::Elem;
using sem::SemVal;

namespace {

std::filesystem::path corpus_dir = COSTREC_CORPUS_DIR;

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    if (!in) throw Error("cannot read " + p.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

// `a | b | c` rows of a corpus table, comments skipped.
std::vector<std::vector<std::string>> table(const std::string& name, std::size_t max_cells = 8) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(slurp(corpus_dir / name));
    std::string line;
    while (std::getline(in, line)) {
        if (trim(line).empty() || trim(line)[0] == '#') continue;
        std::vector<std::string> cells;
        std::size_t start = 0;
        for (std::size_t bar; cells.size() + 1 < max_cells && (bar = line.find('|', start)) != std::string::npos;
             start = bar + 1)
            cells.push_back(trim(line.substr(start, bar - start)));
        cells.push_back(trim(line.substr(start)));
        rows.push_back(cells);
    }
    return rows;
}

src::Program load(const std::string& file) { return src::parse_program(slurp(corpus_dir / file)); }

struct Outcome {
    bool ok = false;
    std::string detail;
};

int failures = 0;

void report(int n, const std::string& name, double limit_s, const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < limit_s;
    const bool pass = o.ok && in_time;
    if (!pass) ++failures;
    std::ostringstream time;
    time << std::fixed << std::setprecision(2) << secs << "s/" << limit_s << "s";
    std::cout << "criterion=" << n << " result=" << (pass ? "PASS" : "FAIL") << " name=" << name
              << " time=" << time.str() << (in_time ? "" : " (over limit)") << " " << o.detail << std::endl;
}

SemVal denote(const src::Program& p, const size::Models& m, const src::ExprPtr& e, const src::TypePtr& t) {
    auto out = trans::translate_expr(p.signature, {}, e, t);
    return interp::interp(m, {}, out.cexpr, out.ctype);
}

cplx::ExprPtr outer_rec(const cplx::ExprPtr& e) {
    if (!e) return nullptr;
    if (e->kind == cplx::Expr::Kind::Rec) return e;
    if (auto r = outer_rec(e->a)) return r;
    return outer_rec(e->b);
}

// ---------------------------------------------------------------- criteria

Outcome conditional_law() {
    auto p = testing::prelude_program();
    auto csig = trans::translate_sig(p.signature);
    auto m = size::load_models("model bool = unitsize", csig);
    testing::TermGen gen(p.signature, 1);
    const auto nat = gen.data("nat");
    const auto boolean = gen.data("bool");
    auto charged = [&](src::ExprPtr e, int k) {
        for (int i = 0; i < k; ++i) e = src::app(src::lam("w" + std::to_string(i), src::var("w" + std::to_string(i))), e);
        return e;
    };
    int exact = 0;
    int pot = 0;
    int varied = 0;
    for (int i = 0; i < 20; ++i) {
        auto b = charged(gen.term({}, boolean, 2), gen.pick(3));
        auto e0 = charged(gen.term({}, nat, 3), gen.pick(4));
        auto e1 = charged(gen.term({}, nat, 3), gen.pick(4));
        auto cond = src::rec(b, {{"True", "u", e0}, {"False", "u", e1}});
        auto db = denote(p, m, b, boolean);
        auto d0 = denote(p, m, e0, nat);
        auto d1 = denote(p, m, e1, nat);
        auto dc = denote(p, m, cond, nat);
        const NInf expected = NInf(1) + db.first().as_cost() + join(d0.first().as_cost(), d1.first().as_cost());
        exact += dc.first().as_cost() == expected;
        pot += dc.second() == sem::join(d0.second(), d1.second());
        varied += !(d0.first().as_cost() == d1.first().as_cost());
    }
    return {exact == 20, "exact_cost=" + std::to_string(exact) + "/20 potential_join=" + std::to_string(pot) +
                             "/20 pairs_with_different_costs=" + std::to_string(varied)};
}

Outcome mem_recurrence() {
    auto p = load("mem.src");
    auto csig = trans::translate_sig(p.signature);
    auto m = size::load_models("model tree = nodes; model int = unitsize; model bool = unitsize", csig);
    auto body = src::inlined_def(p, "mem")->a->a;
    src::Context ctx{{"t", src::Type::data("tree")}, {"x", src::Type::data("int")}};
    auto out = trans::translate_expr(p.signature, ctx, body, src::Type::data("bool"));
    auto node = outer_rec(out.cexpr);
    if (!node) return {false, "no recursor in the translation of mem"};
    std::vector<Elem> bounds;
    for (std::uint64_t n = 0; n <= 6; ++n) bounds.push_back({n});
    interp::Env env{{"t", cplx::parse_type("tree"), m.top(cplx::parse_type("tree"))},
                    {"x", cplx::parse_type("int"), m.top(cplx::parse_type("int"))}};
    std::vector<NInf> g;
    for (const auto& r : interp::interp_rec(m, env, node, bounds)) g.push_back(r.first().as_cost());
    bool ok = g[0] == NInf(1);
    for (std::uint64_t n = 1; n <= 6; ++n) {
        NInf best(0);
        for (std::uint64_t n0 = 0; n0 < n; ++n0) best = join(best, NInf(6) + g[n0] + g[n - 1 - n0]);
        ok = ok && g[n] == best;
    }
    std::string shown;
    for (const auto& c : g) shown += (shown.empty() ? "" : ",") + c.str();
    return {ok, "g(0..6)=" + shown};
}

Outcome treemap_bound() {
    auto p = load("treemap.src");
    auto csig = trans::translate_sig(p.signature);
    auto m = size::load_models("model nat = ctors; model tree = pair(nodes, labelmax nat)", csig);
    const auto nat_nat = src::parse_type("nat -> nat");
    auto fns = harness::library_functions(p, m, nat_nat, {});
    auto body = src::inlined_def(p, "treemap")->a->a;
    src::Context ctx{{"f", nat_nat}, {"t", src::Type::data("tree")}};
    auto out = trans::translate_expr(p.signature, ctx, body, src::Type::data("tree"));
    auto node = outer_rec(out.cexpr);
    if (!node) return {false, "no recursor in the translation of treemap"};
    std::vector<Elem> bounds;
    for (std::uint64_t a = 0; a <= 5; ++a)
        for (std::uint64_t s = 0; s <= 5; ++s) bounds.push_back({a, s});
    std::size_t checked = 0;
    std::size_t violations = 0;
    std::size_t corrected_ok = 0;
    std::string first;
    for (const auto& f : fns) {
        const SemVal pf = denote(p, m, f.term, nat_nat).second();
        auto fc = [&](std::uint64_t s) { return NInf(1) + pf.apply(SemVal::size("nat", {s})).first().as_cost(); };
        interp::Env env{{"f", trans::potential(nat_nat), pf}, {"t", cplx::parse_type("tree"), m.top(cplx::parse_type("tree"))}};
        auto rs = interp::interp_rec(m, env, node, bounds);
        for (std::size_t i = 0; i < bounds.size(); ++i) {
            const auto mm = bounds[i][0].value();
            const auto s = bounds[i][1].value();
            const NInf cost = rs[i].first().as_cost() + NInf(1);
            NInf claimed(1);
            NInf corrected(2 + mm);
            for (std::uint64_t k = 0; k < mm; ++k) {
                claimed = claimed + NInf(1) + fc(s);
                corrected = corrected + NInf(1) + fc(s);
            }
            ++checked;
            corrected_ok += cost <= corrected;
            if (!(cost <= claimed)) {
                ++violations;
                if (first.empty())
                    first = "f=" + f.name + " m=" + std::to_string(mm) + " s=" + std::to_string(s) +
                            " cost=" + cost.str() + " claimed=" + claimed.str();
            }
        }
    }
    return {violations == 0, "points=" + std::to_string(checked) + " functions=" + std::to_string(fns.size()) +
                                 " violations=" + std::to_string(violations) +
                                 (first.empty() ? "" : " first_violation=\"" + first + "\"") +
                                 " within_m(1+f_c(s))+m+2=" + std::to_string(corrected_ok) + "/" +
                                 std::to_string(checked)};
}

Outcome bounding(bool semrec_only) {
    std::size_t programs = 0;
    std::size_t cases = 0;
    std::size_t cost_fail = 0;
    std::size_t value_fail = 0;
    std::set<std::string> labels;
    std::set<std::string> files;
    std::string first;
    const auto rows = semrec_only ? table("semrec.txt") : table("manifest.txt");
    for (const auto& row : rows) {
        auto p = load(row.at(0));
        auto m = size::load_models(row.at(2), trans::translate_sig(p.signature));
        harness::GenConfig cfg;
        cfg.max_size = 5;
        for (auto& rep : harness::check_program(p, m, cfg)) {
            for (const auto& c : rep.cases) {
                ++cases;
                const bool cost_ok = NInf(c.op_cost) <= c.den_cost;
                cost_fail += !cost_ok;
                value_fail += c.potential == "fail";
                if (!c.pass && first.empty())
                    first = row.at(0) + "/" + row.at(1) + " " + rep.def + " " + c.input + ": " + c.note;
            }
        }
        ++programs;
        labels.insert(row.at(1));
        files.insert(row.at(0));
    }
    std::ostringstream d;
    d << "programs=" << files.size() << " runs=" << programs << " models=" << labels.size() << " cases=" << cases
      << " cost_violations=" << cost_fail << " potential_violations=" << value_fail;
    if (!first.empty()) d << " first=\"" << first << "\"";
    bool ok = cost_fail == 0 && value_fail == 0 && first.empty();
    if (!semrec_only) {
        for (const char* need : {"ctors", "length", "nodes", "height", "labelmax", "unitsize"}) ok = ok && labels.count(need);
        ok = ok && files.size() >= 7 && cases >= 200;
    }
    return {ok, d.str()};
}

Outcome exact_costs() {
    std::size_t agree = 0;
    std::size_t total = 0;
    std::string first;
    for (const auto& row : table("instances.txt", 2)) {
        auto p = load(row.at(0));
        auto csig = trans::translate_sig(p.signature);
        auto e = src::parse_expr(row.at(1));
        src::typecheck(p.signature, src::program_context(p), e);
        e = src::inline_defs(p, e);
        auto t = src::typecheck(p.signature, {}, e);
        auto ev = src::evaluate(p.signature, e);
        auto nf = pre::normalize(csig, trans::translate_expr(p.signature, {}, e, t).cexpr);
        auto lit = pre::cost_literal(nf);
        ++total;
        if (lit && *lit == ev.cost)
            ++agree;
        else if (first.empty())
            first = row.at(0) + ": " + row.at(1);
    }
    return {agree == total && total >= 30,
            "instances=" + std::to_string(total) + " agree=" + std::to_string(agree) +
                (first.empty() ? "" : " first_mismatch=\"" + first + "\"")};
}

Outcome infinite_costs() {
    auto p = load("id.src");
    auto csig = trans::translate_sig(p.signature);
    auto one = interp::tabulate(p, "id", size::load_models("model nat = unitsize", csig), 0, 5);
    auto fin = interp::tabulate(p, "id", size::load_models("model nat = ctors", csig), 0, 5);
    bool all_inf = !one.empty();
    for (const auto& r : one) all_inf = all_inf && r.cost.is_inf();
    bool increasing = fin.size() == 6;
    std::string shown;
    for (std::size_t i = 0; i < fin.size(); ++i) {
        increasing = increasing && fin[i].cost.is_finite() && (i == 0 || fin[i - 1].cost < fin[i].cost);
        shown += (i ? "," : "") + fin[i].cost.str();
    }
    return {all_inf && increasing, "unitsize_rows=" + std::to_string(one.size()) + " all_inf=" +
                                       (all_inf ? "yes" : "no") + " ctors_costs(0..5)=" + shown};
}

Outcome type_preservation() {
    auto p = testing::prelude_program();
    auto csig = trans::translate_sig(p.signature);
    testing::TermGen gen(p.signature, 3);
    int fails = 0;
    for (int i = 0; i < 500; ++i) {
        auto t = gen.type(2);
        auto e = gen.term({}, t, 4);
        try {
            src::typecheck(p.signature, {}, e, t);
            auto out = trans::translate_expr(p.signature, {}, e, t);
            cplx::ctypecheck(csig, {}, out.cexpr, trans::complexity(t));
        } catch (const Error&) {
            ++fails;
        }
    }
    return {fails == 0, "terms=500 failures=" + std::to_string(fails)};
}

Outcome lemma_suite() {
    auto p = testing::prelude_program();
    testing::TermGen gen(p.signature, 4);
    int value_fail = 0;
    for (int i = 0; i < 500; ++i) {
        auto t = gen.type(2);
        auto v = gen.value(t, 3);
        auto r = src::evaluate(p.signature, v);
        value_fail += !(r.cost == 0 && src::alpha_equal(r.value.expr(), v));
    }
    int maps = 0;
    int map_fail = 0;
    for (int i = 0; maps < 100 && i < 2000; ++i) {
        auto mi = gen.map_instance(2);
        try {
            src::typecheck(p.signature, {}, mi);
        } catch (const TypeError&) {
            continue;
        }
        ++maps;
        try {
            map_fail += src::evaluate(p.signature, mi).cost != 0;
        } catch (const Error&) {
            ++map_fail;
        }
    }
    return {value_fail == 0 && map_fail == 0 && maps == 100,
            "values=500 value_failures=" + std::to_string(value_fail) + " maps=" + std::to_string(maps) +
                " map_failures=" + std::to_string(map_fail)};
}

Outcome derivability() {
    auto p = testing::prelude_program();
    auto csig = trans::translate_sig(p.signature);
    pre::AxiomSet axioms{{pre::length_quotient(csig, "list")}};
    testing::TermGen gen(p.signature, 5);
    const std::vector<std::string> bodies = {
        "; Nil -> u. 0 | Cons -> q. 1 + snd snd q)",
        "; Nil -> u. (1, Zero()) | Cons -> q. (1 + fst snd snd q, Succ(fst q)))",
    };
    int tried = 0;
    int derived = 0;
    for (int len = 0; len <= 5; ++len)
        for (int k = 0; k < 8; ++k) {
            std::string l = "Nil()";
            for (int i = 0; i < len; ++i) l = "Cons((" + src::to_string(gen.value(gen.data("nat"), 3)) + ", " + l + "))";
            auto list = cplx::parse_expr(l);
            ++tried;
            derived += pre::leq(csig, axioms, cplx::parse_expr("Nil()"), list).derivable;
            for (const auto& b : bodies) {
                ++tried;
                derived += pre::leq(csig, axioms, cplx::parse_expr("rec(Nil()" + b), cplx::parse_expr("rec(" + l + b))
                               .derivable;
            }
        }
    return {derived == tried, "queries=" + std::to_string(tried) + " derived=" + std::to_string(derived) +
                                  " not_derived=" + std::to_string(tried - derived)};
}

} // namespace

int main(int argc, char** argv) {
    if (argc > 1) corpus_dir = argv[1];
    report(1, "conditional-law", 5, conditional_law);
    report(2, "mem-recurrence", 10, mem_recurrence);
    report(3, "treemap-bound", 30, treemap_bound);
    report(4, "bounding-theorem", 120, [] { return bounding(false); });
    report(5, "exact-cost-model", 60, exact_costs);
    report(6, "infinite-costs", 5, infinite_costs);
    report(7, "type-preservation", 30, type_preservation);
    report(8, "lemma-suite", 30, lemma_suite);
    report(9, "preorder-derivability", 10, derivability);
    report(10, "semrec-model", 30, [] { return bounding(true); });
    std::cout << "summary passed=" << 10 - failures << " failed=" << failures << std::endl;
    return failures == 0 ? 0 : 1;
}
