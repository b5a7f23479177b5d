// costrec: command-line front end.

#include <costrec/complexity.hpp>
#include <costrec/eval.hpp>
#include <costrec/harness.hpp>
#include <costrec/interp.hpp>
#include <costrec/parser.hpp>
#include <costrec/preorder.hpp>
#include <costrec/size_model.hpp>
#include <costrec/translate.hpp>
#include <costrec/typecheck.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

using namespace costrec;

namespace {

struct UsageError : Error {
    using Error::Error;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw UsageError("cannot read '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct Loaded {
    src::Program prog;
    cplx::Signature csig;
};

Loaded load(const std::string& path, int int_width) {
    Loaded l;
    l.prog = src::parse_program(read_file(path), {int_width});
    auto violations = src::wf_signature(l.prog.signature);
    if (!violations.empty()) {
        std::string msg;
        for (const auto& v : violations) msg += (msg.empty() ? "" : "; ") + v.message;
        throw TypeError("ill-formed signature: " + msg);
    }
    src::check_program(l.prog);
    l.csig = trans::translate_sig(l.prog.signature);
    return l;
}

// A file path, or inline text when it contains '='.
std::string model_text(const std::string& spec) {
    if (spec.empty()) return "";
    if (std::filesystem::exists(spec)) return read_file(spec);
    if (spec.find('=') != std::string::npos || spec.rfind("semrec", 0) == 0) return spec;
    throw UsageError("model '" + spec + "' is neither a file nor inline configuration");
}

// Source expression in the scope of the program's defs.
struct SourceTerm {
    src::ExprPtr expr;
    src::TypePtr type;
};

SourceTerm source_term(const src::Program& prog, const std::string& text) {
    auto e = src::parse_expr(text);
    src::typecheck(prog.signature, src::program_context(prog), e);
    auto inlined = src::inline_defs(prog, e);
    return {inlined, src::typecheck(prog.signature, {}, inlined)};
}

void print_warnings(const size::Models& models) {
    for (const auto& w : models.warnings()) std::cerr << "warning: " << w << "\n";
}

std::pair<std::uint64_t, std::uint64_t> parse_range(const std::string& r) {
    const auto dots = r.find("..");
    if (dots == std::string::npos) throw UsageError("range must look like LO..HI");
    try {
        const auto lo = std::stoull(r.substr(0, dots));
        const auto hi = std::stoull(r.substr(dots + 2));
        if (lo > hi) throw UsageError("empty range " + r);
        return {lo, hi};
    } catch (const std::logic_error&) {
        throw UsageError("range must look like LO..HI");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cost recurrences for a functional language with inductive types"};
    app.require_subcommand(1);
    int int_width = 16;
    app.add_option("--int-width", int_width, "constructors of the built-in int datatype")->check(CLI::Range(1, 4096));

    std::string file, expr, model, fn_name, range, lhs, rhs;
    bool trace = false, stepwise = false, cplx_input = false, axioms = false, aligned = false;
    std::size_t max_nodes = 200'000;
    harness::GenConfig gen;

    auto* check = app.add_subcommand("check", "typecheck a program and its signature");
    check->add_option("file", file)->required();

    auto* eval = app.add_subcommand("eval", "evaluate an expression");
    eval->add_option("file", file)->required();
    eval->add_option("-e,--expr", expr)->required();
    eval->add_flag("--trace", trace, "print every rule with its cost");

    auto* translate = app.add_subcommand("translate", "print the complexity translation");
    translate->add_option("file", file)->required();
    translate->add_option("-e,--expr", expr)->required();
    translate->add_option("--max-nodes", max_nodes, "refuse to print larger terms");

    auto* normalize = app.add_subcommand("normalize", "exact-cost normal form of a translation");
    normalize->add_option("file", file)->required();
    normalize->add_option("-e,--expr", expr)->required();
    normalize->add_flag("--complexity", cplx_input, "EXPR is a complexity-language term");
    normalize->add_flag("--steps", stepwise, "rewrite step by step and list the steps");
    normalize->add_option("--max-nodes", max_nodes, "refuse to print larger terms");

    auto* interp = app.add_subcommand("interp", "size-based denotation of a translation");
    interp->add_option("file", file)->required();
    interp->add_option("-e,--expr", expr)->required();
    interp->add_option("--model", model);
    interp->add_flag("--complexity", cplx_input, "EXPR is a complexity-language term");

    auto* tabulate = app.add_subcommand("tabulate", "cost of a def over a grid of argument sizes");
    tabulate->add_option("file", file)->required();
    tabulate->add_option("-f,--function", fn_name)->required();
    tabulate->add_option("--model", model);
    tabulate->add_option("--range", range)->required();
    tabulate->add_flag("--aligned", aligned, "aligned text table instead of records");

    auto* verify = app.add_subcommand("verify", "check the bounding relation on generated inputs");
    verify->add_option("file", file)->required();
    verify->add_option("-f,--function", fn_name);
    verify->add_option("--model", model);
    verify->add_option("--max-size", gen.max_size);
    verify->add_option("--samples", gen.samples);
    verify->add_option("--seed", gen.seed);
    verify->add_option("--fn-depth", gen.fn_depth);

    auto* leq = app.add_subcommand("leq", "search for a derivation of E0 <= E1");
    leq->add_option("file", file)->required();
    leq->add_option("-l,--left", lhs)->required();
    leq->add_option("-r,--right", rhs)->required();
    leq->add_flag("--axioms", axioms, "length-quotient axioms for every list-shaped datatype");
    leq->add_option("--model", model, "configuration whose axiom lines are used");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        Loaded l = load(file, int_width);
        const auto& prog = l.prog;

        if (*check) {
            auto types = src::check_program(prog);
            std::cout << "ok datatypes=" << prog.signature.datatypes.size() << " defs=" << prog.defs.size() << "\n";
            for (std::size_t i = 0; i < prog.defs.size(); ++i)
                std::cout << "def=" << prog.defs[i].name << " type=\"" << src::to_string(types[i]) << "\"\n";
            return 0;
        }
        if (*eval) {
            auto t = source_term(prog, expr);
            auto r = src::evaluate(prog.signature, t.expr, {10'000'000, trace});
            for (const auto& step : r.trace) std::cout << "rule=" << step.rule << " cost=" << step.delta << "\n";
            std::cout << "value=" << r.value.str() << " cost=" << r.cost << "\n";
            return 0;
        }
        if (*translate) {
            auto t = source_term(prog, expr);
            auto out = trans::translate_expr(prog.signature, {}, t.expr, t.type);
            const auto n = cplx::size(out.cexpr);
            std::cout << "type=\"" << cplx::to_string(out.ctype) << "\" nodes=" << n << "\n";
            if (n > max_nodes) {
                std::cerr << "error: translation has " << n << " nodes; raise --max-nodes to print it\n";
                return 1;
            }
            std::cout << "term=" << cplx::to_string(out.cexpr) << "\n";
            return 0;
        }
        if (*normalize) {
            cplx::ExprPtr term;
            if (cplx_input) {
                term = cplx::parse_expr(expr);
                cplx::ctypecheck(l.csig, {}, term);
            } else {
                auto t = source_term(prog, expr);
                term = trans::translate_expr(prog.signature, {}, t.expr, t.type).cexpr;
            }
            cplx::ExprPtr nf;
            if (stepwise) {
                auto r = pre::normalize_stepwise(l.csig, term);
                for (const auto& s : r.steps) std::cout << "step=" << s.str() << "\n";
                nf = r.normal_form;
            } else {
                nf = pre::normalize(l.csig, term);
            }
            if (auto c = pre::cost_literal(nf)) std::cout << "cost=" << *c << " ";
            if (cplx::size(nf) > max_nodes) {
                std::cout << "nodes=" << cplx::size(nf) << "\n";
                std::cerr << "error: normal form too large to print; raise --max-nodes\n";
                return 1;
            }
            std::cout << "normal_form=" << cplx::to_string(nf) << "\n";
            return 0;
        }
        if (*interp) {
            auto models = size::load_models(model_text(model), l.csig);
            print_warnings(models);
            cplx::ExprPtr term;
            cplx::TypePtr type;
            if (cplx_input) {
                term = cplx::parse_expr(expr);
                type = cplx::ctypecheck(l.csig, {}, term);
            } else {
                auto t = source_term(prog, expr);
                auto out = trans::translate_expr(prog.signature, {}, t.expr, t.type);
                term = out.cexpr;
                type = out.ctype;
            }
            auto v = interp::interp(models, {}, term, type);
            if (!cplx_input) {
                std::cout << "cost=" << v.first().str() << " potential=" << v.second().str() << "\n";
            } else {
                std::cout << "value=" << v.str() << "\n";
            }
            return 0;
        }
        if (*tabulate) {
            auto models = size::load_models(model_text(model), l.csig);
            print_warnings(models);
            auto [lo, hi] = parse_range(range);
            auto rows = interp::tabulate(prog, fn_name, models, lo, hi);
            if (aligned) {
                std::cout << std::left << std::setw(14) << "size" << std::setw(10) << "cost" << "potential\n";
                for (const auto& r : rows)
                    std::cout << std::setw(14) << sem::elem_str(r.size) << std::setw(10) << r.cost.str() << r.potential
                              << "\n";
            } else {
                for (const auto& r : rows)
                    std::cout << "size=" << sem::elem_str(r.size) << " cost=" << r.cost.str()
                              << " potential=" << r.potential << "\n";
            }
            return 0;
        }
        if (*verify) {
            auto models = size::load_models(model_text(model), l.csig);
            print_warnings(models);
            std::vector<harness::BoundReport> reports;
            if (!fn_name.empty())
                reports.push_back(harness::check_bound(prog, fn_name, models, gen));
            else
                reports = harness::check_program(prog, models, gen);
            bool ok = true;
            std::size_t cases = 0;
            for (auto& r : reports) {
                r.program = std::filesystem::path(file).filename().string();
                std::cout << harness::render(r);
                ok = ok && r.ok();
                cases += r.cases.size();
            }
            std::cout << "total defs=" << reports.size() << " cases=" << cases << " result=" << (ok ? "pass" : "fail")
                      << "\n";
            return ok ? 0 : 1;
        }
        if (*leq) {
            pre::AxiomSet set;
            if (axioms)
                for (const auto& d : l.csig.datatypes) {
                    try {
                        set.entries.push_back(pre::length_quotient(l.csig, d.name));
                    } catch (const ModelError&) {
                    }
                }
            if (!model.empty()) {
                auto models = size::load_models(model_text(model), l.csig);
                for (const auto& a : models.axioms()) set.entries.push_back(pre::length_quotient(l.csig, a.datatype));
            }
            auto e0 = cplx::parse_expr(lhs);
            auto e1 = cplx::parse_expr(rhs);
            auto t0 = cplx::ctypecheck(l.csig, {}, e0);
            cplx::ctypecheck(l.csig, {}, e1, t0);
            auto r = pre::leq(l.csig, set, e0, e1);
            if (r.derivable) {
                std::cout << "result=derivable steps=" << r.derivation.size() << "\n";
                for (const auto& s : r.derivation) std::cout << "step=" << s.str() << "\n";
                return 0;
            }
            std::cout << "result=not-derived explored=" << r.explored << "\n";
            return 1;
        }
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n" << app.help();
        return 2;
    } catch (const SyntaxError& e) {
        std::cerr << "syntax error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
