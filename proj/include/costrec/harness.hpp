#pragma once

// Empirical check of the bounding relation: operational cost and values
// against the size-based denotation of the translation.

#include <costrec/eval.hpp>
#include <costrec/interp.hpp>
#include <costrec/size_model.hpp>
#include <costrec/source.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace costrec::harness {

struct GenConfig {
    std::uint64_t max_size = 5; // every carrier component of a generated value
    std::size_t samples = 8;    // values kept per type after exhaustive small cases
    std::uint64_t seed = 1;
    int fn_depth = 1;           // nesting of sampled arguments at arrow types
    std::uint64_t fuel = 10'000'000;
};

/// Closed values of type t, deterministic in cfg.seed. Datatype values are
/// kept only when their size is within cfg.max_size under `models`; every
/// constructor reachable within the bound is represented.
std::vector<src::Value> gen_values(const src::Program& prog, const size::Models& models, const src::TypePtr& t,
                                   const GenConfig& cfg);

/// A sample argument for an arrow type, with its source form.
struct LibraryFn {
    std::string name;
    src::ExprPtr term;
};

/// Function values of type t drawn from the canonical library: constant
/// functions, identity, and for nat -> nat successor, predecessor and a
/// linear-cost recursive identity.
std::vector<LibraryFn> library_functions(const src::Program& prog, const size::Models& models,
                                         const src::TypePtr& t, const GenConfig& cfg);

struct BoundCase {
    std::size_t index = 0;
    std::string input;
    std::uint64_t op_cost = 0;
    NInf den_cost;
    std::string potential; // pass | fail | sampled | skipped
    bool pass = true;
    std::string note;
};

struct BoundReport {
    std::string program;
    std::string def;
    std::string model;
    std::uint64_t seed = 0;
    std::vector<BoundCase> cases;
    std::size_t passed = 0;
    std::size_t failed = 0;

    [[nodiscard]] bool ok() const { return failed == 0; }
};

/// Applies def `name` to generated arguments until its type is not an arrow
/// and checks cost and value bounds for every input tuple.
BoundReport check_bound(const src::Program& prog, const std::string& name, const size::Models& models,
                        const GenConfig& cfg);

/// Checks every def whose type has at least one argument.
std::vector<BoundReport> check_program(const src::Program& prog, const size::Models& models, const GenConfig& cfg);

/// One `k=v` line per case, then a summary line.
std::string render(const BoundReport& r);

} // namespace costrec::harness
