#pragma once

// The complexity-language preorder read two ways: as reductions computing
// exact-cost normal forms, and as a bounded search for derivations of E0 <= E1.

#include <costrec/complexity.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace costrec::pre {

/// Child indices from the root: 0 = a, 1 = b, 2 + k = body of branch k.
using Path = std::vector<int>;

struct RewriteStep {
    std::string rule; // beta-fn, beta-pair-0, beta-pair-1, rec-unroll, monoid-*, axiom(name)
    Path position;

    [[nodiscard]] std::string str() const;
};

struct AxiomSet {
    struct Entry {
        std::string datatype;
        std::string name; // length-quotient
    };
    std::vector<Entry> entries;

    [[nodiscard]] bool empty() const { return entries.empty(); }
    [[nodiscard]] bool covers(const std::string& datatype) const;
};

/// Validates a length-quotient axiom: the datatype needs one constructor
/// without recursive positions and one with exactly one.
AxiomSet::Entry length_quotient(const cplx::Signature& sig, const std::string& datatype);

struct NormalizeOptions {
    std::uint64_t fuel = 50'000'000;
};

/// Normal form under the step rules read as reductions and the monoid laws,
/// by normalization by evaluation. Sums come out right-nested without zeros.
cplx::ExprPtr normalize(const cplx::Signature& sig, const cplx::ExprPtr& e, const NormalizeOptions& opts = {});

/// Cost numeral of a normalized translation (C * T), if it is one.
std::optional<std::uint64_t> cost_literal(const cplx::ExprPtr& nf);

/// One leftmost-outermost step anywhere in the term.
std::optional<std::pair<cplx::ExprPtr, RewriteStep>> step(const cplx::Signature& sig, const cplx::ExprPtr& e);

struct StepwiseResult {
    cplx::ExprPtr normal_form;
    std::vector<RewriteStep> steps;
};

/// Repeats `step` to a normal form. Works on the tree, so only for small terms.
StepwiseResult normalize_stepwise(const cplx::Signature& sig, const cplx::ExprPtr& e, std::size_t max_steps = 100'000);

/// Right-nested, zero-free sums; nothing else changes.
cplx::ExprPtr monoid_canonical(const cplx::ExprPtr& e);

struct LeqOptions {
    std::size_t depth = 64;
    std::size_t max_states = 50'000;
};

struct LeqResult {
    bool derivable = false;
    std::vector<RewriteStep> derivation; // steps taken from E1 down to E0
    std::size_t explored = 0;
};

/// Sound, incomplete search for E0 <= E1. Reductions of E1 and axiom
/// descents apply at congruence positions; `derivable == false` is inconclusive.
LeqResult leq(const cplx::Signature& sig, const AxiomSet& axioms, const cplx::ExprPtr& e0, const cplx::ExprPtr& e1,
              const LeqOptions& opts = {});

} // namespace costrec::pre
