#pragma once

#include <costrec/source.hpp>

#include <cstdint>
#include <string>
#include <vector>

namespace costrec::src {

struct TraceEntry {
    std::string rule;
    std::uint64_t delta = 0;
};

struct EvalOptions {
    /// Bound on rule applications (not on charged cost).
    std::uint64_t fuel = 10'000'000;
    bool trace = false;
};

struct EvalResult {
    Value value;
    std::uint64_t cost = 0;
    std::uint64_t steps = 0;
    std::vector<TraceEntry> trace;
};

/// e ⇓ v, n for a closed term. Applications and rec unfoldings cost 1.
EvalResult evaluate(const Signature& sig, const ExprPtr& e, const EvalOptions& opts = {});

/// map^phi(x.body, target) for a closed value target; always cost 0.
ExprPtr eval_map(const Signature& sig, const FunctorPtr& phi, const std::string& x, const ExprPtr& body,
                 const ExprPtr& target);

} // namespace costrec::src
