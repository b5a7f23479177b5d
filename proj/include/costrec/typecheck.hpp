#pragma once

#include <costrec/source.hpp>

#include <string>
#include <utility>
#include <vector>

namespace costrec::src {

struct Violation {
    std::string datatype;
    std::string ctor; // empty for datatype-level problems
    std::string message;
};

/// Well-formedness of a signature: distinct names and stratified references.
std::vector<Violation> wf_signature(const Signature& sig);

/// Throws TypeError when `t` names an undeclared datatype.
void check_type_wf(const Signature& sig, const TypePtr& t);

using Context = std::vector<std::pair<std::string, TypePtr>>;

/// Type of `e`. With `expected` set the term is checked against it, which
/// supplies lambda domains that cannot be synthesized.
TypePtr typecheck(const Signature& sig, const Context& ctx, const ExprPtr& e, const TypePtr& expected = nullptr);

/// Checks the signature and every def in order; returns the def types.
std::vector<TypePtr> check_program(const Program& prog);

/// Type of a named def of a checked program.
TypePtr def_type(const Program& prog, const std::string& name);

/// Types of all defs visible at the end of the program, latest binding last.
Context program_context(const Program& prog);

} // namespace costrec::src
