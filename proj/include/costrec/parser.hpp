#pragma once

#include <costrec/source.hpp>

#include <string>
#include <string_view>

namespace costrec::src {

struct ParseOptions {
    /// Number of constructors of the library `int` datatype.
    int int_width = 16;
};

/// Parses a whole program. When the text uses `int` or `eqint` without
/// declaring them, the int library (and `bool` if absent) is added.
Program parse_program(std::string_view text, const ParseOptions& opts = {});

ExprPtr parse_expr(std::string_view text);
TypePtr parse_type(std::string_view text);
FunctorPtr parse_functor(std::string_view text);

/// Source text of the int library: `datatype int = K0 of unit | ...` and
/// `def eqint : int * int -> bool`.
std::string int_library_text(int width, bool include_bool);

} // namespace costrec::src
