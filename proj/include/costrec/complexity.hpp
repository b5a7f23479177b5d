#pragma once

// Complexity language: cost type C, projections instead of split, no
// suspensions. cmap is a macro expanded at construction time.

#include <costrec/error.hpp>

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace costrec::cplx {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
    enum class Kind { Cost, Unit, Prod, Arrow, Data, Meta };

    Kind kind = Kind::Unit;
    TypePtr left;
    TypePtr right;
    std::string name;
    int meta = -1;

    static TypePtr cost();
    static TypePtr unit();
    static TypePtr prod(TypePtr l, TypePtr r);
    static TypePtr arrow(TypePtr dom, TypePtr cod);
    static TypePtr data(std::string name);
    static TypePtr meta_var(int id);
};

bool equal(const TypePtr& a, const TypePtr& b);
std::string to_string(const TypePtr& t);

struct Functor;
using FunctorPtr = std::shared_ptr<const Functor>;

struct Functor {
    enum class Kind { Self, Const, Prod, Arrow };

    Kind kind = Kind::Self;
    TypePtr type; // Const type, or Arrow domain
    FunctorPtr left;
    FunctorPtr right; // Prod right; Arrow codomain is `left`

    static FunctorPtr self();
    static FunctorPtr constant(TypePtr t);
    static FunctorPtr prod(FunctorPtr l, FunctorPtr r);
    static FunctorPtr arrow(TypePtr dom, FunctorPtr cod);
};

TypePtr apply(const FunctorPtr& f, const TypePtr& arg);
bool equal(const FunctorPtr& a, const FunctorPtr& b);
std::string to_string(const FunctorPtr& f);

struct Constructor {
    std::string name;
    FunctorPtr arg;
};

struct Datatype {
    std::string name;
    std::vector<Constructor> ctors;
};

struct CtorRef {
    const Datatype* datatype = nullptr;
    std::size_t index = 0;
    [[nodiscard]] const Constructor& ctor() const { return datatype->ctors[index]; }
};

class Signature {
  public:
    std::vector<Datatype> datatypes;

    [[nodiscard]] const Datatype* find(const std::string& name) const;
    [[nodiscard]] std::optional<CtorRef> find_ctor(const std::string& name) const;
};

std::string to_string(const Signature& sig);

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct Branch {
    std::string ctor;
    std::string var;
    ExprPtr body;
};

struct Expr {
    enum class Kind { Var, Zero, One, Plus, Unit, Pair, Proj, Lam, App, Ctor, Rec };

    Kind kind = Kind::Unit;
    std::string name; // Var, Ctor
    std::string var;  // Lam binder
    int index = 0;    // Proj
    ExprPtr a, b;
    std::vector<Branch> branches;
};

ExprPtr var(std::string name);
ExprPtr zero();
ExprPtr one();
ExprPtr plus(ExprPtr l, ExprPtr r);
ExprPtr unit();
ExprPtr pair(ExprPtr l, ExprPtr r);
ExprPtr proj(int i, ExprPtr e);
ExprPtr lam(std::string x, ExprPtr body);
ExprPtr app(ExprPtr fn, ExprPtr arg);
ExprPtr ctor(std::string name, ExprPtr arg);
ExprPtr rec(ExprPtr scrut, std::vector<Branch> branches);
/// 1 + (1 + ... 1), or 0.
ExprPtr numeral(std::uint64_t n);
/// n when e is a numeral in canonical form.
std::optional<std::uint64_t> numeral_value(const ExprPtr& e);

std::set<std::string> free_vars(const ExprPtr& e);
bool alpha_equal(const ExprPtr& a, const ExprPtr& b);
/// Structural identity including bound names.
bool same(const ExprPtr& a, const ExprPtr& b);
ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& v);
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);
std::size_t size(const ExprPtr& e);

/// map^Phi(x.body, target), expanded by the four defining clauses.
ExprPtr cmap_expand(const FunctorPtr& phi, const std::string& x, const ExprPtr& body, const ExprPtr& target);

/// Re-parseable concrete syntax.
std::string to_string(const ExprPtr& e);

ExprPtr parse_expr(std::string_view text);
TypePtr parse_type(std::string_view text);
FunctorPtr parse_functor(std::string_view text);
Signature parse_signature(std::string_view text);

using Context = std::vector<std::pair<std::string, TypePtr>>;
/// Result types of rec nodes, filled by ctypecheck.
using RecTypes = std::unordered_map<const Expr*, TypePtr>;

TypePtr ctypecheck(const Signature& sig, const Context& ctx, const ExprPtr& e, const TypePtr& expected = nullptr,
                   RecTypes* rec_types = nullptr);

} // namespace costrec::cplx
