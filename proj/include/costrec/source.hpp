#pragma once

// Source language: types, constructor-argument functors, signatures and
// expressions.

#include <costrec/error.hpp>

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

namespace costrec::src {

struct Type;
using TypePtr = std::shared_ptr<const Type>;

struct Type {
    enum class Kind { Unit, Prod, Arrow, Susp, Data, Meta };

    Kind kind = Kind::Unit;
    TypePtr left;  // Prod/Arrow left, Susp body
    TypePtr right; // Prod/Arrow right
    std::string name;
    int meta = -1; // inference variables only

    static TypePtr unit();
    static TypePtr prod(TypePtr l, TypePtr r);
    static TypePtr arrow(TypePtr dom, TypePtr cod);
    static TypePtr susp(TypePtr body);
    static TypePtr data(std::string name);
    static TypePtr meta_var(int id);
};

bool equal(const TypePtr& a, const TypePtr& b);
std::string to_string(const TypePtr& t);
bool mentions_datatype(const TypePtr& t, const std::string& name);

struct Functor;
using FunctorPtr = std::shared_ptr<const Functor>;

/// Strictly positive functor: t | tau | phi * phi | tau -> phi.
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

/// phi[arg]
TypePtr apply(const FunctorPtr& f, const TypePtr& arg);
bool equal(const FunctorPtr& a, const FunctorPtr& b);
std::string to_string(const FunctorPtr& f);
/// Number of recursive slots not under an arrow.
int direct_self_count(const FunctorPtr& f);
bool has_self(const FunctorPtr& f);

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
    enum class Kind { Var, Unit, Pair, Split, Lam, App, Delay, Force, Ctor, Rec, Map, Let };

    Kind kind = Kind::Unit;
    std::string name;       // Var name, Ctor name
    std::string var0, var1; // binders: Lam/Let/Map use var0, Split uses both
    ExprPtr a, b;           // children, see the factory functions
    std::vector<Branch> branches;
    FunctorPtr functor;
    Pos pos;
};

// Factories. Children roles are documented per form.
ExprPtr var(std::string name, Pos pos = {});
ExprPtr unit(Pos pos = {});
ExprPtr pair(ExprPtr e0, ExprPtr e1, Pos pos = {});
ExprPtr split(ExprPtr scrut, std::string x0, std::string x1, ExprPtr body, Pos pos = {});
ExprPtr lam(std::string x, ExprPtr body, Pos pos = {});
ExprPtr app(ExprPtr fn, ExprPtr arg, Pos pos = {});
ExprPtr delay(ExprPtr body, Pos pos = {});
ExprPtr force(ExprPtr body, Pos pos = {});
ExprPtr ctor(std::string name, ExprPtr arg, Pos pos = {});
ExprPtr rec(ExprPtr scrut, std::vector<Branch> branches, Pos pos = {});
/// map^phi(x.body, target)
ExprPtr map(FunctorPtr phi, std::string x, ExprPtr body, ExprPtr target, Pos pos = {});
/// let(bound, x.body)
ExprPtr let(ExprPtr bound, std::string x, ExprPtr body, Pos pos = {});

/// Syntactic values: (), pairs of values, lambdas, delays and constructors of values.
bool is_value(const ExprPtr& e);
bool is_value_or_var(const ExprPtr& e);

std::set<std::string> free_vars(const ExprPtr& e);
bool alpha_equal(const ExprPtr& a, const ExprPtr& b);

/// Capture-avoiding substitution e[v/x].
ExprPtr subst(const ExprPtr& e, const std::string& x, const ExprPtr& v);
/// Substitution of a closed term; no renaming is needed.
ExprPtr subst_closed(const ExprPtr& e, const std::string& x, const ExprPtr& v);

/// A name based on `base` not contained in `avoid`.
std::string fresh_name(const std::string& base, const std::set<std::string>& avoid);

/// Concrete syntax accepted by the parser.
std::string to_string(const ExprPtr& e);

/// A closed syntactic value.
class Value {
  public:
    Value() = default;
    explicit Value(ExprPtr e);
    [[nodiscard]] const ExprPtr& expr() const { return expr_; }
    [[nodiscard]] std::string str() const { return to_string(expr_); }
    friend bool operator==(const Value& a, const Value& b) { return alpha_equal(a.expr_, b.expr_); }

  private:
    ExprPtr expr_;
};

struct Definition {
    std::string name;
    TypePtr ascription; // may be null
    ExprPtr body;
    Pos pos;
};

struct Program {
    Signature signature;
    std::vector<Definition> defs;

    [[nodiscard]] const Definition* find_def(const std::string& name) const;
};

/// Replaces references to defs by their (recursively inlined) bodies.
ExprPtr inline_defs(const Program& prog, const ExprPtr& e);
/// Inlined body of a named def.
ExprPtr inlined_def(const Program& prog, const std::string& name);

} // namespace costrec::src
