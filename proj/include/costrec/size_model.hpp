#pragma once

// Per-datatype size abstractions: carriers, size functions, value
// abstraction and bounded enumeration of one-step unfoldings.

#include <costrec/complexity.hpp>
#include <costrec/semval.hpp>
#include <costrec/source.hpp>

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace costrec::size {

using sem::Elem;
using sem::SemVal;

// ---------------------------------------------------------------- carriers

/// Componentwise NInf^width; width 0 is the one-point carrier.
struct Carrier {
    std::size_t width = 1;

    [[nodiscard]] bool leq(const Elem& a, const Elem& b) const;
    [[nodiscard]] bool lt(const Elem& a, const Elem& b) const;
    [[nodiscard]] Elem join(const Elem& a, const Elem& b) const;
    [[nodiscard]] Elem join_all(const std::vector<Elem>& xs) const;
    [[nodiscard]] Elem bottom() const;
    [[nodiscard]] Elem top() const;
    /// All elements <= b; b must be finite.
    [[nodiscard]] std::vector<Elem> enumerate_upto(const Elem& b) const;
};

// ---------------------------------------------------------------- builtins

struct ModelSpec {
    enum class Kind { Ctors, Length, Nodes, Height, Unitsize, Pair, Labelmax, Ordinal };
    Kind kind = Kind::Ctors;
    std::string label; // Labelmax: the label datatype
    std::shared_ptr<const ModelSpec> left, right;

    [[nodiscard]] std::size_t width() const;
    [[nodiscard]] std::string str() const;
};

using ModelSpecPtr = std::shared_ptr<const ModelSpec>;

ModelSpecPtr parse_model_spec(std::string_view text);

struct SizeModel {
    std::string datatype;
    ModelSpecPtr spec;
    Carrier carrier;
    bool strict_descent = true;
    bool semrec = false;
};

struct Axiom {
    std::string datatype;
    std::string name; // "length-quotient"
};

/// One constructor layer with abstracted argument: a semantic value of
/// shape [[Phi_C[Delta]]] whose recursive positions hold sizes.
struct AbstractUnfolding {
    std::string ctor;
    SemVal arg;
};

class Models {
  public:
    Models() = default;
    explicit Models(cplx::Signature csig);

    [[nodiscard]] const cplx::Signature& signature() const { return csig_; }
    [[nodiscard]] const SizeModel& model(const std::string& datatype) const;
    [[nodiscard]] const std::vector<std::string>& warnings() const { return warnings_; }
    [[nodiscard]] const std::vector<Axiom>& axioms() const { return axioms_; }

    /// size(C(arg)); arg has shape [[Phi_C[Delta]]].
    [[nodiscard]] Elem size_of(const std::string& ctor, const SemVal& arg) const;

    /// Every unfolding z with size_of(z) <= bound.
    [[nodiscard]] std::vector<AbstractUnfolding> unfoldings(const std::string& datatype, const Elem& bound) const;

    /// Least and greatest semantic values of a complexity type.
    [[nodiscard]] SemVal bottom(const cplx::TypePtr& t) const;
    [[nodiscard]] SemVal top(const cplx::TypePtr& t) const;

    /// All values of a type with a finite interpretation (unit, products, one-point datatypes).
    [[nodiscard]] std::vector<SemVal> finite_values(const cplx::TypePtr& t) const;

    /// Whether the model of `datatype` is the list-shaped `length` model.
    [[nodiscard]] bool list_shaped(const std::string& datatype) const;

    // configuration
    void set_model(const std::string& datatype, ModelSpecPtr spec);
    void set_semrec(const std::string& datatype);
    void add_axiom(Axiom a);
    /// Validates every model and recomputes strict_descent and warnings.
    void validate();

  private:
    struct Collected {
        std::vector<Elem> rec;                              // recursive positions
        std::vector<std::pair<std::string, Elem>> labels; // datatype-typed constants
    };
    void collect(const cplx::FunctorPtr& f, const SemVal& v, const std::string& self, Collected& out) const;
    void collect_const(const cplx::TypePtr& t, const SemVal& v, Collected& out) const;
    Elem apply_spec(const ModelSpec& spec, std::size_t offset, const Collected& c, bool has_rec) const;
    [[nodiscard]] bool label_relevant(const std::string& datatype, const std::string& label) const;
    std::vector<SemVal> enum_functor(const cplx::FunctorPtr& f, const std::string& self, const Elem& bound,
                                     NInf label_cap) const;
    std::vector<SemVal> enum_const(const cplx::TypePtr& t, const std::string& self, NInf label_cap) const;

    cplx::Signature csig_;
    std::map<std::string, SizeModel> models_;
    std::vector<std::string> warnings_;
    std::vector<Axiom> axioms_;
};

/// Parses the line-oriented configuration:
///   model <datatype> = <builtin>      semrec <datatype>
///   axiom <datatype> = length-quotient
/// Unlisted datatypes use `ctors`.
Models load_models(std::string_view config, const cplx::Signature& csig);

/// Minimal potential bounding a closed source value of datatype type.
Elem value_size(const Models& models, const src::Signature& sig, const src::Value& v);
/// Abstraction of a closed first-order source value at type t.
SemVal abstract_value(const Models& models, const src::Signature& sig, const src::TypePtr& t, const src::ExprPtr& v);

} // namespace costrec::size
