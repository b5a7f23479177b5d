#pragma once

// Semantic values of the size-based model.

#include <costrec/ninf.hpp>

#include <functional>
#include <memory>
#include <string>
#include <vector>

namespace costrec::sem {

/// A carrier element: one NInf per component; width 0 is the one-point carrier.
using Elem = std::vector<NInf>;

bool elem_leq(const Elem& a, const Elem& b);
Elem elem_join(const Elem& a, const Elem& b);
bool elem_finite(const Elem& a);
std::string elem_str(const Elem& a);

class SemVal {
  public:
    enum class Kind { Cost, Unit, Tuple, Size, Fn };
    using Fun = std::function<SemVal(const SemVal&)>;

    SemVal();
    static SemVal cost(NInf n);
    static SemVal unit();
    static SemVal tuple(SemVal a, SemVal b);
    static SemVal size(std::string datatype, Elem e);
    static SemVal fn(Fun f);

    [[nodiscard]] Kind kind() const;
    [[nodiscard]] NInf as_cost() const;
    [[nodiscard]] const SemVal& first() const;
    [[nodiscard]] const SemVal& second() const;
    [[nodiscard]] const std::string& datatype() const;
    [[nodiscard]] const Elem& elem() const;
    [[nodiscard]] SemVal apply(const SemVal& arg) const;

    /// Numbers, tuples, `*` for one-point sizes, `<fn>` for functions.
    [[nodiscard]] std::string str() const;

    /// Structural equality; functions compare by identity.
    friend bool operator==(const SemVal& a, const SemVal& b);

  private:
    struct Node;
    explicit SemVal(std::shared_ptr<const Node> n);
    std::shared_ptr<const Node> n_;
};

/// Least upper bound. Functions are joined lazily, pointwise.
SemVal join(const SemVal& a, const SemVal& b);

/// n-ary join; functions become a single pointwise join. xs must be non-empty.
SemVal join_all(const std::vector<SemVal>& xs);

/// Caches applications of f at first-order arguments.
SemVal memoize(const SemVal& f);

/// Whether v contains no function values.
bool first_order(const SemVal& v);

/// Order on first-order values; throws for functions.
bool leq(const SemVal& a, const SemVal& b);

} // namespace costrec::sem
