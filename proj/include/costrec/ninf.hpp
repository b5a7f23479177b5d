#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace costrec {

/// Natural numbers extended with an absorbing infinity. Used for costs and
/// for the components of size-carrier elements.
class NInf {
  public:
    constexpr NInf() = default;
    constexpr NInf(std::uint64_t n) : value_(n) {} // NOLINT(google-explicit-constructor)

    static constexpr NInf infinity() {
        NInf r;
        r.inf_ = true;
        return r;
    }

    [[nodiscard]] constexpr bool is_inf() const { return inf_; }
    [[nodiscard]] constexpr bool is_finite() const { return !inf_; }

    /// Finite value; 0 for infinity (callers check is_inf first).
    [[nodiscard]] constexpr std::uint64_t value() const { return inf_ ? 0 : value_; }

    friend constexpr NInf operator+(NInf a, NInf b) {
        if (a.inf_ || b.inf_) return infinity();
        return NInf(a.value_ + b.value_);
    }
    NInf& operator+=(NInf other) { return *this = *this + other; }

    friend constexpr bool operator==(NInf a, NInf b) {
        return a.inf_ == b.inf_ && (a.inf_ || a.value_ == b.value_);
    }
    friend constexpr std::strong_ordering operator<=>(NInf a, NInf b) {
        if (a.inf_ || b.inf_) return a.inf_ <=> b.inf_;
        return a.value_ <=> b.value_;
    }

    [[nodiscard]] std::string str() const { return inf_ ? "inf" : std::to_string(value_); }

  private:
    std::uint64_t value_ = 0;
    bool inf_ = false;
};

constexpr NInf join(NInf a, NInf b) { return a < b ? b : a; }

} // namespace costrec
