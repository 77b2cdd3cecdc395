#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace provcirc {

/// Tropical value: a natural number or +infinity. Addition saturates at infinity.
struct Tropical {
  std::uint64_t value = 0;
  bool infinite = false;

  static Tropical inf() { return {0, true}; }
  friend bool operator==(const Tropical& a, const Tropical& b) {
    return a.infinite == b.infinite && (a.infinite || a.value == b.value);
  }
};

struct Count {
  std::uint64_t value = 0;
  friend bool operator==(const Count&, const Count&) = default;
};

/// Degree in [0, 1] for the (max, min) fuzzy semiring.
struct Fuzzy {
  double value = 0.0;
  friend bool operator==(const Fuzzy&, const Fuzzy&) = default;
};

/// Identifier of the provenance variable x_α attached to an EDB fact α.
using FactVar = std::uint32_t;

/// A semiring-tagged value. The alternative index is the tag; operations on
/// elements of different alternatives are rejected with MixedSemiring.
using Element = std::variant<bool, Tropical, Count, Fuzzy>;

using Assignment = std::unordered_map<FactVar, Element>;

enum class Flag : std::uint8_t {
  IdempotentAdd = 1U << 0U,
  Absorptive = 1U << 1U,
  OtimesIdempotent = 1U << 2U,
  Positive = 1U << 3U,
  NaturallyOrdered = 1U << 4U,
};

std::string_view to_string(Flag flag);
inline constexpr Flag kAllFlags[] = {Flag::IdempotentAdd, Flag::Absorptive, Flag::OtimesIdempotent,
                                     Flag::Positive, Flag::NaturallyOrdered};

class FlagSet {
 public:
  constexpr FlagSet() = default;
  constexpr FlagSet(std::initializer_list<Flag> flags) {
    for (Flag f : flags) set(f);
  }

  [[nodiscard]] constexpr bool has(Flag f) const { return (bits_ & static_cast<std::uint8_t>(f)) != 0; }
  constexpr void set(Flag f, bool on = true) {
    if (on) {
      bits_ |= static_cast<std::uint8_t>(f);
    } else {
      bits_ &= static_cast<std::uint8_t>(~static_cast<std::uint8_t>(f));
    }
  }
  friend constexpr bool operator==(FlagSet, FlagSet) = default;

 private:
  std::uint8_t bits_ = 0;
};

struct SemiringSpec {
  using BinaryOp = std::function<Element(const Element&, const Element&)>;
  using Parser = std::function<Element(std::string_view)>;

  std::string name;
  Element zero;
  Element one;
  BinaryOp add_op;
  BinaryOp mul_op;
  FlagSet flags;
  Parser parser;

  /// Checked ⊕ and ⊗: both operands must carry this semiring's tag.
  [[nodiscard]] Element add(const Element& a, const Element& b) const;
  [[nodiscard]] Element mul(const Element& a, const Element& b) const;
  [[nodiscard]] bool has(Flag f) const { return flags.has(f); }
  [[nodiscard]] bool is_zero(const Element& e) const { return e == zero; }
  [[nodiscard]] bool owns(const Element& e) const { return e.index() == zero.index(); }

  /// Parses a weight column value (e.g. "inf" for tropical, "true" for boolean).
  [[nodiscard]] Element parse(std::string_view text) const;
};

/// boolean | tropical | counting | minmax; anything else throws UnknownSemiring.
SemiringSpec builtin(std::string_view name);

std::string format(const Element& e);

/// The positivity map h: x ↦ TRUE iff x ≠ 0.
bool support(const SemiringSpec& spec, const Element& e);

struct LawResult {
  std::string law;
  bool passed = true;
  std::string counterexample;
};

struct LawReport {
  std::vector<LawResult> results;

  [[nodiscard]] bool all_passed() const;
  [[nodiscard]] const LawResult* find(std::string_view law) const;
};

/// Checks every semiring axiom and every declared flag over all sample pairs and
/// triples. Failures are reported, never thrown.
LawReport check_laws(const SemiringSpec& spec, const std::vector<Element>& samples);

/// Small representative element sets used by law tests and the CLI.
std::vector<Element> default_samples(const SemiringSpec& spec);

}  // namespace provcirc
