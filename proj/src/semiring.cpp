#include "provcirc/semiring.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <sstream>

#include "provcirc/error.hpp"

namespace provcirc {

namespace {

template <typename T>
const T& as(const Element& e, std::string_view semiring) {
  if (const T* v = std::get_if<T>(&e)) return *v;
  fail(ErrorCode::MixedSemiring, "element " + format(e) + " does not belong to " + std::string(semiring));
}

std::uint64_t parse_unsigned(std::string_view text) {
  std::uint64_t value = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    fail(ErrorCode::SyntaxError, "expected a natural number, got '" + std::string(text) + "'");
  }
  return value;
}

SemiringSpec make_boolean() {
  SemiringSpec s;
  s.name = "boolean";
  s.zero = false;
  s.one = true;
  s.add_op = [](const Element& a, const Element& b) -> Element {
    return as<bool>(a, "boolean") || as<bool>(b, "boolean");
  };
  s.mul_op = [](const Element& a, const Element& b) -> Element {
    return as<bool>(a, "boolean") && as<bool>(b, "boolean");
  };
  s.flags = {Flag::IdempotentAdd, Flag::Absorptive, Flag::OtimesIdempotent, Flag::Positive,
             Flag::NaturallyOrdered};
  s.parser = [](std::string_view t) -> Element {
    if (t == "true" || t == "1" || t == "TRUE") return true;
    if (t == "false" || t == "0" || t == "FALSE") return false;
    fail(ErrorCode::SyntaxError, "expected a boolean, got '" + std::string(t) + "'");
  };
  return s;
}

SemiringSpec make_tropical() {
  SemiringSpec s;
  s.name = "tropical";
  s.zero = Tropical::inf();
  s.one = Tropical{0, false};
  s.add_op = [](const Element& a, const Element& b) -> Element {
    const auto& x = as<Tropical>(a, "tropical");
    const auto& y = as<Tropical>(b, "tropical");
    if (x.infinite) return y;
    if (y.infinite) return x;
    return Tropical{std::min(x.value, y.value), false};
  };
  s.mul_op = [](const Element& a, const Element& b) -> Element {
    const auto& x = as<Tropical>(a, "tropical");
    const auto& y = as<Tropical>(b, "tropical");
    if (x.infinite || y.infinite) return Tropical::inf();
    if (x.value > std::numeric_limits<std::uint64_t>::max() - y.value) return Tropical::inf();
    return Tropical{x.value + y.value, false};
  };
  s.flags = {Flag::IdempotentAdd, Flag::Absorptive, Flag::Positive, Flag::NaturallyOrdered};
  s.parser = [](std::string_view t) -> Element {
    if (t == "inf" || t == "+inf" || t == "infinity") return Tropical::inf();
    return Tropical{parse_unsigned(t), false};
  };
  return s;
}

SemiringSpec make_counting() {
  SemiringSpec s;
  s.name = "counting";
  s.zero = Count{0};
  s.one = Count{1};
  s.add_op = [](const Element& a, const Element& b) -> Element {
    std::uint64_t x = as<Count>(a, "counting").value;
    std::uint64_t y = as<Count>(b, "counting").value;
    if (x > std::numeric_limits<std::uint64_t>::max() - y) fail(ErrorCode::Overflow, "counting sum overflows");
    return Count{x + y};
  };
  s.mul_op = [](const Element& a, const Element& b) -> Element {
    std::uint64_t x = as<Count>(a, "counting").value;
    std::uint64_t y = as<Count>(b, "counting").value;
    if (x != 0 && y > std::numeric_limits<std::uint64_t>::max() / x) {
      fail(ErrorCode::Overflow, "counting product overflows");
    }
    return Count{x * y};
  };
  s.flags = {Flag::Positive, Flag::NaturallyOrdered};
  s.parser = [](std::string_view t) -> Element { return Count{parse_unsigned(t)}; };
  return s;
}

SemiringSpec make_minmax() {
  SemiringSpec s;
  s.name = "minmax";
  s.zero = Fuzzy{0.0};
  s.one = Fuzzy{1.0};
  s.add_op = [](const Element& a, const Element& b) -> Element {
    return Fuzzy{std::max(as<Fuzzy>(a, "minmax").value, as<Fuzzy>(b, "minmax").value)};
  };
  s.mul_op = [](const Element& a, const Element& b) -> Element {
    return Fuzzy{std::min(as<Fuzzy>(a, "minmax").value, as<Fuzzy>(b, "minmax").value)};
  };
  s.flags = {Flag::IdempotentAdd, Flag::Absorptive, Flag::OtimesIdempotent, Flag::Positive,
             Flag::NaturallyOrdered};
  s.parser = [](std::string_view t) -> Element {
    double v = 0.0;
    std::istringstream in{std::string(t)};
    if (!(in >> v) || !in.eof() || v < 0.0 || v > 1.0) {
      fail(ErrorCode::SyntaxError, "expected a degree in [0,1], got '" + std::string(t) + "'");
    }
    return Fuzzy{v};
  };
  return s;
}

}  // namespace

std::string_view to_string(Flag flag) {
  switch (flag) {
    case Flag::IdempotentAdd: return "idempotent_add";
    case Flag::Absorptive: return "absorptive";
    case Flag::OtimesIdempotent: return "otimes_idempotent";
    case Flag::Positive: return "positive";
    case Flag::NaturallyOrdered: return "naturally_ordered";
  }
  return "unknown";
}

Element SemiringSpec::add(const Element& a, const Element& b) const {
  if (!owns(a) || !owns(b)) {
    fail(ErrorCode::MixedSemiring, "operands of " + name + " ⊕: " + format(a) + ", " + format(b));
  }
  return add_op(a, b);
}

Element SemiringSpec::mul(const Element& a, const Element& b) const {
  if (!owns(a) || !owns(b)) {
    fail(ErrorCode::MixedSemiring, "operands of " + name + " ⊗: " + format(a) + ", " + format(b));
  }
  return mul_op(a, b);
}

Element SemiringSpec::parse(std::string_view text) const {
  if (!parser) fail(ErrorCode::InvalidArgument, "semiring " + name + " has no element parser");
  return parser(text);
}

SemiringSpec builtin(std::string_view name) {
  if (name == "boolean") return make_boolean();
  if (name == "tropical") return make_tropical();
  if (name == "counting") return make_counting();
  if (name == "minmax") return make_minmax();
  fail(ErrorCode::UnknownSemiring, std::string(name));
}

std::string format(const Element& e) {
  struct Visitor {
    std::string operator()(bool b) const { return b ? "true" : "false"; }
    std::string operator()(const Tropical& t) const { return t.infinite ? "inf" : std::to_string(t.value); }
    std::string operator()(const Count& c) const { return std::to_string(c.value); }
    std::string operator()(const Fuzzy& f) const {
      std::ostringstream out;
      out << f.value;
      return out.str();
    }
  };
  return std::visit(Visitor{}, e);
}

bool support(const SemiringSpec& spec, const Element& e) { return !spec.is_zero(e); }

bool LawReport::all_passed() const {
  return std::all_of(results.begin(), results.end(), [](const LawResult& r) { return r.passed; });
}

const LawResult* LawReport::find(std::string_view law) const {
  for (const auto& r : results) {
    if (r.law == law) return &r;
  }
  return nullptr;
}

std::vector<Element> default_samples(const SemiringSpec& spec) {
  if (spec.name == "boolean") return {false, true};
  if (spec.name == "tropical") return {Tropical{0, false}, Tropical{1, false}, Tropical{2, false}, Tropical::inf()};
  if (spec.name == "counting") return {Count{0}, Count{1}, Count{2}, Count{3}};
  if (spec.name == "minmax") return {Fuzzy{0.0}, Fuzzy{0.25}, Fuzzy{0.5}, Fuzzy{1.0}};
  return {spec.zero, spec.one};
}

LawReport check_laws(const SemiringSpec& spec, const std::vector<Element>& samples) {
  if (samples.empty()) fail(ErrorCode::InvalidArgument, "check_laws needs at least one sample");
  LawReport report;
  auto law = [&](std::string name, auto&& holds) {
    LawResult r{std::move(name), true, {}};
    try {
      holds(r);
    } catch (const Error& e) {
      r.passed = false;
      r.counterexample = e.what();
    }
    report.results.push_back(std::move(r));
  };
  auto refute = [](LawResult& r, std::initializer_list<const Element*> witness) {
    if (!r.passed) return;
    r.passed = false;
    std::string text;
    for (const Element* w : witness) {
      if (!text.empty()) text += ", ";
      text += format(*w);
    }
    r.counterexample = text;
  };
  const auto& S = samples;
  auto add = [&](const Element& a, const Element& b) { return spec.add(a, b); };
  auto mul = [&](const Element& a, const Element& b) { return spec.mul(a, b); };

  law("add_associative", [&](LawResult& r) {
    for (const auto& a : S)
      for (const auto& b : S)
        for (const auto& c : S)
          if (add(add(a, b), c) != add(a, add(b, c))) refute(r, {&a, &b, &c});
  });
  law("add_commutative", [&](LawResult& r) {
    for (const auto& a : S)
      for (const auto& b : S)
        if (add(a, b) != add(b, a)) refute(r, {&a, &b});
  });
  law("add_identity", [&](LawResult& r) {
    for (const auto& a : S)
      if (add(a, spec.zero) != a) refute(r, {&a});
  });
  law("mul_associative", [&](LawResult& r) {
    for (const auto& a : S)
      for (const auto& b : S)
        for (const auto& c : S)
          if (mul(mul(a, b), c) != mul(a, mul(b, c))) refute(r, {&a, &b, &c});
  });
  law("mul_commutative", [&](LawResult& r) {
    for (const auto& a : S)
      for (const auto& b : S)
        if (mul(a, b) != mul(b, a)) refute(r, {&a, &b});
  });
  law("mul_identity", [&](LawResult& r) {
    for (const auto& a : S)
      if (mul(a, spec.one) != a) refute(r, {&a});
  });
  law("distributive", [&](LawResult& r) {
    for (const auto& a : S)
      for (const auto& b : S)
        for (const auto& c : S)
          if (mul(a, add(b, c)) != add(mul(a, b), mul(a, c))) refute(r, {&a, &b, &c});
  });
  law("annihilation", [&](LawResult& r) {
    for (const auto& a : S)
      if (mul(a, spec.zero) != spec.zero) refute(r, {&a});
  });

  if (spec.has(Flag::IdempotentAdd) || spec.has(Flag::Absorptive)) {
    law(spec.has(Flag::IdempotentAdd) ? "idempotent_add" : "absorptive_implies_idempotent_add",
        [&](LawResult& r) {
          for (const auto& a : S)
            if (add(a, a) != a) refute(r, {&a});
        });
  }
  if (spec.has(Flag::Absorptive)) {
    law("absorptive", [&](LawResult& r) {
      for (const auto& a : S)
        if (add(spec.one, a) != spec.one) refute(r, {&a});
    });
  }
  if (spec.has(Flag::OtimesIdempotent)) {
    law("otimes_idempotent", [&](LawResult& r) {
      for (const auto& a : S)
        if (mul(a, a) != a) refute(r, {&a});
    });
  }
  if (spec.has(Flag::Positive)) {
    law("positive", [&](LawResult& r) {
      for (const auto& a : S) {
        for (const auto& b : S) {
          bool ha = support(spec, a);
          bool hb = support(spec, b);
          if (support(spec, add(a, b)) != (ha || hb)) refute(r, {&a, &b});
          if (support(spec, mul(a, b)) != (ha && hb)) refute(r, {&a, &b});
        }
      }
    });
  }
  if (spec.has(Flag::NaturallyOrdered)) {
    // a ≤ b iff a ⊕ z = b for some sampled z; antisymmetry over the samples.
    law("naturally_ordered", [&](LawResult& r) {
      auto leq = [&](const Element& a, const Element& b) {
        return std::any_of(S.begin(), S.end(), [&](const Element& z) { return add(a, z) == b; }) ||
               a == b;
      };
      for (const auto& a : S)
        for (const auto& b : S)
          if (a != b && leq(a, b) && leq(b, a)) refute(r, {&a, &b});
    });
  }
  return report;
}

}  // namespace provcirc
