#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

#include "cubeval/int128.hpp"

namespace cubeval {

/// Binary cubic form F = a X1^3 + b X1^2 X2 + c X1 X2^2 + d X2^3.
///
/// Coefficients are limited to |coef| <= 2^30 and arguments of evaluate() to
/// |n| <= 2^20, which keeps the discriminant and every value inside the
/// signed 128-bit range. The form itself need not be primitive or
/// irreducible; `require_standard()` enforces both where an algorithm depends
/// on them. Immutable once constructed.
class BinaryCubicForm {
 public:
  static constexpr int64_t kMaxCoefficient = int64_t{1} << 30;
  static constexpr int64_t kMaxArgument = int64_t{1} << 20;

  BinaryCubicForm(int64_t a, int64_t b, int64_t c, int64_t d);

  // Parses "a,b,c,d".
  static BinaryCubicForm parse(std::string_view text);

  int64_t a() const { return coef_[0]; }
  int64_t b() const { return coef_[1]; }
  int64_t c() const { return coef_[2]; }
  int64_t d() const { return coef_[3]; }
  const std::array<int64_t, 4>& coefficients() const { return coef_; }

  i128 disc() const { return disc_; }
  // gcd of the coefficients; 0 only for the zero form.
  uint64_t content() const { return content_; }
  bool is_primitive() const { return content_ == 1; }

  std::string to_string() const;

  friend bool operator==(const BinaryCubicForm& l, const BinaryCubicForm& r) {
    return l.coef_ == r.coef_;
  }

 private:
  std::array<int64_t, 4> coef_;
  i128 disc_;
  uint64_t content_;
};

// F(n1, n2) exactly; throws RangeError when |n1| or |n2| exceeds 2^20.
i128 evaluate(const BinaryCubicForm& form, int64_t n1, int64_t n2);

// 18abcd - 4b^3 d + b^2 c^2 - 4ac^3 - 27a^2 d^2.
i128 discriminant(const BinaryCubicForm& form);

// No linear factor over Q. A zero leading coefficient means X2 | F.
bool is_irreducible(const BinaryCubicForm& form);

// Divides out the content; signs are preserved. Throws InvalidInput on the
// zero form.
BinaryCubicForm normalize(const BinaryCubicForm& form);

// Throws InvalidInput unless the form is primitive, irreducible and has a
// nonzero discriminant.
void require_standard(const BinaryCubicForm& form);

}  // namespace cubeval
