#include "cubeval/forms.hpp"

#include <cstdlib>
#include <numeric>
#include <vector>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"

namespace cubeval {
namespace {

std::vector<uint64_t> divisors_of(uint64_t n) {
  std::vector<uint64_t> divs{1};
  auto fv = arith::factor(n);
  for (const auto& pp : fv.factors()) {
    std::size_t base = divs.size();
    uint64_t power = 1;
    for (unsigned e = 0; e < pp.exponent; ++e) {
      power *= static_cast<uint64_t>(pp.prime);
      for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * power);
    }
  }
  return divs;
}

// Exact value at arguments bounded by 2^30, where no term can overflow.
i128 evaluate_unchecked(const BinaryCubicForm& f, i128 x, i128 y) {
  return ((f.a() * x + f.b() * y) * x + f.c() * y * y) * x + f.d() * y * y * y;
}

}  // namespace

BinaryCubicForm::BinaryCubicForm(int64_t a, int64_t b, int64_t c, int64_t d)
    : coef_{a, b, c, d} {
  for (int64_t v : coef_) {
    if (v > kMaxCoefficient || v < -kMaxCoefficient) {
      throw RangeError("form coefficient exceeds 2^30 in absolute value");
    }
  }
  disc_ = discriminant(*this);
  uint64_t g = 0;
  for (int64_t v : coef_) g = std::gcd(g, static_cast<uint64_t>(std::llabs(v)));
  content_ = g;
}

BinaryCubicForm BinaryCubicForm::parse(std::string_view text) {
  std::array<int64_t, 4> vals{};
  std::size_t pos = 0;
  for (int i = 0; i < 4; ++i) {
    std::size_t comma = text.find(',', pos);
    bool last = i == 3;
    if (last != (comma == std::string_view::npos)) {
      throw InvalidInput("form must be four comma-separated integers 'a,b,c,d'");
    }
    auto piece = text.substr(pos, last ? std::string_view::npos : comma - pos);
    i128 v = parse_i128(piece);
    if (v > kMaxCoefficient || v < -kMaxCoefficient) {
      throw InvalidInput("form coefficient exceeds 2^30 in absolute value");
    }
    vals[i] = static_cast<int64_t>(v);
    pos = comma + 1;
  }
  return BinaryCubicForm(vals[0], vals[1], vals[2], vals[3]);
}

std::string BinaryCubicForm::to_string() const {
  return std::to_string(a()) + "," + std::to_string(b()) + "," +
         std::to_string(c()) + "," + std::to_string(d());
}

i128 evaluate(const BinaryCubicForm& form, int64_t n1, int64_t n2) {
  constexpr int64_t lim = BinaryCubicForm::kMaxArgument;
  if (n1 > lim || n1 < -lim || n2 > lim || n2 < -lim) {
    throw RangeError("evaluate: arguments must satisfy |n| <= 2^20");
  }
  return evaluate_unchecked(form, n1, n2);
}

i128 discriminant(const BinaryCubicForm& form) {
  const i128 a = form.a(), b = form.b(), c = form.c(), d = form.d();
  return 18 * a * b * c * d - 4 * b * b * b * d + b * b * c * c -
         4 * a * c * c * c - 27 * a * a * d * d;
}

bool is_irreducible(const BinaryCubicForm& form) {
  if (form.a() == 0) return false;
  if (form.d() == 0) return false;  // X1 divides F
  // A rational root r/s of F(t, 1) has r | d and s | a, i.e. F(r, s) = 0.
  const auto num = divisors_of(static_cast<uint64_t>(std::llabs(form.d())));
  const auto den = divisors_of(static_cast<uint64_t>(std::llabs(form.a())));
  for (uint64_t r : num) {
    for (uint64_t s : den) {
      if (std::gcd(r, s) != 1) continue;
      for (int sign : {1, -1}) {
        if (evaluate_unchecked(form, sign * static_cast<i128>(r), s) == 0) {
          return false;
        }
      }
    }
  }
  return true;
}

BinaryCubicForm normalize(const BinaryCubicForm& form) {
  const uint64_t g = form.content();
  if (g == 0) throw InvalidInput("normalize: zero form");
  const auto s = static_cast<int64_t>(g);
  return BinaryCubicForm(form.a() / s, form.b() / s, form.c() / s, form.d() / s);
}

void require_standard(const BinaryCubicForm& form) {
  if (!form.is_primitive()) {
    throw InvalidInput("form " + form.to_string() + " is not primitive");
  }
  if (form.disc() == 0 || !is_irreducible(form)) {
    throw InvalidInput("form " + form.to_string() + " is not irreducible");
  }
}

}  // namespace cubeval
