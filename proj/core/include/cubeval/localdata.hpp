#pragma once

#include <cstdint>
#include <shared_mutex>
#include <unordered_map>
#include <utility>
#include <vector>

#include "cubeval/forms.hpp"
#include "cubeval/int128.hpp"

namespace cubeval::local {

// Work caps. Exceeding either raises CapacityError.
inline constexpr uint64_t kBruteForcePairCap = 100'000'000;  // listed pairs
inline constexpr uint64_t kLiftNodeCap = 10'000'000;

struct AffineRoot {
  uint64_t value;
  // Multiplicity of the root modulo p that this root reduces to.
  unsigned multiplicity;

  friend bool operator==(const AffineRoot&, const AffineRoot&) = default;
};

/// Roots of F(t, 1) modulo p^k, plus the point at infinity (p | a).
struct ProjectiveRootSet {
  uint64_t p = 0;
  unsigned k = 1;
  uint64_t modulus = 0;  // p^k
  std::vector<AffineRoot> affine_roots;  // sorted by value
  bool has_infinity_root = false;

  // Projective roots modulo p; meaningful for k == 1.
  unsigned count() const {
    return static_cast<unsigned>(affine_roots.size()) + (has_infinity_root ? 1 : 0);
  }
  bool all_simple() const;
};

struct LocalData {
  uint64_t p = 0;
  unsigned nu = 0;
  bool singular = false;
  bool ramified_hint = false;  // p | disc(F)
};

struct GammaValue {
  uint64_t d = 0;
  u128 gamma = 0;
};

using ResiduePair = std::pair<uint64_t, uint64_t>;

ProjectiveRootSet roots_mod_p(const BinaryCubicForm& form, uint64_t p);

// Simple roots are Hensel-lifted uniquely. Roots that reduce to a multiple
// root are found by exhaustive digit-by-digit search.
ProjectiveRootSet lift_roots(const BinaryCubicForm& form, uint64_t p, unsigned k);

// p | 6 q a d disc(F): a computable superset of the primes where the local
// picture degenerates.
bool is_singular(const BinaryCubicForm& form, uint64_t p, uint64_t q = 1);

LocalData nu_p(const BinaryCubicForm& form, uint64_t p, uint64_t q = 1);

// Every prime dividing 6 q a d disc(F). Throws Unsupported when that product
// vanishes (every prime is then singular).
std::vector<uint64_t> singular_primes(const BinaryCubicForm& form, uint64_t q = 1);

// gamma_F(p^k) = #{(n1, n2) mod p^k : p^k | F(n1, n2)}.
u128 gamma_prime_power(const BinaryCubicForm& form, uint64_t p, unsigned k);

GammaValue gamma_F(const BinaryCubicForm& form, uint64_t d);

// All pairs modulo p^k counted by gamma_prime_power.
std::vector<ResiduePair> solution_pairs(const BinaryCubicForm& form, uint64_t p,
                                        unsigned k);

/// Memo of LocalData keyed by prime. Concurrent readers, one writer at a time.
class LocalDataCache {
 public:
  explicit LocalDataCache(BinaryCubicForm form, uint64_t q = 1)
      : form_(form), q_(q) {}

  LocalData get(uint64_t p) const;
  const BinaryCubicForm& form() const { return form_; }

 private:
  BinaryCubicForm form_;
  uint64_t q_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<uint64_t, LocalData> memo_;
};

}  // namespace cubeval::local
