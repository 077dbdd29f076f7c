#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cubeval/forms.hpp"

namespace cubeval::density {

enum class Mode { kOmega, kBigOmega, kMoebius, kLiouville, kKfree };

/// A multiplicative function h with h(p^e) depending only on e.
///   omega:     h(p^e) = z
///   Omega:     h(p^e) = z^e
///   moebius:   -1, 0, 0, ...   (z = -1)
///   liouville: (-1)^e          (z = -1)
///   kfree(k):  1 for e < k, else 0  (z = 1)
struct HSpec {
  Mode mode = Mode::kOmega;
  double z = 1.0;
  unsigned k = 2;  // kfree only

  // The value of h at primes, which plays the role of z in the main term.
  double effective_z() const;
  double at_power(unsigned e) const;
};

// Accepts omega, Omega, moebius, liouville, kfree (k = 2) and kfreeK such
// as kfree3. Throws InvalidInput otherwise or when |z| > 1.
HSpec parse_mode(const std::string& mode, double z);
std::string to_string(const HSpec& h);

struct PrimeFactor {
  uint64_t p;
  unsigned nu;
  double factor;
};

struct EulerProductResult {
  double value = 1.0;
  uint64_t pmax = 0;
  std::vector<uint64_t> excluded_singular;
  double tail_log_bound = 0.0;
  std::vector<PrimeFactor> per_prime;
};

// (1 - nu/(p+1)) (1 + 1/p). Throws Unsupported when p | q.
double sigma_factor(uint64_t p, unsigned nu, uint64_t q = 1);

// (1 - 1/p)^z (1 + (1 - nu/(p+1))^-1 nu (p-1)/(p+1) T), where T is
// z/(p-1) for omega and z/(p-z) for Omega. Other modes are rejected.
double sigma_h_factor(uint64_t p, unsigned nu, double z, Mode mode);

// Products over regular primes p <= pmax with p not dividing q. Singular
// primes are left out of both and listed in excluded_singular.
EulerProductResult sigma_F(const BinaryCubicForm& form, uint64_t q, uint64_t pmax,
                           unsigned threads = 1);
EulerProductResult sigma_F_h(const BinaryCubicForm& form, uint64_t q, double z,
                             Mode mode, uint64_t pmax, unsigned threads = 1);

// Over the same primes: prod sigma_factor * sigma_h_factor(z = 1).
EulerProductResult identity_product(const BinaryCubicForm& form, uint64_t q,
                                    uint64_t pmax, unsigned threads = 1);

// prod_{p <= pmax} (1 - gamma_F(p^k) / p^(2k)) over every prime.
EulerProductResult kfree_product(const BinaryCubicForm& form, unsigned k, uint64_t pmax,
                                 unsigned threads = 1);

/// Progression data: m_i = a_i + n_i q with n_i uniform.
struct Progression {
  uint64_t q = 1;
  int64_t a1 = 0;
  int64_t a2 = 0;
};

// P(p^e || F(m), p does not divide both m_i) for e = 0 .. K-1, and the mass
// with e >= K as the last entry. Computed by counting residues modulo p^K;
// K is the largest exponent with p^(2K) <= 4e6 (at least 1).
std::vector<double> valuation_law(const BinaryCubicForm& form, uint64_t p,
                                  const Progression& prog);

// (1 - 1/p)^(z-1) E[h(p^v) ; p does not divide both m_i]. Closed form at
// regular p not dividing q, counting law otherwise. The tail mass past the
// counting depth is weighted by h at that depth.
double local_mean_factor(const BinaryCubicForm& form, uint64_t p, const Progression& prog,
                         const HSpec& h);

// prod_{p <= pmax} local_mean_factor, plus every p | q. Singular primes are
// included through the counting law and listed in excluded_singular.
EulerProductResult mean_constant(const BinaryCubicForm& form, const Progression& prog,
                                 const HSpec& h, uint64_t pmax, unsigned threads = 1);

// Density of pairs with p not dividing gcd(m1, m2) for every p: the coprime
// share of the progression.
double coprime_density(const Progression& prog);

// 4 / (pmax log pmax): an estimate of C sum_{p > pmax} p^-2.
double tail_estimate(uint64_t pmax);

}  // namespace cubeval::density
