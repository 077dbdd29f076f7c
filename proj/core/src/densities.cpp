#include "cubeval/densities.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <cstdlib>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/localdata.hpp"
#include "cubeval/parallel.hpp"

namespace cubeval::density {
namespace {

constexpr double kCountingCap = 4e6;  // p^(2K) residue pairs per prime

unsigned counting_depth(uint64_t p) {
  unsigned K = 1;
  double pk2 = static_cast<double>(p) * static_cast<double>(p);
  while (pk2 * static_cast<double>(p) * static_cast<double>(p) <= kCountingCap) {
    pk2 *= static_cast<double>(p) * static_cast<double>(p);
    ++K;
  }
  return K;
}

uint64_t reduce(int64_t v, uint64_t m) {
  auto r = static_cast<i128>(v) % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<uint64_t>(r);
}

// Sum over e >= 1 of h(p^e) / p^e.
double power_series(const HSpec& h, double p) {
  switch (h.mode) {
    case Mode::kOmega: return h.z / (p - 1.0);
    case Mode::kBigOmega: return h.z / (p - h.z);
    case Mode::kMoebius: return -1.0 / p;
    case Mode::kLiouville: return -1.0 / (p + 1.0);
    case Mode::kKfree: {
      double s = 0, term = 1;
      for (unsigned e = 1; e < h.k; ++e) {
        term /= p;
        s += term;
      }
      return s;
    }
  }
  return 0;
}

// Law of v_p(F(m)) on coprime-at-p pairs when m is uniform modulo p^K.
std::vector<double> law_uniform(const BinaryCubicForm& form, uint64_t p, unsigned K) {
  const double p2 = static_cast<double>(p) * static_cast<double>(p);
  // G(e) = gamma(p^e) / p^(2e); coprime share C(e) = G(e) - G(e - 3) / p^2.
  std::vector<double> G(K + 1);
  double scale = 1;
  for (unsigned e = 0; e <= K; ++e) {
    G[e] = static_cast<double>(local::gamma_prime_power(form, p, e)) / scale;
    scale *= p2;
  }
  auto coprime = [&](unsigned e) {
    const unsigned back = e >= 3 ? e - 3 : 0;
    return G[e] - G[back] / p2;
  };
  std::vector<double> law(K + 1);
  for (unsigned e = 0; e < K; ++e) law[e] = coprime(e) - coprime(e + 1);
  law[K] = coprime(K);
  return law;
}

// Exhaustive count over n modulo p^K with m = a + n q.
std::vector<double> law_progression(const BinaryCubicForm& form, uint64_t p, unsigned K,
                                    const Progression& prog) {
  uint64_t pk = 1;
  for (unsigned i = 0; i < K; ++i) pk *= p;
  const uint64_t q = prog.q % pk;
  const uint64_t a1 = reduce(prog.a1, pk), a2 = reduce(prog.a2, pk);
  const std::array<uint64_t, 4> c = {reduce(form.a(), pk), reduce(form.b(), pk),
                                     reduce(form.c(), pk), reduce(form.d(), pk)};
  std::vector<uint64_t> counts(K + 1, 0);
  for (uint64_t n1 = 0; n1 < pk; ++n1) {
    const uint64_t m1 = (a1 + arith::mulmod(n1, q, pk)) % pk;
    for (uint64_t n2 = 0; n2 < pk; ++n2) {
      const uint64_t m2 = (a2 + arith::mulmod(n2, q, pk)) % pk;
      if (m1 % p == 0 && m2 % p == 0) continue;
      // Homogeneous Horner: ((a m1 + b m2) m1 + c m2^2) m1 + d m2^3.
      uint64_t v = (arith::mulmod(c[0], m1, pk) + arith::mulmod(c[1], m2, pk)) % pk;
      const uint64_t m2sq = arith::mulmod(m2, m2, pk);
      v = (arith::mulmod(v, m1, pk) + arith::mulmod(c[2], m2sq, pk)) % pk;
      v = (arith::mulmod(v, m1, pk) + arith::mulmod(c[3], arith::mulmod(m2sq, m2, pk), pk)) %
          pk;
      unsigned e = 0;
      while (e < K && v % p == 0) {
        v /= p;
        ++e;
      }
      ++counts[e];
    }
  }
  std::vector<double> law(K + 1);
  const double total = static_cast<double>(pk) * static_cast<double>(pk);
  for (unsigned e = 0; e <= K; ++e) law[e] = static_cast<double>(counts[e]) / total;
  return law;
}

template <class FactorFn>
EulerProductResult product_over_regular(const BinaryCubicForm& form, uint64_t q,
                                        uint64_t pmax, unsigned threads, FactorFn fn) {
  EulerProductResult out;
  out.pmax = pmax;
  const auto primes = arith::primes_up_to(pmax);
  std::vector<PrimeFactor> rows(primes.size());
  std::vector<char> keep(primes.size(), 0);
  parallel_blocks(primes.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const uint64_t p = primes[i];
      if (local::is_singular(form, p, q)) continue;
      const unsigned nu = local::roots_mod_p(form, p).count();
      rows[i] = {p, nu, fn(p, nu)};
      keep[i] = 1;
    }
  });
  for (std::size_t i = 0; i < primes.size(); ++i) {
    if (!keep[i]) {
      out.excluded_singular.push_back(primes[i]);
      continue;
    }
    out.value *= rows[i].factor;
    out.per_prime.push_back(rows[i]);
  }
  out.tail_log_bound = tail_estimate(pmax);
  return out;
}

}  // namespace

double HSpec::effective_z() const {
  switch (mode) {
    case Mode::kOmega:
    case Mode::kBigOmega: return z;
    case Mode::kMoebius:
    case Mode::kLiouville: return -1.0;
    case Mode::kKfree: return k >= 2 ? 1.0 : 0.0;
  }
  return z;
}

double HSpec::at_power(unsigned e) const {
  if (e == 0) return 1.0;
  switch (mode) {
    case Mode::kOmega: return z;
    case Mode::kBigOmega: return std::pow(z, static_cast<double>(e));
    case Mode::kMoebius: return e == 1 ? -1.0 : 0.0;
    case Mode::kLiouville: return e % 2 == 1 ? -1.0 : 1.0;
    case Mode::kKfree: return e < k ? 1.0 : 0.0;
  }
  return 0;
}

HSpec parse_mode(const std::string& mode, double z) {
  HSpec h;
  h.z = z;
  if (mode == "omega") {
    h.mode = Mode::kOmega;
  } else if (mode == "Omega") {
    h.mode = Mode::kBigOmega;
  } else if (mode == "moebius") {
    h.mode = Mode::kMoebius;
    h.z = -1;
  } else if (mode == "liouville") {
    h.mode = Mode::kLiouville;
    h.z = -1;
  } else if (mode.rfind("kfree", 0) == 0) {
    h.mode = Mode::kKfree;
    h.z = 1;
    const std::string tail = mode.substr(5);
    if (!tail.empty()) {
      char* end = nullptr;
      const long k = std::strtol(tail.c_str(), &end, 10);
      if (*end != '\0' || k < 2 || k > 8) throw InvalidInput("kfree exponent must be 2..8");
      h.k = static_cast<unsigned>(k);
    }
  } else {
    throw InvalidInput("unknown mode '" + mode +
                       "' (omega, Omega, moebius, liouville, kfree[K])");
  }
  if (!(std::abs(h.z) <= 1.0)) throw InvalidInput("z must satisfy |z| <= 1");
  return h;
}

std::string to_string(const HSpec& h) {
  switch (h.mode) {
    case Mode::kOmega: return "omega";
    case Mode::kBigOmega: return "Omega";
    case Mode::kMoebius: return "moebius";
    case Mode::kLiouville: return "liouville";
    case Mode::kKfree: return h.k == 2 ? "kfree" : "kfree" + std::to_string(h.k);
  }
  return "?";
}

double sigma_factor(uint64_t p, unsigned nu, uint64_t q) {
  if (q % p == 0) throw Unsupported("sigma_factor: p divides q");
  const double pd = static_cast<double>(p);
  return (1.0 - nu / (pd + 1.0)) * (1.0 + 1.0 / pd);
}

double sigma_h_factor(uint64_t p, unsigned nu, double z, Mode mode) {
  if (mode != Mode::kOmega && mode != Mode::kBigOmega) {
    throw InvalidInput("sigma_h_factor covers the omega and Omega modes");
  }
  if (!(std::abs(z) <= 1.0)) throw InvalidInput("z must satisfy |z| <= 1");
  const double pd = static_cast<double>(p);
  const double T = mode == Mode::kOmega ? z / (pd - 1.0) : z / (pd - z);
  const double gap = 1.0 - nu / (pd + 1.0);
  return std::pow(1.0 - 1.0 / pd, z) * (1.0 + nu * ((pd - 1.0) / (pd + 1.0)) * T / gap);
}

EulerProductResult sigma_F(const BinaryCubicForm& form, uint64_t q, uint64_t pmax,
                           unsigned threads) {
  return product_over_regular(form, q, pmax, threads, [q](uint64_t p, unsigned nu) {
    return sigma_factor(p, nu, q);
  });
}

EulerProductResult sigma_F_h(const BinaryCubicForm& form, uint64_t q, double z, Mode mode,
                             uint64_t pmax, unsigned threads) {
  return product_over_regular(form, q, pmax, threads, [z, mode](uint64_t p, unsigned nu) {
    return sigma_h_factor(p, nu, z, mode);
  });
}

EulerProductResult identity_product(const BinaryCubicForm& form, uint64_t q, uint64_t pmax,
                                    unsigned threads) {
  return product_over_regular(form, q, pmax, threads, [q](uint64_t p, unsigned nu) {
    return sigma_factor(p, nu, q) * sigma_h_factor(p, nu, 1.0, Mode::kOmega);
  });
}

EulerProductResult kfree_product(const BinaryCubicForm& form, unsigned k, uint64_t pmax,
                                 unsigned threads) {
  if (k < 2) throw InvalidInput("kfree_product: k must be >= 2");
  EulerProductResult out;
  out.pmax = pmax;
  const auto primes = arith::primes_up_to(pmax);
  std::vector<PrimeFactor> rows(primes.size());
  parallel_blocks(primes.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const uint64_t p = primes[i];
      const double g = static_cast<double>(local::gamma_prime_power(form, p, k));
      const double pk2 = std::pow(static_cast<double>(p), 2.0 * k);
      rows[i] = {p, 0, 1.0 - g / pk2};
    }
  });
  for (const auto& r : rows) {
    out.value *= r.factor;
    if (local::is_singular(form, r.p)) out.excluded_singular.push_back(r.p);
  }
  out.per_prime = std::move(rows);
  out.tail_log_bound = tail_estimate(pmax);
  return out;
}

std::vector<double> valuation_law(const BinaryCubicForm& form, uint64_t p,
                                  const Progression& prog) {
  if (!arith::is_prime(p)) throw InvalidInput("valuation_law: p must be prime");
  if (prog.q == 0) throw InvalidInput("valuation_law: q must be >= 1");
  const unsigned K = counting_depth(p);
  if (prog.q % p != 0) return law_uniform(form, p, K);
  if (static_cast<double>(p) * static_cast<double>(p) > kCountingCap) {
    throw CapacityError("valuation_law: prime dividing q is too large to enumerate");
  }
  return law_progression(form, p, K, prog);
}

double local_mean_factor(const BinaryCubicForm& form, uint64_t p, const Progression& prog,
                         const HSpec& h) {
  const double pd = static_cast<double>(p);
  const double z = h.effective_z();
  const double pre = std::pow(1.0 - 1.0 / pd, z - 1.0);
  if (!local::is_singular(form, p, prog.q)) {
    const double nu = local::roots_mod_p(form, p).count();
    const double inner = (1.0 - nu / (pd + 1.0)) + nu * (pd - 1.0) / (pd + 1.0) *
                                                       power_series(h, pd);
    return pre * (1.0 - 1.0 / (pd * pd)) * inner;
  }
  const auto law = valuation_law(form, p, prog);
  double e_h = 0;
  for (unsigned e = 0; e < law.size(); ++e) e_h += h.at_power(e) * law[e];
  return pre * e_h;
}

EulerProductResult mean_constant(const BinaryCubicForm& form, const Progression& prog,
                                 const HSpec& h, uint64_t pmax, unsigned threads) {
  EulerProductResult out;
  out.pmax = pmax;
  auto primes = arith::primes_up_to(pmax);
  const auto factored = arith::factor(prog.q);
  for (const auto& pp : factored.factors()) {
    const auto p = static_cast<uint64_t>(pp.prime);
    if (p > pmax) primes.push_back(p);
  }
  std::vector<PrimeFactor> rows(primes.size());
  parallel_blocks(primes.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const uint64_t p = primes[i];
      rows[i] = {p, local::roots_mod_p(form, p).count(), local_mean_factor(form, p, prog, h)};
    }
  });
  for (const auto& r : rows) {
    out.value *= r.factor;
    if (local::is_singular(form, r.p, prog.q)) out.excluded_singular.push_back(r.p);
  }
  out.per_prime = std::move(rows);
  out.tail_log_bound = tail_estimate(pmax);
  return out;
}

double coprime_density(const Progression& prog) {
  if (prog.q == 0) throw InvalidInput("coprime_density: q must be >= 1");
  double value = 6.0 / (std::numbers::pi * std::numbers::pi);
  const auto factored = arith::factor(prog.q);
  for (const auto& pp : factored.factors()) {
    const auto p = static_cast<uint64_t>(pp.prime);
    const double pd = static_cast<double>(p);
    const bool blocked = reduce(prog.a1, p) == 0 && reduce(prog.a2, p) == 0;
    if (blocked) return 0.0;
    value /= 1.0 - 1.0 / (pd * pd);
  }
  return value;
}

double tail_estimate(uint64_t pmax) {
  if (pmax < 2) return 4.0;
  const double p = static_cast<double>(pmax);
  return 4.0 / (p * std::log(p));
}

}  // namespace cubeval::density
