#include "cubeval/acceptance.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>

#include "cubeval/arith.hpp"
#include "cubeval/densities.hpp"
#include "cubeval/dickman.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/expsums.hpp"
#include "cubeval/grid.hpp"
#include "cubeval/localdata.hpp"
#include "cubeval/type_one.hpp"

namespace cubeval::acceptance {
namespace {

Outcome begin(int id, std::string title) {
  Outcome o;
  o.id = id;
  o.title = std::move(title);
  return o;
}

const BinaryCubicForm kMain(1, 0, 0, 2);

std::vector<BinaryCubicForm> oracle_forms() {
  return {kMain, BinaryCubicForm(1, -1, -2, 1), BinaryCubicForm(3, 1, -4, 2)};
}

std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

uint64_t reduce(int64_t v, uint64_t m) {
  auto r = static_cast<i128>(v) % static_cast<i128>(m);
  if (r < 0) r += m;
  return static_cast<uint64_t>(r);
}

// #{(n1, n2) mod d : d | F(n1, n2)} by enumeration.
uint64_t gamma_bruteforce(const BinaryCubicForm& f, uint64_t d) {
  const uint64_t a = reduce(f.a(), d), b = reduce(f.b(), d), c = reduce(f.c(), d),
                 e = reduce(f.d(), d);
  uint64_t count = 0;
  for (uint64_t s = 0; s < d; ++s) {
    const uint64_t s2 = s * s % d, s3 = s2 * s % d;
    const uint64_t bs = b * s % d, cs2 = c * s2 % d, ds3 = e * s3 % d;
    for (uint64_t t = 0; t < d; ++t) {
      const uint64_t v = (((a * t + bs) % d * t + cs2) % d * t + ds3) % d;
      if (v == 0) ++count;
    }
  }
  return count;
}

using Clock = std::chrono::steady_clock;

// Criterion 1: closed/structural gamma against enumeration for d <= 300.
Outcome gamma_oracle() {
  Outcome o = begin(1, "gamma_F(d) closed path equals brute force, d <= 300, three forms");
  uint64_t checked = 0, bad = 0;
  for (const auto& f : oracle_forms()) {
    require_standard(f);
    for (uint64_t d = 1; d <= 300; ++d) {
      ++checked;
      if (static_cast<uint64_t>(local::gamma_F(f, d).gamma) != gamma_bruteforce(f, d)) ++bad;
    }
  }
  o.passed = bad == 0;
  o.detail = std::to_string(checked) + " values, " + std::to_string(bad) + " mismatches";
  return o;
}

// Criterion 2: gamma_F(p) = r(p)(p - 1) + 1, gamma counted by enumeration.
Outcome prime_identity() {
  Outcome o = begin(2, "gamma_F(p) = r(p)(p-1) + 1 for p <= 1000");
  uint64_t checked = 0, bad = 0;
  for (const auto& f : oracle_forms()) {
    for (uint64_t p : arith::primes_up_to(1000)) {
      ++checked;
      const uint64_t r = local::roots_mod_p(f, p).count();
      if (gamma_bruteforce(f, p) != r * (p - 1) + 1) ++bad;
    }
  }
  o.passed = bad == 0;
  o.detail = std::to_string(checked) + " (form, p) cases, " + std::to_string(bad) + " failures";
  return o;
}

// Criterion 3: sampled exponential sums, closed form against direct summation.
Outcome exponential_sums() {
  Outcome o = begin(3, "exponential sums: closed form vs brute force to 1e-9");
  std::mt19937_64 rng(20240917);
  const std::vector<BinaryCubicForm> forms = {kMain, BinaryCubicForm(1, 0, 0, 5)};
  struct Site {
    const BinaryCubicForm* form;
    uint64_t p;
    unsigned k;
    uint64_t pk;
    std::vector<uint64_t> roots;
  };
  std::vector<Site> sites;
  for (const auto& f : forms) {
    for (uint64_t p : arith::primes_up_to(60)) {
      if (local::is_singular(f, p)) continue;
      uint64_t pk = 1;
      for (unsigned k = 1; k <= 4; ++k) {
        pk *= p;
        if (pk > 1400) break;
        std::vector<uint64_t> roots;
        for (const auto& r : local::lift_roots(f, p, k).affine_roots) roots.push_back(r.value);
        if (!roots.empty()) sites.push_back({&f, p, k, pk, roots});
      }
    }
  }
  const int cases = 12'000;
  int bad = 0;
  double worst = 0;
  int full = 0, minus = 0, zero = 0, reduced = 0, unrestricted = 0;
  for (int i = 0; i < cases; ++i) {
    const Site& s = sites[rng() % sites.size()];
    expsum::ExpSumSpec spec;
    spec.p = s.p;
    spec.k = s.k;
    spec.omega = s.roots[rng() % s.roots.size()];
    spec.restricted = rng() % 4 != 0;
    if (rng() % 3 == 0) {
      spec.q = 1 + rng() % 30;
      if (spec.q % s.p == 0) spec.q += 1;
      spec.a1 = static_cast<int64_t>(rng() % 50) - 25;
      spec.a2 = static_cast<int64_t>(rng() % 50) - 25;
    }
    const auto pk = static_cast<int64_t>(s.pk);
    int64_t g1 = static_cast<int64_t>(rng() % (3 * s.pk)) - pk;
    int64_t g2 = 0;
    switch (rng() % 4) {
      case 0:  // g1 omega + g2 == 0 (mod p^k)
        g2 = -static_cast<int64_t>(arith::mulmod(reduce(g1, s.pk), spec.omega, s.pk));
        break;
      case 1: {  // exact valuation k - 1
        const int64_t unit = 1 + static_cast<int64_t>(rng() % (s.p - 1));
        g2 = -static_cast<int64_t>(arith::mulmod(reduce(g1, s.pk), spec.omega, s.pk)) +
             unit * (pk / static_cast<int64_t>(s.p));
        break;
      }
      case 2: {  // common factor p^k0 in (g1, g2)
        const auto scale = static_cast<int64_t>(s.p);
        g1 = scale * (static_cast<int64_t>(rng() % s.pk) - pk / 2);
        g2 = scale * (static_cast<int64_t>(rng() % s.pk) - pk / 2);
        break;
      }
      default: g2 = static_cast<int64_t>(rng() % (3 * s.pk)) - pk;
    }
    spec.g1 = g1;
    spec.g2 = g2;
    const auto closed = expsum::exp_sum_closed(*s.form, spec);
    const auto brute = expsum::exp_sum_bruteforce(spec);
    const double err = std::abs(closed.value - brute);
    worst = std::max(worst, err);
    if (!(err <= 1e-9)) ++bad;
    if (!spec.restricted) {
      ++unrestricted;
      continue;
    }
    if (closed.reduced_by > 0) ++reduced;
    switch (closed.branch) {
      case expsum::Branch::kFull: ++full; break;
      case expsum::Branch::kMinus: ++minus; break;
      case expsum::Branch::kZero: ++zero; break;
    }
  }
  const bool covered = full > 0 && minus > 0 && zero > 0 && reduced > 0 && unrestricted > 0;
  o.passed = bad == 0 && covered;
  o.detail = std::to_string(cases) + " cases, max error " + fmt(worst, 3) + ", branches full " +
             std::to_string(full) + " / minus " + std::to_string(minus) + " / zero " +
             std::to_string(zero) + ", reduced " + std::to_string(reduced) +
             ", unrestricted " + std::to_string(unrestricted);
  return o;
}

// Criterion 4: Dickman rho.
Outcome dickman_checks() {
  Outcome o = begin(4, "Dickman rho: rho(2), delay identity, -u log u asymptotics");
  const auto table = dickman::build_rho(12.0, 1.0 / 64);
  const double e2 = std::abs(table(2.0) - (1.0 - std::log(2.0)));
  const auto ten = dickman::build_rho(10.0, 1.0 / 64);
  const double resid = dickman::delay_residual(ten);
  double lo = 10, hi = 0;
  for (double u = 6.0; u <= 12.0 + 1e-12; u += 0.25) {
    const double r = std::log(table(u)) / (-u * std::log(u));
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  o.passed = e2 < 1e-9 && resid < 1e-9 && lo >= 0.75 && hi <= 1.25;
  o.detail = "|rho(2) - (1 - ln 2)| = " + fmt(e2, 3) + ", delay residual " + fmt(resid, 3) +
             ", log rho / (-u log u) in [" + fmt(lo, 4) + ", " + fmt(hi, 4) + "]";
  return o;
}

// Criterion 5: per-prime identity and convergence of the identity product.
Outcome euler_identity(unsigned threads) {
  Outcome o = begin(5, "Euler identity per prime to 1e-12; product stable within 4/pmax");
  double worst = 0;
  uint64_t primes = 0;
  for (uint64_t p : arith::primes_up_to(10'000)) {
    if (local::is_singular(kMain, p)) continue;
    ++primes;
    const double target = 1.0 - 1.0 / (static_cast<double>(p) * static_cast<double>(p));
    for (unsigned nu = 0; nu <= 3; ++nu) {
      for (auto mode : {density::Mode::kOmega, density::Mode::kBigOmega}) {
        const double v = density::sigma_factor(p, nu) * density::sigma_h_factor(p, nu, 1.0, mode);
        worst = std::max(worst, std::abs(v - target));
      }
    }
  }
  bool converged = true;
  double worst_scaled = 0, sigma_scaled = 0;
  double prev = 0, prev_sigma = 0;
  uint64_t prev_pmax = 0;
  for (uint64_t pmax = 1000; pmax <= 128'000; pmax *= 2) {
    const double v = std::log(density::identity_product(kMain, 1, pmax, threads).value);
    const double s = std::log(density::sigma_F(kMain, 1, pmax, threads).value);
    if (prev_pmax != 0) {
      const double scaled = std::abs(v - prev) * static_cast<double>(prev_pmax) / 4.0;
      worst_scaled = std::max(worst_scaled, scaled);
      sigma_scaled = std::max(sigma_scaled,
                              std::abs(s - prev_sigma) * static_cast<double>(prev_pmax) / 4.0);
      if (scaled > 1.0) converged = false;
    }
    prev = v;
    prev_sigma = s;
    prev_pmax = pmax;
  }
  o.passed = worst <= 1e-12 && converged;
  o.detail = std::to_string(primes) + " regular primes, max identity error " + fmt(worst, 3) +
             "; doubling pmax 1000..128000 moves log(product) by at most " +
             fmt(worst_scaled, 3) + " x 4/pmax (sigma(F) alone: " + fmt(sigma_scaled, 3) +
             " x 4/pmax, reported only)";
  return o;
}

// Criterion 6: sieve against factorization at x = 200, strip independence.
Outcome sieve_correctness() {
  Outcome o = begin(6, "sieve equals arith.factor at x = 200; 1/4/8 strips bit-identical");
  const grid::SieveRegion region{200, 1, 0, 0, false};
  grid::SieveOptions opt;
  opt.strips = 1;
  opt.threads = 1;
  const auto g1 = grid::sieve(kMain, region, opt);
  uint64_t bad = 0;
  for (uint64_t n2 = 1; n2 <= region.x; ++n2) {
    for (uint64_t n1 = 1; n1 <= region.x; ++n1) {
      const auto f = grid::complete(g1.at(n1, n2), g1.bound());
      const auto ref = arith::factor(abs_u128(g1.value(n1, n2)));
      unsigned max_e = 0;
      for (const auto& pp : ref.factors()) max_e = std::max(max_e, pp.exponent);
      if (f.omega != ref.omega() || f.Omega != ref.Omega() || f.tau != ref.tau() ||
          f.largest != ref.p_plus() || f.max_exponent != max_e) {
        ++bad;
      }
    }
  }
  bool identical = true;
  for (unsigned strips : {4u, 8u}) {
    opt.strips = strips;
    opt.threads = strips;
    const auto g = grid::sieve(kMain, region, opt);
    identical = identical &&
                std::memcmp(g.cells().data(), g1.cells().data(),
                            g1.cells().size() * sizeof(grid::Cell)) == 0;
  }
  o.passed = bad == 0 && identical;
  o.detail = std::to_string(region.x * region.x) + " cells, " + std::to_string(bad) +
             " mismatches, strips " + (identical ? "identical" : "DIFFER");
  return o;
}

struct Grids {
  grid::SieveGrid all;
  grid::SieveGrid coprime;
};

Grids build_grids(unsigned threads) {
  grid::SieveOptions opt;
  opt.threads = threads;
  return {grid::sieve(kMain, {2048, 1, 0, 0, false}, opt),
          grid::sieve(kMain, {2048, 1, 0, 0, true}, opt)};
}

// Criterion 7: smooth values against x^2 rho(2) at y = x^(3/2).
Outcome smooth_trend(const Grids& g, double build_seconds) {
  Outcome o = begin(7, "smooth ratio at y = x^1.5 in [0.7, 1.3], distance to 1 nonincreasing");
  const auto t0 = Clock::now();
  bool ok = true;
  std::string text;
  for (const auto* grid_ptr : {&g.all, &g.coprime}) {
    double prev = 1e9;
    text += grid_ptr == &g.all ? "plain" : "; coprime vs /zeta(2)";
    for (uint64_t x : {256, 512, 1024, 2048}) {
      const auto rep = grid::smooth_count(*grid_ptr, std::pow(static_cast<double>(x), 1.5), x);
      const double r = rep.ratio.value_or(0.0);
      const double dist = std::abs(r - 1.0);
      if (dist > prev) ok = false;
      prev = dist;
      if (x == 2048 && (r < 0.7 || r > 1.3)) ok = false;
      text += " " + std::to_string(x) + ":" + fmt(r, 4);
    }
  }
  const double seconds =
      build_seconds + std::chrono::duration<double>(Clock::now() - t0).count();
  o.passed = ok && seconds < 600;
  o.detail = text + " (" + fmt(seconds, 3) + " s)";
  return o;
}

// Criterion 8: squarefree values against the k-free Euler product.
Outcome kfree_density(const Grids& g, unsigned threads) {
  Outcome o = begin(8, "squarefree frequency at x = 2048 within 3% of prod (1 - gamma(p^2)/p^4), p <= 1e4");
  const auto rep = grid::mean_multiplicative(g.all, density::parse_mode("kfree", 1), 2048,
                                             10'000, threads);
  const double r = rep.ratio.value_or(0.0);
  o.passed = std::abs(r - 1.0) <= 0.03;
  o.detail = "frequency " + fmt(rep.normalized, 6) + ", product " + fmt(*rep.constant, 6) +
             ", ratio " + fmt(r, 5);
  return o;
}

// Criterion 9: Moebius sums over coprime pairs.
Outcome moebius_decay(const Grids& g, unsigned threads) {
  Outcome o = begin(9, "|sum mu(F)|/x^2 over coprime pairs <= 0.1 at 1024, nonincreasing");
  bool ok = true;
  double prev = 1e9;
  std::string text;
  for (uint64_t x : {128, 256, 512, 1024}) {
    const auto rep = grid::mean_multiplicative(g.coprime, density::parse_mode("moebius", 1), x,
                                               10'000, threads);
    const double v = std::abs(rep.sum) / (static_cast<double>(x) * static_cast<double>(x));
    if (v > prev) ok = false;
    if (x == 1024 && v > 0.1) ok = false;
    prev = v;
    text += (text.empty() ? "" : " ") + std::to_string(x) + ":" + fmt(v, 4) +
            " (sum " + fmt(rep.sum, 8) + ")";
  }
  o.passed = ok;
  o.detail = text;
  return o;
}

// Criterion 10: Type I remainders at x = 1024.
Outcome type_one_scaling(unsigned threads) {
  Outcome o = begin(10, "Type I: sum |r_d| / (x sqrt D + D) max/min <= 8 at x = 1024");
  double lo = 1e300, hi = 0;
  std::string text;
  for (uint64_t D : {32, 128, 512, 2048, 8192}) {
    const auto rep = typeone::type_one_aggregate(kMain, 1024, D, threads);
    lo = std::min(lo, rep.ratio_combined);
    hi = std::max(hi, rep.ratio_combined);
    text += (text.empty() ? "" : " ") + std::to_string(D) + ":" + fmt(rep.ratio_combined, 4);
  }
  o.passed = hi / lo <= 8.0;
  o.detail = text + ", max/min " + fmt(hi / lo, 4);
  return o;
}

// Criterion 11: coprime pairs.
Outcome coprime_pairs(const Grids& g, unsigned threads) {
  Outcome o = begin(11, "coprime pairs / x^2 within 1% of 6/pi^2 at x = 2048");
  const auto rep = grid::mean_multiplicative(g.coprime, density::parse_mode("omega", 1.0),
                                             2048, 10'000, threads);
  const double target = 6.0 / (std::numbers::pi * std::numbers::pi);
  const double rel = rep.normalized / target - 1.0;
  o.passed = std::abs(rel) <= 0.01;
  o.detail = "density " + fmt(rep.normalized, 7) + ", relative deviation " + fmt(rel, 3);
  return o;
}

// Criterion 12: mean of z^omega(F) against the main term.
Outcome mean_trend(const Grids& g, unsigned threads) {
  Outcome o = begin(12, "z = 1/2 omega mean ratio in [0.5, 2] at 2048, moving toward 1 from 512");
  const auto h = density::parse_mode("omega", 0.5);
  std::vector<double> ratios;
  std::string text;
  for (uint64_t x : {512, 1024, 2048}) {
    const auto rep = grid::mean_multiplicative(g.coprime, h, x, 10'000, threads);
    ratios.push_back(rep.ratio.value_or(0.0));
    text += (text.empty() ? "" : " ") + std::to_string(x) + ":" + fmt(ratios.back(), 5) +
            " (alt " + fmt(rep.ratio_alt.value_or(0.0), 4) + ")";
  }
  const double last = ratios.back();
  o.passed = last >= 0.5 && last <= 2.0 &&
             std::abs(last - 1.0) <= std::abs(ratios.front() - 1.0);
  o.detail = text;
  return o;
}

template <class Fn>
Outcome timed(Fn&& fn) {
  const auto t0 = Clock::now();
  Outcome o;
  try {
    o = fn();
  } catch (const std::exception& e) {
    o.passed = false;
    o.detail = std::string("error: ") + e.what();
  }
  o.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  return o;
}

}  // namespace

Level parse_level(const std::string& text) {
  if (text == "quick") return Level::kQuick;
  if (text == "full") return Level::kFull;
  throw InvalidInput("unknown level '" + text + "' (quick or full)");
}

std::vector<Outcome> run(Level level, unsigned threads,
                         const std::function<void(const Outcome&)>& report) {
  std::vector<Outcome> out;
  auto emit = [&](Outcome o, int id, const char* title) {
    if (o.id == 0) {
      o.id = id;
      o.title = title;
    }
    if (report) report(o);
    out.push_back(std::move(o));
  };
  emit(timed(gamma_oracle), 1, "gamma oracle");
  emit(timed(prime_identity), 2, "prime identity");
  emit(timed(exponential_sums), 3, "exponential sums");
  emit(timed(dickman_checks), 4, "Dickman rho");
  emit(timed([&] { return euler_identity(threads); }), 5, "Euler identity");
  emit(timed(sieve_correctness), 6, "sieve correctness");

  const char* titles[] = {"smooth-value trend",  "k-free density", "Moebius decay",
                          "Type I scaling",      "coprime pairs",  "mean-value trend"};
  if (level == Level::kQuick) {
    for (int id = 7; id <= 12; ++id) {
      Outcome o = begin(id, titles[id - 7]);
      o.skipped = true;
      o.detail = "full level only";
      emit(o, id, titles[id - 7]);
    }
    return out;
  }
  const auto t0 = Clock::now();
  std::optional<Grids> grids;
  std::string grid_error;
  try {
    grids.emplace(build_grids(threads));
  } catch (const std::exception& e) {
    grid_error = e.what();
  }
  const double build_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  auto with_grids = [&](auto fn) {
    return timed([&]() -> Outcome {
      if (!grids) throw std::runtime_error("grid construction failed: " + grid_error);
      return fn(*grids);
    });
  };
  emit(with_grids([&](const Grids& g) { return smooth_trend(g, build_seconds); }), 7,
       titles[0]);
  emit(with_grids([&](const Grids& g) { return kfree_density(g, threads); }), 8, titles[1]);
  emit(with_grids([&](const Grids& g) { return moebius_decay(g, threads); }), 9, titles[2]);
  emit(timed([&] { return type_one_scaling(threads); }), 10, titles[3]);
  emit(with_grids([&](const Grids& g) { return coprime_pairs(g, threads); }), 11, titles[4]);
  emit(with_grids([&](const Grids& g) { return mean_trend(g, threads); }), 12, titles[5]);
  return out;
}

std::string format_line(const Outcome& o) {
  const char* tag = o.skipped ? "SKIP" : (o.passed ? "PASS" : "FAIL");
  std::ostringstream os;
  os << "[" << tag << "] criterion " << o.id << ": " << o.title << " -- " << o.detail;
  if (!o.skipped) {
    os.precision(3);
    os << " [" << std::fixed << o.seconds << " s]";
  }
  return os.str();
}

}  // namespace cubeval::acceptance
