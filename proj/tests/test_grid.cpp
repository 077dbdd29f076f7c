#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numeric>

#include "cubeval/arith.hpp"
#include "cubeval/errors.hpp"
#include "cubeval/grid.hpp"
#include "cubeval/localdata.hpp"

using namespace cubeval;
using namespace cubeval::grid;

namespace {

const BinaryCubicForm kF{1, 0, 0, 2};

bool same_cells(const SieveGrid& a, const SieveGrid& b) {
  return a.cells().size() == b.cells().size() &&
         std::memcmp(a.cells().data(), b.cells().data(), a.cells().size() * sizeof(Cell)) == 0;
}

}  // namespace

TEST_CASE("small cells") {
  SieveOptions opt;
  opt.bound = 5;
  const auto g = sieve(kF, {5}, opt);
  CHECK(g.value(1, 1) == 3);
  CHECK(g.at(1, 1).cofactor == 1);
  CHECK(g.at(1, 1).largest == 3);
  CHECK(g.value(3, 5) == 277);
  CHECK(g.at(3, 5).cofactor == 277);
  CHECK(g.at(3, 5).largest == 1);
  CHECK(g.value(2, 2) == 24);
  CHECK(g.at(2, 2).cofactor == 1);
  CHECK(g.at(2, 2).Omega == 4);
  CHECK(g.at(2, 2).omega == 2);
  CHECK(g.at(2, 2).tau == 8);
}

TEST_CASE("sieve equals trial factorization restricted to the bound") {
  const BinaryCubicForm forms[] = {kF, {1, -1, -2, 1}, {3, 1, -4, 2}};
  for (const auto& f : forms) {
    for (uint64_t bound : {30, 1000}) {
      SieveOptions opt;
      opt.bound = bound;
      opt.kmax = 2;
      const SieveRegion regions[] = {{120}, {60, 7, 3, 5}, {60, 1, 0, 0, true}};
      for (const auto& region : regions) {
        const auto g = sieve(f, region, opt);
        for (uint64_t n2 = 1; n2 <= region.x; ++n2) {
          for (uint64_t n1 = 1; n1 <= region.x; ++n1) {
            const Cell& c = g.at(n1, n2);
            const u128 v = abs_u128(g.value(n1, n2));
            const auto fv = arith::factor(v);
            u128 extracted = 1, largest = 1, tau = 1;
            unsigned omega = 0, Omega = 0, maxe = 0;
            for (const auto& pp : fv.factors()) {
              if (pp.prime > bound) continue;
              for (unsigned e = 0; e < pp.exponent; ++e) extracted *= pp.prime;
              largest = pp.prime;
              tau *= pp.exponent + 1;
              ++omega;
              Omega += pp.exponent;
              maxe = std::max(maxe, pp.exponent);
            }
            if (v == 0) {
              REQUIRE(c.cofactor == 0);
              continue;
            }
            REQUIRE(c.cofactor * extracted == v);
            REQUIRE(c.largest == largest);
            REQUIRE(c.tau == tau);
            REQUIRE(c.omega == omega);
            REQUIRE(c.Omega == Omega);
            REQUIRE(c.max_exponent == maxe);
          }
        }
      }
    }
  }
}

TEST_CASE("complete recovers the full factorization") {
  const auto g = sieve(kF, {80});
  for (uint64_t n2 = 1; n2 <= 80; ++n2) {
    for (uint64_t n1 = 1; n1 <= 80; ++n1) {
      const auto full = complete(g.at(n1, n2), g.bound());
      const auto fv = arith::factor(abs_u128(g.value(n1, n2)));
      REQUIRE(full.omega == fv.omega());
      REQUIRE(full.Omega == fv.Omega());
      REQUIRE(full.tau == fv.tau());
      REQUIRE(full.largest == fv.p_plus());
    }
  }
}

TEST_CASE("strip count, thread count and banding do not change cells") {
  const SieveRegion region{150, 1, 0, 0, true};
  SieveOptions base;
  base.strips = 1;
  base.threads = 1;
  const auto ref = sieve(kF, region, base);
  for (unsigned strips : {2, 4, 8}) {
    for (unsigned threads : {1, 3}) {
      SieveOptions o = base;
      o.strips = strips;
      o.threads = threads;
      CHECK(same_cells(ref, sieve(kF, region, o)));
    }
  }
  const auto band = sieve_rows(kF, region, base, 37, 90);
  REQUIRE(band.cells().size() == 53 * 150);
  CHECK(std::memcmp(band.cells().data(), ref.cells().data() + 37 * 150,
                    band.cells().size() * sizeof(Cell)) == 0);
  uint64_t next_row = 0;
  for_each_band(kF, region, base, 41, [&](const SieveGrid& b) {
    CHECK(b.row_begin() == next_row);
    CHECK(std::memcmp(b.cells().data(), ref.cells().data() + b.row_begin() * 150,
                      b.cells().size() * sizeof(Cell)) == 0);
    next_row = b.row_end();
  });
  CHECK(next_row == 150);
}

TEST_CASE("region validation and caps") {
  CHECK_THROWS_AS(validate(SieveRegion{0}), InvalidInput);
  CHECK_THROWS_AS(validate(SieveRegion{10, 5, 5, 10}), InvalidInput);
  CHECK_NOTHROW(validate(SieveRegion{10, 5, 1, 10}));
  CHECK_THROWS_AS(sieve(kF, {kDenseMaxX + 1}), CapacityError);
  SieveOptions big;
  big.bound = kMaxBound + 1;
  CHECK_THROWS_AS(sieve(kF, {10}, big), CapacityError);
}

TEST_CASE("square divisibility only along lifted roots") {
  for (uint64_t p : {5, 11}) {
    REQUIRE_FALSE(local::is_singular(kF, p));
    const auto roots = local::lift_roots(kF, p, 2);
    const auto p2 = static_cast<int64_t>(p * p);
    for (int64_t m2 = 1; m2 <= 300; ++m2) {
      for (int64_t m1 = 1; m1 <= 300; ++m1) {
        if (std::gcd(m1, m2) != 1) continue;
        if (evaluate(kF, m1, m2) % p2 != 0) continue;
        bool on_root = false;
        for (const auto& r : roots.affine_roots) {
          on_root = on_root || (m1 - static_cast<int64_t>(r.value) * m2) % p2 == 0;
        }
        REQUIRE(on_root);
      }
    }
  }
}

TEST_CASE("smooth counts") {
  const auto g = sieve(kF, {100});
  const auto all = smooth_count(g, 1e9);
  CHECK(all.count == 10000);
  REQUIRE(all.ratio);
  CHECK(*all.ratio == doctest::Approx(1.0));
  CHECK(all.tag == "thm2-corollary");

  uint64_t prev = 0;
  for (double y : {2.0, 3.0, 10.0, 100.0, 1000.0, 1e4, 1e5, 1e6}) {
    const auto r = smooth_count(g, y);
    CHECK(r.count >= prev);
    prev = r.count;
  }
  const u128 maxv = value_bound(kF, {100});
  CHECK(smooth_count(g, static_cast<double>(maxv)).count == 10000);

  // y = 2 on [1, 50]^2: exactly the values that are powers of two
  const auto g50 = sieve(kF, {50});
  uint64_t expect = 0;
  for (int64_t a = 1; a <= 50; ++a) {
    for (int64_t b = 1; b <= 50; ++b) {
      u128 v = abs_u128(evaluate(kF, a, b));
      if ((v & (v - 1)) == 0) ++expect;
    }
  }
  CHECK(smooth_count(g50, 2).count == expect);

  // sub-square reports agree with a smaller grid
  CHECK(smooth_count(g, 1000, 50).count == smooth_count(g50, 1000).count);
}

TEST_CASE("coprime count matches Moebius inversion") {
  for (uint64_t x : {1, 7, 64, 99}) {
    const auto g = sieve(kF, {x, 1, 0, 0, true});
    int64_t expect = 0;
    for (uint64_t d = 1; d <= x; ++d) {
      const int mu = arith::factor(d).mu();
      expect += mu * static_cast<int64_t>((x / d) * (x / d));
    }
    CHECK(smooth_count(g, 1e30).count == static_cast<uint64_t>(expect));
  }
}

TEST_CASE("multiplicative sums against direct factorization") {
  const SieveRegion region{70, 1, 0, 0, true};
  const auto g = sieve(kF, region);
  double mu_sum = 0, liou = 0, omega_half = 0, sqfree = 0;
  for (int64_t a = 1; a <= 70; ++a) {
    for (int64_t b = 1; b <= 70; ++b) {
      if (std::gcd(a, b) != 1) continue;
      const auto fv = arith::factor(abs_u128(evaluate(kF, a, b)));
      mu_sum += fv.mu();
      liou += (fv.Omega() % 2 == 0) ? 1 : -1;
      omega_half += std::pow(0.5, fv.omega());
      sqfree += fv.mu() != 0;
    }
  }
  using density::Mode;
  CHECK(mean_multiplicative(g, {Mode::kMoebius, -1}).sum == mu_sum);
  CHECK(mean_multiplicative(g, {Mode::kLiouville, -1}).sum == liou);
  CHECK(mean_multiplicative(g, {Mode::kOmega, 0.5}).sum == doctest::Approx(omega_half));
  const auto kf = mean_multiplicative(g, {Mode::kKfree, 1, 2});
  CHECK(kf.sum == sqfree);
  CHECK(kf.tag == "greaves-kfree");

  const auto ones = mean_multiplicative(g, {Mode::kOmega, 1.0});
  CHECK(ones.sum == smooth_count(g, 1e30).count);
  CHECK(ones.tag == "thm1");
  REQUIRE(ones.prediction);
}

TEST_CASE("mean reports do not depend on threads and match banding") {
  const SieveRegion region{200, 1, 0, 0, true};
  const density::HSpec h{density::Mode::kOmega, 0.5};
  const auto g = sieve(kF, region);
  const auto a = mean_multiplicative(g, h, 0, 1000, 1);
  const auto b = mean_multiplicative(g, h, 0, 1000, 3);
  CHECK(a.sum == b.sum);
  CHECK(a.prediction == b.prediction);
  const auto c = mean_multiplicative_banded(kF, region, {}, h, 1000);
  CHECK(a.sum == c.sum);
  const auto s1 = smooth_count(g, 5000, 0, 1);
  const auto s2 = smooth_count_banded(kF, region, {}, 5000);
  CHECK(s1.count == s2.count);
}

TEST_CASE("divisor ladder fit") {
  std::vector<std::pair<uint64_t, double>> ladder;
  for (uint64_t x = 16; x <= 128; x += 16) {
    const double lx = std::log(double(x));
    ladder.emplace_back(x, 2 * double(x) * double(x) * lx + 3 * double(x) * double(x));
  }
  const auto fit = fit_divisor_ladder(ladder);
  CHECK(std::abs(fit.c0 - 2) < 1e-6);
  CHECK(std::abs(fit.c1 - 3) < 1e-6);
  CHECK_THROWS_AS(fit_divisor_ladder({{10, 1.0}, {20, 2.0}}), InvalidInput);

  const auto g = sieve(kF, {512});
  const auto d = divisor_sum(g);
  CHECK(d.c0 > 0);
  CHECK(d.ladder.size() == 8);
  // direct tau sum on the smallest rung
  double tau = 0;
  for (int64_t a = 1; a <= 64; ++a) {
    for (int64_t b = 1; b <= 64; ++b) {
      tau += static_cast<double>(arith::factor(abs_u128(evaluate(kF, a, b))).tau());
    }
  }
  CHECK(d.ladder.front().second == tau);
}
