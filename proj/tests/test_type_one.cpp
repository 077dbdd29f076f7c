#include <doctest.h>

#include "cubeval/errors.hpp"
#include "cubeval/localdata.hpp"
#include "cubeval/type_one.hpp"

using namespace cubeval;
using namespace cubeval::typeone;

namespace {
const BinaryCubicForm kF{1, 0, 0, 2};
}

TEST_CASE("count examples") {
  CHECK(count_divisible(kF, 4, 2) == 8);
  CHECK(count_divisible(kF, 4, 1) == 16);
  CHECK(count_divisible(kF, 4, 5) == count_divisible_bruteforce(kF, 4, 5));
}

TEST_CASE("count equals enumeration for d <= 50") {
  for (const BinaryCubicForm f : {kF, BinaryCubicForm(3, 1, -4, 2)}) {
    for (uint64_t x : {1, 13, 50, 100}) {
      for (uint64_t d = 1; d <= 50; ++d) {
        REQUIRE(count_divisible(f, x, d) == count_divisible_bruteforce(f, x, d));
      }
    }
  }
}

TEST_CASE("aggregate report") {
  const auto small = type_one_aggregate(kF, 4, 2);
  REQUIRE(small.rows.size() == 2);
  CHECK(small.rows[0].remainder == 0);
  CHECK(small.rows[1].remainder == 0);
  CHECK(type_one_aggregate(kF, 100, 1).sum_abs_r == 0);

  const auto rep = type_one_aggregate(kF, 120, 400, 2);
  for (const auto& row : rep.rows) {
    CHECK(row.gamma == local::gamma_F(kF, row.d).gamma);
    const double expect = static_cast<double>(row.count) -
                          static_cast<double>(row.gamma) * 120.0 * 120.0 /
                              (static_cast<double>(row.d) * static_cast<double>(row.d));
    CHECK(row.remainder == doctest::Approx(expect));
    if (120 % row.d == 0) CHECK(row.remainder == 0);
  }
  const auto rep1 = type_one_aggregate(kF, 120, 400, 1);
  CHECK(rep1.sum_abs_r == rep.sum_abs_r);
  CHECK_THROWS_AS(type_one_aggregate(kF, 100, kMaxD + 1), CapacityError);
}
