#include <doctest.h>

#include <set>

#include "nnqs/spin.hpp"

using namespace nnqs;

TEST_CASE("basis_index follows the MSB-first convention") {
  CHECK(basis_index(SpinConfiguration({-1, -1})) == 0);
  CHECK(basis_index(SpinConfiguration({-1, +1})) == 1);
  CHECK(basis_index(SpinConfiguration({+1, -1})) == 2);
  CHECK(basis_index(SpinConfiguration({+1, +1})) == 3);
}

TEST_CASE("basis_index and spin_of_index are inverse bijections") {
  for (int n = 1; n <= 6; ++n) {
    for (std::uint64_t idx = 0; idx < (std::uint64_t{1} << n); ++idx) {
      CHECK(basis_index(spin_of_index(idx, n)) == idx);
    }
  }
}

TEST_CASE("enumerate_configs covers all configurations in order") {
  const auto one = enumerate_configs(1);
  REQUIRE(one.size() == 2);
  CHECK(one[0].values == std::vector<int>{-1});
  CHECK(one[1].values == std::vector<int>{+1});

  const auto two = enumerate_configs(2);
  REQUIRE(two.size() == 4);
  for (std::uint64_t i = 0; i < 4; ++i) {
    CHECK(basis_index(two[i]) == i);
  }

  const auto six = enumerate_configs(6);
  REQUIRE(six.size() == 64);
  std::set<std::uint64_t> seen;
  for (const auto& s : six) {
    seen.insert(basis_index(s));
  }
  CHECK(seen.size() == 64);
}

TEST_CASE("invalid configurations and caps are rejected") {
  CHECK_THROWS_AS(SpinConfiguration({0, 1}), std::invalid_argument);
  CHECK_THROWS_AS(SpinConfiguration({2}), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_configs(21), std::invalid_argument);
  CHECK_THROWS_AS(enumerate_configs(0), std::invalid_argument);
  CHECK_THROWS_AS(spin_of_index(4, 2), std::invalid_argument);
}
