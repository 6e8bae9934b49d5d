#include <gtest/gtest.h>

#include "invariants.hpp"

namespace {

constexpr int kCases = 1000;

void expect_clean(const invariants::Report& r) {
  EXPECT_EQ(r.cases, kCases) << r.name;
  EXPECT_EQ(r.failures, 0) << r.name << " worst=" << r.worst << " first: " << r.first_failure;
}

}  // namespace

TEST(Properties, Range) { expect_clean(invariants::range(kCases, 101)); }
TEST(Properties, SwapSymmetry) { expect_clean(invariants::swap_symmetry(kCases, 102)); }
TEST(Properties, UnitOffset) { expect_clean(invariants::unit_offset(kCases, 103)); }
TEST(Properties, H2Independence) { expect_clean(invariants::h2_independence(kCases, 104)); }
TEST(Properties, SecondFactorBound) { expect_clean(invariants::second_factor_bound(kCases, 105)); }
TEST(Properties, QuadrantPartition) { expect_clean(invariants::quadrant_partition(kCases, 106)); }
TEST(Properties, Phi2FactorMonotone) { expect_clean(invariants::phi2_factor_monotone(kCases, 107)); }
TEST(Properties, LogFactorization) { expect_clean(invariants::log_factorization(kCases, 108)); }
