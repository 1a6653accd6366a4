// Copyright 2026 The fran_aoi Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "fran_aoi/osr_analysis.h"

#include <gtest/gtest.h>

#include "reference.h"

namespace fran_aoi {
namespace {

const NetworkConfig kTwoByTwo{2, 2, 2, 2.0, 2.0};

RequestRates Even(double v) { return RequestRates::from_rows({{v, v}, {v, v}}); }

TEST(OsrClosedFormTest, EvenSplitAnchor) {
  const OsrPolicy p{Even(0.4), {0.4, 0.2}};
  const double want = 0.25 * (2 / (0.4 * 0.64) + 2 / (0.2 * 0.64));
  EXPECT_NEAR(je_closed_form(p, kTwoByTwo), want, 1e-12);
  EXPECT_NEAR(je_closed_form(p, kTwoByTwo), 5.859375, 1e-12);
}

TEST(OsrClosedFormTest, CertainResetIsOne) {
  const NetworkConfig c{1, 1, 1, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(je_closed_form(OsrPolicy{RequestRates::from_rows({{1.0}}), {1.0}}, c), 1.0);
}

TEST(OsrClosedFormTest, DuplicatingEdgeColumnsLeavesValueUnchanged) {
  const OsrPolicy two{RequestRates::from_rows({{0.3, 0.2}, {0.1, 0.4}}), {0.5, 0.25}};
  const OsrPolicy four{RequestRates::from_rows({{0.3, 0.2, 0.3, 0.2}, {0.1, 0.4, 0.1, 0.4}}), {0.5, 0.25}};
  const NetworkConfig c4{2, 4, 2, 4.0, 2.0};
  EXPECT_NEAR(je_closed_form(two, kTwoByTwo), je_closed_form(four, c4), 1e-12);
}

TEST(OsrClosedFormTest, MatchesReferenceOnGeneralNetwork) {
  const testing::Matrix b{{0.2, 0.1, 0.3}, {0.05, 0.25, 0.2}, {0.3, 0.3, 0.3}};
  const std::vector<double> r{0.3, 0.5, 0.2};
  const NetworkConfig c{4, 3, 3, 3.0, 3.0};
  EXPECT_NEAR(je_closed_form(OsrPolicy{RequestRates::from_rows(b), r}, c),
              testing::reference_je_oblivious(b, r, 4), 1e-9);
}

TEST(OsrClosedFormTest, UnreachablePairIsInfinite) {
  const OsrPolicy p{RequestRates::from_rows({{0.8, 0.0}, {0.4, 0.4}}), {0.4, 0.2}};
  EXPECT_TRUE(is_infinite_aoi(je_closed_form(p, kTwoByTwo)));
  const OsrPolicy q{Even(0.4), {0.4, 0.0}};
  EXPECT_TRUE(is_infinite_aoi(je_closed_form(q, kTwoByTwo)));
}

TEST(OsrClosedFormTest, DecreasesInCommandRate) {
  double last = kInfiniteAoi;
  for (double r = 0.05; r <= 1.0; r += 0.05) {
    const double v = je_closed_form(OsrPolicy{Even(0.3), {r, r}}, kTwoByTwo);
    EXPECT_LT(v, last);
    last = v;
  }
}

TEST(OsrClosedFormTest, DimensionMismatchThrows) {
  EXPECT_THROW(je_closed_form(OsrPolicy{Even(0.4), {0.4}}, kTwoByTwo), DimensionError);
}

TEST(OsrFreshBoundTest, Values) {
  EXPECT_NEAR(jc_upper_bound_fresh(OsrPolicy{Even(0.4), {0.3, 0.3}}, kTwoByTwo), 0.5 * (2 / 0.24), 1e-12);
  EXPECT_NEAR(jc_upper_bound_fresh(OsrPolicy{Even(0.4), {0.3, 0.3}}, kTwoByTwo), 4.1666666666666, 1e-9);
  const NetworkConfig c{1, 1, 1, 1.0, 1.0};
  EXPECT_DOUBLE_EQ(jc_upper_bound_fresh(OsrPolicy{RequestRates::from_rows({{1.0}}), {1.0}}, c), 1.0);
}

TEST(OsrFreshBoundTest, HalvingRequestsDoublesBound) {
  const double full = jc_upper_bound_fresh(OsrPolicy{Even(0.4), {0.4, 0.2}}, kTwoByTwo);
  const double half = jc_upper_bound_fresh(OsrPolicy{Even(0.2), {0.4, 0.2}}, kTwoByTwo);
  EXPECT_NEAR(half, 2 * full, 1e-12);
  EXPECT_TRUE(is_infinite_aoi(jc_upper_bound_fresh(OsrPolicy{Even(0.0), {0.4, 0.2}}, kTwoByTwo)));
}

double ReplaceOracle(const testing::Matrix& b, const std::vector<double>& r, int M) {
  double total = 0.0;
  for (std::size_t k = 0; k < b.size(); ++k) {
    double bk = 0.0;
    for (double x : b[k]) bk += x;
    double s = (1 - bk + bk * r[k]) / (bk * r[k]);
    for (double x : b[k]) {
      if (x > 0) s += x * (1 - r[k]) / (r[k] * (1 - std::pow(1 - x, M)));
    }
    total += s;
  }
  return total / static_cast<double>(b.size());
}

TEST(OsrReplaceBoundTest, MatchesDirectEvaluation) {
  for (const testing::Matrix& b : {testing::Matrix{{0.4, 0.4}, {0.4, 0.4}}, testing::Matrix{{0.8, 0.0}, {0.0, 0.8}},
                                    testing::Matrix{{0.6, 0.2}, {0.1, 0.3}}}) {
    const double got = jc_upper_bound_replace(OsrPolicy{RequestRates::from_rows(b), {0.4, 0.2}}, kTwoByTwo);
    EXPECT_NEAR(got, ReplaceOracle(b, {0.4, 0.2}, 2), 1e-12);
  }
  EXPECT_NEAR(jc_upper_bound_replace(OsrPolicy{Even(0.4), {0.4, 0.2}}, kTwoByTwo), 5.375, 1e-12);
}

TEST(OsrReplaceBoundTest, FullCommandRateLeavesOnlyFreshTerm) {
  const OsrPolicy p{RequestRates::from_rows({{0.5, 0.2}, {0.1, 0.3}}), {1.0, 1.0}};
  EXPECT_NEAR(jc_upper_bound_replace(p, kTwoByTwo), 0.5 * (1 / 0.7 + 1 / 0.4), 1e-12);
}

TEST(OsrReplaceBoundTest, ZeroCommandRateIsInfinite) {
  EXPECT_TRUE(is_infinite_aoi(jc_upper_bound_replace(OsrPolicy{Even(0.4), {0.4, 0.0}}, kTwoByTwo)));
}

// Even split: sum_n b^(n)/zeta_n > 1, so the replace bound exceeds the fresh
// bound; a single eRRH gives the opposite ordering.
TEST(OsrBoundOrderingTest, FreshTighterAtEvenSplitReplaceAtConsolidation) {
  for (double bk : {0.2, 0.4, 0.8}) {
    const OsrPolicy even{Even(bk / 2), {0.4, 0.2}};
    const OsrPolicy cons{RequestRates::from_rows({{bk, 0.0}, {bk, 0.0}}), {0.4, 0.2}};
    EXPECT_GT(jc_upper_bound_replace(even, kTwoByTwo), jc_upper_bound_fresh(even, kTwoByTwo));
    EXPECT_LE(jc_upper_bound_replace(cons, kTwoByTwo), jc_upper_bound_fresh(cons, kTwoByTwo));
  }
}

}  // namespace
}  // namespace fran_aoi
