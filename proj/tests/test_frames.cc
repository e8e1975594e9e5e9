/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/frames.h"

#include "doctest.h"
#include "oracle.h"

#include <numeric>
#include <stdexcept>

using namespace iab;

TEST_CASE ("RFC table")
{
  CHECK (rfc_pattern (0).pattern () == "DDUUUDDUUU");
  CHECK (rfc_pattern (0).downlink_count () == 4);
  CHECK (rfc_pattern (0).uplink_count () == 6);
  CHECK (rfc_pattern (5).downlink_count () == 9);
  CHECK (rfc_pattern (5).uplink_count () == 1);
  CHECK (rfc_pattern (2).downlink_count () == 8);

  const int want[kRfcCount] = {4, 6, 8, 7, 8, 9, 5};
  for (int d = 0; d < kRfcCount; ++d)
    {
      CAPTURE (d);
      CHECK (rfc_pattern (d).id == d);
      CHECK (rfc_pattern (d).downlink_count () == want[d]);
      for (int tau = 0; tau < kSubframes; ++tau)
        {
          CHECK (rfc_pattern (d).is_downlink (tau) == oracle::rfc_downlink (d, tau));
        }
    }
  CHECK_THROWS_AS (rfc_pattern (7), std::invalid_argument);
  CHECK_THROWS_AS (rfc_pattern (-1), std::invalid_argument);
}

TEST_CASE ("split sets")
{
  const auto z10 = duration_set (10);
  REQUIRE (z10.size () == 9);
  for (int n = 1; n <= 9; ++n)
    {
      CHECK (z10[n - 1].value () == doctest::Approx (n / 10.0));
    }
  REQUIRE (duration_set (2).size () == 1);
  CHECK (duration_set (2)[0].value () == 0.5);
  const auto z4 = duration_set (4);
  REQUIRE (z4.size () == 3);
  CHECK (z4[0].value () == 0.25);
  CHECK (z4[2].value () == 0.75);
  CHECK_THROWS_AS (duration_set (1), std::invalid_argument);
}

TEST_CASE ("split ordering")
{
  // m1 = 0.3, m2 = 0.1, m3 = 0.2
  const DurationOrdering o = order_splits ({3, 1, 2}, 10);
  CHECK (o.rank (0) == 3);
  CHECK (o.rank (1) == 1);
  CHECK (o.rank (2) == 2);
  CHECK (o.at_rank (1) == 1);
  const double want[] = {0.0, 0.1, 0.2, 0.3, 1.0};
  for (int i = 0; i <= 4; ++i)
    {
      CHECK (o.sorted_value (i) == doctest::Approx (want[i]));
    }

  const DurationOrdering eq = order_splits ({5, 5, 5}, 10);
  CHECK (eq.rank (0) == 1);
  CHECK (eq.rank (1) == 2);
  CHECK (eq.rank (2) == 3);
  CHECK (eq.segment_width (1) == 0.5);
  CHECK (eq.segment_width (2) == 0.0);
  CHECK (eq.segment_width (3) == 0.0);
  CHECK (eq.segment_width (4) == 0.5);

  const DurationOrdering one = order_splits ({4}, 10);
  CHECK (one.segments () == 2);
  CHECK (one.segment_width (1) == doctest::Approx (0.4));
  CHECK (one.segment_width (2) == doctest::Approx (0.6));

  CHECK (order_splits ({1, 1}, 4).segment_width (1) == 0.25);
  CHECK_THROWS_AS (one.segment_width (3), std::out_of_range);
  CHECK_THROWS_AS (one.segment_width (0), std::out_of_range);
}

TEST_CASE ("segment widths telescope to one")
{
  const DurationOrdering o = order_splits ({1, 2, 3}, 10);
  CHECK (o.segment_width (1) == doctest::Approx (0.1));
  CHECK (o.segment_width (4) == doctest::Approx (0.7));

  for (int z : {2, 4, 10, 30})
    {
      for (int seed = 0; seed < 20; ++seed)
        {
          std::vector<int> nums;
          for (int k = 0; k < 1 + seed % 6; ++k)
            {
              nums.push_back (1 + (seed * 7 + k * 13) % (z - 1));
            }
          const DurationOrdering ord = order_splits (nums, z);
          int slots = 0;
          for (int i = 1; i <= ord.segments (); ++i)
            {
              CHECK (ord.segment_slots (i) >= 0);
              slots += ord.segment_slots (i);
            }
          CHECK (slots == z);
        }
    }
}
