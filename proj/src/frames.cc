/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/frames.h"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace iab {

namespace {

// TD-LTE uplink-downlink configurations 0..6; S is folded into D.
const char* const kPatterns[kRfcCount] = {
  "DSUUUDSUUU",
  "DSUUDDSUUD",
  "DSUDDDSUDD",
  "DSUUUDDDDD",
  "DSUUDDDDDD",
  "DSUDDDDDDD",
  "DSUUUDSUUD",
};

std::array<Rfc, kRfcCount>
build_table ()
{
  std::array<Rfc, kRfcCount> table{};
  for (int d = 0; d < kRfcCount; ++d)
    {
      table[d].id = d;
      for (int tau = 0; tau < kSubframes; ++tau)
        {
          table[d].downlink[tau] = kPatterns[d][tau] != 'U';
        }
    }
  return table;
}

} // namespace

int
Rfc::downlink_count () const
{
  return static_cast<int> (std::count (downlink.begin (), downlink.end (), true));
}

std::string
Rfc::pattern () const
{
  std::string s;
  for (bool d : downlink)
    {
      s.push_back (d ? 'D' : 'U');
    }
  return s;
}

const Rfc&
rfc_pattern (int id)
{
  static const std::array<Rfc, kRfcCount> table = build_table ();
  if (id < 0 || id >= kRfcCount)
    {
      throw std::invalid_argument ("RFC id must be in [0, 6], got " + std::to_string (id));
    }
  return table[id];
}

std::vector<Split>
duration_set (int z)
{
  if (z < 2)
    {
      throw std::invalid_argument ("slot count Z must be at least 2");
    }
  std::vector<Split> out;
  out.reserve (z - 1);
  for (int n = 1; n < z; ++n)
    {
      out.push_back (Split{n, z});
    }
  return out;
}

DurationOrdering::DurationOrdering (const std::vector<int>& numerators, int z)
  : m_z (z)
{
  if (z < 1)
    {
      throw std::invalid_argument ("slot count must be positive");
    }
  const int m = static_cast<int> (numerators.size ());
  for (int n : numerators)
    {
      if (n < 0 || n > z)
        {
          throw std::invalid_argument ("split numerator outside [0, Z]");
        }
    }
  m_order.resize (m);
  std::iota (m_order.begin (), m_order.end (), 0);
  std::stable_sort (m_order.begin (), m_order.end (),
                    [&numerators] (int a, int b) { return numerators[a] < numerators[b]; });
  m_rank.assign (m, 0);
  m_sorted.assign (m + 2, 0);
  for (int r = 0; r < m; ++r)
    {
      m_rank[m_order[r]] = r + 1;
      m_sorted[r + 1] = numerators[m_order[r]];
    }
  m_sorted[m + 1] = z;
}

int
DurationOrdering::segment_slots (int i) const
{
  if (i < 1 || i > segments ())
    {
      throw std::out_of_range ("segment index " + std::to_string (i) + " outside [1, M+1]");
    }
  return m_sorted[i] - m_sorted[i - 1];
}

double
DurationOrdering::segment_width (int i) const
{
  return static_cast<double> (segment_slots (i)) / m_z;
}

DurationOrdering
order_splits (const std::vector<int>& numerators, int z)
{
  return DurationOrdering (numerators, z);
}

} // namespace iab
