/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_FRAMES_H
#define IAB_FRAMES_H

#include <array>
#include <string>
#include <vector>

namespace iab {

constexpr int kSubframes = 10;
constexpr int kRfcCount = 7;

/// TDD radio frame configuration with special subframes counted as downlink.
struct Rfc
{
  int id;
  std::array<bool, kSubframes> downlink;

  int downlink_count () const;
  int uplink_count () const { return kSubframes - downlink_count (); }
  bool is_downlink (int tau) const { return downlink[tau]; }
  /// Pattern as a string over {D, U}.
  std::string pattern () const;
};

const Rfc& rfc_pattern (int id);

/// A split value gamma = num / z; the RA share of a subframe.
struct Split
{
  int num;
  int z;

  double value () const { return static_cast<double> (num) / z; }
  bool operator== (const Split& o) const { return num == o.num && z == o.z; }
};

/// {1/z, ..., (z-1)/z}.
std::vector<Split> duration_set (int z);

/**
 * Ascending arrangement of per-SBS splits. Segment i (1-based, i = 1..M+1)
 * spans [g_{i-1}, g_i] with g_0 = 0 and g_{M+1} = 1. Equal splits are ranked
 * by their position in the input (the SBS index).
 */
class DurationOrdering
{
public:
  DurationOrdering () = default;
  DurationOrdering (const std::vector<int>& numerators, int z);

  int size () const { return static_cast<int> (m_rank.size ()); }
  int z () const { return m_z; }
  int segments () const { return size () + 1; }

  /// 1-based rank of entry `idx` in the input.
  int rank (int idx) const { return m_rank[idx]; }
  /// Sorted value numerator at position i in [0, M+1]; position 0 is 0, M+1 is z.
  int sorted_num (int i) const { return m_sorted[i]; }
  double sorted_value (int i) const { return static_cast<double> (m_sorted[i]) / m_z; }
  /// Input index placed at 1-based rank r.
  int at_rank (int r) const { return m_order[r - 1]; }

  /// Width of segment i as an integer count of slots.
  int segment_slots (int i) const;
  double segment_width (int i) const;

private:
  int m_z = 1;
  std::vector<int> m_rank;
  std::vector<int> m_order;
  std::vector<int> m_sorted;
};

DurationOrdering order_splits (const std::vector<int>& numerators, int z);

} // namespace iab

#endif
