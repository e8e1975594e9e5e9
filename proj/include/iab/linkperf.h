/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_LINKPERF_H
#define IAB_LINKPERF_H

#include "iab/allocation.h"
#include "iab/config.h"
#include "iab/frames.h"
#include "iab/radio.h"
#include "iab/scenario.h"

#include <utility>
#include <vector>

namespace iab {

enum class LinkKind
{
  Access,
  Hop
};

/// A = the RA share of each subframe (first gamma), B = the BH share.
enum class Window
{
  A,
  B
};

/**
 * One directed link of a scheduled path. Links of a path run in the window
 * fixed by their position on the path:
 *
 *   tier | access           | hop to parent (blocks)
 *   -----+------------------+-----------------------
 *   1    | A                | B (1)
 *   2    | B                | A (|B2|)
 *   3    | A on THz, else B | B (|B3|)
 *
 * Access links follow the RFC of their SBS; hop links follow the RFC of the
 * child end.
 */
struct Transmission
{
  int tx;
  int rx;
  bool thz;
  bool downlink;
  LinkKind kind;
  Window window;
  int sbs;        // SBS whose rank and RFC schedule this link
  int power_var;
  int blocks;
  int path;
  int tier;
  int ue;         // -1 for hop links
};

struct InterferenceBreakdown
{
  double ra = 0.0;   // from access links
  double bh = 0.0;   // from hop links
  double thz = 0.0;  // from THz links

  double total () const { return ra + bh + thz; }
};

/// B * signal_psd / (I_ra + I_bh [+ I_thz] + B * N0).
double sinr (double signal_psd, const InterferenceBreakdown& interf, const ChannelParams& params, bool thz_link);

/// B * sum(width * log2(1 + SINR)).
double link_throughput (const std::vector<std::pair<double, double>>& width_sinr, double bandwidth_hz);

enum class InterferenceRule
{
  Equation,  // interferers active in the victim's segment
  Prose      // hop victims count BH-window interferers ranked after the segment
};

InterferenceRule parse_interference_rule (const std::string& s);

struct LinkSample
{
  int tau;
  int segment;
  double width;
  double sinr;
  InterferenceBreakdown interference;
};

/**
 * Precomputed link geometry for a layout. Every beam points at its own
 * peer; cross-link gains use the offset between that direction and the
 * interfering path. Links sharing an endpoint never interfere with each
 * other, and mmWave and THz links never interfere across bands.
 */
class LinkModel
{
public:
  LinkModel (const Scenario& sc, const Layout& layout, const RadioConfig& radio);

  const std::vector<Transmission>& links () const { return m_links; }
  const Transmission& link (int i) const { return m_links[i]; }
  int size () const { return static_cast<int> (m_links.size ()); }

  const ChannelParams& channel (bool thz) const { return thz ? m_thz : m_mm; }
  /// Received power per Watt transmitted from w's transmitter at v's receiver.
  double coupling (int w, int v) const { return m_coupling[static_cast<std::size_t> (w) * m_links.size () + v]; }
  double self_gain (int v) const { return m_selfGain[v]; }
  InterferenceRule rule () const { return m_rule; }

  /// Ranks of the scheduled SBSs (layout order) under allocation `a`.
  DurationOrdering ordering (const Allocation& a) const;
  bool active (int v, const Allocation& a, const DurationOrdering& ord, int tau, int segment) const;
  bool counts_against (int w, int v, const Allocation& a, const DurationOrdering& ord, int tau, int segment) const;

  InterferenceBreakdown interference (int v, const Allocation& a, int tau, int segment) const;
  double link_sinr (int v, const Allocation& a, int tau, int segment) const;

  /// Per-link throughput in bits/s, block multiplier included, averaged over the frame.
  std::vector<double> throughputs (const Allocation& a) const;
  /// Every (subframe, segment) sample of every active link with positive width.
  std::vector<std::vector<LinkSample>> trace (const Allocation& a) const;

  int sbs_index (int sbs) const;

private:
  double power (const Allocation& a, int v) const;
  bool downlink_at (const Allocation& a, int sbs_idx, int tau) const;

  std::vector<Transmission> m_links;
  std::vector<PowerGrid> m_grid;       // per link
  std::vector<int> m_linkSbs;          // per link, index into layout.sbs()
  std::vector<unsigned char> m_linkDownlink;
  std::vector<unsigned char> m_linkWindowA;
  std::vector<int> m_sbsIds;
  std::vector<int> m_rfcVar;           // per SBS index
  std::vector<int> m_gammaVar;         // per SBS index
  std::vector<int> m_rfcCandidates;
  int m_z = 10;
  std::vector<double> m_coupling;      // [w * n + v]: from w into v
  std::vector<double> m_couplingInto;  // [v * n + w]
  std::vector<double> m_selfGain;
  std::vector<int> m_sbsIndex;  // node id -> position in layout.sbs()
  ChannelParams m_mm;
  ChannelParams m_thz;
  InterferenceRule m_rule;
};

} // namespace iab

#endif
