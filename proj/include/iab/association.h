/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_ASSOCIATION_H
#define IAB_ASSOCIATION_H

#include "iab/config.h"
#include "iab/frames.h"
#include "iab/scenario.h"

#include <array>
#include <map>
#include <vector>

namespace iab {

/// (1 - delta) * prev + delta * sample.
double update_ema (double prev, double sample, double delta);

struct UeEma
{
  double rate = 1.0;
  double sinr = 1.0;
};

/// Long-term averages. Entities without an entry use the initial values.
struct EmaState
{
  std::map<int, UeEma> ue;
  std::map<int, double> path;  // keyed by leaf SBS

  UeEma ue_state (int id) const;
  double path_rate (int leaf) const;
};

struct Selection
{
  std::vector<TransmissionPath> paths;  // ordered by leaf id
  std::map<int, std::vector<int>> ues;  // SBS -> chosen UEs, ascending

  std::vector<int> scheduled_sbs () const;
  std::vector<int> scheduled_ues () const;
};

double ue_pf (const UeEma& s);

/// Top `k_us` candidates by proportional-fair ratio; ties go to the lower id.
std::vector<int> select_ues (const std::vector<int>& candidates, const EmaState& state, int k_us);

/// Top `k_p0` paths by sum-over-own average, skipping paths that share an SBS
/// with a path already chosen.
std::vector<TransmissionPath> select_paths (const std::vector<TransmissionPath>& paths,
                                            const EmaState& state, int k_p0);

Selection associate (const Scenario& sc, const EmaState& state, const AssociationConfig& cfg);

struct SegmentSample
{
  double width;
  double sinr;
};

struct SubframeSample
{
  bool downlink = false;
  double ul_rate = 0.0;  // bits/s delivered in this subframe
  double dl_rate = 0.0;
  std::vector<SegmentSample> ul_segments;
  std::vector<SegmentSample> dl_segments;
};

using UeFrameRecord = std::array<SubframeSample, kSubframes>;

struct FrameSampleResult
{
  double throughput;
  double sinr;
};

/// Frame average of the access rate in the serving SBS's active direction,
/// and the width-weighted SINR of the same segments.
FrameSampleResult frame_sample (const UeFrameRecord& record);

} // namespace iab

#endif
