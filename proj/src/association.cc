/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/association.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <stdexcept>

namespace iab {

double
update_ema (double prev, double sample, double delta)
{
  if (!(delta > 0.0) || !(delta < 1.0))
    {
      throw std::invalid_argument ("EMA weight must lie in (0, 1)");
    }
  return (1.0 - delta) * prev + delta * sample;
}

UeEma
EmaState::ue_state (int id) const
{
  auto it = ue.find (id);
  return it == ue.end () ? UeEma{} : it->second;
}

double
EmaState::path_rate (int leaf) const
{
  auto it = path.find (leaf);
  return it == path.end () ? 1.0 : it->second;
}

std::vector<int>
Selection::scheduled_sbs () const
{
  std::vector<int> out;
  for (const auto& p : paths)
    {
      out.insert (out.end (), p.sbs_chain.begin (), p.sbs_chain.end ());
    }
  std::sort (out.begin (), out.end ());
  return out;
}

std::vector<int>
Selection::scheduled_ues () const
{
  std::vector<int> out;
  for (const auto& [s, list] : ues)
    {
      out.insert (out.end (), list.begin (), list.end ());
    }
  std::sort (out.begin (), out.end ());
  return out;
}

double
ue_pf (const UeEma& s)
{
  const double quality = std::log2 (1.0 + s.sinr);
  if (s.rate <= 0.0)
    {
      return std::numeric_limits<double>::infinity ();
    }
  return quality / s.rate;
}

std::vector<int>
select_ues (const std::vector<int>& candidates, const EmaState& state, int k_us)
{
  if (k_us < 0)
    {
      throw std::invalid_argument ("K_us must be non-negative");
    }
  std::vector<int> order = candidates;
  std::sort (order.begin (), order.end ());
  std::stable_sort (order.begin (), order.end (), [&state] (int a, int b) {
    return ue_pf (state.ue_state (a)) > ue_pf (state.ue_state (b));
  });
  if (static_cast<int> (order.size ()) > k_us)
    {
      order.resize (k_us);
    }
  std::sort (order.begin (), order.end ());
  return order;
}

std::vector<TransmissionPath>
select_paths (const std::vector<TransmissionPath>& paths, const EmaState& state, int k_p0)
{
  if (k_p0 < 1)
    {
      throw std::invalid_argument ("K_p0 must be at least 1");
    }
  double sum = 0.0;
  for (const auto& p : paths)
    {
      sum += state.path_rate (p.leaf ());
    }
  auto pf = [&] (const TransmissionPath& p) {
    const double own = state.path_rate (p.leaf ());
    return own <= 0.0 ? std::numeric_limits<double>::infinity () : sum / own;
  };
  std::vector<TransmissionPath> order = paths;
  std::sort (order.begin (), order.end (),
             [] (const TransmissionPath& a, const TransmissionPath& b) { return a.leaf () < b.leaf (); });
  std::stable_sort (order.begin (), order.end (),
                    [&] (const TransmissionPath& a, const TransmissionPath& b) { return pf (a) > pf (b); });

  std::vector<TransmissionPath> chosen;
  std::set<int> used;
  for (const auto& p : order)
    {
      if (static_cast<int> (chosen.size ()) >= k_p0)
        {
          break;
        }
      bool clash = false;
      for (int s : p.sbs_chain)
        {
          clash = clash || used.count (s);
        }
      if (clash)
        {
          continue;
        }
      used.insert (p.sbs_chain.begin (), p.sbs_chain.end ());
      chosen.push_back (p);
    }
  std::sort (chosen.begin (), chosen.end (),
             [] (const TransmissionPath& a, const TransmissionPath& b) { return a.leaf () < b.leaf (); });
  return chosen;
}

Selection
associate (const Scenario& sc, const EmaState& state, const AssociationConfig& cfg)
{
  Selection sel;
  sel.paths = select_paths (sc.paths.all (), state, cfg.k_p0);
  for (const auto& p : sel.paths)
    {
      for (int s : p.sbs_chain)
        {
          sel.ues[s] = select_ues (sc.ues_of (s), state, cfg.k_us);
        }
    }
  return sel;
}

FrameSampleResult
frame_sample (const UeFrameRecord& record)
{
  double rate = 0.0;
  double sinr = 0.0;
  for (const auto& sf : record)
    {
      rate += sf.downlink ? sf.dl_rate : sf.ul_rate;
      const auto& segs = sf.downlink ? sf.dl_segments : sf.ul_segments;
      for (const auto& s : segs)
        {
          sinr += s.width * s.sinr;
        }
    }
  return FrameSampleResult{rate / kSubframes, sinr / kSubframes};
}

} // namespace iab
