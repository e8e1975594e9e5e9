/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/aggregate.h"

#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace iab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity ();

int
case_index (RelayCase c)
{
  return static_cast<int> (c) - 1;
}

ConstraintId
ul_flow_id (RelayCase c)
{
  switch (c)
    {
    case RelayCase::Case1:
      return ConstraintId::F40;
    case RelayCase::Case2:
      return ConstraintId::F44;
    default:
      return ConstraintId::F49;
    }
}

ConstraintId
dl_flow_id (RelayCase c)
{
  switch (c)
    {
    case RelayCase::Case1:
      return ConstraintId::F55;
    case RelayCase::Case2:
      return ConstraintId::F59;
    default:
      return ConstraintId::F64;
    }
}

ConstraintId
ul_member_id (RelayCase c)
{
  switch (c)
    {
    case RelayCase::Case1:
      return ConstraintId::F42;
    case RelayCase::Case2:
      return ConstraintId::F47;
    default:
      return ConstraintId::F53;
    }
}

ConstraintId
dl_member_id (RelayCase c)
{
  switch (c)
    {
    case RelayCase::Case1:
      return ConstraintId::F57;
    case RelayCase::Case2:
      return ConstraintId::F62;
    default:
      return ConstraintId::F68;
    }
}

} // namespace

double
ConstraintConfig::see_threshold () const
{
  return see_cons >= 0.0 ? see_cons : see_level_value (see_level);
}

double
see_level_value (const std::string& level)
{
  if (level == "LSEE")
    {
      return 0.32;
    }
  if (level == "MSEE")
    {
      return 0.48;
    }
  if (level == "HSEE")
    {
      return 0.6;
    }
  throw std::invalid_argument ("unknown SEE level '" + level + "' (expected LSEE, MSEE or HSEE)");
}

const char*
constraint_name (ConstraintId id)
{
  static const char* names[kConstraintCount] = {"40", "42", "44", "47", "49", "53", "55", "57",
                                                "59", "62", "64", "68", "C1", "C2", "C3", "C4"};
  return names[static_cast<int> (id)];
}

const std::vector<ConstraintId>&
all_constraints ()
{
  static const std::vector<ConstraintId> ids = [] {
    std::vector<ConstraintId> v;
    for (int i = 0; i < kConstraintCount; ++i)
      {
        v.push_back (static_cast<ConstraintId> (i));
      }
    return v;
  }();
  return ids;
}

ConstraintReport::ConstraintReport ()
{
  for (int i = 0; i < kConstraintCount; ++i)
    {
      m_entries[i] = ConstraintEntry{static_cast<ConstraintId> (i), true, kInf, 0};
    }
}

void
ConstraintReport::record (ConstraintId id, double slack)
{
  ConstraintEntry& e = m_entries[static_cast<int> (id)];
  e.instances++;
  e.slack = std::min (e.slack, slack);
  e.pass = e.pass && slack >= 0.0;
}

void
ConstraintReport::record_failure (ConstraintId id, double slack)
{
  ConstraintEntry& e = m_entries[static_cast<int> (id)];
  e.instances++;
  e.slack = std::min (e.slack, slack);
  e.pass = false;
}

bool
ConstraintReport::feasible () const
{
  for (const auto& e : m_entries)
    {
      if (!e.pass)
        {
          return false;
        }
    }
  return true;
}

bool
ConstraintReport::feasible (const std::vector<ConstraintId>& subset) const
{
  for (ConstraintId id : subset)
    {
      if (!at (id).pass)
        {
          return false;
        }
    }
  return true;
}

std::vector<ConstraintId>
ConstraintReport::failed () const
{
  std::vector<ConstraintId> out;
  for (const auto& e : m_entries)
    {
      if (!e.pass)
        {
          out.push_back (e.id);
        }
    }
  return out;
}

std::string
ConstraintReport::failed_string () const
{
  std::string s;
  for (ConstraintId id : failed ())
    {
      if (!s.empty ())
        {
          s += ';';
        }
      s += constraint_name (id);
    }
  return s;
}

CaseTotals
ul_totals (RelayCase c, const std::vector<PathRates>& paths, ConstraintReport& report)
{
  CaseTotals out;
  for (const auto& p : paths)
    {
      if (p.kind != c)
        {
          continue;
        }
      double carried = 0.0;
      for (const auto& t : p.tiers)
        {
          out.throughput += t.access_ul;
          out.power += t.power_ul;
          carried += t.access_ul;
          report.record (ul_flow_id (c), t.hop_ul - carried);
        }
    }
  return out;
}

CaseTotals
dl_totals (RelayCase c, const std::vector<PathRates>& paths, ConstraintReport& report)
{
  CaseTotals out;
  for (const auto& p : paths)
    {
      if (p.kind != c)
        {
          continue;
        }
      double below = 0.0;
      for (const auto& t : p.tiers)
        {
          out.power += t.power_dl;
          report.record (dl_flow_id (c), t.access_dl + below - t.hop_dl);
          below = t.hop_dl;
        }
      if (!p.tiers.empty ())
        {
          out.throughput += p.tiers.back ().hop_dl;
        }
    }
  return out;
}

bool
spectral_energy_efficiency (double t_q, double p_q, double spectrum_hz, double& out)
{
  if (!(p_q > 0.0) || !(spectrum_hz > 0.0))
    {
      out = 0.0;
      return false;
    }
  out = t_q / (p_q * spectrum_hz);
  return true;
}

double
Evaluation::objective (Objective o) const
{
  switch (o)
    {
    case Objective::AccessUl:
      return totals.ul_throughput ();
    case Objective::BackhaulDl:
      return totals.dl_throughput ();
    default:
      return totals.t_q;
    }
}

Evaluator::Evaluator (const Layout& layout, const LinkModel& links, const RadioConfig& radio,
                      const ConstraintConfig& cons)
  : m_layout (layout),
    m_links (links),
    m_radio (radio),
    m_cons (cons),
    m_seeCons (cons.see_threshold ())
{
  std::map<int, int> slot;
  for (std::size_t i = 0; i < layout.ues ().size (); ++i)
    {
      slot[layout.ues ()[i]] = static_cast<int> (i);
    }
  std::map<int, std::pair<int, int>> where;  // SBS -> (path, tier index)
  for (std::size_t p = 0; p < layout.paths ().size (); ++p)
    {
      const auto& path = layout.paths ()[p];
      const int n = static_cast<int> (path.sbs_chain.size ());
      PathVars pv;
      for (int j = 0; j < n; ++j)
        {
          const int s = path.sbs_chain[j];
          where[s] = {static_cast<int> (p), j};
          const double up = commitment_bound (cons.t_max_thd, n - j);
          for (int u : layout.ues_of (s))
            {
              pv.ul.push_back (layout.ue_power_var (u));
              m_ueBounds.push_back (UeBound{slot.at (u), up});
            }
          pv.ul.push_back (layout.sbs_ul_var (s));
          for (int peer : layout.peers_of (s))
            {
              pv.dl.push_back (layout.sbs_dl_var (s, peer));
            }
          // RFC and split choices bound both directions.
          pv.ul.push_back (layout.rfc_var (s));
          pv.dl.push_back (layout.rfc_var (s));
        }
      pv.dl.push_back (layout.mbs_var (path.top ()));
      pv.ul.push_back (layout.gamma_var (path.leaf ()));
      pv.dl.push_back (layout.gamma_var (path.leaf ()));
      m_pathVars.push_back (std::move (pv));
    }
  for (const Transmission& l : links.links ())
    {
      m_linkTier.push_back (where.at (l.sbs));
      m_linkUe.push_back (l.kind == LinkKind::Access ? slot.at (l.ue) : -1);
    }
}

bool
Evaluator::membership (const Allocation& a, ConstraintReport& report) const
{
  if (static_cast<int> (a.x.size ()) != m_layout.size ())
    {
      throw std::invalid_argument ("allocation does not match the variable layout");
    }
  auto inside = [&] (const std::vector<int>& vars) {
    for (int var : vars)
      {
        if (a.x[var] < 0 || a.x[var] >= m_layout.var (var).cardinality)
          {
            return false;
          }
      }
    return true;
  };
  bool ok = true;
  for (std::size_t p = 0; p < m_pathVars.size (); ++p)
    {
      const RelayCase kind = m_layout.paths ()[p].kind;
      const bool ul_ok = inside (m_pathVars[p].ul);
      const bool dl_ok = inside (m_pathVars[p].dl);
      if (ul_ok)
        {
          report.record (ul_member_id (kind), 0.0);
        }
      else
        {
          report.record_failure (ul_member_id (kind), -1.0);
        }
      if (dl_ok)
        {
          report.record (dl_member_id (kind), 0.0);
        }
      else
        {
          report.record_failure (dl_member_id (kind), -1.0);
        }
      ok = ok && ul_ok && dl_ok;
    }
  return ok;
}

Evaluation
Evaluator::evaluate (const Allocation& a) const
{
  ++m_count;
  Evaluation ev;
  ConstraintReport& rep = ev.report;

  rep.record (ConstraintId::C1, std::min (a.blocks_case3 - a.blocks_case2, a.blocks_total - a.blocks_case3));
  if (a.blocks_case2 < 1)
    {
      rep.record_failure (ConstraintId::C1, a.blocks_case2 - 1);
    }

  if (!membership (a, rep))
    {
      rep.record_failure (ConstraintId::C4, -m_seeCons);
      return ev;
    }

  ev.link_throughput = m_links.throughputs (a);

  const auto& paths = m_layout.paths ();
  ev.paths.resize (paths.size ());
  for (std::size_t p = 0; p < paths.size (); ++p)
    {
      ev.paths[p].kind = paths[p].kind;
      ev.paths[p].tiers.resize (paths[p].sbs_chain.size ());
      for (std::size_t j = 0; j < paths[p].sbs_chain.size (); ++j)
        {
          ev.paths[p].tiers[j].sbs = paths[p].sbs_chain[j];
        }
    }
  const auto& ues = m_layout.ues ();
  ev.ue_ul.resize (ues.size ());
  ev.ue_dl.resize (ues.size ());
  for (std::size_t i = 0; i < ues.size (); ++i)
    {
      ev.ue_ul[i] = {ues[i], 0.0};
      ev.ue_dl[i] = {ues[i], 0.0};
    }

  bool thz_used = false;
  for (int v = 0; v < m_links.size (); ++v)
    {
      const Transmission& l = m_links.link (v);
      TierRates& t = ev.paths[m_linkTier[v].first].tiers[m_linkTier[v].second];
      const double thr = ev.link_throughput[v];
      const double watts = m_layout.grid_for (l.power_var).watts (a.x[l.power_var]);
      thz_used = thz_used || l.thz;
      if (l.kind == LinkKind::Access)
        {
          if (l.downlink)
            {
              t.access_dl += thr;
              t.power_dl += watts;
              ev.ue_dl[m_linkUe[v]].second += thr;
            }
          else
            {
              t.access_ul += thr;
              t.power_ul += watts;
              ev.ue_ul[m_linkUe[v]].second += thr;
              ev.ue_power += watts;
            }
        }
      else if (l.downlink)
        {
          t.hop_dl += thr;
          t.power_dl += l.blocks * watts;
        }
      else
        {
          t.hop_ul += thr;
          t.power_ul += l.blocks * watts;
        }
    }

  SystemTotals& tot = ev.totals;
  for (RelayCase c : {RelayCase::Case1, RelayCase::Case2, RelayCase::Case3})
    {
      const int k = case_index (c);
      const CaseTotals ul = ul_totals (c, ev.paths, rep);
      const CaseTotals dl = dl_totals (c, ev.paths, rep);
      tot.t_ura[k] = ul.throughput;
      tot.p_ura[k] = ul.power;
      tot.t_dbh[k] = dl.throughput;
      tot.p_dbh[k] = dl.power;
    }
  for (int k = 0; k < 3; ++k)
    {
      tot.t_q += tot.t_ura[k] + tot.t_dbh[k];
      tot.p_q += tot.p_ura[k] + tot.p_dbh[k];
    }
  tot.spectrum_hz = a.blocks_case3 * m_radio.mmwave.block_bandwidth_hz
                    + (thz_used ? m_radio.thz.block_bandwidth_hz : 0.0);
  tot.s_ee_defined = spectral_energy_efficiency (tot.t_q, tot.p_q, tot.spectrum_hz, tot.s_ee);
  if (tot.s_ee_defined)
    {
      rep.record (ConstraintId::C4, tot.s_ee - m_seeCons);
    }
  else
    {
      rep.record_failure (ConstraintId::C4, -m_seeCons);
    }

  for (const UeBound& b : m_ueBounds)
    {
      const double tu = ev.ue_ul[b.slot].second;
      const double td = ev.ue_dl[b.slot].second;
      rep.record (ConstraintId::C2, std::min (tu - m_cons.t_min_ul, b.upper - tu));
      rep.record (ConstraintId::C3, std::min (td - m_cons.t_min_dl, b.upper - td));
    }
  return ev;
}

double
Evaluator::throughput_upper_bound () const
{
  double sum = 0.0;
  for (int v = 0; v < m_links.size (); ++v)
    {
      const Transmission& l = m_links.link (v);
      const ChannelParams& ch = m_links.channel (l.thz);
      const double pmax = m_layout.grid_for (l.power_var).p_max ();
      const double snr = pmax * m_links.self_gain (v) / (ch.bandwidth_hz * ch.noise_psd);
      sum += l.blocks * ch.bandwidth_hz * std::log2 (1.0 + snr);
    }
  return sum;
}

} // namespace iab
