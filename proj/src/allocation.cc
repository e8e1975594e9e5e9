/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/allocation.h"

#include "iab/frames.h"

#include <algorithm>
#include <stdexcept>

namespace iab {

const char*
var_kind_name (VarKind k)
{
  switch (k)
    {
    case VarKind::UePower:
      return "ue_power";
    case VarKind::SbsUl:
      return "sbs_ul";
    case VarKind::SbsDl:
      return "sbs_dl";
    case VarKind::MbsDl:
      return "mbs_dl";
    case VarKind::Rfc:
      return "rfc";
    case VarKind::Gamma:
      return "gamma";
    }
  return "?";
}

int
Layout::add (VarKind kind, int node, int peer, int cardinality)
{
  m_vars.push_back (VarSpec{kind, node, peer, cardinality});
  return static_cast<int> (m_vars.size ()) - 1;
}

Layout::Layout (const Scenario& sc, const Selection& sel, const RadioConfig& radio, const FrameConfig& frame)
  : m_paths (sel.paths),
    m_mbsId (sc.mbs),
    m_ueGrid (dbm_to_watt (radio.p_max_ue_dbm), radio.levels_ue),
    m_bsGrid (dbm_to_watt (radio.p_max_bs_dbm), radio.levels_bs),
    m_z (frame.z),
    m_rfcCandidates (frame.rfc_candidates)
{
  if (m_rfcCandidates.empty ())
    {
      throw std::invalid_argument ("RFC candidate list is empty");
    }
  for (int d : m_rfcCandidates)
    {
      rfc_pattern (d);
    }
  if (m_z < 2)
    {
      throw std::invalid_argument ("slot count Z must be at least 2");
    }
  for (std::size_t p = 0; p < m_paths.size (); ++p)
    {
      const auto& chain = m_paths[p].sbs_chain;
      for (std::size_t j = 0; j < chain.size (); ++j)
        {
          const int s = chain[j];
          m_pathOf[s] = static_cast<int> (p);
          m_tierOf[s] = static_cast<int> (j) + 1;
          m_parentOf[s] = j + 1 < chain.size () ? chain[j + 1] : sc.mbs;
          m_childOf[s] = j > 0 ? chain[j - 1] : -1;
          auto it = sel.ues.find (s);
          m_uesOf[s] = it == sel.ues.end () ? std::vector<int>{} : it->second;
          for (int u : m_uesOf[s])
            {
              m_servingOf[u] = s;
            }
        }
    }
  for (const auto& [s, t] : m_tierOf)
    {
      m_sbs.push_back (s);
    }
  for (const auto& [u, s] : m_servingOf)
    {
      m_ues.push_back (u);
    }

  const int ue_card = m_ueGrid.levels () + 1;
  const int bs_card = m_bsGrid.levels () + 1;
  for (int u : m_ues)
    {
      m_uePower[u] = add (VarKind::UePower, u, m_servingOf[u], ue_card);
    }
  for (int s : m_sbs)
    {
      m_sbsUl[s] = add (VarKind::SbsUl, s, m_parentOf[s], bs_card);
      for (int peer : peers_of (s))
        {
          m_sbsDl[{s, peer}] = add (VarKind::SbsDl, s, peer, bs_card);
        }
    }
  for (const auto& path : m_paths)
    {
      m_mbs[path.top ()] = add (VarKind::MbsDl, sc.mbs, path.top (), bs_card);
    }
  for (int s : m_sbs)
    {
      m_rfc[s] = add (VarKind::Rfc, s, -1, static_cast<int> (m_rfcCandidates.size ()));
    }
  for (const auto& path : m_paths)
    {
      m_gamma[path.leaf ()] = add (VarKind::Gamma, path.leaf (), -1, m_z - 1);
    }
}

std::vector<int>
Layout::peers_of (int sbs) const
{
  std::vector<int> out = m_uesOf.at (sbs);
  const int child = m_childOf.at (sbs);
  if (child >= 0)
    {
      out.push_back (child);
    }
  return out;
}

const PowerGrid&
Layout::grid_for (int var) const
{
  switch (m_vars[var].kind)
    {
    case VarKind::UePower:
      return m_ueGrid;
    case VarKind::SbsUl:
    case VarKind::SbsDl:
    case VarKind::MbsDl:
      return m_bsGrid;
    default:
      throw std::invalid_argument ("variable " + std::to_string (var) + " is not a power");
    }
}

std::string
Layout::describe (int var) const
{
  const VarSpec& v = m_vars[var];
  std::string s = var_kind_name (v.kind);
  s += "[" + std::to_string (v.node);
  if (v.peer >= 0)
    {
      s += "->" + std::to_string (v.peer);
    }
  return s + "]";
}

Allocation
initial_allocation (const Layout& layout, const RadioConfig& radio)
{
  Allocation a;
  a.blocks_case2 = radio.blocks_case2;
  a.blocks_case3 = radio.blocks_case3;
  a.blocks_total = radio.blocks_total;
  a.thz = radio.use_thz;
  a.x.assign (layout.size (), 0);
  for (int i = 0; i < layout.size (); ++i)
    {
      const VarSpec& v = layout.var (i);
      if (v.kind == VarKind::SbsUl || v.kind == VarKind::SbsDl)
        {
          a.x[i] = v.cardinality - 1;
        }
    }
  return a;
}

int
rfc_id (const Layout& layout, const Allocation& a, int sbs)
{
  return layout.rfc_candidates ()[a.x[layout.rfc_var (sbs)]];
}

int
split_numerator (const Layout& layout, const Allocation& a, int sbs)
{
  const auto& path = layout.paths ()[layout.path_index_of (sbs)];
  return a.x[layout.gamma_var (path.leaf ())] + 1;
}

double
power_watts (const Layout& layout, const Allocation& a, int var)
{
  return layout.grid_for (var).watts (a.x[var]);
}

long
joint_space_size (const Layout& layout, const std::vector<int>& vars, long cap)
{
  long n = 1;
  for (int v : vars)
    {
      n *= layout.var (v).cardinality;
      if (n > cap)
        {
          return cap + 1;
        }
    }
  return n;
}

} // namespace iab
