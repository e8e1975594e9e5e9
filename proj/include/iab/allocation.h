/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_ALLOCATION_H
#define IAB_ALLOCATION_H

#include "iab/association.h"
#include "iab/config.h"
#include "iab/radio.h"
#include "iab/scenario.h"

#include <map>
#include <string>
#include <vector>

namespace iab {

enum class VarKind
{
  UePower,
  SbsUl,   // SBS -> parent
  SbsDl,   // SBS -> UE or child SBS
  MbsDl,   // MBS -> top SBS of a path
  Rfc,
  Gamma    // split of a path, owned by its leaf SBS
};

const char* var_kind_name (VarKind k);

struct VarSpec
{
  VarKind kind;
  int node;
  int peer;         // -1 unless the variable belongs to a link
  int cardinality;  // values are indices 0 .. cardinality-1
};

/**
 * Decision-variable layout for one scheduling round. An allocation is a flat
 * vector of strategy indices laid out as below; power indices are grid
 * levels, split indices map to numerator index+1, RFC indices point into the
 * candidate list.
 */
class Layout
{
public:
  Layout () = default;
  Layout (const Scenario& sc, const Selection& sel, const RadioConfig& radio, const FrameConfig& frame);

  const std::vector<VarSpec>& vars () const { return m_vars; }
  int size () const { return static_cast<int> (m_vars.size ()); }
  const VarSpec& var (int i) const { return m_vars[i]; }

  int ue_power_var (int ue) const { return m_uePower.at (ue); }
  int sbs_ul_var (int sbs) const { return m_sbsUl.at (sbs); }
  int sbs_dl_var (int sbs, int peer) const { return m_sbsDl.at ({sbs, peer}); }
  int mbs_var (int top) const { return m_mbs.at (top); }
  int rfc_var (int sbs) const { return m_rfc.at (sbs); }
  int gamma_var (int leaf) const { return m_gamma.at (leaf); }

  const std::vector<TransmissionPath>& paths () const { return m_paths; }
  const std::vector<int>& sbs () const { return m_sbs; }
  const std::vector<int>& ues () const { return m_ues; }
  const std::vector<int>& ues_of (int sbs) const { return m_uesOf.at (sbs); }
  /// DL peers of an SBS: its UEs then its scheduled child SBS.
  std::vector<int> peers_of (int sbs) const;
  int path_index_of (int sbs) const { return m_pathOf.at (sbs); }
  /// 1-based position of an SBS on its path (1 = leaf).
  int tier_of (int sbs) const { return m_tierOf.at (sbs); }
  /// Next hop toward the MBS.
  int parent_of (int sbs) const { return m_parentOf.at (sbs); }
  /// Scheduled child on the same path, -1 for a leaf.
  int child_of (int sbs) const { return m_childOf.at (sbs); }
  int serving_sbs (int ue) const { return m_servingOf.at (ue); }
  int mbs () const { return m_mbsId; }

  const PowerGrid& ue_grid () const { return m_ueGrid; }
  const PowerGrid& bs_grid () const { return m_bsGrid; }
  const PowerGrid& grid_for (int var) const;
  int z () const { return m_z; }
  const std::vector<int>& rfc_candidates () const { return m_rfcCandidates; }

  std::string describe (int var) const;

private:
  int add (VarKind kind, int node, int peer, int cardinality);

  std::vector<VarSpec> m_vars;
  std::map<int, int> m_uePower;
  std::map<int, int> m_sbsUl;
  std::map<std::pair<int, int>, int> m_sbsDl;
  std::map<int, int> m_mbs;
  std::map<int, int> m_rfc;
  std::map<int, int> m_gamma;
  std::vector<TransmissionPath> m_paths;
  std::vector<int> m_sbs;
  std::vector<int> m_ues;
  std::map<int, std::vector<int>> m_uesOf;
  std::map<int, int> m_pathOf;
  std::map<int, int> m_tierOf;
  std::map<int, int> m_parentOf;
  std::map<int, int> m_childOf;
  std::map<int, int> m_servingOf;
  int m_mbsId = 0;
  PowerGrid m_ueGrid;
  PowerGrid m_bsGrid;
  int m_z = 10;
  std::vector<int> m_rfcCandidates;
};

struct Allocation
{
  std::vector<int> x;
  int blocks_case2 = 6;
  int blocks_case3 = 9;
  int blocks_total = 12;
  bool thz = true;

  bool operator== (const Allocation& o) const = default;
};

/// Start profile of the leader: SBS powers at maximum, MBS and UE powers at
/// zero, smallest split, first RFC candidate.
Allocation initial_allocation (const Layout& layout, const RadioConfig& radio);

int rfc_id (const Layout& layout, const Allocation& a, int sbs);
/// Split numerator over layout.z() used by every SBS on the path of `sbs`.
int split_numerator (const Layout& layout, const Allocation& a, int sbs);
double power_watts (const Layout& layout, const Allocation& a, int var);

/// Total number of joint profiles, saturating at `cap`.
long joint_space_size (const Layout& layout, const std::vector<int>& vars, long cap);

} // namespace iab

#endif
