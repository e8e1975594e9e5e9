/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_AGGREGATE_H
#define IAB_AGGREGATE_H

#include "iab/allocation.h"
#include "iab/config.h"
#include "iab/linkperf.h"

#include <array>
#include <string>
#include <utility>
#include <vector>

namespace iab {

enum class ConstraintId
{
  F40,
  F42,
  F44,
  F47,
  F49,
  F53,
  F55,
  F57,
  F59,
  F62,
  F64,
  F68,
  C1,
  C2,
  C3,
  C4
};

constexpr int kConstraintCount = 16;

const char* constraint_name (ConstraintId id);
const std::vector<ConstraintId>& all_constraints ();

struct ConstraintEntry
{
  ConstraintId id;
  bool pass = true;
  /// Minimum signed margin over all instances; +inf when nothing was checked.
  double slack;
  int instances = 0;
};

class ConstraintReport
{
public:
  ConstraintReport ();

  /// Folds one instance into the entry: slack is the running minimum.
  void record (ConstraintId id, double slack);
  void record_failure (ConstraintId id, double slack);

  const ConstraintEntry& at (ConstraintId id) const { return m_entries[static_cast<int> (id)]; }
  const std::array<ConstraintEntry, kConstraintCount>& entries () const { return m_entries; }

  bool feasible () const;
  bool feasible (const std::vector<ConstraintId>& subset) const;
  std::vector<ConstraintId> failed () const;
  /// Failed ids joined by ';', empty when feasible.
  std::string failed_string () const;

private:
  std::array<ConstraintEntry, kConstraintCount> m_entries;
};

/// Per-SBS rates on one path, bits/s, block multipliers included.
struct TierRates
{
  int sbs = -1;
  double access_ul = 0.0;
  double access_dl = 0.0;
  double hop_ul = 0.0;   // toward the parent
  double hop_dl = 0.0;   // from the parent
  double power_ul = 0.0; // UE powers + blocks * hop UL power
  double power_dl = 0.0; // access DL powers + blocks * hop DL power
};

struct PathRates
{
  RelayCase kind = RelayCase::Case1;
  std::vector<TierRates> tiers;  // leaf first
};

struct CaseTotals
{
  double throughput = 0.0;
  double power = 0.0;
};

/// UL access throughput and UL power of the paths of case `c`; records the
/// capacity chain of that case in `report`.
CaseTotals ul_totals (RelayCase c, const std::vector<PathRates>& paths, ConstraintReport& report);
/// DL backhaul throughput (top hop) and DL power of the paths of case `c`.
CaseTotals dl_totals (RelayCase c, const std::vector<PathRates>& paths, ConstraintReport& report);

struct SystemTotals
{
  std::array<double, 3> t_ura{};  // per case
  std::array<double, 3> t_dbh{};
  std::array<double, 3> p_ura{};
  std::array<double, 3> p_dbh{};
  double t_q = 0.0;
  double p_q = 0.0;
  double spectrum_hz = 0.0;
  double s_ee = 0.0;
  bool s_ee_defined = false;

  double ul_throughput () const { return t_ura[0] + t_ura[1] + t_ura[2]; }
  double dl_throughput () const { return t_dbh[0] + t_dbh[1] + t_dbh[2]; }
  double ul_power () const { return p_ura[0] + p_ura[1] + p_ura[2]; }
  double dl_power () const { return p_dbh[0] + p_dbh[1] + p_dbh[2]; }
};

/// T / (P * spectrum); returns false when P or spectrum is not positive.
bool spectral_energy_efficiency (double t_q, double p_q, double spectrum_hz, double& out);

enum class Objective
{
  AccessUl,    // sum of UL access throughput
  Total,       // T_q
  BackhaulDl   // sum of DL throughput into the top SBS of each path
};

struct Evaluation
{
  std::vector<double> link_throughput;
  std::vector<PathRates> paths;
  SystemTotals totals;
  ConstraintReport report;
  // (UE id, access throughput), ascending by id.
  std::vector<std::pair<int, double>> ue_ul;
  std::vector<std::pair<int, double>> ue_dl;
  double ue_power = 0.0;  // sum of UE transmit powers

  double objective (Objective o) const;
};

/**
 * Evaluates allocations of one layout. Membership failures short-circuit the
 * link computation: the totals stay zero and the failing ids are reported.
 */
class Evaluator
{
public:
  Evaluator (const Layout& layout, const LinkModel& links, const RadioConfig& radio, const ConstraintConfig& cons);

  Evaluation evaluate (const Allocation& a) const;

  const Layout& layout () const { return m_layout; }
  const LinkModel& links () const { return m_links; }
  const ConstraintConfig& constraints () const { return m_cons; }
  double see_threshold () const { return m_seeCons; }
  long evaluations () const { return m_count; }

  /// Sum over links of the interference-free rate at maximum power.
  double throughput_upper_bound () const;

private:
  struct PathVars
  {
    std::vector<int> ul;  // UE powers, SBS UL powers, RFCs, split
    std::vector<int> dl;  // SBS DL powers, MBS power, RFCs, split
  };
  struct UeBound
  {
    int slot;      // position in layout.ues()
    double upper;  // commitment bound of its serving tier
  };

  bool membership (const Allocation& a, ConstraintReport& report) const;

  const Layout& m_layout;
  const LinkModel& m_links;
  RadioConfig m_radio;
  ConstraintConfig m_cons;
  double m_seeCons;
  std::vector<PathVars> m_pathVars;
  std::vector<std::pair<int, int>> m_linkTier;  // per link: path, tier index
  std::vector<int> m_linkUe;                    // per link: slot in layout.ues(), -1 for hops
  std::vector<UeBound> m_ueBounds;
  mutable long m_count = 0;
};

} // namespace iab

#endif
