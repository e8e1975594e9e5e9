/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_BASELINES_H
#define IAB_BASELINES_H

#include "iab/games.h"

#include <cstdint>
#include <optional>
#include <set>
#include <string>

namespace iab {

enum class BaseScheme
{
  H,  // distributed Stackelberg
  C,  // centralized Stackelberg
  G,  // genetic algorithm per sub-problem
  P,  // particle swarm per sub-problem
  R   // random
};

enum class RfcOverride
{
  Fixed,
  Random,
  Traffic
};

enum class SplitOverride
{
  High,
  Medium,
  Low,
  Random
};

struct SchemeId
{
  BaseScheme base = BaseScheme::H;
  std::optional<RfcOverride> rfc;
  std::optional<SplitOverride> split;

  std::string str () const;
  bool operator== (const SchemeId& o) const = default;
};

/// "H", "C+F-RFC", "H+T-RFC+L-RABH", ... Throws std::invalid_argument.
SchemeId parse_scheme (const std::string& s);

/// RFC whose D fraction is closest to `dl_demand` among `candidates`; ties go to the lowest id.
int traffic_matched_rfc (double dl_demand, const std::vector<int>& candidates);

/// Split numerator over z pinned by an override (random excluded).
int pinned_split (SplitOverride o, int z);

/// Pins RFC and split variables of `a` per `id`; returns the pinned variable indices.
std::set<int> apply_overrides (const SchemeId& id, const Layout& layout, const AssociationConfig& assoc,
                               Allocation& a, std::uint64_t seed);

struct SchemeResult
{
  Allocation allocation;
  Evaluation evaluation;
  std::vector<Checkpoint> checkpoints;
  int cycles = 0;
  long iterations = 0;
  bool converged = false;
  double penalty = 0.0;
  double utility = 0.0;  // leader utility of the final allocation
};

/// GA over the free variables of one sub-problem. The best individual
/// replaces the current values unless meta.seed_incumbent asks for monotone steps.
GameTrace run_genetic (const SubproblemSpec& spec, const std::vector<Player>& players, Allocation& a,
                       const Evaluator& ev, const MetaConfig& meta, std::uint64_t seed);
/// PSO over the same encoding; positions are rounded to the nearest index.
GameTrace run_swarm (const SubproblemSpec& spec, const std::vector<Player>& players, Allocation& a,
                     const Evaluator& ev, const MetaConfig& meta, std::uint64_t seed);

/// One uniform draw per free variable.
Allocation random_allocation (const Layout& layout, const Allocation& base, const std::set<int>& pinned,
                              std::uint64_t seed);

SchemeResult run_scheme (const SchemeId& id, const Evaluator& ev, const RadioConfig& radio, const SimConfig& cfg,
                         std::uint64_t seed);

} // namespace iab

#endif
