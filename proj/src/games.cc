/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/games.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace iab {

const char*
subproblem_name (SubproblemId id)
{
  switch (id)
    {
    case SubproblemId::SP1:
      return "SP1";
    case SubproblemId::SP2:
      return "SP2";
    case SubproblemId::SP3:
      return "SP3";
    default:
      return "SP4";
    }
}

SubproblemSpec
make_subproblem (SubproblemId id, double penalty)
{
  using C = ConstraintId;
  SubproblemSpec s{id, Objective::Total, {}, penalty};
  switch (id)
    {
    case SubproblemId::SP1:
      s.objective = Objective::AccessUl;
      s.constraints = {C::F40, C::F42, C::F44, C::F47, C::F49, C::F53, C::C2, C::C4};
      break;
    case SubproblemId::SP2:
      s.constraints = {C::F40, C::F42, C::F44, C::F47, C::F49, C::F53, C::F55, C::F57,
                       C::F59, C::F62, C::F64, C::F68, C::C1, C::C3, C::C4};
      break;
    case SubproblemId::SP3:
      s.objective = Objective::BackhaulDl;
      s.constraints = {C::F55, C::F57, C::F59, C::F62, C::F64, C::F68, C::C4};
      break;
    case SubproblemId::SP4:
      s.constraints = {C::F40, C::F42, C::F44, C::F47, C::F49, C::F53, C::F55,
                       C::F57, C::F59, C::F62, C::F64, C::F68, C::C4};
      break;
    }
  return s;
}

double
common_utility (double objective, bool feasible, double penalty)
{
  return feasible ? objective : objective - penalty;
}

double
common_utility (const SubproblemSpec& spec, const Evaluation& ev)
{
  return common_utility (ev.objective (spec.objective), ev.report.feasible (spec.constraints), spec.penalty);
}

std::vector<Player>
make_players (SubproblemId id, const Layout& layout, const std::set<int>& pinned)
{
  std::vector<Player> out;
  auto add = [&] (Player& p, int var, bool desc) {
    if (!pinned.count (var))
      {
        p.vars.push_back (var);
        p.descending.push_back (desc);
      }
  };
  switch (id)
    {
    case SubproblemId::SP1:
      for (int u : layout.ues ())
        {
          Player p{u, {}, {}};
          add (p, layout.ue_power_var (u), false);
          out.push_back (p);
        }
      break;
    case SubproblemId::SP2:
      for (int s : layout.sbs ())
        {
          Player p{s, {}, {}};
          add (p, layout.sbs_ul_var (s), true);
          for (int peer : layout.peers_of (s))
            {
              add (p, layout.sbs_dl_var (s, peer), true);
            }
          if (layout.tier_of (s) == 1)
            {
              add (p, layout.gamma_var (s), false);
            }
          out.push_back (p);
        }
      break;
    case SubproblemId::SP3:
      {
        std::vector<int> tops;
        for (const auto& path : layout.paths ())
          {
            tops.push_back (path.top ());
          }
        std::sort (tops.begin (), tops.end ());
        for (int t : tops)
          {
            Player p{t, {}, {}};
            add (p, layout.mbs_var (t), false);
            out.push_back (p);
          }
      }
      break;
    case SubproblemId::SP4:
      for (int s : layout.sbs ())
        {
          Player p{s, {}, {}};
          add (p, layout.rfc_var (s), false);
          out.push_back (p);
        }
      break;
    }
  std::vector<Player> kept;
  for (auto& p : out)
    {
      if (!p.vars.empty ())
        {
          kept.push_back (std::move (p));
        }
    }
  return kept;
}

GameSettings
game_settings (const GameConfig& cfg)
{
  return GameSettings{cfg.improve_tol, cfg.follower_tol, cfg.max_sweeps, cfg.exhaustive_limit};
}

bool
improves (double candidate, double current, double tol)
{
  return candidate > current + tol * std::max (1.0, std::fabs (current));
}

namespace {

int
value_at (const Layout& layout, int var, bool desc, int k)
{
  return desc ? layout.var (var).cardinality - 1 - k : k;
}

std::vector<int>
strategy_of (const Player& p, const Allocation& a)
{
  std::vector<int> s;
  for (int v : p.vars)
    {
      s.push_back (a.x[v]);
    }
  return s;
}

double
utility_of (const SubproblemSpec& spec, const Evaluator& ev, const Allocation& a)
{
  return common_utility (spec, ev.evaluate (a));
}

/// Visits every joint strategy of `p` in declared order, leaving `a` at the
/// original strategy afterwards. `fn` returns false to stop early.
template <typename Fn>
void
enumerate_joint (const Player& p, const Layout& layout, Allocation& a, Fn fn)
{
  const std::vector<int> saved = strategy_of (p, a);
  const std::size_t n = p.vars.size ();
  std::vector<int> k (n, 0);
  while (true)
    {
      for (std::size_t i = 0; i < n; ++i)
        {
          a.x[p.vars[i]] = value_at (layout, p.vars[i], p.descending[i], k[i]);
        }
      if (!fn ())
        {
          break;
        }
      int i = static_cast<int> (n) - 1;
      while (i >= 0 && ++k[i] == layout.var (p.vars[i]).cardinality)
        {
          k[i] = 0;
          --i;
        }
      if (i < 0)
        {
          break;
        }
    }
  for (std::size_t i = 0; i < n; ++i)
    {
      a.x[p.vars[i]] = saved[i];
    }
}

} // namespace

BestResponse
best_response (const SubproblemSpec& spec, const Player& player, const Allocation& profile, const Evaluator& ev,
               const GameSettings& s)
{
  const Layout& layout = ev.layout ();
  if (player.vars.empty ())
    {
      throw std::invalid_argument ("player without strategy variables");
    }
  Allocation a = profile;
  BestResponse br;
  br.utility = -std::numeric_limits<double>::infinity ();

  if (joint_space_size (layout, player.vars, s.exhaustive_limit) <= s.exhaustive_limit)
    {
      enumerate_joint (player, layout, a, [&] {
        const double u = utility_of (spec, ev, a);
        ++br.evaluations;
        if (u > br.utility)
          {
            br.utility = u;
            br.strategy = strategy_of (player, a);
          }
        return true;
      });
      return br;
    }

  // Coordinate ascent from the current strategy.
  double cur = utility_of (spec, ev, a);
  ++br.evaluations;
  bool changed = true;
  while (changed)
    {
      changed = false;
      for (std::size_t i = 0; i < player.vars.size (); ++i)
        {
          const int var = player.vars[i];
          const int card = layout.var (var).cardinality;
          const int keep = a.x[var];
          int best_val = keep;
          double best_u = -std::numeric_limits<double>::infinity ();
          for (int k = 0; k < card; ++k)
            {
              const int val = value_at (layout, var, player.descending[i], k);
              double u;
              if (val == keep)
                {
                  u = cur;
                }
              else
                {
                  a.x[var] = val;
                  u = utility_of (spec, ev, a);
                  ++br.evaluations;
                }
              if (u > best_u)
                {
                  best_u = u;
                  best_val = val;
                }
            }
          if (best_val != keep && improves (best_u, cur, s.improve_tol))
            {
              a.x[var] = best_val;
              cur = best_u;
              changed = true;
            }
          else
            {
              a.x[var] = keep;
            }
        }
    }
  br.strategy = strategy_of (player, a);
  br.utility = cur;
  return br;
}

GameTrace
run_follower_game (const SubproblemSpec& spec, const std::vector<Player>& players, Allocation& a,
                   const Evaluator& ev, const GameSettings& s)
{
  GameTrace tr;
  tr.id = spec.id;
  double cur = utility_of (spec, ev, a);
  tr.initial_utility = cur;
  const bool change_rule = spec.id == SubproblemId::SP1 || spec.id == SubproblemId::SP2;

  if (players.empty ())
    {
      tr.converged = true;
      tr.final_utility = cur;
      return tr;
    }
  while (true)
    {
      if (tr.sweeps >= s.max_sweeps)
        {
          tr.final_utility = cur;
          throw NonConvergenceError (std::string (subproblem_name (spec.id)) + " did not converge within "
                                         + std::to_string (s.max_sweeps) + " sweeps",
                                     tr);
        }
      const double before = cur;
      bool changed = false;
      for (const Player& p : players)
        {
          const BestResponse br = best_response (spec, p, a, ev, s);
          ++tr.decisions;
          const std::vector<int> old = strategy_of (p, a);
          if (br.strategy != old && improves (br.utility, cur, s.improve_tol))
            {
              for (std::size_t i = 0; i < p.vars.size (); ++i)
                {
                  a.x[p.vars[i]] = br.strategy[i];
                }
              cur = br.utility;
              tr.moves.push_back (GameMove{p.node, old, br.strategy, cur});
              changed = true;
            }
        }
      ++tr.sweeps;
      tr.sweep_utility.push_back (cur);
      if (!changed)
        {
          break;
        }
      if (!change_rule && std::fabs (cur - before) < s.follower_tol * std::max (1.0, std::fabs (before)))
        {
          break;
        }
    }
  tr.converged = true;
  tr.final_utility = cur;
  return tr;
}

NashCheck
check_nash (const SubproblemSpec& spec, const std::vector<Player>& players, const Allocation& a,
            const Evaluator& ev, const GameSettings& s, long limit)
{
  NashCheck out;
  const Layout& layout = ev.layout ();
  Allocation b = a;
  const double cur = utility_of (spec, ev, b);
  ++out.evaluations;
  for (const Player& p : players)
    {
      if (joint_space_size (layout, p.vars, limit) <= limit)
        {
          enumerate_joint (p, layout, b, [&] {
            const double u = utility_of (spec, ev, b);
            ++out.evaluations;
            if (improves (u, cur, s.improve_tol))
              {
                out.equilibrium = false;
                out.player = p.node;
                out.deviation = strategy_of (p, b);
                out.gain = u - cur;
                return false;
              }
            return true;
          });
        }
      else
        {
          out.exhaustive = false;
          for (int var : p.vars)
            {
              const int keep = b.x[var];
              for (int val = 0; val < layout.var (var).cardinality && out.equilibrium; ++val)
                {
                  if (val == keep)
                    {
                      continue;
                    }
                  b.x[var] = val;
                  const double u = utility_of (spec, ev, b);
                  ++out.evaluations;
                  if (improves (u, cur, s.improve_tol))
                    {
                      out.equilibrium = false;
                      out.player = p.node;
                      out.deviation = strategy_of (p, b);
                      out.gain = u - cur;
                    }
                }
              b.x[var] = keep;
            }
        }
      if (!out.equilibrium)
        {
          break;
        }
    }
  return out;
}

StackelbergOptions
stackelberg_options (const GameConfig& cfg)
{
  StackelbergOptions o;
  o.penalty = cfg.penalty;
  o.penalty_factor = cfg.penalty_factor;
  o.leader_eps = cfg.leader_eps;
  o.max_cycles = cfg.max_cycles;
  o.literal_checks = cfg.leader_check == "literal";
  o.game = game_settings (cfg);
  return o;
}

double
default_penalty (const Evaluator& ev, double factor)
{
  return factor * ev.throughput_upper_bound ();
}

StackelbergResult
stackelberg (const Allocation& initial, const Evaluator& ev, const StackelbergOptions& opt)
{
  StackelbergResult res;
  res.penalty = opt.penalty >= 0.0 ? opt.penalty : default_penalty (ev, opt.penalty_factor);
  const Layout& layout = ev.layout ();

  std::vector<SubproblemSpec> specs;
  std::vector<std::vector<Player>> players;
  for (SubproblemId id : {SubproblemId::SP1, SubproblemId::SP2, SubproblemId::SP3, SubproblemId::SP4})
    {
      specs.push_back (make_subproblem (id, res.penalty));
      players.push_back (make_players (id, layout, opt.pinned));
    }

  Allocation a = initial;
  Allocation best = a;
  double best_q = -std::numeric_limits<double>::infinity ();

  auto solve = [&] (SubproblemId id) {
    const int k = static_cast<int> (id);
    GameTrace tr = opt.solver ? opt.solver (specs[k], players[k], a, ev)
                              : run_follower_game (specs[k], players[k], a, ev, opt.game);
    const bool per_decision = opt.counting == IterationCount::PerDecision
                              && (id == SubproblemId::SP1 || id == SubproblemId::SP2);
    res.iterations += per_decision ? tr.decisions : tr.sweeps;
    res.games.push_back (std::move (tr));
  };
  // Leader step; returns Q.
  auto lead = [&] (SubproblemId after, bool checked) {
    solve (SubproblemId::SP4);
    const double q = common_utility (specs[3], ev.evaluate (a));
    res.checkpoints.push_back (Checkpoint{after, q, res.iterations, checked});
    if (q > best_q)
      {
        best_q = q;
        best = a;
      }
    return q;
  };
  auto settled = [&] (double q, double prev) {
    return std::fabs (q - prev) < opt.leader_eps * std::max (1.0, std::fabs (prev));
  };

  solve (SubproblemId::SP1);
  double prev = lead (SubproblemId::SP1, false);
  while (res.cycles < opt.max_cycles)
    {
      ++res.cycles;
      solve (SubproblemId::SP2);
      const double after_sp2 = lead (SubproblemId::SP2, false);
      if (opt.literal_checks)
        prev = after_sp2;
      solve (SubproblemId::SP3);
      const double q = lead (SubproblemId::SP3, true);
      if (settled (q, prev))
        {
          res.converged = true;
          break;
        }
      prev = q;
      solve (SubproblemId::SP1);
      const double after_sp1 = lead (SubproblemId::SP1, opt.literal_checks);
      if (opt.literal_checks)
        {
          if (settled (after_sp1, prev))
            {
              res.converged = true;
              break;
            }
          prev = after_sp1;
        }
    }
  res.allocation = res.converged ? a : best;
  res.evaluation = ev.evaluate (res.allocation);
  return res;
}

} // namespace iab
