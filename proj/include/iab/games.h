/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_GAMES_H
#define IAB_GAMES_H

#include "iab/aggregate.h"
#include "iab/allocation.h"
#include "iab/config.h"

#include <functional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace iab {

enum class SubproblemId
{
  SP1,  // UE powers, UL access throughput
  SP2,  // SBS powers and splits, T_q
  SP3,  // MBS powers, DL backhaul throughput
  SP4   // RFCs (leader), T_q
};

const char* subproblem_name (SubproblemId id);

struct SubproblemSpec
{
  SubproblemId id;
  Objective objective;
  std::vector<ConstraintId> constraints;
  double penalty;  // e, bits/s
};

SubproblemSpec make_subproblem (SubproblemId id, double penalty);

/// objective + e * phi, phi = -1 when any constraint of the subset fails.
double common_utility (const SubproblemSpec& spec, const Evaluation& ev);
double common_utility (double objective, bool feasible, double penalty);

/// Strategy of one player: its variables, each scanned in a fixed direction.
struct Player
{
  int node;
  std::vector<int> vars;
  std::vector<bool> descending;  // per var
};

/// Players of a sub-problem in node-id order; pinned variables are left out
/// and players without free variables are dropped.
std::vector<Player> make_players (SubproblemId id, const Layout& layout, const std::set<int>& pinned);

struct GameMove
{
  int player;   // node id
  std::vector<int> before;
  std::vector<int> after;
  double utility;
};

struct GameTrace
{
  SubproblemId id;
  std::vector<GameMove> moves;
  std::vector<double> sweep_utility;  // after every sweep
  int sweeps = 0;
  long decisions = 0;                 // best-response computations
  bool converged = false;
  double initial_utility = 0.0;
  double final_utility = 0.0;
};

class NonConvergenceError : public std::runtime_error
{
public:
  NonConvergenceError (const std::string& what, GameTrace trace)
    : std::runtime_error (what),
      m_trace (std::move (trace))
  {
  }

  const GameTrace& trace () const { return m_trace; }

private:
  GameTrace m_trace;
};

struct GameSettings
{
  double improve_tol = 1e-12;
  double follower_tol = 1e-6;
  int max_sweeps = 200;
  long exhaustive_limit = 4096;
};

GameSettings game_settings (const GameConfig& cfg);

/// Strict improvement test used by every acceptance decision.
bool improves (double candidate, double current, double tol);

struct BestResponse
{
  std::vector<int> strategy;
  double utility;
  long evaluations = 0;
};

/**
 * Argmax of the common utility over the player's joint strategies, scanned in
 * declared order; the first maximizer wins. Joint spaces above
 * `exhaustive_limit` are searched one variable at a time until no variable
 * changes.
 */
BestResponse best_response (const SubproblemSpec& spec, const Player& player, const Allocation& profile,
                            const Evaluator& ev, const GameSettings& s);

/// Round-robin best-response dynamics on `a` (updated in place).
GameTrace run_follower_game (const SubproblemSpec& spec, const std::vector<Player>& players, Allocation& a,
                             const Evaluator& ev, const GameSettings& s);

struct NashCheck
{
  bool equilibrium = true;
  int player = -1;
  std::vector<int> deviation;
  double gain = 0.0;
  bool exhaustive = true;  // false when some player was checked per variable
  long evaluations = 0;
};

/// Unilateral-deviation check. Players whose joint space exceeds `limit` are
/// checked one variable at a time.
NashCheck check_nash (const SubproblemSpec& spec, const std::vector<Player>& players, const Allocation& a,
                      const Evaluator& ev, const GameSettings& s, long limit);

/// Solves one sub-problem in place; the default is best-response dynamics.
using SubproblemSolver = std::function<GameTrace (const SubproblemSpec&, const std::vector<Player>&,
                                                  Allocation&, const Evaluator&)>;

enum class IterationCount
{
  PerDecision,  // distributed: one iteration per player decision in SP1/SP2
  PerSweep      // centralized: one iteration per pass over all players
};

struct Checkpoint
{
  SubproblemId after;  // follower game that preceded the leader step
  double q;
  long iterations;     // cumulative at this checkpoint
  bool checked;        // convergence test applied here
};

struct StackelbergOptions
{
  std::set<int> pinned;
  double penalty = -1.0;       // negative: derive from the evaluator
  double penalty_factor = 10.0;
  double leader_eps = 1e-6;
  int max_cycles = 50;
  bool literal_checks = false;
  IterationCount counting = IterationCount::PerDecision;
  GameSettings game;
  SubproblemSolver solver;     // empty: best-response dynamics
};

struct StackelbergResult
{
  Allocation allocation;
  Evaluation evaluation;
  std::vector<Checkpoint> checkpoints;
  std::vector<GameTrace> games;
  int cycles = 0;
  long iterations = 0;
  bool converged = false;
  double penalty = 0.0;
};

StackelbergOptions stackelberg_options (const GameConfig& cfg);

double default_penalty (const Evaluator& ev, double factor);

/**
 * Leader-follower loop: SP1, SP4; then repeat SP2, SP4, SP3, SP4, SP1, SP4.
 * By default a cycle ends the loop when its post-SP3 value differs from the
 * previous cycle's (the post-SP1 value for the first) by less than
 * eps * max(1, |Q|). With literal_checks the post-SP3 value is compared with
 * the post-SP2 one, and the post-SP1 value with the post-SP3 one.
 * At the cycle cap the best checkpoint is returned.
 */
StackelbergResult stackelberg (const Allocation& initial, const Evaluator& ev, const StackelbergOptions& opt);

} // namespace iab

#endif
