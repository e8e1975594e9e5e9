/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

// Acceptance suite. Prints one PASS/FAIL line per criterion; pass criterion
// numbers on the command line to run a subset.

#include "iab/association.h"
#include "iab/baselines.h"
#include "iab/harness.h"
#include "iab/radio.h"
#include "iab/rng.h"

#include "oracle.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

using namespace iab;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kLight = 299792458.0;

using Clock = std::chrono::steady_clock;

double
seconds_since (Clock::time_point t0)
{
  return std::chrono::duration<double> (Clock::now () - t0).count ();
}

// Collects failures of one criterion; keeps the first few messages.
class Verdict
{
public:
  void
  check (bool ok, const std::string& what)
  {
    ++m_checks;
    if (ok)
      return;
    ++m_failures;
    if (m_failures <= 5)
      m_messages.push_back (what);
  }

  void note (const std::string& s) { m_notes.push_back (s); }
  bool pass () const { return m_failures == 0; }

  void
  print (int n, double secs) const
  {
    std::printf ("criterion %d: %s (%ld checks, %ld failed, %.1f s)", n, pass () ? "PASS" : "FAIL", m_checks,
                 m_failures, secs);
    for (const auto& s : m_notes)
      std::printf ("; %s", s.c_str ());
    std::printf ("\n");
    for (const auto& m : m_messages)
      std::printf ("    %s\n", m.c_str ());
    std::fflush (stdout);
  }

private:
  long m_checks = 0;
  long m_failures = 0;
  std::vector<std::string> m_messages;
  std::vector<std::string> m_notes;
};

bool
rel_eq (double got, double want, double rel = 1e-9)
{
  return std::fabs (got - want) <= rel * std::max (std::fabs (want), std::numeric_limits<double>::min ());
}

template <typename... Args>
std::string
fmt (const char* f, Args... args)
{
  char buf[512];
  std::snprintf (buf, sizeof buf, f, args...);
  return buf;
}

std::string
source_path (const std::string& rel)
{
  return (fs::path (IAB_SOURCE_DIR) / rel).string ();
}

// ---------------------------------------------------------------------------
// 1. Closed-form operations.

void
criterion_formulas (Verdict& v)
{
  auto expect = [&] (const std::string& what, double got, double want) {
    v.check (rel_eq (got, want), fmt ("%s: got %.15g want %.15g", what.c_str (), got, want));
  };
  auto near = [&] (const std::string& what, double got, double printed, double abs_tol) {
    v.check (std::fabs (got - printed) <= abs_tol, fmt ("%s: got %.15g, printed %.15g", what.c_str (), got, printed));
  };

  // Sectored beam gain.
  const double eps = 0.001;
  const BeamPattern omni = BeamPattern::make (2 * kPi, eps);
  const BeamPattern narrow = BeamPattern::make (kPi / 6, eps);
  const double g_narrow = (2 * kPi - (2 * kPi - kPi / 6) * eps) / (kPi / 6);
  expect ("gain omni", beam_gain (omni, 0.0), 1.0);
  expect ("gain main lobe", beam_gain (narrow, 0.0), g_narrow);
  near ("gain main lobe", beam_gain (narrow, 0.0), 11.989, 5e-4);
  expect ("gain side lobe", beam_gain (narrow, kPi), eps);
  expect ("gain edge", beam_gain (narrow, kPi / 12), g_narrow);
  expect ("gain product omni", aligned_gain_product (omni, omni), 1.0);
  expect ("gain product", aligned_gain_product (narrow, narrow), g_narrow * g_narrow);
  near ("gain product", aligned_gain_product (narrow, narrow), 143.74, 5e-3);
  expect ("misaligned product", beam_gain (narrow, 0.0) * beam_gain (narrow, kPi), g_narrow * eps);

  // Absorption and spreading loss.
  const ChannelParams still{30e9, 1e9, 0.0, 1e-21};
  const ChannelParams lossy{30e9, 1e9, 0.01, 1e-21};
  expect ("absorption K=0", path_losses (still, 250.0).absorption, 1.0);
  expect ("absorption K d = 1", path_losses (lossy, 100.0).absorption, std::exp (1.0));
  const double lp = std::pow (4 * kPi * 100.0 * 30e9 / kLight, 2.0);
  expect ("spreading 30 GHz 100 m", path_losses (still, 100.0).spreading, lp);
  // The printed example rounds c to 3e8 m/s.
  const double lp_rounded_c = std::pow (4 * kPi * 100.0 * 30e9 / 3e8, 2.0);
  near ("spreading with c = 3e8", lp_rounded_c / 1e10, 1.579, 5e-4);
  near ("spreading dB with c = 3e8", 10 * std::log10 (lp_rounded_c), 101.98, 5e-3);
  expect ("spreading against the printed example", path_losses (still, 100.0).spreading,
          lp_rounded_c * std::pow (3e8 / kLight, 2.0));
  expect ("spreading dB", free_space_loss_db (30e9, 100.0), 10 * std::log10 (lp));
  expect ("received psd identity", received_psd (3e-13, 1.0, 1.0, 1.0), 3e-13);
  expect ("received psd", received_psd (1e-12, 143.74, 1.0, 1.579e10), 1e-12 * 143.74 / 1.579e10);
  near ("received psd", received_psd (1e-12, 143.74, 1.0, 1.579e10) * 1e21, 9.10, 5e-3);
  v.check (received_psd (0.0, 143.74, 2.0, 1e10) == 0.0, "received psd of zero");

  // Power grids.
  const double bs_max = std::pow (10.0, 44.0 / 10.0) / 1000.0;
  const double ue_max = std::pow (10.0, 23.0 / 10.0) / 1000.0;
  const PowerGrid bs = power_grid (dbm_to_watt (44.0), 10);
  expect ("BS p_max", bs.p_max (), bs_max);
  expect ("BS step", bs.step (), bs_max / 10);
  near ("BS step", bs.step (), 2.512, 5e-4);
  expect ("BS top level", bs.watts (10), bs_max);
  const PowerGrid ue = power_grid (dbm_to_watt (23.0), 20);
  v.check (ue.size () == 21, "UE grid size");
  expect ("UE step", ue.step (), ue_max / 20);
  near ("UE step (mW)", ue.step () * 1e3, 9.976, 1e-3);
  v.check (bs.watts (0) == 0.0 && ue.watts (0) == 0.0, "level 0 is 0 W");
  for (int l = 0; l <= 20; ++l)
    expect (fmt ("UE level %d", l), ue.watts (l) + 1.0, l * ue_max / 20 + 1.0);

  // SINR.
  const ChannelParams ch{30e9, 1e9, 0.0, 1e-21};
  expect ("sinr signal = noise", sinr (1e-21, InterferenceBreakdown{}, ch, false), 1.0);
  v.check (sinr (0.0, InterferenceBreakdown{4e-12, 1e-12, 0.0}, ch, false) == 0.0, "sinr of zero signal");
  expect ("sinr with interference", sinr (1e-20, InterferenceBreakdown{6e-12, 3e-12, 0.0}, ch, false), 1.0);
  expect ("sinr mm link ignores THz", sinr (1e-20, InterferenceBreakdown{6e-12, 3e-12, 5e-12}, ch, false), 1.0);
  expect ("sinr THz link", sinr (1e-20, InterferenceBreakdown{6e-12, 3e-12, 5e-12}, ch, true), 1e-11 / 15e-12);

  // Throughput.
  expect ("throughput one segment", link_throughput ({{1.0, 1.0}}, 1e9), 1e9);
  expect ("throughput two segments", link_throughput ({{0.5, 3.0}, {0.5, 3.0}}, 1e9), 2e9);
  expect ("throughput mixed", link_throughput ({{0.25, 7.0}, {0.75, 0.0}}, 2e9), 2e9 * 0.25 * 3.0);

  // Commitment bound.
  expect ("bound one hop", commitment_bound (300e6, 1), 300e6);
  expect ("bound three hops", commitment_bound (300e6, 3), 100e6);
  v.check (commitment_bound (0.0, 2) == 0.0, "bound of zero");

  // Moving average.
  expect ("ema fixed point", update_ema (100.0, 100.0, 0.1), 100.0);
  expect ("ema step", update_ema (100.0, 200.0, 0.1), 110.0);
  v.check (update_ema (0.0, 0.0, 0.5) == 0.0, "ema of zeros");

  // Proportional fair ratio.
  expect ("pf 100", ue_pf (UeEma{100.0, 3.0}), 0.02);
  expect ("pf 200", ue_pf (UeEma{200.0, 3.0}), 0.01);
  EmaState st;
  st.ue[1] = UeEma{100.0, 3.0};
  st.ue[2] = UeEma{200.0, 3.0};
  v.check (select_ues ({1, 2}, st, 1) == std::vector<int>{1}, "pf selection");

  // Spectral energy efficiency.
  double s = 0.0;
  v.check (spectral_energy_efficiency (10e9, 50.0, 9e9, s), "S_EE defined");
  expect ("S_EE", s, 10e9 / (50.0 * 9e9));
  near ("S_EE", s, 0.0222, 5e-5);
  v.check (!spectral_energy_efficiency (10e9, 0.0, 9e9, s), "S_EE undefined at zero power");
}

// ---------------------------------------------------------------------------
// 2. Naive re-enumeration on small random instances.

void
compare_with_reference (Verdict& v, const oracle::Instance& in, const Allocation& a, const std::string& tag,
                        const std::vector<oracle::Link>& links, long& interference_terms)
{
  const LinkModel& lm = *in.model;
  const Evaluation ev = in.eval->evaluate (a);
  const oracle::Totals ref = oracle::evaluate (in.sc, in.layout, in.radio, in.cons, a);
  const double scale = std::max ({1.0, ref.t_q, ev.totals.t_q});

  const int segs = static_cast<int> (lm.ordering (a).segments ());
  for (int l = 0; l < lm.size (); ++l)
    {
      const Transmission& t = lm.link (l);
      std::size_t w = 0;
      while (w < links.size () && !(links[w].tx == t.tx && links[w].rx == t.rx))
        ++w;
      if (w == links.size ())
        {
          v.check (false, tag + fmt (": link %d->%d unknown to the reference", t.tx, t.rx));
          continue;
        }
      for (int tau = 0; tau < kSubframes; ++tau)
        for (int seg = 1; seg <= segs; ++seg)
          {
            const double got = lm.interference (l, a, tau, seg).total ();
            const double want = oracle::interference (in.sc, in.layout, in.radio, links, w, a, tau, seg);
            ++interference_terms;
            v.check (oracle::close (got, want, 1e-9, 1e-300),
                     tag + fmt (": interference %d->%d tau %d seg %d: %.15g vs %.15g", t.tx, t.rx, tau, seg, got,
                                want));
          }
      if (ref.members_ok)
        {
          const double want = ref.link_throughput.at ({t.tx, t.rx});
          v.check (oracle::close (ev.link_throughput[l], want, 1e-9, 1e-9 * scale),
                   tag + fmt (": throughput %d->%d", t.tx, t.rx));
        }
    }

  for (int c = 0; c < 3; ++c)
    {
      v.check (oracle::close (ev.totals.t_ura[c], ref.t_ura[c], 1e-9, 1e-9 * scale), tag + fmt (": T_ura[%d]", c));
      v.check (oracle::close (ev.totals.t_dbh[c], ref.t_dbh[c], 1e-9, 1e-9 * scale), tag + fmt (": T_dbh[%d]", c));
      v.check (oracle::close (ev.totals.p_ura[c], ref.p_ura[c]), tag + fmt (": P_ura[%d]", c));
      v.check (oracle::close (ev.totals.p_dbh[c], ref.p_dbh[c]), tag + fmt (": P_dbh[%d]", c));
    }
  v.check (oracle::close (ev.totals.t_q, ref.t_q, 1e-9, 1e-9 * scale), tag + ": T_q");
  v.check (oracle::close (ev.totals.p_q, ref.p_q), tag + ": P_q");
  v.check (ev.totals.spectrum_hz == ref.spectrum, tag + ": spectrum");
  v.check (ev.totals.s_ee_defined == ref.s_ee_defined, tag + ": S_EE defined");
  v.check (oracle::close (ev.totals.s_ee, ref.s_ee, 1e-9, 1e-15), tag + ": S_EE");
  for (const auto& [u, t] : ev.ue_ul)
    v.check (oracle::close (t, ref.ue_ul.at (u), 1e-9, 1e-9 * scale), tag + fmt (": UE %d UL", u));
  for (const auto& [u, t] : ev.ue_dl)
    v.check (oracle::close (t, ref.ue_dl.at (u), 1e-9, 1e-9 * scale), tag + fmt (": UE %d DL", u));
  for (ConstraintId id : all_constraints ())
    {
      const int k = static_cast<int> (id);
      const ConstraintEntry& e = ev.report.at (id);
      v.check (e.pass == ref.pass[k], tag + ": pass of " + constraint_name (id));
      const double floor = id == ConstraintId::C4 ? 1e-15 : 1e-9 * scale;
      v.check (oracle::close (e.slack, ref.slack[k], 1e-9, floor), tag + ": slack of " + constraint_name (id));
    }
}

void
criterion_reference (Verdict& v)
{
  long terms = 0;
  int with_members = 0;
  for (std::uint64_t seed = 1; seed <= 50; ++seed)
    {
      auto in = oracle::random_instance (seed, 3, 6);
      v.check (in->layout.sbs ().size () <= 3 && in->layout.ues ().size () <= 6, fmt ("seed %d too large", (int) seed));
      const auto links = oracle::enumerate_links (in->layout, in->radio);
      v.check (static_cast<int> (links.size ()) == in->model->size (), fmt ("seed %d: link count", (int) seed));
      const Allocation init = initial_allocation (in->layout, in->radio);
      compare_with_reference (v, *in, in->a, fmt ("seed %d random", (int) seed), links, terms);
      compare_with_reference (v, *in, init, fmt ("seed %d initial", (int) seed), links, terms);
      with_members += oracle::evaluate (in->sc, in->layout, in->radio, in->cons, in->a).members_ok;
      with_members += oracle::evaluate (in->sc, in->layout, in->radio, in->cons, init).members_ok;
    }
  v.check (with_members >= 50, fmt ("only %d allocations with valid membership", with_members));
  v.note (fmt ("%ld interference sums, %d/100 allocations with full throughput comparison", terms, with_members));
}

// ---------------------------------------------------------------------------
// 3. Potential-game invariants on default scenarios.

// Visits every joint strategy of `vars` by changing `b` in place; the
// visitor returns false to stop. `b` is restored afterwards.
bool
for_each_strategy (const Layout& layout, const std::vector<int>& vars, Allocation& b,
                   const std::function<bool ()>& visit)
{
  std::vector<int> keep;
  for (int var : vars)
    {
      keep.push_back (b.x[var]);
      b.x[var] = 0;
    }
  bool done = false;
  bool stopped = false;
  while (!done)
    {
      if (!visit ())
        {
          stopped = true;
          break;
        }
      int i = static_cast<int> (vars.size ()) - 1;
      while (i >= 0 && ++b.x[vars[i]] == layout.var (vars[i]).cardinality)
        {
          b.x[vars[i]] = 0;
          --i;
        }
      done = i < 0;
    }
  for (std::size_t i = 0; i < vars.size (); ++i)
    b.x[vars[i]] = keep[i];
  return !stopped;
}

struct Deviation
{
  bool found = false;
  int player = -1;
  double gain = 0.0;
  long evaluations = 0;
};

// Scans every unilateral deviation of every player; reports the first one
// that raises the utility by more than `tol` relative.
Deviation
find_deviation (const SubproblemSpec& spec, const std::vector<Player>& players, const Allocation& a,
                const Evaluator& ev, double tol)
{
  Deviation d;
  const double cur = common_utility (spec, ev.evaluate (a));
  Allocation b = a;
  for (const Player& p : players)
    {
      for_each_strategy (ev.layout (), p.vars, b, [&] {
        const double u = common_utility (spec, ev.evaluate (b));
        ++d.evaluations;
        if (u > cur + tol * std::max (1.0, std::fabs (cur)))
          {
            d.found = true;
            d.player = p.node;
            d.gain = u - cur;
            return false;
          }
        return true;
      });
      if (d.found)
        break;
    }
  return d;
}

struct FinishedGame
{
  SubproblemSpec spec;
  std::vector<Player> players;
  Allocation terminal;
  GameTrace trace;
  bool threw = false;
};

StackelbergOptions
recording_options (const SimConfig& cfg, const Evaluator& ev, std::vector<FinishedGame>& games)
{
  StackelbergOptions opt = stackelberg_options (cfg.game);
  opt.counting = IterationCount::PerDecision;
  opt.penalty = default_penalty (ev, opt.penalty_factor);
  const GameSettings gs = opt.game;
  opt.solver = [&games, gs] (const SubproblemSpec& spec, const std::vector<Player>& players, Allocation& a,
                             const Evaluator& e) {
    FinishedGame g{spec, players, a, {}, false};
    try
      {
        g.trace = run_follower_game (spec, players, a, e, gs);
      }
    catch (const NonConvergenceError& err)
      {
        g.trace = err.trace ();
        g.threw = true;
      }
    g.terminal = a;
    games.push_back (g);
    return g.trace;
  };
  return opt;
}

void
criterion_potential (Verdict& v)
{
  const SimConfig cfg;
  long games_checked = 0;
  long moves = 0;
  long evaluations = 0;
  long coordinate_games = 0;
  std::map<std::string, double> seconds;
  for (std::uint64_t seed = 1; seed <= 20; ++seed)
    {
      auto in = oracle::make_instance (cfg.scenario, cfg.radio, cfg.frame, cfg.constraints, derive_seed (seed, 1));
      v.check (in->layout.sbs ().size () == 6 && in->layout.ues ().size () <= 18, fmt ("seed %d: layout", (int) seed));
      std::vector<FinishedGame> games;
      const StackelbergOptions opt = recording_options (cfg, *in->eval, games);
      const StackelbergResult res = stackelberg (initial_allocation (in->layout, in->radio), *in->eval, opt);
      (void) res;

      for (const FinishedGame& g : games)
        {
          const std::string tag = fmt ("seed %d game %d (%s)", (int) seed, (int) games_checked, subproblem_name (g.spec.id));
          ++games_checked;
          v.check (!g.threw && g.trace.converged, tag + ": hit the sweep cap");
          v.check (g.trace.sweeps <= opt.game.max_sweeps, tag + ": too many sweeps");
          double prev = g.trace.initial_utility;
          for (const GameMove& m : g.trace.moves)
            {
              ++moves;
              v.check (m.utility >= prev, tag + fmt (": move by %d lowers utility %.17g -> %.17g", m.player, prev,
                                                     m.utility));
              prev = m.utility;
            }
          v.check (g.trace.final_utility >= g.trace.initial_utility, tag + ": utility fell over the game");

          long joint_max = 1;
          for (const Player& p : g.players)
            {
              long space = 1;
              for (int var : p.vars)
                space *= in->layout.var (var).cardinality;
              joint_max = std::max (joint_max, space);
            }
          coordinate_games += joint_max > opt.game.exhaustive_limit;

          // Threshold-stopped games may end with a deviation worth less than
          // the stopping threshold.
          const bool threshold = g.spec.id == SubproblemId::SP3 || g.spec.id == SubproblemId::SP4;
          const double tol = threshold ? opt.game.follower_tol : opt.game.improve_tol;
          const auto t0 = Clock::now ();
          const Deviation d = find_deviation (g.spec, g.players, g.terminal, *in->eval, tol);
          seconds[subproblem_name (g.spec.id)] += seconds_since (t0);
          evaluations += d.evaluations;
          v.check (!d.found, tag + fmt (": player %d can gain %.6g", d.player, d.gain));
        }
    }
  v.note (fmt ("%ld games, %ld moves, %ld deviation evaluations, %ld games with coordinate-wise responses",
               games_checked, moves, evaluations, coordinate_games));
  for (const auto& [name, s] : seconds)
    v.note (fmt ("%s check %.0f s", name.c_str (), s));
}

// ---------------------------------------------------------------------------
// 4. Joint-space oracle on tiny instances.

struct TinyCase
{
  double radius;
  double phase;
  bool relaxed;  // no throughput floor and no S_EE floor
};

void
criterion_joint_space (Verdict& v)
{
  const std::vector<TinyCase> cases{{20.0, 0.0, false}, {20.0, 0.0, true},  {45.0, 1.0, false},
                                    {45.0, 1.0, true},  {90.0, 2.5, true},  {10.0, 4.0, true}};
  int with_feasible = 0;
  int h_profile_is_equilibrium = 0;
  long total_equilibria = 0;
  int k = 0;
  for (const TinyCase& c : cases)
    {
      ++k;
      RadioConfig radio;
      radio.levels_bs = 2;
      radio.levels_ue = 2;
      FrameConfig frame;
      frame.z = 4;
      frame.rfc_candidates = {0, 5};
      ConstraintConfig cons;
      if (c.relaxed)
        {
          cons.t_min_ul = 0.0;
          cons.t_min_dl = 0.0;
          cons.see_cons = 0.0;
        }
      auto in = oracle::make_instance (oracle::single_cell (2, c.radius, c.phase), radio, frame, cons, k);
      const Layout& L = in->layout;
      const Evaluator& ev = *in->eval;
      const std::string tag = fmt ("case %d", k);

      std::vector<long> stride (L.size ());
      long space = 1;
      for (int i = L.size () - 1; i >= 0; --i)
        {
          stride[i] = space;
          space *= L.var (i).cardinality;
        }
      v.check (space <= 100000, tag + fmt (": %ld profiles", space));
      if (space > 100000)
        continue;

      const double e = default_penalty (ev, 10.0);
      std::vector<SubproblemSpec> specs;
      std::vector<std::vector<Player>> players;
      for (SubproblemId id : {SubproblemId::SP1, SubproblemId::SP2, SubproblemId::SP3, SubproblemId::SP4})
        {
          specs.push_back (make_subproblem (id, e));
          players.push_back (make_players (id, L, {}));
        }

      // Utility of every sub-problem at every profile.
      std::vector<std::array<double, 4>> u (space);
      std::vector<char> feasible (space);
      Allocation a = initial_allocation (L, radio);
      std::fill (a.x.begin (), a.x.end (), 0);
      for (long idx = 0; idx < space; ++idx)
        {
          long r = idx;
          for (int i = 0; i < L.size (); ++i)
            {
              a.x[i] = static_cast<int> (r / stride[i]);
              r %= stride[i];
            }
          const Evaluation eval = ev.evaluate (a);
          for (int s = 0; s < 4; ++s)
            u[idx][s] = common_utility (specs[s], eval);
          feasible[idx] = eval.report.feasible (specs[3].constraints);
        }

      auto index_of = [&] (const Allocation& x) {
        long idx = 0;
        for (int i = 0; i < L.size (); ++i)
          idx += x.x[i] * stride[i];
        return idx;
      };
      // Whether no player of sub-problem s can improve at idx.
      auto stable = [&] (long idx, int s) {
        const double cur = u[idx][s];
        for (const Player& p : players[s])
          {
            long base = idx;
            std::vector<int> digits;
            for (int var : p.vars)
              {
                const int d = static_cast<int> ((idx / stride[var]) % L.var (var).cardinality);
                base -= d * stride[var];
                digits.push_back (0);
              }
            while (true)
              {
                long j = base;
                for (std::size_t q = 0; q < p.vars.size (); ++q)
                  j += digits[q] * stride[p.vars[q]];
                if (improves (u[j][s], cur, 1e-12))
                  return false;
                int q = static_cast<int> (p.vars.size ()) - 1;
                while (q >= 0 && ++digits[q] == L.var (p.vars[q]).cardinality)
                  {
                    digits[q] = 0;
                    --q;
                  }
                if (q < 0)
                  break;
              }
          }
        return true;
      };

      std::vector<double> eq_values;
      double optimum = -std::numeric_limits<double>::infinity ();
      double optimum_any = -std::numeric_limits<double>::infinity ();
      bool any_feasible = false;
      std::vector<char> is_eq (space);
      for (long idx = 0; idx < space; ++idx)
        {
          optimum_any = std::max (optimum_any, u[idx][3]);
          if (feasible[idx])
            {
              any_feasible = true;
              optimum = std::max (optimum, u[idx][3]);
            }
          is_eq[idx] = stable (idx, 0) && stable (idx, 1) && stable (idx, 2) && stable (idx, 3);
          if (is_eq[idx])
            eq_values.push_back (u[idx][3]);
        }
      if (!any_feasible)
        optimum = optimum_any;
      with_feasible += any_feasible;
      total_equilibria += static_cast<long> (eq_values.size ());
      v.check (!eq_values.empty (), tag + ": no profile is an equilibrium of all four games");

      SimConfig cfg;
      cfg.radio = radio;
      cfg.frame = frame;
      cfg.constraints = cons;
      const SchemeResult h = run_scheme (parse_scheme ("H"), ev, radio, cfg, derive_seed (k, 100));
      const double q = common_utility (specs[3], h.evaluation);
      v.check (q == h.utility, tag + ": reported utility differs from re-evaluation");
      v.check (h.converged, tag + ": H did not converge");
      const bool matches = std::any_of (eq_values.begin (), eq_values.end (), [&] (double x) {
        return std::fabs (x - q) <= 1e-12 * std::max (1.0, std::fabs (q));
      });
      v.check (matches, tag + fmt (": H utility %.15g matches no equilibrium", q));
      v.check (q <= optimum, tag + fmt (": H utility %.15g above the optimum %.15g", q, optimum));
      h_profile_is_equilibrium += is_eq[index_of (h.allocation)];
    }
  v.note (fmt ("%d/%d cases with feasible profiles, %ld equilibria in total, H's own profile an equilibrium in %d/%d",
               with_feasible, static_cast<int> (cases.size ()), total_equilibria, h_profile_is_equilibrium,
               static_cast<int> (cases.size ())));
}

// ---------------------------------------------------------------------------
// 5. Constraint soundness.

void
check_sound (Verdict& v, const oracle::Instance& in, const Allocation& a, const std::string& tag, int& feasible,
             int& infeasible)
{
  const Evaluation ev = in.eval->evaluate (a);
  const oracle::Totals ref = oracle::evaluate (in.sc, in.layout, in.radio, in.cons, a);
  if (ev.report.feasible ())
    {
      ++feasible;
      for (ConstraintId id : all_constraints ())
        v.check (ref.pass[static_cast<int> (id)], tag + ": feasible but the reference fails " + constraint_name (id));
      v.check (ev.report.failed_string ().empty (), tag + ": feasible report names failures");
    }
  else
    {
      ++infeasible;
      const std::string names = ev.report.failed_string ();
      v.check (!names.empty (), tag + ": infeasible report names no constraint");
      bool confirmed = false;
      for (ConstraintId id : all_constraints ())
        {
          const bool named = !ev.report.at (id).pass;
          confirmed |= named && !ref.pass[static_cast<int> (id)];
        }
      v.check (confirmed, tag + ": reference passes every named constraint (" + names + ")");
    }
}

void
criterion_soundness (Verdict& v)
{
  int feasible = 0;
  int infeasible = 0;
  for (std::uint64_t seed = 1; seed <= 200; ++seed)
    {
      auto in = oracle::random_instance (seed, 3, 6);
      const std::string tag = fmt ("seed %d", (int) seed);
      check_sound (v, *in, in->a, tag + " random", feasible, infeasible);
      check_sound (v, *in, initial_allocation (in->layout, in->radio), tag + " initial", feasible, infeasible);
      for (int k = 0; k < 3; ++k)
        check_sound (v, *in, oracle::random_allocation (in->layout, in->radio, derive_seed (seed, 40 + k)),
                     tag + " draw", feasible, infeasible);
      SimConfig cfg;
      cfg.radio = in->radio;
      cfg.frame = in->frame;
      cfg.constraints = in->cons;
      for (const char* s : {"H", "R", "H+F-RFC"})
        {
          if (std::string (s) == "H+F-RFC"
              && std::find (in->frame.rfc_candidates.begin (), in->frame.rfc_candidates.end (), 1)
                     == in->frame.rfc_candidates.end ())
            continue;
          const SchemeResult r = run_scheme (parse_scheme (s), *in->eval, in->radio, cfg, seed);
          check_sound (v, *in, r.allocation, tag + " " + s, feasible, infeasible);
        }
    }
  for (std::uint64_t seed = 1; seed <= 3; ++seed)
    {
      const SimConfig cfg;
      auto in = oracle::make_instance (cfg.scenario, cfg.radio, cfg.frame, cfg.constraints, derive_seed (seed, 1));
      const SchemeResult r = run_scheme (parse_scheme ("H"), *in->eval, in->radio, cfg, seed);
      check_sound (v, *in, r.allocation, fmt ("default seed %d H", (int) seed), feasible, infeasible);
    }
  v.check (feasible > 0, "no feasible allocation was exercised");
  v.check (infeasible > 0, "no infeasible allocation was exercised");
  v.note (fmt ("%d feasible, %d infeasible allocations", feasible, infeasible));
}

// ---------------------------------------------------------------------------
// 6. Trends.

struct Means
{
  double t_q = 0.0;
  int n = 0;
};

std::vector<ResultRow>
run_config (Verdict& v, const std::string& name)
{
  const ExperimentConfig cfg = load_config (source_path ("configs/" + name + ".json"));
  std::vector<ResultRow> rows = run_experiment (cfg);
  for (const ResultRow& r : rows)
    v.check (r.error.empty (), name + ": " + r.scheme + " failed: " + r.error);
  return rows;
}

template <typename Key>
std::map<Key, double>
mean_t_q (const std::vector<ResultRow>& rows, const std::string& scheme, const std::function<Key (const ResultRow&)>& key)
{
  std::map<Key, Means> acc;
  for (const ResultRow& r : rows)
    if (r.scheme == scheme)
      {
        Means& m = acc[key (r)];
        m.t_q += r.t_q;
        ++m.n;
      }
  std::map<Key, double> out;
  for (const auto& [k, m] : acc)
    out[k] = m.t_q / m.n;
  return out;
}

std::string
series (const std::map<double, double>& m)
{
  std::string s;
  for (const auto& [k, t] : m)
    s += fmt ("%s%g:%.4g", s.empty () ? "" : " ", k, t);
  return s;
}

void
criterion_trends (Verdict& v)
{
  std::vector<ResultRow> all;
  auto keep = [&] (const std::vector<ResultRow>& rows) { all.insert (all.end (), rows.begin (), rows.end ()); };

  // SEE levels and scheme ordering.
  const auto fig5 = run_config (v, "fig5");
  keep (fig5);
  std::map<std::string, std::map<std::string, double>> by;  // scheme -> level -> mean
  for (const char* s : {"H", "C", "G", "P", "R"})
    by[s] = mean_t_q<std::string> (fig5, s, [] (const ResultRow& r) { return r.see_level; });
  const auto& h = by["H"];
  v.check (h.at ("LSEE") >= h.at ("MSEE") && h.at ("MSEE") >= h.at ("HSEE"),
           fmt ("H over SEE levels: L %.6g M %.6g H %.6g", h.at ("LSEE"), h.at ("MSEE"), h.at ("HSEE")));
  for (const char* level : {"LSEE", "MSEE", "HSEE"})
    {
      const double th = by["H"].at (level);
      const double tc = by["C"].at (level);
      v.check (std::fabs (th - tc) <= 0.05 * std::max (th, tc), fmt ("%s: H %.6g and C %.6g differ by more than 5%%",
                                                                      level, th, tc));
      for (const char* other : {"G", "P", "R"})
        {
          const double to = by[other].at (level);
          v.check (th > to && tc > to, fmt ("%s: %s %.6g not below H %.6g and C %.6g", level, other, to, th, tc));
        }
    }
  v.note (fmt ("fig5 LSEE H %.4g C %.4g G %.4g P %.4g R %.4g", by["H"].at ("LSEE"), by["C"].at ("LSEE"),
               by["G"].at ("LSEE"), by["P"].at ("LSEE"), by["R"].at ("LSEE")));

  // UE count.
  const auto fig10 = run_config (v, "fig10");
  keep (fig10);
  const auto ues = mean_t_q<double> (fig10, "H", [] (const ResultRow& r) { return double (r.n_ues); });
  v.check (ues.size () == 4, "fig10 points");
  for (auto it = std::next (ues.begin ()); it != ues.end (); ++it)
    {
      const auto prev = std::prev (it);
      v.check (it->second >= prev->second, fmt ("fig10 falls from %g to %g UEs", prev->first, it->first));
      const double growth = (it->second - prev->second) / prev->second;
      const double ue_growth = (it->first - prev->first) / prev->first;
      v.check (growth / ue_growth < 1.0, fmt ("fig10 growth ratio %.3g from %g UEs", growth / ue_growth, prev->first));
    }
  {
    const double growth = (ues.rbegin ()->second - ues.begin ()->second) / ues.begin ()->second;
    const double ue_growth = (ues.rbegin ()->first - ues.begin ()->first) / ues.begin ()->first;
    v.check (growth / ue_growth < 1.0, fmt ("fig10 overall growth ratio %.3g", growth / ue_growth));
  }
  v.note ("fig10 " + series (ues));

  // Slots per frame.
  const auto fig11 = run_config (v, "fig11");
  keep (fig11);
  const auto zs = mean_t_q<double> (fig11, "H", [] (const ResultRow& r) { return double (r.z); });
  v.check (zs.size () == 3, "fig11 points");
  for (auto it = std::next (zs.begin ()); it != zs.end (); ++it)
    v.check (it->second >= std::prev (it)->second, fmt ("fig11 falls at Z = %g", it->first));
  v.note ("fig11 " + series (zs));

  // Beamwidth.
  const auto fig12 = run_config (v, "fig12");
  keep (fig12);
  const auto bws = mean_t_q<double> (fig12, "H", [] (const ResultRow& r) { return r.beamwidth_deg; });
  v.check (bws.size () == 4, "fig12 points");
  for (auto it = std::next (bws.begin ()); it != bws.end (); ++it)
    v.check (it->second <= std::prev (it)->second, fmt ("fig12 rises at %g deg", it->first));
  v.note ("fig12 " + series (bws));

  // Downlink-heavy frames.
  double dl = 0.0;
  double ul = 0.0;
  int n = 0;
  for (const ResultRow& r : all)
    if (r.error.empty () && r.dl_subframes > r.ul_subframes)
      {
        dl += r.dl_throughput;
        ul += r.ul_throughput;
        ++n;
      }
  v.check (n > 0, "no run selected downlink-heavy frames");
  v.check (dl > ul, fmt ("mean DL %.6g not above mean UL %.6g", dl / std::max (n, 1), ul / std::max (n, 1)));
  v.note (fmt ("%d DL-heavy runs: DL %.4g UL %.4g", n, dl / std::max (n, 1), ul / std::max (n, 1)));
}

// ---------------------------------------------------------------------------
// 7. Determinism of the command line tool.

int
cli (const std::string& args)
{
  const std::string cmd = std::string (IAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system (cmd.c_str ());
  return WIFEXITED (status) ? WEXITSTATUS (status) : -1;
}

std::string
slurp (const fs::path& p)
{
  std::ifstream in (p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf ();
  return ss.str ();
}

void
criterion_determinism (Verdict& v)
{
  const fs::path scratch = fs::temp_directory_path () / "iab_acceptance_determinism";
  fs::remove_all (scratch);
  std::vector<fs::path> configs;
  for (const auto& entry : fs::directory_iterator (source_path ("configs")))
    if (entry.path ().extension () == ".json")
      configs.push_back (entry.path ());
  std::sort (configs.begin (), configs.end ());
  v.check (!configs.empty (), "no example configs");
  for (const fs::path& cfg : configs)
    {
      const std::string name = cfg.stem ().string ();
      std::string csv[2];
      for (int k = 0; k < 2; ++k)
        {
          const fs::path out = scratch / (name + "_" + std::to_string (k));
          const int rc = cli ("sweep --config " + cfg.string () + " --out " + out.string () + " --quiet");
          v.check (rc == 0, fmt ("%s: exit code %d", name.c_str (), rc));
          csv[k] = slurp (out / "results.csv");
        }
      v.check (!csv[0].empty () && csv[0] == csv[1], name + ": CSV outputs differ");
    }
  v.note (fmt ("%d configs", static_cast<int> (configs.size ())));
  fs::remove_all (scratch);
}

// ---------------------------------------------------------------------------
// 8. Convergence reporting.

void
criterion_convergence (Verdict& v)
{
  const auto rows = run_config (v, "fig4");
  std::map<std::string, Means> it;
  for (const ResultRow& r : rows)
    {
      v.check (r.converged, fmt ("%s seed %d did not converge", r.scheme.c_str (), (int) r.seed));
      Means& m = it[r.scheme];
      m.t_q += static_cast<double> (r.iterations);
      ++m.n;
    }
  v.check (it["H"].n == 10 && it["C"].n == 10, "fig4 needs 10 seeds of H and C");
  const double h = it["H"].t_q / std::max (it["H"].n, 1);
  const double c = it["C"].t_q / std::max (it["C"].n, 1);
  v.check (c < h, fmt ("mean iterations C %.4g not below H %.4g", c, h));
  v.note (fmt ("mean iterations H %.4g C %.4g", h, c));
}

} // namespace

int
main (int argc, char** argv)
{
  const std::vector<std::function<void (Verdict&)>> criteria{
      criterion_formulas,  criterion_reference, criterion_potential,   criterion_joint_space,
      criterion_soundness, criterion_trends,    criterion_determinism, criterion_convergence};
  const std::vector<double> budget{1.0, 30.0, -1.0, 60.0, -1.0, 1800.0, -1.0, -1.0};

  std::set<int> wanted;
  for (int i = 1; i < argc; ++i)
    {
      const int n = std::atoi (argv[i]);
      if (n < 1 || n > static_cast<int> (criteria.size ()))
        {
          std::fprintf (stderr, "unknown criterion '%s'\n", argv[i]);
          return 2;
        }
      wanted.insert (n);
    }

  bool ok = true;
  for (int n = 1; n <= static_cast<int> (criteria.size ()); ++n)
    {
      if (!wanted.empty () && !wanted.count (n))
        continue;
      Verdict v;
      const auto t0 = Clock::now ();
      try
        {
          criteria[n - 1](v);
        }
      catch (const std::exception& e)
        {
          v.check (false, std::string ("exception: ") + e.what ());
        }
      const double secs = seconds_since (t0);
      if (budget[n - 1] > 0.0)
        v.check (secs < budget[n - 1], fmt ("took %.1f s, budget %.0f s", secs, budget[n - 1]));
      v.print (n, secs);
      ok &= v.pass ();
    }
  return ok ? 0 : 1;
}
