/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/baselines.h"

#include "iab/frames.h"
#include "iab/rng.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace iab {

std::string
SchemeId::str () const
{
  static const char* bases = "HCGPR";
  std::string s (1, bases[static_cast<int> (base)]);
  if (rfc)
    {
      static const char* names[] = {"+F-RFC", "+R-RFC", "+T-RFC"};
      s += names[static_cast<int> (*rfc)];
    }
  if (split)
    {
      static const char* names[] = {"+H-RABH", "+M-RABH", "+L-RABH", "+R-RABH"};
      s += names[static_cast<int> (*split)];
    }
  return s;
}

SchemeId
parse_scheme (const std::string& text)
{
  SchemeId id;
  std::stringstream ss (text);
  std::string part;
  bool first = true;
  while (std::getline (ss, part, '+'))
    {
      std::string up = part;
      std::transform (up.begin (), up.end (), up.begin (), [] (unsigned char c) { return std::toupper (c); });
      up.erase (std::remove (up.begin (), up.end (), '/'), up.end ());
      if (first)
        {
          static const std::string bases = "HCGPR";
          if (up.size () != 1 || bases.find (up[0]) == std::string::npos)
            {
              throw std::invalid_argument ("unknown scheme '" + text + "': base must be one of H, C, G, P, R");
            }
          id.base = static_cast<BaseScheme> (bases.find (up[0]));
          first = false;
          continue;
        }
      std::optional<RfcOverride> r;
      std::optional<SplitOverride> g;
      if (up == "F-RFC")
        r = RfcOverride::Fixed;
      else if (up == "R-RFC")
        r = RfcOverride::Random;
      else if (up == "T-RFC")
        r = RfcOverride::Traffic;
      else if (up == "H-RABH")
        g = SplitOverride::High;
      else if (up == "M-RABH")
        g = SplitOverride::Medium;
      else if (up == "L-RABH")
        g = SplitOverride::Low;
      else if (up == "R-RABH")
        g = SplitOverride::Random;
      else
        throw std::invalid_argument ("unknown override '" + part + "' in scheme '" + text + "'");
      if ((r && id.rfc) || (g && id.split))
        {
          throw std::invalid_argument ("scheme '" + text + "' overrides the same variable twice");
        }
      if (r)
        id.rfc = r;
      if (g)
        id.split = g;
    }
  if (first)
    {
      throw std::invalid_argument ("empty scheme id");
    }
  return id;
}

int
traffic_matched_rfc (double dl_demand, const std::vector<int>& candidates)
{
  int best = -1;
  double best_gap = std::numeric_limits<double>::infinity ();
  std::vector<int> sorted = candidates;
  std::sort (sorted.begin (), sorted.end ());
  for (int id : sorted)
    {
      const double frac = static_cast<double> (rfc_pattern (id).downlink_count ()) / kSubframes;
      const double gap = std::fabs (frac - dl_demand);
      if (gap < best_gap - 1e-12)
        {
          best_gap = gap;
          best = id;
        }
    }
  if (best < 0)
    {
      throw std::invalid_argument ("no RFC candidates");
    }
  return best;
}

int
pinned_split (SplitOverride o, int z)
{
  switch (o)
    {
    case SplitOverride::High:
      return z - 1;
    case SplitOverride::Medium:
      return std::clamp (static_cast<int> (std::lround (z / 2.0)), 1, z - 1);
    case SplitOverride::Low:
      return 1;
    default:
      throw std::invalid_argument ("random split has no fixed value");
    }
}

namespace {

int
candidate_index (const Layout& layout, int rfc)
{
  const auto& c = layout.rfc_candidates ();
  auto it = std::find (c.begin (), c.end (), rfc);
  if (it == c.end ())
    {
      throw std::invalid_argument ("RFC " + std::to_string (rfc) + " is not among the candidates");
    }
  return static_cast<int> (it - c.begin ());
}

} // namespace

std::set<int>
apply_overrides (const SchemeId& id, const Layout& layout, const AssociationConfig& assoc, Allocation& a,
                 std::uint64_t seed)
{
  std::set<int> pinned;
  Rng rng (derive_seed (seed, 0x5eed0001));
  if (id.rfc)
    {
      for (int s : layout.sbs ())
        {
          const int var = layout.rfc_var (s);
          switch (*id.rfc)
            {
            case RfcOverride::Fixed:
              a.x[var] = candidate_index (layout, 1);
              break;
            case RfcOverride::Random:
              a.x[var] = static_cast<int> (rng.uniform_index (layout.rfc_candidates ().size ()));
              break;
            case RfcOverride::Traffic:
              {
                auto it = assoc.dl_demand_by_sbs.find (s);
                const double demand = it == assoc.dl_demand_by_sbs.end () ? assoc.dl_demand : it->second;
                a.x[var] = candidate_index (layout, traffic_matched_rfc (demand, layout.rfc_candidates ()));
              }
              break;
            }
          pinned.insert (var);
        }
    }
  if (id.split)
    {
      for (const auto& path : layout.paths ())
        {
          const int var = layout.gamma_var (path.leaf ());
          if (*id.split == SplitOverride::Random)
            {
              a.x[var] = static_cast<int> (rng.uniform_index (layout.var (var).cardinality));
            }
          else
            {
              a.x[var] = pinned_split (*id.split, layout.z ()) - 1;
            }
          pinned.insert (var);
        }
    }
  return pinned;
}

namespace {

struct Genome
{
  std::vector<int> vars;
  std::vector<int> card;
};

Genome
genome_of (const std::vector<Player>& players, const Layout& layout)
{
  Genome g;
  for (const auto& p : players)
    {
      for (int v : p.vars)
        {
          g.vars.push_back (v);
          g.card.push_back (layout.var (v).cardinality);
        }
    }
  return g;
}

/// Memoized fitness of genomes applied over a fixed background allocation.
class Fitness
{
public:
  Fitness (const SubproblemSpec& spec, const Genome& g, const Allocation& base, const Evaluator& ev)
    : m_spec (spec), m_genome (g), m_work (base), m_ev (ev)
  {
  }

  double operator() (const std::vector<int>& genes)
  {
    auto it = m_cache.find (genes);
    if (it != m_cache.end ())
      {
        return it->second;
      }
    for (std::size_t i = 0; i < genes.size (); ++i)
      {
        m_work.x[m_genome.vars[i]] = genes[i];
      }
    const double u = common_utility (m_spec, m_ev.evaluate (m_work));
    m_cache.emplace (genes, u);
    return u;
  }

  long evaluations () const { return static_cast<long> (m_cache.size ()); }

private:
  const SubproblemSpec& m_spec;
  const Genome& m_genome;
  Allocation m_work;
  const Evaluator& m_ev;
  std::map<std::vector<int>, double> m_cache;
};

std::vector<int>
genes_of (const Genome& g, const Allocation& a)
{
  std::vector<int> out;
  for (int v : g.vars)
    {
      out.push_back (a.x[v]);
    }
  return out;
}

void
apply_genes (const Genome& g, const std::vector<int>& genes, Allocation& a)
{
  for (std::size_t i = 0; i < genes.size (); ++i)
    {
      a.x[g.vars[i]] = genes[i];
    }
}

GameTrace
finish (const SubproblemSpec& spec, const Genome& g, const std::vector<int>& best, double best_u,
        double initial_u, int sweeps, long evals, Allocation& a, const std::vector<double>& history,
        bool monotone)
{
  GameTrace tr;
  tr.id = spec.id;
  tr.initial_utility = initial_u;
  tr.sweeps = sweeps;
  tr.decisions = evals;
  tr.sweep_utility = history;
  tr.converged = true;
  const std::vector<int> old = genes_of (g, a);
  if (best != old && (!monotone || improves (best_u, initial_u, 0.0)))
    {
      apply_genes (g, best, a);
      tr.moves.push_back (GameMove{-1, old, best, best_u});
      tr.final_utility = best_u;
    }
  else
    {
      tr.final_utility = initial_u;
    }
  return tr;
}

} // namespace

GameTrace
run_genetic (const SubproblemSpec& spec, const std::vector<Player>& players, Allocation& a, const Evaluator& ev,
             const MetaConfig& meta, std::uint64_t seed)
{
  const Genome g = genome_of (players, ev.layout ());
  Fitness fit (spec, g, a, ev);
  const std::vector<int> incumbent = genes_of (g, a);
  const double initial_u = fit (incumbent);
  if (g.vars.empty ())
    {
      return finish (spec, g, incumbent, initial_u, initial_u, 0, fit.evaluations (), a, {}, true);
    }
  Rng rng (seed);
  const std::size_t len = g.vars.size ();
  const double mutation = meta.ga_mutation >= 0.0 ? meta.ga_mutation : 1.0 / static_cast<double> (len);
  const int pop_size = std::max (1, meta.ga_population);

  std::vector<std::vector<int>> pop;
  if (meta.seed_incumbent)
    {
      pop.push_back (incumbent);
    }
  while (static_cast<int> (pop.size ()) < pop_size)
    {
      std::vector<int> ind (len);
      for (std::size_t i = 0; i < len; ++i)
        {
          ind[i] = static_cast<int> (rng.uniform_index (g.card[i]));
        }
      pop.push_back (std::move (ind));
    }
  std::vector<double> score (pop.size ());
  for (std::size_t i = 0; i < pop.size (); ++i)
    {
      score[i] = fit (pop[i]);
    }
  auto best_of = [&] {
    std::size_t b = 0;
    for (std::size_t i = 1; i < pop.size (); ++i)
      {
        if (score[i] > score[b])
          {
            b = i;
          }
      }
    return b;
  };
  auto tournament = [&] {
    std::size_t b = rng.uniform_index (pop.size ());
    for (int k = 1; k < meta.ga_tournament; ++k)
      {
        const std::size_t c = rng.uniform_index (pop.size ());
        if (score[c] > score[b] || (score[c] == score[b] && c < b))
          {
            b = c;
          }
      }
    return b;
  };

  std::vector<double> history;
  for (int gen = 0; gen < meta.ga_generations; ++gen)
    {
      std::vector<std::vector<int>> next;
      next.push_back (pop[best_of ()]);
      while (next.size () < pop.size ())
        {
          std::vector<int> c1 = pop[tournament ()];
          std::vector<int> c2 = pop[tournament ()];
          if (len > 1 && rng.bernoulli (meta.ga_crossover))
            {
              const std::size_t cut = 1 + rng.uniform_index (len - 1);
              for (std::size_t i = cut; i < len; ++i)
                {
                  std::swap (c1[i], c2[i]);
                }
            }
          for (auto* c : {&c1, &c2})
            {
              for (std::size_t i = 0; i < len; ++i)
                {
                  if (rng.bernoulli (mutation))
                    {
                      (*c)[i] = static_cast<int> (rng.uniform_index (g.card[i]));
                    }
                }
            }
          next.push_back (std::move (c1));
          if (next.size () < pop.size ())
            {
              next.push_back (std::move (c2));
            }
        }
      pop = std::move (next);
      for (std::size_t i = 0; i < pop.size (); ++i)
        {
          score[i] = fit (pop[i]);
        }
      history.push_back (score[best_of ()]);
    }
  const std::size_t b = best_of ();
  return finish (spec, g, pop[b], score[b], initial_u, meta.ga_generations, fit.evaluations (), a, history,
                 meta.seed_incumbent);
}

GameTrace
run_swarm (const SubproblemSpec& spec, const std::vector<Player>& players, Allocation& a, const Evaluator& ev,
           const MetaConfig& meta, std::uint64_t seed)
{
  const Genome g = genome_of (players, ev.layout ());
  Fitness fit (spec, g, a, ev);
  const std::vector<int> incumbent = genes_of (g, a);
  const double initial_u = fit (incumbent);
  if (g.vars.empty ())
    {
      return finish (spec, g, incumbent, initial_u, initial_u, 0, fit.evaluations (), a, {}, true);
    }
  Rng rng (seed);
  const std::size_t len = g.vars.size ();
  const int n = std::max (1, meta.pso_particles);

  auto round_pos = [&] (const std::vector<double>& x) {
    std::vector<int> out (len);
    for (std::size_t i = 0; i < len; ++i)
      {
        out[i] = std::clamp (static_cast<int> (std::lround (x[i])), 0, g.card[i] - 1);
      }
    return out;
  };

  std::vector<std::vector<double>> x (n, std::vector<double> (len)), v (n, std::vector<double> (len, 0.0));
  const int first_random = meta.seed_incumbent ? 1 : 0;
  if (meta.seed_incumbent)
    {
      for (std::size_t i = 0; i < len; ++i)
        {
          x[0][i] = incumbent[i];
        }
    }
  for (int p = first_random; p < n; ++p)
    {
      for (std::size_t i = 0; i < len; ++i)
        {
          const double range = g.card[i] - 1;
          x[p][i] = rng.uniform (0.0, range);
          v[p][i] = rng.uniform (-range, range) * 0.5;
        }
    }
  std::vector<std::vector<int>> pbest (n);
  std::vector<double> pscore (n);
  std::size_t gb = 0;
  for (int p = 0; p < n; ++p)
    {
      pbest[p] = round_pos (x[p]);
      pscore[p] = fit (pbest[p]);
      if (pscore[p] > pscore[gb])
        {
          gb = p;
        }
    }
  std::vector<int> gbest = pbest[gb];
  double gscore = pscore[gb];

  std::vector<double> history;
  for (int it = 0; it < meta.pso_iterations; ++it)
    {
      for (int p = 0; p < n; ++p)
        {
          for (std::size_t i = 0; i < len; ++i)
            {
              const double range = g.card[i] - 1;
              const double r1 = rng.uniform01 ();
              const double r2 = rng.uniform01 ();
              double vel = meta.pso_inertia * v[p][i] + meta.pso_cognitive * r1 * (pbest[p][i] - x[p][i])
                           + meta.pso_social * r2 * (gbest[i] - x[p][i]);
              vel = std::clamp (vel, -range, range);
              v[p][i] = vel;
              x[p][i] = std::clamp (x[p][i] + vel, 0.0, range);
            }
          const std::vector<int> pos = round_pos (x[p]);
          const double s = fit (pos);
          if (s > pscore[p])
            {
              pscore[p] = s;
              pbest[p] = pos;
            }
          if (s > gscore)
            {
              gscore = s;
              gbest = pos;
            }
        }
      history.push_back (gscore);
    }
  return finish (spec, g, gbest, gscore, initial_u, meta.pso_iterations, fit.evaluations (), a, history,
                 meta.seed_incumbent);
}

Allocation
random_allocation (const Layout& layout, const Allocation& base, const std::set<int>& pinned, std::uint64_t seed)
{
  Allocation a = base;
  Rng rng (seed);
  for (int i = 0; i < layout.size (); ++i)
    {
      if (!pinned.count (i))
        {
          a.x[i] = static_cast<int> (rng.uniform_index (layout.var (i).cardinality));
        }
    }
  return a;
}

SchemeResult
run_scheme (const SchemeId& id, const Evaluator& ev, const RadioConfig& radio, const SimConfig& cfg,
            std::uint64_t seed)
{
  const Layout& layout = ev.layout ();
  Allocation a = initial_allocation (layout, radio);
  const std::set<int> pinned = apply_overrides (id, layout, cfg.association, a, seed);

  SchemeResult out;
  StackelbergOptions opt = stackelberg_options (cfg.game);
  opt.pinned = pinned;
  out.penalty = opt.penalty >= 0.0 ? opt.penalty : default_penalty (ev, opt.penalty_factor);
  opt.penalty = out.penalty;

  if (id.base == BaseScheme::R)
    {
      out.allocation = random_allocation (layout, a, pinned, derive_seed (seed, 0x5eed0002));
      out.evaluation = ev.evaluate (out.allocation);
      out.converged = true;
    }
  else
    {
      std::uint64_t calls = 0;
      switch (id.base)
        {
        case BaseScheme::H:
          opt.counting = IterationCount::PerDecision;
          break;
        case BaseScheme::C:
          opt.counting = IterationCount::PerSweep;
          break;
        case BaseScheme::G:
          opt.counting = IterationCount::PerSweep;
          opt.max_cycles = cfg.meta.cycles;
          opt.solver = [&] (const SubproblemSpec& spec, const std::vector<Player>& players, Allocation& x,
                            const Evaluator& e) {
            return run_genetic (spec, players, x, e, cfg.meta, derive_seed (seed, 0x6a000000 + calls++));
          };
          break;
        case BaseScheme::P:
          opt.counting = IterationCount::PerSweep;
          opt.max_cycles = cfg.meta.cycles;
          opt.solver = [&] (const SubproblemSpec& spec, const std::vector<Player>& players, Allocation& x,
                            const Evaluator& e) {
            return run_swarm (spec, players, x, e, cfg.meta, derive_seed (seed, 0x50000000 + calls++));
          };
          break;
        default:
          break;
        }
      StackelbergResult r = stackelberg (a, ev, opt);
      out.allocation = std::move (r.allocation);
      out.evaluation = std::move (r.evaluation);
      out.checkpoints = std::move (r.checkpoints);
      out.cycles = r.cycles;
      out.iterations = r.iterations;
      out.converged = r.converged;
    }
  out.utility = common_utility (make_subproblem (SubproblemId::SP4, out.penalty), out.evaluation);
  return out;
}

} // namespace iab
