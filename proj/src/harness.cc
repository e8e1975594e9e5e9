/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/harness.h"

#include "iab/aggregate.h"
#include "iab/association.h"
#include "iab/baselines.h"
#include "iab/frames.h"
#include "iab/linkperf.h"
#include "iab/rng.h"
#include "iab/scenario.h"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

namespace iab {

using nlohmann::json;

namespace {

/// Reads keys of one JSON object, rejecting unknown ones on finish().
class ObjectReader
{
public:
  ObjectReader (const json& j, std::string path) : m_j (j), m_path (std::move (path))
  {
    if (!m_j.is_object ())
      {
        throw ValidationError (m_path + ": expected an object");
      }
  }

  template <typename T>
  void get (const char* key, T& out)
  {
    m_seen.insert (key);
    auto it = m_j.find (key);
    if (it == m_j.end ())
      {
        return;
      }
    out = convert<T> (*it, name (key));
  }

  bool has (const char* key)
  {
    m_seen.insert (key);
    return m_j.contains (key);
  }

  const json& at (const char* key) const { return m_j.at (key); }
  std::string name (const char* key) const { return m_path.empty () ? key : m_path + "." + key; }

  void finish () const
  {
    for (auto it = m_j.begin (); it != m_j.end (); ++it)
      {
        if (!m_seen.count (it.key ()))
          {
            throw ValidationError ("unknown key '" + name (it.key ().c_str ()) + "'");
          }
      }
  }

  template <typename T>
  static T convert (const json& v, const std::string& where)
  {
    if constexpr (std::is_same_v<T, bool>)
      {
        if (!v.is_boolean ())
          throw ValidationError (where + ": expected true or false");
        return v.get<bool> ();
      }
    else if constexpr (std::is_integral_v<T>)
      {
        if (!v.is_number_integer ())
          throw ValidationError (where + ": expected an integer");
        return v.get<T> ();
      }
    else if constexpr (std::is_floating_point_v<T>)
      {
        if (!v.is_number ())
          throw ValidationError (where + ": expected a number");
        return v.get<T> ();
      }
    else if constexpr (std::is_same_v<T, std::string>)
      {
        if (!v.is_string ())
          throw ValidationError (where + ": expected a string");
        return v.get<std::string> ();
      }
    else
      {
        if (!v.is_array ())
          throw ValidationError (where + ": expected an array");
        T out;
        for (std::size_t i = 0; i < v.size (); ++i)
          {
            out.push_back (convert<typename T::value_type> (v[i], where + "[" + std::to_string (i) + "]"));
          }
        return out;
      }
  }

private:
  const json& m_j;
  std::string m_path;
  std::set<std::string> m_seen;
};

Position
read_position (const json& v, const std::string& where)
{
  if (!v.is_array () || v.size () != 2 || !v[0].is_number () || !v[1].is_number ())
    {
      throw ValidationError (where + ": expected [x, y]");
    }
  return Position{v[0].get<double> (), v[1].get<double> ()};
}

std::vector<Position>
read_positions (const json& v, const std::string& where)
{
  if (!v.is_array ())
    {
      throw ValidationError (where + ": expected an array of [x, y]");
    }
  std::vector<Position> out;
  for (std::size_t i = 0; i < v.size (); ++i)
    {
      out.push_back (read_position (v[i], where + "[" + std::to_string (i) + "]"));
    }
  return out;
}

void
read_band (const json& j, const std::string& path, BandConfig& b)
{
  ObjectReader r (j, path);
  r.get ("carrier_hz", b.carrier_hz);
  r.get ("block_bandwidth_hz", b.block_bandwidth_hz);
  r.get ("absorption_per_m", b.absorption_per_m);
  r.finish ();
}

void
read_sections (const json& root, ExperimentConfig& cfg)
{
  ObjectReader top (root, "");
  SimConfig& s = cfg.sim;
  if (top.has ("scenario"))
    {
      ObjectReader r (top.at ("scenario"), "scenario");
      ScenarioConfig& c = s.scenario;
      r.get ("area", c.area);
      r.get ("mbs_height", c.mbs_height);
      r.get ("sbs_height", c.sbs_height);
      r.get ("ue_height", c.ue_height);
      r.get ("layout", c.layout);
      r.get ("n_sbs", c.n_sbs);
      r.get ("n_ues", c.n_ues);
      r.get ("inner_radius", c.inner_radius);
      r.get ("outer_radius", c.outer_radius);
      r.get ("min_separation", c.min_separation);
      r.get ("max_sbs_per_path", c.max_sbs_per_path);
      r.get ("rf_chains", c.rf_chains);
      if (r.has ("mbs_position"))
        c.mbs_position = read_position (r.at ("mbs_position"), "scenario.mbs_position");
      if (r.has ("sbs_positions"))
        c.sbs_positions = read_positions (r.at ("sbs_positions"), "scenario.sbs_positions");
      if (r.has ("ue_positions"))
        c.ue_positions = read_positions (r.at ("ue_positions"), "scenario.ue_positions");
      r.finish ();
    }
  if (top.has ("radio"))
    {
      ObjectReader r (top.at ("radio"), "radio");
      RadioConfig& c = s.radio;
      r.get ("side_lobe", c.side_lobe);
      r.get ("beam_mbs_deg", c.beam_mbs_deg);
      r.get ("beam_sbs_deg", c.beam_sbs_deg);
      r.get ("beam_ue_deg", c.beam_ue_deg);
      if (r.has ("mmwave"))
        read_band (r.at ("mmwave"), "radio.mmwave", c.mmwave);
      if (r.has ("thz"))
        read_band (r.at ("thz"), "radio.thz", c.thz);
      r.get ("noise_dbm_hz", c.noise_dbm_hz);
      r.get ("p_max_bs_dbm", c.p_max_bs_dbm);
      r.get ("p_max_ue_dbm", c.p_max_ue_dbm);
      r.get ("levels_bs", c.levels_bs);
      r.get ("levels_ue", c.levels_ue);
      r.get ("blocks_case2", c.blocks_case2);
      r.get ("blocks_case3", c.blocks_case3);
      r.get ("blocks_total", c.blocks_total);
      r.get ("use_thz", c.use_thz);
      r.get ("interference_rule", c.interference_rule);
      r.finish ();
    }
  if (top.has ("frame"))
    {
      ObjectReader r (top.at ("frame"), "frame");
      r.get ("z", s.frame.z);
      r.get ("rfc_candidates", s.frame.rfc_candidates);
      r.finish ();
    }
  if (top.has ("association"))
    {
      ObjectReader r (top.at ("association"), "association");
      AssociationConfig& c = s.association;
      r.get ("delta_t", c.delta_t);
      r.get ("delta_s", c.delta_s);
      r.get ("delta_p", c.delta_p);
      r.get ("k_us", c.k_us);
      r.get ("k_p0", c.k_p0);
      r.get ("frames", c.frames);
      r.get ("dl_demand", c.dl_demand);
      if (r.has ("dl_demand_by_sbs"))
        {
          const json& m = r.at ("dl_demand_by_sbs");
          if (!m.is_object ())
            throw ValidationError ("association.dl_demand_by_sbs: expected an object");
          for (auto it = m.begin (); it != m.end (); ++it)
            {
              int id = 0;
              try
                {
                  std::size_t used = 0;
                  id = std::stoi (it.key (), &used);
                  if (used != it.key ().size ())
                    throw std::invalid_argument ("trailing");
                }
              catch (const std::exception&)
                {
                  throw ValidationError ("association.dl_demand_by_sbs: key '" + it.key () + "' is not an SBS id");
                }
              c.dl_demand_by_sbs[id]
                  = ObjectReader::convert<double> (it.value (), "association.dl_demand_by_sbs." + it.key ());
            }
        }
      r.finish ();
    }
  if (top.has ("constraints"))
    {
      ObjectReader r (top.at ("constraints"), "constraints");
      ConstraintConfig& c = s.constraints;
      r.get ("t_min_ul", c.t_min_ul);
      r.get ("t_min_dl", c.t_min_dl);
      r.get ("t_max_thd", c.t_max_thd);
      r.get ("see_level", c.see_level);
      r.get ("see_cons", c.see_cons);
      r.finish ();
    }
  if (top.has ("game"))
    {
      ObjectReader r (top.at ("game"), "game");
      GameConfig& c = s.game;
      r.get ("penalty", c.penalty);
      r.get ("penalty_factor", c.penalty_factor);
      r.get ("follower_tol", c.follower_tol);
      r.get ("leader_eps", c.leader_eps);
      r.get ("improve_tol", c.improve_tol);
      r.get ("max_sweeps", c.max_sweeps);
      r.get ("max_cycles", c.max_cycles);
      r.get ("exhaustive_limit", c.exhaustive_limit);
      r.get ("leader_check", c.leader_check);
      r.finish ();
    }
  if (top.has ("meta"))
    {
      ObjectReader r (top.at ("meta"), "meta");
      MetaConfig& c = s.meta;
      r.get ("ga_population", c.ga_population);
      r.get ("ga_generations", c.ga_generations);
      r.get ("ga_tournament", c.ga_tournament);
      r.get ("ga_crossover", c.ga_crossover);
      r.get ("ga_mutation", c.ga_mutation);
      r.get ("pso_particles", c.pso_particles);
      r.get ("pso_iterations", c.pso_iterations);
      r.get ("pso_inertia", c.pso_inertia);
      r.get ("pso_cognitive", c.pso_cognitive);
      r.get ("pso_social", c.pso_social);
      r.get ("cycles", c.cycles);
      r.get ("seed_incumbent", c.seed_incumbent);
      r.finish ();
    }
  if (top.has ("experiment"))
    {
      ObjectReader r (top.at ("experiment"), "experiment");
      r.get ("schemes", cfg.schemes);
      if (r.has ("seeds"))
        {
          const json& v = r.at ("seeds");
          if (v.is_number_integer ())
            {
              const long n = v.get<long> ();
              if (n < 1)
                throw ValidationError ("experiment.seeds: count must be at least 1");
              std::uint64_t first = 1;
              r.get ("first_seed", first);
              cfg.seeds.clear ();
              for (long i = 0; i < n; ++i)
                cfg.seeds.push_back (first + static_cast<std::uint64_t> (i));
            }
          else
            {
              cfg.seeds = ObjectReader::convert<std::vector<std::uint64_t>> (v, "experiment.seeds");
            }
        }
      r.has ("first_seed");
      r.get ("out_dir", cfg.out_dir);
      if (r.has ("sweep"))
        {
          ObjectReader w (r.at ("sweep"), "experiment.sweep");
          w.get ("n_ues", cfg.sweep.n_ues);
          w.get ("z", cfg.sweep.z);
          w.get ("beamwidth_deg", cfg.sweep.beamwidth_deg);
          w.get ("see_level", cfg.sweep.see_level);
          w.finish ();
        }
      r.finish ();
    }
  top.finish ();
}

void
require (bool ok, const std::string& key, const std::string& rule)
{
  if (!ok)
    {
      throw ValidationError (key + ": " + rule);
    }
}

void
check_n_ues (ExperimentConfig& cfg, int n, const std::string& key)
{
  require (n >= 1, key, "must be at least 1");
  if (n < 18 || n > 36)
    {
      cfg.warnings.push_back (key + "=" + std::to_string (n) + " lies outside the studied range 18..36");
    }
}

} // namespace

void
validate_config (ExperimentConfig& cfg)
{
  const SimConfig& s = cfg.sim;
  const ScenarioConfig& sc = s.scenario;
  require (sc.area > 0.0, "scenario.area", "must be positive");
  require (sc.mbs_height >= 0.0 && sc.sbs_height >= 0.0 && sc.ue_height >= 0.0, "scenario heights",
           "must be non-negative");
  require (sc.layout == "fig3" || sc.layout == "random" || sc.layout == "explicit", "scenario.layout",
           "must be fig3, random or explicit");
  require (sc.n_sbs >= 1, "scenario.n_sbs", "must be at least 1");
  check_n_ues (cfg, sc.n_ues, "scenario.n_ues");
  require (sc.inner_radius > 0.0 && sc.outer_radius > sc.inner_radius, "scenario radii",
           "need 0 < inner_radius < outer_radius");
  require (sc.min_separation >= 0.0, "scenario.min_separation", "must be non-negative");
  require (sc.max_sbs_per_path >= 1 && sc.max_sbs_per_path <= 3, "scenario.max_sbs_per_path", "must be 1..3");
  require (sc.rf_chains >= 1, "scenario.rf_chains", "must be at least 1");
  if (sc.layout == "explicit")
    {
      require (!sc.sbs_positions.empty (), "scenario.sbs_positions", "required by the explicit layout");
    }

  const RadioConfig& r = s.radio;
  require (r.side_lobe > 0.0 && r.side_lobe < 1.0, "radio.side_lobe", "must lie in (0, 1)");
  for (auto [v, k] : {std::pair{r.beam_mbs_deg, "radio.beam_mbs_deg"}, {r.beam_sbs_deg, "radio.beam_sbs_deg"},
                      {r.beam_ue_deg, "radio.beam_ue_deg"}})
    {
      require (v > 0.0 && v <= 360.0, k, "must lie in (0, 360]");
    }
  for (auto [b, k] : {std::pair{&r.mmwave, "radio.mmwave"}, {&r.thz, "radio.thz"}})
    {
      require (b->carrier_hz > 0.0, std::string (k) + ".carrier_hz", "must be positive");
      require (b->block_bandwidth_hz > 0.0, std::string (k) + ".block_bandwidth_hz", "must be positive");
      require (b->absorption_per_m >= 0.0, std::string (k) + ".absorption_per_m", "must be non-negative");
    }
  require (r.levels_bs >= 1, "radio.levels_bs", "must be at least 1");
  require (r.levels_ue >= 1, "radio.levels_ue", "must be at least 1");
  require (r.blocks_case2 >= 1 && r.blocks_case3 >= 1 && r.blocks_total >= 1, "radio.blocks_*",
           "must be at least 1");
  require (r.interference_rule == "equation" || r.interference_rule == "prose", "radio.interference_rule",
           "must be equation or prose");

  require (s.frame.z >= 2, "frame.z", "must be at least 2");
  require (!s.frame.rfc_candidates.empty (), "frame.rfc_candidates", "must not be empty");
  std::set<int> seen;
  for (int id : s.frame.rfc_candidates)
    {
      require (id >= 0 && id < kRfcCount, "frame.rfc_candidates", "ids must lie in 0..6");
      require (seen.insert (id).second, "frame.rfc_candidates", "ids must be unique");
    }

  const AssociationConfig& a = s.association;
  for (auto [v, k] : {std::pair{a.delta_t, "association.delta_t"}, {a.delta_s, "association.delta_s"},
                      {a.delta_p, "association.delta_p"}})
    {
      require (v > 0.0 && v < 1.0, k, "must lie in (0, 1)");
    }
  require (a.k_us >= 1, "association.k_us", "must be at least 1");
  require (a.k_p0 >= 1, "association.k_p0", "must be at least 1");
  require (a.frames >= 1, "association.frames", "must be at least 1");
  require (a.dl_demand >= 0.0 && a.dl_demand <= 1.0, "association.dl_demand", "must lie in [0, 1]");
  for (const auto& [id, d] : a.dl_demand_by_sbs)
    {
      require (d >= 0.0 && d <= 1.0, "association.dl_demand_by_sbs." + std::to_string (id), "must lie in [0, 1]");
    }

  const ConstraintConfig& c = s.constraints;
  require (c.t_min_ul >= 0.0 && c.t_min_dl >= 0.0, "constraints.t_min_*", "must be non-negative");
  require (c.t_max_thd > 0.0, "constraints.t_max_thd", "must be positive");
  try
    {
      see_level_value (c.see_level);
    }
  catch (const std::invalid_argument& e)
    {
      throw ValidationError (std::string ("constraints.see_level: ") + e.what ());
    }

  const GameConfig& g = s.game;
  require (g.penalty_factor >= 0.0, "game.penalty_factor", "must be non-negative");
  require (g.follower_tol > 0.0 && g.leader_eps > 0.0, "game tolerances", "must be positive");
  require (g.improve_tol >= 0.0, "game.improve_tol", "must be non-negative");
  require (g.max_sweeps >= 1 && g.max_cycles >= 1, "game caps", "must be at least 1");
  require (g.exhaustive_limit >= 1, "game.exhaustive_limit", "must be at least 1");
  require (g.leader_check == "cycle" || g.leader_check == "literal", "game.leader_check",
           "must be 'cycle' or 'literal'");

  const MetaConfig& m = s.meta;
  require (m.ga_population >= 1 && m.ga_generations >= 0 && m.ga_tournament >= 1, "meta.ga_*",
           "population and tournament at least 1, generations non-negative");
  require (m.ga_crossover >= 0.0 && m.ga_crossover <= 1.0, "meta.ga_crossover", "must lie in [0, 1]");
  require (m.ga_mutation <= 1.0, "meta.ga_mutation", "must not exceed 1");
  require (m.pso_particles >= 1 && m.pso_iterations >= 0, "meta.pso_*",
           "particles at least 1, iterations non-negative");
  require (m.cycles >= 1, "meta.cycles", "must be at least 1");

  require (!cfg.schemes.empty (), "experiment.schemes", "must not be empty");
  for (const auto& id : cfg.schemes)
    {
      try
        {
          parse_scheme (id);
        }
      catch (const std::invalid_argument& e)
        {
          throw ValidationError (std::string ("experiment.schemes: ") + e.what ());
        }
    }
  require (!cfg.seeds.empty (), "experiment.seeds", "must not be empty");
  for (int n : cfg.sweep.n_ues)
    {
      check_n_ues (cfg, n, "experiment.sweep.n_ues");
    }
  for (int z : cfg.sweep.z)
    {
      require (z >= 2, "experiment.sweep.z", "values must be at least 2");
    }
  for (double b : cfg.sweep.beamwidth_deg)
    {
      require (b > 0.0 && b <= 360.0, "experiment.sweep.beamwidth_deg", "values must lie in (0, 360]");
    }
  for (const auto& l : cfg.sweep.see_level)
    {
      require (l == "LSEE" || l == "MSEE" || l == "HSEE", "experiment.sweep.see_level",
               "values must be LSEE, MSEE or HSEE");
    }
}

ExperimentConfig
parse_config (const std::string& text, const std::string& origin)
{
  ExperimentConfig cfg;
  if (text.find_first_not_of (" \t\r\n") == std::string::npos)
    {
      validate_config (cfg);
      return cfg;
    }
  json root;
  try
    {
      root = json::parse (text);
    }
  catch (const json::parse_error& e)
    {
      throw ValidationError (origin + ": " + e.what ());
    }
  read_sections (root, cfg);
  validate_config (cfg);
  return cfg;
}

ExperimentConfig
load_config (const std::string& path)
{
  std::ifstream in (path);
  if (!in)
    {
      throw ValidationError ("cannot open config '" + path + "'");
    }
  std::stringstream ss;
  ss << in.rdbuf ();
  return parse_config (ss.str (), path);
}

std::vector<SweepPoint>
sweep_points (const ExperimentConfig& cfg)
{
  const SimConfig& s = cfg.sim;
  const std::vector<int> ues = cfg.sweep.n_ues.empty () ? std::vector<int>{s.scenario.n_ues} : cfg.sweep.n_ues;
  const std::vector<int> zs = cfg.sweep.z.empty () ? std::vector<int>{s.frame.z} : cfg.sweep.z;
  std::vector<std::optional<double>> beams;
  for (double b : cfg.sweep.beamwidth_deg)
    {
      beams.push_back (b);
    }
  if (beams.empty ())
    {
      beams.push_back (std::nullopt);
    }
  const std::vector<std::string> levels
      = cfg.sweep.see_level.empty () ? std::vector<std::string>{s.constraints.see_level} : cfg.sweep.see_level;
  std::vector<SweepPoint> out;
  for (int n : ues)
    for (int z : zs)
      for (const auto& b : beams)
        for (const auto& l : levels)
          out.push_back (SweepPoint{n, z, b, l});
  return out;
}

SimConfig
apply_point (const SimConfig& base, const SweepPoint& p)
{
  SimConfig s = base;
  s.scenario.n_ues = p.n_ues;
  s.frame.z = p.z;
  if (p.beamwidth_deg)
    {
      s.radio.beam_sbs_deg = *p.beamwidth_deg;
      s.radio.beam_ue_deg = *p.beamwidth_deg;
    }
  if (p.see_level != s.constraints.see_level)
    {
      s.constraints.see_level = p.see_level;
      s.constraints.see_cons = -1.0;
    }
  return s;
}

namespace {

/// Long-term averages after one frame: per-UE access rate and SINR, per-path
/// delivered access throughput.
void
update_state (EmaState& ema, const Scenario& sc, const Selection& sel, const Layout& layout, const LinkModel& lm,
              const Allocation& a, const Evaluation& ev, const AssociationConfig& cfg)
{
  const auto trace = lm.trace (a);
  std::map<int, UeFrameRecord> records;
  for (int u : layout.ues ())
    {
      UeFrameRecord rec;
      const int s = layout.serving_sbs (u);
      for (int tau = 0; tau < kSubframes; ++tau)
        {
          rec[tau].downlink = rfc_pattern (rfc_id (layout, a, s)).downlink[tau];
        }
      records[u] = rec;
    }
  for (int v = 0; v < lm.size (); ++v)
    {
      const Transmission& l = lm.link (v);
      if (l.kind != LinkKind::Access)
        {
          continue;
        }
      UeFrameRecord& rec = records[l.ue];
      const double bw = lm.channel (l.thz).bandwidth_hz * l.blocks;
      for (const LinkSample& smp : trace[v])
        {
          SubframeSample& sf = rec[smp.tau];
          const double r = bw * smp.width * std::log2 (1.0 + smp.sinr);
          if (l.downlink)
            {
              sf.dl_rate += r;
              sf.dl_segments.push_back (SegmentSample{smp.width, smp.sinr});
            }
          else
            {
              sf.ul_rate += r;
              sf.ul_segments.push_back (SegmentSample{smp.width, smp.sinr});
            }
        }
    }
  const std::vector<int> scheduled = sel.scheduled_ues ();
  for (int u : sc.ue_ids ())
    {
      UeEma st = ema.ue_state (u);
      if (std::binary_search (scheduled.begin (), scheduled.end (), u))
        {
          const FrameSampleResult fs = frame_sample (records[u]);
          st.rate = update_ema (st.rate, fs.throughput, cfg.delta_t);
          st.sinr = update_ema (st.sinr, fs.sinr, cfg.delta_s);
        }
      else
        {
          st.rate = update_ema (st.rate, 0.0, cfg.delta_t);
        }
      ema.ue[u] = st;
    }
  std::map<int, double> delivered;
  for (std::size_t p = 0; p < layout.paths ().size (); ++p)
    {
      double t = 0.0;
      for (const auto& tier : ev.paths.empty () ? std::vector<TierRates>{} : ev.paths[p].tiers)
        {
          t += tier.access_ul + tier.access_dl;
        }
      delivered[layout.paths ()[p].leaf ()] = t;
    }
  for (const auto& path : sc.paths.all ())
    {
      auto it = delivered.find (path.leaf ());
      ema.path[path.leaf ()] = update_ema (ema.path_rate (path.leaf ()), it == delivered.end () ? 0.0 : it->second,
                                           cfg.delta_p);
    }
}

} // namespace

ResultRow
run_single (const SimConfig& base, const std::string& scheme, std::uint64_t seed, const SweepPoint& point)
{
  const auto t0 = std::chrono::steady_clock::now ();
  ResultRow row;
  row.seed = seed;
  row.n_ues = point.n_ues;
  row.z = point.z;
  row.see_level = point.see_level;
  const SimConfig cfg = apply_point (base, point);
  row.beamwidth_deg = cfg.radio.beam_sbs_deg;
  row.scheme = scheme;
  try
    {
      const SchemeId id = parse_scheme (scheme);
      row.scheme = id.str ();
      const Scenario sc = build_scenario (cfg.scenario, cfg.radio.mmwave.carrier_hz, derive_seed (seed, 1));
      EmaState ema;
      for (int f = 0; f < cfg.association.frames; ++f)
        {
          const Selection sel = associate (sc, ema, cfg.association);
          if (sel.paths.empty ())
            {
              throw std::runtime_error ("no transmission path to schedule");
            }
          const Layout layout (sc, sel, cfg.radio, cfg.frame);
          const LinkModel lm (sc, layout, cfg.radio);
          const Evaluator ev (layout, lm, cfg.radio, cfg.constraints);
          const SchemeResult r = run_scheme (id, ev, cfg.radio, cfg, derive_seed (seed, 100 + f));
          const SystemTotals& t = r.evaluation.totals;
          row.t_q = t.t_q;
          row.p_q = t.p_q;
          row.s_ee = t.s_ee;
          row.ul_throughput = t.ul_throughput ();
          row.dl_throughput = t.dl_throughput ();
          row.ul_power = t.ul_power ();
          row.dl_power = t.dl_power ();
          double sum_ul = 0.0, sum_dl = 0.0;
          for (const auto& [u, v] : r.evaluation.ue_ul)
            sum_ul += v;
          for (const auto& [u, v] : r.evaluation.ue_dl)
            sum_dl += v;
          const double n = static_cast<double> (layout.ues ().size ());
          row.avg_access_ul = n > 0 ? sum_ul / n : 0.0;
          row.avg_access_dl = n > 0 ? sum_dl / n : 0.0;
          row.ue_power = r.evaluation.ue_power;
          row.iterations = r.iterations;
          row.cycles = r.cycles;
          row.converged = r.converged;
          row.feasible = r.evaluation.report.feasible ();
          row.failed_constraints = r.evaluation.report.failed_string ();
          row.dl_subframes = 0;
          row.ul_subframes = 0;
          for (int s : layout.sbs ())
            {
              const Rfc& rfc = rfc_pattern (rfc_id (layout, r.allocation, s));
              row.dl_subframes += rfc.downlink_count ();
              row.ul_subframes += rfc.uplink_count ();
            }
          if (f + 1 < cfg.association.frames)
            {
              update_state (ema, sc, sel, layout, lm, r.allocation, r.evaluation, cfg.association);
            }
        }
    }
  catch (const std::exception& e)
    {
      row.error = e.what ();
      row.converged = false;
      row.feasible = false;
    }
  row.wall_time = std::chrono::duration<double> (std::chrono::steady_clock::now () - t0).count ();
  return row;
}

void
sort_rows (std::vector<ResultRow>& rows)
{
  std::stable_sort (rows.begin (), rows.end (), [] (const ResultRow& a, const ResultRow& b) {
    return std::tie (a.scheme, a.n_ues, a.z, a.beamwidth_deg, a.see_level, a.seed)
           < std::tie (b.scheme, b.n_ues, b.z, b.beamwidth_deg, b.see_level, b.seed);
  });
}

std::vector<ResultRow>
run_experiment (const ExperimentConfig& cfg, const Progress& progress)
{
  const auto points = sweep_points (cfg);
  const std::size_t total = cfg.schemes.size () * points.size () * cfg.seeds.size ();
  std::vector<ResultRow> rows;
  rows.reserve (total);
  for (const auto& scheme : cfg.schemes)
    for (const auto& p : points)
      for (std::uint64_t seed : cfg.seeds)
        {
          rows.push_back (run_single (cfg.sim, scheme, seed, p));
          if (progress)
            {
              progress (rows.back (), rows.size (), total);
            }
        }
  sort_rows (rows);
  return rows;
}

namespace {

const char* const kColumns[] = {"scheme",        "seed",           "n_ues",         "z",
                                "beamwidth_deg", "see_level",      "t_q",           "p_q",
                                "s_ee",          "ul_throughput",  "dl_throughput", "ul_power",
                                "dl_power",      "avg_access_ul",  "avg_access_dl", "ue_power",
                                "iterations",    "cycles",         "converged",     "feasible",
                                "failed_constraints", "dl_subframes", "ul_subframes", "error"};

std::string
num (double v)
{
  char buf[64];
  std::snprintf (buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string
quote (const std::string& s)
{
  if (s.find_first_of (",\"\n") == std::string::npos)
    {
      return s;
    }
  std::string out = "\"";
  for (char c : s)
    {
      if (c == '"')
        out += '"';
      out += c == '\n' ? ' ' : c;
    }
  return out + "\"";
}

std::vector<std::string>
split_csv_line (const std::string& line)
{
  std::vector<std::string> out;
  std::string cur;
  bool in_quotes = false;
  for (std::size_t i = 0; i < line.size (); ++i)
    {
      const char c = line[i];
      if (in_quotes)
        {
          if (c == '"' && i + 1 < line.size () && line[i + 1] == '"')
            {
              cur += '"';
              ++i;
            }
          else if (c == '"')
            in_quotes = false;
          else
            cur += c;
        }
      else if (c == '"')
        in_quotes = true;
      else if (c == ',')
        {
          out.push_back (cur);
          cur.clear ();
        }
      else
        cur += c;
    }
  out.push_back (cur);
  return out;
}

} // namespace

std::string
csv_header (bool timing)
{
  std::string h;
  for (const char* c : kColumns)
    {
      if (!h.empty ())
        h += ',';
      h += c;
    }
  if (timing)
    h += ",wall_time";
  return h + "\n";
}

std::string
to_csv (const std::vector<ResultRow>& rows, bool timing)
{
  std::string out = csv_header (timing);
  for (const auto& r : rows)
    {
      const std::vector<std::string> f = {quote (r.scheme),
                                          std::to_string (r.seed),
                                          std::to_string (r.n_ues),
                                          std::to_string (r.z),
                                          num (r.beamwidth_deg),
                                          quote (r.see_level),
                                          num (r.t_q),
                                          num (r.p_q),
                                          num (r.s_ee),
                                          num (r.ul_throughput),
                                          num (r.dl_throughput),
                                          num (r.ul_power),
                                          num (r.dl_power),
                                          num (r.avg_access_ul),
                                          num (r.avg_access_dl),
                                          num (r.ue_power),
                                          std::to_string (r.iterations),
                                          std::to_string (r.cycles),
                                          r.converged ? "1" : "0",
                                          r.feasible ? "1" : "0",
                                          quote (r.failed_constraints),
                                          std::to_string (r.dl_subframes),
                                          std::to_string (r.ul_subframes),
                                          quote (r.error)};
      std::string line = f[0];
      for (std::size_t i = 1; i < f.size (); ++i)
        {
          line += ',' + f[i];
        }
      if (timing)
        line += "," + num (r.wall_time);
      out += line + "\n";
    }
  return out;
}

void
write_csv (const std::string& path, const std::vector<ResultRow>& rows, bool timing)
{
  std::ofstream out (path, std::ios::binary);
  if (!out)
    {
      throw std::runtime_error ("cannot write '" + path + "'");
    }
  out << to_csv (rows, timing);
  if (!out)
    {
      throw std::runtime_error ("write to '" + path + "' failed");
    }
}

std::vector<ResultRow>
read_csv (const std::string& path)
{
  std::ifstream in (path);
  if (!in)
    {
      throw std::runtime_error ("cannot open '" + path + "'");
    }
  std::string line;
  if (!std::getline (in, line))
    {
      throw std::runtime_error ("'" + path + "' is empty");
    }
  const std::vector<std::string> header = split_csv_line (line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size (); ++i)
    {
      col[header[i]] = i;
    }
  for (const char* c : kColumns)
    {
      if (!col.count (c))
        {
          throw std::runtime_error ("'" + path + "' lacks column '" + c + "'");
        }
    }
  std::vector<ResultRow> rows;
  int lineno = 1;
  while (std::getline (in, line))
    {
      ++lineno;
      if (line.empty ())
        continue;
      const auto f = split_csv_line (line);
      if (f.size () < header.size ())
        {
          throw std::runtime_error (path + ":" + std::to_string (lineno) + ": too few fields");
        }
      auto s = [&] (const char* k) { return f[col.at (k)]; };
      auto d = [&] (const char* k) { return std::stod (s (k)); };
      ResultRow r;
      try
        {
          r.scheme = s ("scheme");
          r.seed = std::stoull (s ("seed"));
          r.n_ues = std::stoi (s ("n_ues"));
          r.z = std::stoi (s ("z"));
          r.beamwidth_deg = d ("beamwidth_deg");
          r.see_level = s ("see_level");
          r.t_q = d ("t_q");
          r.p_q = d ("p_q");
          r.s_ee = d ("s_ee");
          r.ul_throughput = d ("ul_throughput");
          r.dl_throughput = d ("dl_throughput");
          r.ul_power = d ("ul_power");
          r.dl_power = d ("dl_power");
          r.avg_access_ul = d ("avg_access_ul");
          r.avg_access_dl = d ("avg_access_dl");
          r.ue_power = d ("ue_power");
          r.iterations = std::stol (s ("iterations"));
          r.cycles = std::stoi (s ("cycles"));
          r.converged = s ("converged") == "1";
          r.feasible = s ("feasible") == "1";
          r.failed_constraints = s ("failed_constraints");
          r.dl_subframes = std::stoi (s ("dl_subframes"));
          r.ul_subframes = std::stoi (s ("ul_subframes"));
          r.error = s ("error");
          if (col.count ("wall_time"))
            r.wall_time = d ("wall_time");
        }
      catch (const std::logic_error&)
        {
          throw std::runtime_error (path + ":" + std::to_string (lineno) + ": malformed value");
        }
      rows.push_back (std::move (r));
    }
  return rows;
}

std::string
summarize (const std::vector<ResultRow>& rows)
{
  using Key = std::tuple<std::string, int, int, double, std::string>;
  std::map<Key, std::vector<const ResultRow*>> groups;
  for (const auto& r : rows)
    {
      groups[Key{r.scheme, r.n_ues, r.z, r.beamwidth_deg, r.see_level}].push_back (&r);
    }
  using Field = double (*) (const ResultRow&);
  const std::vector<std::pair<const char*, Field>> fields = {
      {"t_q", [] (const ResultRow& r) { return r.t_q; }},
      {"p_q", [] (const ResultRow& r) { return r.p_q; }},
      {"s_ee", [] (const ResultRow& r) { return r.s_ee; }},
      {"ul_throughput", [] (const ResultRow& r) { return r.ul_throughput; }},
      {"dl_throughput", [] (const ResultRow& r) { return r.dl_throughput; }},
      {"ul_power", [] (const ResultRow& r) { return r.ul_power; }},
      {"dl_power", [] (const ResultRow& r) { return r.dl_power; }},
      {"avg_access_ul", [] (const ResultRow& r) { return r.avg_access_ul; }},
      {"avg_access_dl", [] (const ResultRow& r) { return r.avg_access_dl; }},
      {"ue_power", [] (const ResultRow& r) { return r.ue_power; }},
      {"iterations", [] (const ResultRow& r) { return static_cast<double> (r.iterations); }},
  };
  json out = json::array ();
  for (const auto& [key, list] : groups)
    {
      json g;
      g["scheme"] = std::get<0> (key);
      g["n_ues"] = std::get<1> (key);
      g["z"] = std::get<2> (key);
      g["beamwidth_deg"] = std::get<3> (key);
      g["see_level"] = std::get<4> (key);
      std::vector<const ResultRow*> ok;
      int converged = 0, feasible = 0;
      for (const ResultRow* r : list)
        {
          if (r->error.empty ())
            {
              ok.push_back (r);
              converged += r->converged;
              feasible += r->feasible;
            }
        }
      g["runs"] = list.size ();
      g["errors"] = list.size () - ok.size ();
      g["converged"] = converged;
      g["feasible"] = feasible;
      for (const auto& [name, get] : fields)
        {
          double mean = 0.0;
          for (const ResultRow* r : ok)
            mean += get (*r);
          mean = ok.empty () ? 0.0 : mean / ok.size ();
          double var = 0.0;
          for (const ResultRow* r : ok)
            var += (get (*r) - mean) * (get (*r) - mean);
          const double sd = ok.size () > 1 ? std::sqrt (var / (ok.size () - 1)) : 0.0;
          g[name] = json{{"mean", mean}, {"std", sd}};
        }
      out.push_back (g);
    }
  return out.dump (2) + "\n";
}

} // namespace iab
