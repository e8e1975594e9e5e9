/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_CONFIG_H
#define IAB_CONFIG_H

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace iab {

struct Position
{
  double x = 0.0;
  double y = 0.0;
};

struct ScenarioConfig
{
  double area = 300.0;
  double mbs_height = 25.0;
  double sbs_height = 10.0;
  double ue_height = 1.5;
  // "fig3": three relay/leaf pairs on two rings around a central MBS.
  // "random": SBSs uniform over the area. "explicit": positions below.
  std::string layout = "fig3";
  int n_sbs = 6;
  int n_ues = 18;
  double inner_radius = 70.0;
  double outer_radius = 130.0;
  double min_separation = 2.0;
  int max_sbs_per_path = 3;
  int rf_chains = 4;
  Position mbs_position{150.0, 150.0};
  std::vector<Position> sbs_positions;
  std::vector<Position> ue_positions;
};

struct BandConfig
{
  double carrier_hz;
  double block_bandwidth_hz;
  double absorption_per_m;
};

struct RadioConfig
{
  double side_lobe = 0.001;
  double beam_mbs_deg = 30.0;
  double beam_sbs_deg = 30.0;
  double beam_ue_deg = 5.0;
  BandConfig mmwave{30e9, 1e9, 0.0};
  BandConfig thz{0.3e12, 5e9, 0.0016};
  double noise_dbm_hz = -174.0;
  double p_max_bs_dbm = 44.0;
  double p_max_ue_dbm = 23.0;
  int levels_bs = 10;
  int levels_ue = 20;
  int blocks_case2 = 6;
  int blocks_case3 = 9;
  int blocks_total = 12;
  bool use_thz = true;
  // "equation" or "prose"; see linkperf.h.
  std::string interference_rule = "equation";
};

struct FrameConfig
{
  int z = 10;
  std::vector<int> rfc_candidates{0, 1, 2, 3, 4, 5, 6};
};

struct AssociationConfig
{
  double delta_t = 0.1;
  double delta_s = 0.1;
  double delta_p = 0.1;
  int k_us = 4;
  int k_p0 = 4;
  int frames = 1;
  double dl_demand = 0.7;
  std::map<int, double> dl_demand_by_sbs;
};

struct ConstraintConfig
{
  double t_min_ul = 50e6;
  double t_min_dl = 50e6;
  double t_max_thd = 4e9;
  std::string see_level = "LSEE";
  // Negative means: take the value of see_level.
  double see_cons = -1.0;

  double see_threshold () const;
};

struct GameConfig
{
  // Negative means: penalty_factor times the interference-free throughput bound.
  double penalty = -1.0;
  double penalty_factor = 10.0;
  double follower_tol = 1e-6;
  double leader_eps = 1e-6;
  double improve_tol = 1e-12;
  int max_sweeps = 200;
  int max_cycles = 50;
  long exhaustive_limit = 4096;
  // "cycle": compare the post-SP3 leader value with the previous cycle's.
  // "literal": test after SP3 against post-SP2 and after SP1 against post-SP3.
  std::string leader_check = "cycle";
};

struct MetaConfig
{
  int ga_population = 40;
  int ga_generations = 100;
  int ga_tournament = 3;
  double ga_crossover = 0.9;
  double ga_mutation = -1.0;
  int pso_particles = 40;
  int pso_iterations = 100;
  double pso_inertia = 0.72;
  double pso_cognitive = 1.49;
  double pso_social = 1.49;
  int cycles = 3;
  // Start each population from the current profile instead of random draws only.
  bool seed_incumbent = false;
};

struct SimConfig
{
  ScenarioConfig scenario;
  RadioConfig radio;
  FrameConfig frame;
  AssociationConfig association;
  ConstraintConfig constraints;
  GameConfig game;
  MetaConfig meta;
};

double see_level_value (const std::string& level);

} // namespace iab

#endif
