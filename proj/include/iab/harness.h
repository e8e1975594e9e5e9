/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#ifndef IAB_HARNESS_H
#define IAB_HARNESS_H

#include "iab/config.h"

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace iab {

class ValidationError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Values swept by an experiment; an empty axis keeps the base value.
struct SweepAxes
{
  std::vector<int> n_ues;
  std::vector<int> z;
  std::vector<double> beamwidth_deg;  // shared by SBSs and UEs
  std::vector<std::string> see_level;
};

struct ExperimentConfig
{
  SimConfig sim;
  std::vector<std::string> schemes{"H"};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  SweepAxes sweep;
  std::string out_dir = "results";
  std::vector<std::string> warnings;
};

/// Parses and validates a JSON config. An empty document yields the defaults.
ExperimentConfig parse_config (const std::string& text, const std::string& origin = "<config>");
ExperimentConfig load_config (const std::string& path);
/// Range checks; throws ValidationError naming the offending key.
void validate_config (ExperimentConfig& cfg);

struct SweepPoint
{
  int n_ues;
  int z;
  std::optional<double> beamwidth_deg;
  std::string see_level;
};

std::vector<SweepPoint> sweep_points (const ExperimentConfig& cfg);
SimConfig apply_point (const SimConfig& base, const SweepPoint& p);

struct ResultRow
{
  std::string scheme;
  std::uint64_t seed = 0;
  int n_ues = 0;
  int z = 0;
  double beamwidth_deg = 0.0;
  std::string see_level;
  double t_q = 0.0;
  double p_q = 0.0;
  double s_ee = 0.0;
  double ul_throughput = 0.0;
  double dl_throughput = 0.0;
  double ul_power = 0.0;
  double dl_power = 0.0;
  double avg_access_ul = 0.0;
  double avg_access_dl = 0.0;
  double ue_power = 0.0;
  long iterations = 0;
  int cycles = 0;
  bool converged = false;
  bool feasible = false;
  std::string failed_constraints;
  int dl_subframes = 0;
  int ul_subframes = 0;
  std::string error;
  double wall_time = 0.0;  // seconds, only written with timing enabled
};

ResultRow run_single (const SimConfig& base, const std::string& scheme, std::uint64_t seed, const SweepPoint& point);

using Progress = std::function<void (const ResultRow&, std::size_t done, std::size_t total)>;

/// Every (scheme, point, seed) combination, rows in canonical order.
std::vector<ResultRow> run_experiment (const ExperimentConfig& cfg, const Progress& progress = {});

void sort_rows (std::vector<ResultRow>& rows);

std::string csv_header (bool timing);
std::string to_csv (const std::vector<ResultRow>& rows, bool timing = false);
void write_csv (const std::string& path, const std::vector<ResultRow>& rows, bool timing = false);
std::vector<ResultRow> read_csv (const std::string& path);

/// Per-point means and sample standard deviations as a JSON document.
std::string summarize (const std::vector<ResultRow>& rows);

} // namespace iab

#endif
