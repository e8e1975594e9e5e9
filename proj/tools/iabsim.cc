/*
 * SPDX-License-Identifier: GPL-2.0-only
 */

#include "iab/harness.h"

#include "CLI11.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace {

constexpr int kExitValidation = 1;
constexpr int kExitRuntime = 2;

struct RunArgs
{
  std::string config;
  std::string scheme;
  long long seed = -1;
  std::string see_level;
  int ues = -1;
  int slots = -1;
  double beamwidth = -1.0;
  std::string out;
  bool timing = false;
  bool quiet = false;
};

iab::ExperimentConfig
load (const RunArgs& a)
{
  iab::ExperimentConfig cfg = a.config.empty () ? iab::parse_config ("") : iab::load_config (a.config);
  if (!a.scheme.empty ())
    cfg.schemes = {a.scheme};
  if (a.seed >= 0)
    cfg.seeds = {static_cast<std::uint64_t> (a.seed)};
  if (!a.see_level.empty ())
    cfg.sweep.see_level = {a.see_level};
  if (a.ues >= 0)
    cfg.sweep.n_ues = {a.ues};
  if (a.slots >= 0)
    cfg.sweep.z = {a.slots};
  if (a.beamwidth >= 0.0)
    cfg.sweep.beamwidth_deg = {a.beamwidth};
  if (!a.out.empty ())
    cfg.out_dir = a.out;
  iab::validate_config (cfg);
  return cfg;
}

int
execute (const RunArgs& a)
{
  const iab::ExperimentConfig cfg = load (a);
  for (const auto& w : cfg.warnings)
    {
      std::fprintf (stderr, "warning: %s\n", w.c_str ());
    }
  auto progress = [&a] (const iab::ResultRow& r, std::size_t done, std::size_t total) {
    if (a.quiet)
      return;
    std::fprintf (stderr, "[%zu/%zu] %s seed=%llu n_ues=%d z=%d see=%s T_q=%.4g%s%s\n", done, total,
                  r.scheme.c_str (), static_cast<unsigned long long> (r.seed), r.n_ues, r.z, r.see_level.c_str (),
                  r.t_q, r.error.empty () ? "" : " error: ", r.error.c_str ());
  };
  const auto rows = iab::run_experiment (cfg, progress);
  std::filesystem::create_directories (cfg.out_dir);
  const std::string csv = (std::filesystem::path (cfg.out_dir) / "results.csv").string ();
  const std::string summary = (std::filesystem::path (cfg.out_dir) / "summary.json").string ();
  iab::write_csv (csv, rows, a.timing);
  std::ofstream (summary) << iab::summarize (rows);
  std::printf ("%s\n%s\n", csv.c_str (), summary.c_str ());
  for (const auto& r : rows)
    {
      if (!r.error.empty ())
        return kExitRuntime;
    }
  return 0;
}

} // namespace

int
main (int argc, char** argv)
{
  CLI::App app{"IAB network resource allocation simulator"};
  app.require_subcommand (1);

  RunArgs run_args;
  auto* run = app.add_subcommand ("run", "Run the experiment of a config, optionally narrowed by flags");
  run->add_option ("--config", run_args.config, "JSON config file")->required ();
  run->add_option ("--scheme", run_args.scheme, "Scheme id, e.g. H, C, G, P, R, H+F-RFC");
  run->add_option ("--seed", run_args.seed, "Single seed");
  run->add_option ("--see-level", run_args.see_level, "LSEE, MSEE or HSEE");
  run->add_option ("--ues", run_args.ues, "Number of UEs");
  run->add_option ("--slots", run_args.slots, "Slots per subframe (Z)");
  run->add_option ("--beamwidth", run_args.beamwidth, "Shared SBS/UE beamwidth in degrees");
  run->add_option ("--out", run_args.out, "Output directory");
  run->add_flag ("--with-timing", run_args.timing, "Add a wall_time column to the CSV");
  run->add_flag ("--quiet", run_args.quiet, "No progress output");

  RunArgs sweep_args;
  auto* sweep = app.add_subcommand ("sweep", "Run every sweep point, scheme and seed of a config");
  sweep->add_option ("--config", sweep_args.config, "JSON config file")->required ();
  sweep->add_option ("--out", sweep_args.out, "Output directory");
  sweep->add_flag ("--with-timing", sweep_args.timing, "Add a wall_time column to the CSV");
  sweep->add_flag ("--quiet", sweep_args.quiet, "No progress output");

  std::string validate_path;
  auto* validate = app.add_subcommand ("validate", "Check a config and print the resolved sweep");
  validate->add_option ("--config", validate_path, "JSON config file")->required ();

  std::string csv_path, summary_out;
  auto* summarize = app.add_subcommand ("summarize", "Per-point means and standard deviations of a results CSV");
  summarize->add_option ("--csv", csv_path, "results.csv")->required ();
  summarize->add_option ("--out", summary_out, "Output JSON file (default: stdout)");

  try
    {
      app.parse (argc, argv);
    }
  catch (const CLI::ParseError& e)
    {
      const int rc = app.exit (e);
      return rc == 0 ? 0 : kExitValidation;
    }

  try
    {
      if (*run)
        return execute (run_args);
      if (*sweep)
        return execute (sweep_args);
      if (*validate)
        {
          const iab::ExperimentConfig cfg = iab::load_config (validate_path);
          for (const auto& w : cfg.warnings)
            std::fprintf (stderr, "warning: %s\n", w.c_str ());
          const auto points = iab::sweep_points (cfg);
          std::printf ("ok: %zu scheme(s) x %zu point(s) x %zu seed(s)\n", cfg.schemes.size (), points.size (),
                       cfg.seeds.size ());
          return 0;
        }
      if (*summarize)
        {
          const std::string text = iab::summarize (iab::read_csv (csv_path));
          if (summary_out.empty ())
            std::cout << text;
          else
            std::ofstream (summary_out) << text;
          return 0;
        }
    }
  catch (const iab::ValidationError& e)
    {
      std::fprintf (stderr, "validation error: %s\n", e.what ());
      return kExitValidation;
    }
  catch (const std::exception& e)
    {
      std::fprintf (stderr, "error: %s\n", e.what ());
      return kExitRuntime;
    }
  return 0;
}
