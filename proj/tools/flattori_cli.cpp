// flattori command line: census of compact periodic A-orbits, the counting /
// equidistribution / angular experiments, volume tables, and plot data.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "flattori/config.hpp"
#include "flattori/experiments.hpp"
#include "flattori/io.hpp"
#include "flattori/lattice_enum.hpp"

namespace {

using namespace flattori;

struct CommonArgs {
  int d = 2;
  double T = 8.0;
  std::vector<double> t_grid;
  std::uint64_t seed = 1;
  std::string config_path;
  std::string out_path;
  int shards = 1;
  int shard_index = 0;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--d", args.d, "matrix dimension (2 or 3)")->check(CLI::Range(2, 3));
  cmd->add_option("--T", args.T, "radius of the norm ball");
  cmd->add_option("--t-grid", args.t_grid, "grid of radii (overrides --T where applicable)");
  cmd->add_option("--seed", args.seed, "random seed");
  cmd->add_option("--config", args.config_path, "key=value config file");
  cmd->add_option("--out", args.out_path, "output file (default: stdout)");
  cmd->add_option("--shards", args.shards, "number of shards for enumeration")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--shard-index", args.shard_index, "which shard to run (0-based)");
}

/// Values on the command line win; the config file fills in the rest.
void apply_config(CLI::App* cmd, CommonArgs& args) {
  if (args.config_path.empty()) return;
  Config cfg = Config::from_file(args.config_path);
  if (cmd->count("--d") == 0) args.d = static_cast<int>(cfg.get_int("d", args.d));
  if (cmd->count("--T") == 0) args.T = cfg.get_double("T", args.T);
  if (cmd->count("--t-grid") == 0) args.t_grid = cfg.get_grid("t_grid", args.t_grid);
  if (cmd->count("--seed") == 0)
    args.seed = static_cast<std::uint64_t>(cfg.get_int("seed", static_cast<long>(args.seed)));
  if (cmd->count("--shards") == 0) args.shards = static_cast<int>(cfg.get_int("shards", args.shards));
  if (cmd->count("--out") == 0) args.out_path = cfg.get("out", args.out_path);
}

/// Runs fn on the chosen output stream (file when --out is set).
template <typename Fn>
int with_output(const CommonArgs& args, Fn&& fn) {
  if (args.out_path.empty()) {
    fn(std::cout);
    return 0;
  }
  std::ofstream out(args.out_path);
  if (!out) {
    std::cerr << "error: cannot open " << args.out_path << "\n";
    return 1;
  }
  fn(out);
  return 0;
}

std::vector<double> grid_or_default(const CommonArgs& args, std::vector<double> fallback) {
  return args.t_grid.empty() ? fallback : args.t_grid;
}

int run_census(CLI::App* cmd, CommonArgs& args) {
  apply_config(cmd, args);
  auto census = class_census(args.d, args.T);
  return with_output(args, [&](std::ostream& out) { write_census_jsonl(out, census); });
}

int run_count_check(CLI::App* cmd, CommonArgs& args) {
  apply_config(cmd, args);
  const std::vector<double> grid = grid_or_default(
      args, args.d == 2 ? std::vector<double>{8.0, 9.0, 10.0, 11.0}
                        : std::vector<double>{2.0, 2.5, 3.0});
  for (double T : grid)
    if (args.d == 3 && T > 4.5) {
      std::cerr << "error: d=3 count-check supports T <= 4.5\n";
      return 1;
    }
  CountCheckReport rep = count_check(args.d, grid);
  return with_output(args, [&](std::ostream& out) {
    out << count_check_to_json(rep).dump(2) << '\n';
    if (!rep.census_complete)
      std::cerr << "note: d=3 census is a lower bound; ratios are trend-only\n";
  });
}

int run_equidist(CLI::App* cmd, CommonArgs& args) {
  apply_config(cmd, args);
  if (args.d != 2) {
    std::cerr << "error: equidist-check is implemented for d=2\n";
    return 1;
  }
  Rng rng(args.seed);
  EquidistReport rep = equidist_check(args.T, 40, 200000, rng);
  return with_output(args, [&](std::ostream& out) { out << equidist_to_json(rep).dump(2) << '\n'; });
}

int run_angular(CLI::App* cmd, CommonArgs& args) {
  apply_config(cmd, args);
  if (args.d != 2) {
    std::cerr << "error: angular is implemented for d=2\n";
    return 1;
  }
  const std::vector<double> grid = grid_or_default(args, {6.0, 8.0, 10.0});
  json arr = json::array();
  for (double t : grid) {
    EnumOptions opt;
    opt.shard_count = args.shards;
    opt.shard_index = args.shard_index;
    arr.push_back(angular_to_json(angular_check(t, opt)));
  }
  return with_output(args, [&](std::ostream& out) { out << arr.dump(2) << '\n'; });
}

int run_volume(CLI::App* cmd, CommonArgs& args) {
  apply_config(cmd, args);
  const std::vector<double> grid = grid_or_default(args, {5.0, 10.0, 20.0, 30.0, 40.0});
  VolumeTable tab = make_volume_table(args.d, grid);
  return with_output(args, [&](std::ostream& out) { write_volume_csv(out, tab); });
}

/// Plot data: log ball counts and log flat-ball volumes on a grid, as CSV
/// ready for a growth-rate plot.
int run_plot_data(CLI::App* cmd, CommonArgs& args) {
  apply_config(cmd, args);
  const std::vector<double> grid = grid_or_default(
      args, args.d == 2 ? std::vector<double>{6.0, 7.0, 8.0, 9.0, 10.0}
                        : std::vector<double>{1.5, 2.0, 2.5, 3.0});
  return with_output(args, [&](std::ostream& out) {
    out << "d,t,count,regular,log_count,log_volume\n";
    out.precision(12);
    for (double t : grid) {
      EnumOptions opt;
      opt.shard_count = args.shards;
      opt.shard_index = args.shard_index;
      BallCounts counts = count_ball(args.d, t, 1.0, opt);
      out << args.d << ',' << t << ',' << counts.total << ',' << counts.regular << ','
          << std::log(static_cast<double>(counts.total)) << ','
          << std::log(flat_ball_volume(args.d, t)) << '\n';
    }
  });
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"flattori: flat tori, lattice balls, and periodic A-orbits in SL(d)"};
  app.require_subcommand(1);

  CommonArgs census_args, count_args, equi_args, ang_args, vol_args, plot_args;
  CLI::App* census = app.add_subcommand("census", "enumerate compact periodic A-orbit classes");
  add_common(census, census_args);
  CLI::App* countc = app.add_subcommand("count-check", "orbit mass vs flat-ball volume");
  add_common(countc, count_args);
  CLI::App* equi = app.add_subcommand("equidist-check", "torus package vs Haar observables");
  add_common(equi, equi_args);
  CLI::App* ang = app.add_subcommand("angular", "angular harmonics over lattice balls");
  add_common(ang, ang_args);
  CLI::App* vol = app.add_subcommand("volume", "Harish-Chandra flat-ball volume table");
  add_common(vol, vol_args);
  CLI::App* plot = app.add_subcommand("plot-data", "ball counts and volumes for plotting");
  add_common(plot, plot_args);

  CLI11_PARSE(app, argc, argv);

  try {
    if (census->parsed()) return run_census(census, census_args);
    if (countc->parsed()) return run_count_check(countc, count_args);
    if (equi->parsed()) return run_equidist(equi, equi_args);
    if (ang->parsed()) return run_angular(ang, ang_args);
    if (vol->parsed()) return run_volume(vol, vol_args);
    if (plot->parsed()) return run_plot_data(plot, plot_args);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
