// gbt: Gaussian beam tracing solver command line.

#include "gbt/citygen.hpp"
#include "gbt/commands.hpp"
#include "gbt/error.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidationFail = 1;
constexpr int kExitInputError = 2;

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gaussian beam tracing acoustic field solver"};
  app.require_subcommand(1);

  std::string config_path;
  std::string scene_path;
  std::string out_path;

  auto* validate = app.add_subcommand("validate", "compare against the image-source solution");
  std::vector<double> freqs;
  double c_scale = 1.0;
  std::string csv_path;
  validate->add_option("--config", config_path, "case config")->required()->check(CLI::ExistingFile);
  validate->add_option("--freq", freqs, "frequencies in Hz (default: config freqs_hz)");
  validate->add_option("--c-scale", c_scale, "solver sound-speed multiplier (negative control)");
  validate->add_option("--csv", csv_path, "per-point error CSV");

  auto* run = app.add_subcommand("run", "run the full pipeline");
  std::string mode;
  std::size_t workers = 0;
  std::size_t budget = 0;
  bool paths = false;
  run->add_option("--config", config_path, "case config")->required()->check(CLI::ExistingFile);
  run->add_option("--scene", scene_path, "scene file (omit for free field)");
  run->add_option("--out", out_path, "output directory")->required();
  run->add_option("--mode", mode, "seq|flat|dyn");
  run->add_option("--workers", workers, "worker count");
  run->add_option("--chunk-budget", budget, "memory budget in bytes per chunk");
  run->add_flag("--paths", paths, "write per-segment path diagnostics");

  auto* bench = app.add_subcommand("bench", "timing sweep over rays x modes x workers");
  std::vector<std::size_t> ray_list{256, 1024, 4096};
  std::vector<std::string> mode_list{"seq", "flat", "dyn"};
  std::vector<std::size_t> worker_list{1, 2, 4};
  bench->add_option("--config", config_path, "case config")->required()->check(CLI::ExistingFile);
  bench->add_option("--scene", scene_path, "scene file (omit for free field)");
  bench->add_option("--rays", ray_list, "ray counts")->delimiter(',');
  bench->add_option("--modes", mode_list, "modes")->delimiter(',');
  bench->add_option("--workers", worker_list, "worker counts")->delimiter(',');
  bench->add_option("--out", out_path, "timing CSV (default: stdout)");

  auto* gen = app.add_subcommand("gen-city", "write a synthetic city-like scene file");
  gbt::CityParams city;
  gen->add_option("--out", out_path, "scene file")->required();
  gen->add_option("--half-size", city.half_size, "ground half size in metres");
  gen->add_option("--blocks", city.blocks, "lots per side");
  gen->add_option("--trees", city.trees, "tree count");
  gen->add_option("--seed", city.seed, "layout seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) {
      const auto cfg = gbt::load_config(config_path);
      if (freqs.empty()) freqs = cfg.freqs_hz;
      bool all_pass = true;
      std::ofstream csv;
      if (!csv_path.empty()) csv.open(csv_path);
      for (double f : freqs) {
        const auto rep = gbt::validate_case(cfg, f, c_scale);
        gbt::write_validation_summary(rep, std::cout);
        if (csv.is_open()) gbt::write_validation_csv(rep, csv);
        all_pass = all_pass && rep.pass;
      }
      return all_pass ? kExitOk : kExitValidationFail;
    }
    if (*run) {
      const auto cfg = gbt::load_config(config_path);
      gbt::RunOptions opts;
      if (!mode.empty()) opts.mode = gbt::parse_mode(mode);
      if (workers) opts.workers = workers;
      if (budget) opts.chunk_budget = budget;
      opts.paths_csv = paths;
      const auto summary = gbt::run_case(cfg, scene_path, out_path, opts);
      gbt::write_timing_header(std::cout);
      gbt::write_timing_row(summary.timing, std::cout);
      return kExitOk;
    }
    if (*bench) {
      const auto cfg = gbt::load_config(config_path);
      const auto scene = gbt::load_case_scene(cfg, scene_path);
      std::vector<gbt::Mode> modes;
      for (const auto& m : mode_list) modes.push_back(gbt::parse_mode(m));
      std::ofstream file;
      if (!out_path.empty()) file.open(out_path);
      gbt::bench_case(cfg, scene, ray_list, modes, worker_list,
                      out_path.empty() ? std::cout : static_cast<std::ostream&>(file));
      return kExitOk;
    }
    if (*gen) {
      std::ofstream out(out_path);
      if (!out) throw gbt::InputError("cannot write " + out_path);
      const auto blocks = gbt::city_blocks(city);
      gbt::write_scene(out, blocks);
      return kExitOk;
    }
  } catch (const gbt::InputError& e) {
    std::cerr << "input error: " << e.what() << "\n";
    return kExitInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInputError;
  }
  return kExitOk;
}
