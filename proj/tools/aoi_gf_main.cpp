#include <cstdint>
#include <exception>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "aoigf/experiment.hpp"

int main(int argc, char** argv) {
  CLI::App app{
      "Age-of-information sweeps for grant-free random access (single-channel "
      "slotted ALOHA and multi-level power-domain NOMA with SIC)"};

  std::string preset;
  std::string config_path;
  std::string out_prefix;
  std::string evaluator;
  std::string validate_suite;
  std::uint64_t seed = 0;
  std::uint64_t frames = 0;
  bool svg = false;

  app.add_option("--preset", preset,
                 "sweep-users | sweep-slots | special-case | sweep-ptx | "
                 "ratio-vs-users | generation-models | validate-oracle | custom");
  app.add_option("--config", config_path, "JSON experiment spec file");
  app.add_option("--out", out_prefix, "output file prefix");
  app.add_option("--seed", seed, "base RNG seed");
  app.add_option("--frames", frames, "frames per simulated run");
  app.add_option("--evaluator", evaluator, "analytical | simulated | both");
  app.add_flag("--svg", svg, "also write SVG line charts");
  app.add_option("--validate", validate_suite,
                 "constants | oracle | row-sums | sim-vs-analytical");

  CLI11_PARSE(app, argc, argv);

  try {
    if (!validate_suite.empty()) {
      return aoigf::run_validation(validate_suite, std::cout,
                                   frames ? frames : 1000000, seed ? seed : 1);
    }
    if (preset.empty() && config_path.empty()) {
      std::cerr << "nothing to do: pass --preset, --config or --validate\n"
                << app.help();
      return 1;
    }
    aoigf::ExperimentSpec spec = config_path.empty()
                                     ? aoigf::make_preset(preset)
                                     : aoigf::load_spec_file(config_path, preset);
    if (!out_prefix.empty()) spec.out_prefix = out_prefix;
    if (!evaluator.empty()) spec.evaluator = evaluator;
    if (seed) spec.seed = seed;
    if (frames) spec.frames = frames;
    if (svg) spec.svg = true;
    aoigf::ExperimentResult result = aoigf::run_experiment(spec);
    for (const std::string& file : result.files) std::cout << file << "\n";
    std::cout << result.rows_total << " rows (" << result.rows_divergent
              << " divergent)\n";
    return 0;
  } catch (const std::exception& err) {
    std::cerr << "error: " << err.what() << "\n";
    return 1;
  }
}
