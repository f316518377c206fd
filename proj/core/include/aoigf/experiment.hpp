#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "aoigf/config.hpp"

namespace aoigf {

// How the attempt probability is chosen for each sweep point.
enum class PolicyMode { Fixed, Adaptive, Optimal, Swept };

struct SweepSpec {
  std::string variable;  // num_users | slots_per_frame | ptx
  std::vector<double> values;
};

struct SchemeSpec {
  Scheme scheme = Scheme::Oma;
  int num_levels = 1;  // forced to 1 for OMA
};

struct ExperimentSpec {
  std::string preset = "custom";
  SystemConfig base;
  PolicyMode policy_mode = PolicyMode::Adaptive;
  double fixed_ptx = 0.05;
  SweepSpec sweep;
  std::vector<SchemeSpec> schemes;
  std::vector<GenerationModel> generation_models = {GenerationModel::Gar};
  std::string evaluator = "analytical";  // analytical | simulated | both
  std::uint64_t frames = 200000;
  std::uint64_t seed = 1;
  std::string out_prefix = "experiment";
  bool svg = false;
  bool emit_ratio = false;

  void check() const;  // throws std::invalid_argument
};

// Named parameter bundles for the stock sweeps; see README for the list.
ExperimentSpec make_preset(const std::string& name);

// Overlays a JSON document onto an existing spec.  The "preset" key is
// ignored here; resolve it before calling (load_spec_file does).
void apply_json_text(ExperimentSpec& spec, const std::string& json_text);

// Reads a JSON spec file.  preset_override, when non-empty, wins over the
// file's own "preset" key; either way the preset supplies the defaults the
// file then overlays.
ExperimentSpec load_spec_file(const std::string& path,
                              const std::string& preset_override = "");

struct SweepRow {
  double sweep_value = 0.0;
  std::string scheme_label;
  std::string evaluator;
  double aoi = 0.0;         // +inf where the age diverges
  double aoi_stderr = 0.0;  // NaN for analytical rows (empty CSV cell)
  double p_fail = 1.0;
  double ptx_used = 0.0;    // adaptive policies: the j = 0 value
  std::uint64_t seed = 0;   // 0 for analytical rows
  std::uint64_t frames = 0;
};

struct ExperimentResult {
  std::vector<std::string> files;
  std::size_t rows_total = 0;
  std::size_t rows_divergent = 0;
};

// Runs every (scheme, generation model, evaluator) combination of the spec
// and writes one CSV per combination, plus optional ratio CSVs and SVG
// charts.  Throws if the age diverged at every sweep point.
ExperimentResult run_experiment(const ExperimentSpec& spec);

// Runs one validation suite (constants | oracle | row-sums |
// sim-vs-analytical), printing one line per check.  Returns 0 when every
// check passed, 1 otherwise.
int run_validation(const std::string& suite, std::ostream& out,
                   std::uint64_t frames = 1000000, std::uint64_t seed = 1);

// Prepends AOI_GF_OUT_DIR when the prefix has no directory component.
std::string resolve_out_prefix(const std::string& prefix);

}  // namespace aoigf
