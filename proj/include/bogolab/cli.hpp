#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "bogolab/perfectgas.hpp"
#include "bogolab/pressure.hpp"

namespace bogolab::cli {

using json = nlohmann::json;

inline constexpr int kConfigSchemaVersion = 1;

enum ExitCode { kOk = 0, kConfigFailure = 2, kAssertionFailure = 3, kNumericalFailure = 4 };

inline constexpr double kBetaMin = 0.25;
inline constexpr double kBetaMax = 2.0;
inline constexpr int kNmaxCap = 12;
inline constexpr int kBandCap = 2;
inline constexpr std::size_t kModeCap = 4000;

struct PotentialConfig {
  double cell_size = 1.0;
  double amplitude = 1.0;
  double vacancy = 0.5;
};

struct IdsConfig {
  int dimension = 1;
  std::vector<double> side_lengths;
  /// 0 picks a cutoff from the energy grid and the potential amplitude.
  int cutoff = 0;
  PotentialConfig potential;
  std::vector<std::uint64_t> seeds;
  double e_min = 0.0;
  double e_max = 2.0;
  int e_count = 21;
};

struct SpectrumConfig {
  int dimension = 1;
  double side_length = 16.0;
  int cutoff = 0;
  PotentialConfig potential;
  std::vector<std::uint64_t> seeds;
  int levels = 10;
};

struct SandwichConfig {
  std::vector<pressure::CellSpec> cells;
  pressure::CellOptions options;
};

struct QuasiAverageCell {
  std::array<double, 3> alpha{1.0 / 3, 1.0 / 3, 1.0 / 3};
  /// rho_bar in units of rho_c.
  double density_ratio = 2.0;
  std::vector<double> volumes;
  std::vector<double> etas;
  oneparticle::Label source{1, 0, 0};
  perfectgas::SourceScaling scaling = perfectgas::SourceScaling::fixed_label;
  double source_energy = 0.5;
  perfectgas::LimitOrder order = perfectgas::LimitOrder::volume_first;
  /// Expected classification; empty for none.
  std::string expect;
};

struct QuasiAverageRunConfig {
  double beta = 1.0;
  perfectgas::WindowRule window;
  double threshold = 0.01;
  std::vector<QuasiAverageCell> cells;
};

struct SymbolCheckConfig {
  pressure::CellSpec cell;
  /// Explicit band labels; empty means the energy band of cell.delta.
  std::vector<oneparticle::Label> band_labels;
  int points = 20;
  double radius = 2.0;
  int band_cap = 40;
  std::uint64_t point_seed = 7;
  double tolerance = 1e-8;
  double kappa_sign = 1.0;
};

IdsConfig parse_ids(const json& j);
SpectrumConfig parse_spectrum(const json& j);
SandwichConfig parse_sandwich(const json& j);
QuasiAverageRunConfig parse_quasiaverage(const json& j);
SymbolCheckConfig parse_symbol_check(const json& j);

json to_json(const IdsConfig& c);
json to_json(const SpectrumConfig& c);
json to_json(const SandwichConfig& c);
json to_json(const QuasiAverageRunConfig& c);
json to_json(const SymbolCheckConfig& c);

struct RunOptions {
  std::filesystem::path out = ".";
  std::optional<std::uint64_t> seed;
  bool dump_terms = false;
  /// Fill the wall_time CSV column (breaks byte-identical output).
  bool timing = false;
};

int run_ids(const IdsConfig& c, const RunOptions& o);
int run_spectrum(const SpectrumConfig& c, const RunOptions& o);
int run_sandwich(const SandwichConfig& c, const RunOptions& o);
int run_quasiaverage(const QuasiAverageRunConfig& c, const RunOptions& o);
int run_symbol_check(const SymbolCheckConfig& c, const RunOptions& o);

/// Runs one subcommand on a config object; exceptions propagate.
int dispatch(const std::string& subcommand, const json& config, const RunOptions& o);

/// Command-line entry point; maps exceptions to exit codes.
int main_entry(int argc, char** argv);

}  // namespace bogolab::cli
