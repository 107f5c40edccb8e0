#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mwrecon/cli/settings.hpp"
#include "mwrecon/metrics.hpp"

namespace mwrecon::cli {

struct AblationCell {
  Method method;
  int acceleration;
  int acs;
  std::optional<double> exponent;
  std::optional<int> filter_count;
  std::optional<int> depth;
  int seed_index;
  std::uint64_t phantom_seed;
  std::uint64_t seed;
};

struct CellOutcome {
  AblationCell cell;
  std::optional<MetricReport> metrics;
  int train_iters = 0;
  double wall_ms = 0.0;
  std::vector<double> mean_loss;
  std::string error;  // empty on success
};

/// Phantom seed for a seed index; shared by every cell with that index.
std::uint64_t phantom_seed(std::uint64_t master, int seed_index);
/// Recon seed; independent of method and filter axes so variants are paired.
std::uint64_t cell_seed(std::uint64_t master, int seed_index, int acceleration, int acs);

/// Cartesian product of the axes, ordered method, R, ACS, P, L, depth, seed.
std::vector<AblationCell> expand_cells(const RunConfig& cfg, std::uint64_t master);

/// The ReconConfig a cell runs with.
ReconConfig cell_config(const RunConfig& cfg, const AblationCell& cell, int threads);

std::vector<CellOutcome> run_ablation(const RunConfig& cfg, std::uint64_t master, int jobs);

void write_results_csv(std::ostream& os, const std::vector<CellOutcome>& rows, bool record_timings);
void write_curves_csv(std::ostream& os, const std::vector<CellOutcome>& rows);

}  // namespace mwrecon::cli
