#pragma once

#include <string>
#include <vector>

#include "bnpnc/baselines.hpp"
#include "bnpnc/gibbs.hpp"
#include "bnpnc/identification.hpp"
#include "bnpnc/simulation.hpp"

namespace bnpnc {
namespace serialize {

// Flattened parameter draws, one row per retained draw. Columns:
//   theta_y.k.j  (component k = 1..K, coefficient j = 0..d-1, 0 = intercept)
//   sigma_y.k
//   eta.k.v      (v = 0..V, 0 = shared intercept)
//   theta_w.j, sigma_w   (negative-control fits only)
void write_draws_csv(const std::string& path, const std::vector<gibbs::Draw>& draws);

// x, median, then lo_XX, hi_XX per credible level (ascending).
void write_cerf_csv(const std::string& path, const identification::CerfEstimate& estimate);

// Reads the band columns back (draws stay empty); used by the plot command.
identification::CerfEstimate read_cerf_csv(const std::string& path);

// grid point x {truth, pooled median, pooled band edges, replicate coverage}.
void write_benchmark_csv(const std::string& path, const simulation::ReplicationReport& report);

// assumption, null, estimate, CI bounds, conclusion.
void write_assumption_csv(const std::string& path,
                          const std::vector<baselines::AssumptionTest>& tests);

// Fit metadata: mode, seed/config echo, standardization report, grid, levels,
// draw and failure counts, runtimes.
void write_fit_metadata(const std::string& path, const baselines::FitResult& result,
                        const baselines::FitSpec& spec);

// Benchmark summary: coverage by level, RMSE, runtimes, failed replicates.
void write_benchmark_summary(const std::string& path,
                             const simulation::ReplicationReport& report,
                             const simulation::ReplicationConfig& config);

void write_linear_nc_csv(const std::string& path, const baselines::LinearNcEstimate& estimate);

}  // namespace serialize
}  // namespace bnpnc
