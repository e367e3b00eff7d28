#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hcran/config.hpp"

namespace hcran {

/// One row of a per-slot trace.
struct SlotRecord {
  int slot = 0;
  std::vector<double> q;  // backlogs after the slot's update
  std::vector<double> h;
  std::vector<double> rate;
  std::vector<double> power;
  double eta_ee = 0;
};

/// Aggregates of one trajectory, or of several seeds when produced by
/// `average_over_seeds`. Averages skip the warm-up prefix of the horizon.
struct RunSummary {
  std::string run_id;
  double v = 0;
  double lambda = 0;
  double fronthaul_cap = kInfinity;
  int slots = 0;
  double avg_queue_total = 0;
  std::vector<double> avg_power;  // per RRH, W
  double avg_power_mean = 0;
  double avg_eta_ee = 0;
  double avg_eta_ee_trad = 0;  // ratio of the time-averaged weighted rate and power
  double stability_slope = 0;  // worst over every Q_k and H_n
  double pct_slots_converged = 0;  // fraction in [0, 1]
  double drift_pass_rate = 0;      // fraction in [0, 1]

  // Diagnostics not written to the sweep CSV.
  std::uint64_t seed = 0;
  double worst_relative_slack = 1;       // C3/C4/C6 over every slot
  double max_surrogate_increase = 0;     // largest per-sweep WMMSE surrogate rise
  int solver_fallbacks = 0;
  double mean_wmmse_iters = 0;
};

struct Trajectory {
  std::vector<SlotRecord> trace;  // empty unless requested
  RunSummary summary;
};

/// Runs config.slots slots: draw channels and arrivals, build and solve the
/// slot problem from the warm-started beams, update Q and H, check the drift
/// bound. Solver trouble is counted in the summary, never thrown.
Trajectory run_trajectory(const SystemConfig& config, const TrafficConfig& traffic,
                          std::uint64_t seed, bool keep_trace = true);

/// Seed-wise mean of summaries that share (V, lambda, cap). The worst-case
/// diagnostics take the worst over seeds.
RunSummary average_over_seeds(const std::vector<RunSummary>& runs);

struct SweepResult {
  std::vector<RunSummary> runs;      // one per (V, lambda, seed)
  std::vector<RunSummary> averaged;  // one per (V, lambda)
};

/// Seeds are config.rng_seed, config.rng_seed + 1, ... Runs are independent
/// and may execute on `jobs` threads; the result does not depend on `jobs`.
SweepResult sweep(const SystemConfig& config, const TrafficConfig& traffic,
                  const std::vector<double>& v_list, const std::vector<double>& lambda_list,
                  int seeds, int jobs = 1);

struct FronthaulComparison {
  std::vector<RunSummary> constrained;  // averaged per V, cap = C
  std::vector<RunSummary> ideal;        // averaged per V, cap = +inf
  std::vector<RunSummary> constrained_runs;
  std::vector<RunSummary> ideal_runs;   // same seeds as constrained_runs, index-aligned
};

/// Paired runs on identical seeds, hence identical topologies, channels and
/// arrivals. Throws std::invalid_argument for a non-finite cap.
FronthaulComparison compare_fronthaul(const SystemConfig& config, const TrafficConfig& traffic,
                                      double cap, const std::vector<double>& v_list, int seeds,
                                      int jobs = 1);

/// Sweep-table CSV with the fixed header; numbers at 9 significant digits.
void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& table);
std::vector<RunSummary> read_summary_csv(std::istream& in);

/// Trace CSV: slot,Q_1..Q_K,H_1..H_N,R_1..R_K,P_1..P_N,eta_ee.
void write_trace_csv(std::ostream& out, const std::vector<SlotRecord>& trace, int num_rue,
                     int num_rrh);
std::vector<SlotRecord> read_trace_csv(std::istream& in);

/// Writes to a file; throws std::runtime_error on I/O failure.
void emit_summary_csv(const std::string& path, const std::vector<RunSummary>& table);
void emit_trace_csv(const std::string& path, const std::vector<SlotRecord>& trace, int num_rue,
                    int num_rrh);

/// Number formatting used by every CSV writer.
std::string format_number(double x);

}  // namespace hcran
