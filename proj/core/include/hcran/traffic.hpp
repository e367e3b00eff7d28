#pragma once

#include <span>
#include <vector>

#include "hcran/config.hpp"
#include "hcran/scenario.hpp"

namespace hcran {

/// Actual backlogs Q_k (bit/slot/Hz), virtual power backlogs H_n (W·slot) and
/// the arrivals A_k of the current slot.
struct QueueState {
  std::vector<double> q;
  std::vector<double> h;
  std::vector<double> a;

  static QueueState empty(int num_rue, int num_rrh);
  double total_backlog() const;
};

std::vector<double> draw_arrivals(const TrafficConfig& traffic, Rng& rng);

/// Q' = max(Q - R, 0) + A. Throws std::invalid_argument on negative input.
double update_actual_queue(double q, double rate, double arrival);

/// H' = max(H - p_avg + P, 0). Throws std::invalid_argument on negative input.
double update_virtual_queue(double h, double power, double p_avg);

/// Mean of Q(t)/t over the trailing `window_fraction` of the trace, with t
/// counted from 1. Small values certify empirical mean-rate stability.
/// Throws std::invalid_argument for traces shorter than 100 slots.
double stability_slope(std::span<const double> trace, double window_fraction = 0.1);

}  // namespace hcran
