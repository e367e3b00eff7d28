#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hcran/config.hpp"
#include "hcran/metrics.hpp"
#include "hcran/scenario.hpp"
#include "hcran/traffic.hpp"

namespace hcran {

/// Per-slot prices of the greedy drift-plus-penalty problem:
/// X_n = H_n + V(1-alpha)mu_n/N on power, Y_k = Q_k + V alpha omega_k/K_R on rate.
struct Weights {
  std::vector<double> x;
  std::vector<double> y;
};

Weights compute_weights(const QueueState& queues, const SystemConfig& config);

/// One slot's beamforming problem: minimize sum X_n P_n - sum Y_k R_k over the
/// beamformers subject to per-RRH power (C3), per-MUE interference (C4) and
/// the reweighted fronthaul constraint (C6)
///   sum_k beta_{n,k} R~_k ||v_{n,k}||^2 <= C_n.
struct SlotProblem {
  std::vector<double> x;
  std::vector<double> y;
  Eigen::MatrixXd beta;           // N x K
  std::vector<double> rate_prev;  // R~_k
  ChannelState channels;
  double p_max = 0;
  double interference_cap = 0;
  double fronthaul_cap = kInfinity;
  double kappa_reg = 0;
  int num_rrh = 0;
  int antennas_rrh = 0;

  int num_rue() const { return static_cast<int>(y.size()); }
  /// sum X_n P_n - sum Y_k R_k evaluated exactly.
  double objective(const BeamformerSet& beams) const;
  bool all_rate_weights_zero() const;
};

/// beta_{n,k} = 1 / (||v_{n,k}||^2 + kappa).
Eigen::MatrixXd reweight_beta(const BeamformerSet& beams, double kappa_reg);

/// Slot-0 start: each RUE gets maximum-ratio transmission from the RRH with the
/// strongest channel block, at power p_max / K_R.
BeamformerSet initial_beams(const ChannelState& channels, const SystemConfig& config);

/// Previous slot's beams scaled so every P_n <= p_max / 1.1. RUEs whose beam
/// has died out (||v_k||^2 <= eps_active) are re-seeded as in initial_beams,
/// because a zero beam is a fixed point of the WMMSE updates.
BeamformerSet warm_start(const BeamformerSet& previous, const ChannelState& channels,
                         const SystemConfig& config);

/// Assembles the slot problem. beta and R~ come from `start` (the warm start
/// of this slot).
SlotProblem build_slot_problem(const QueueState& queues, const ChannelState& channels,
                               const SystemConfig& config, const BeamformerSet& start);

/// Constants of the drift bound.
struct BoundConstants {
  std::vector<double> r_max;
  std::vector<double> a_max;
  double b = 0;
  double eta_max = 0;
  double gamma = 0;
};

/// R_max = log2(1 + G_max N p_max / sigma^2) with G_max bounding ||h_k||^2, and
/// B = 1/2 sum_k (A_max^2 + R_max^2) + 1/2 sum_n max(p_avg, p_max - p_avg)^2,
/// i.e. the supremum of the per-slot quadratic terms.
BoundConstants compute_bound_b(const SystemConfig& config, const TrafficConfig& traffic,
                               double gain_cap);

struct DriftCheck {
  double lhs = 0;
  double rhs = 0;
  bool holds = false;
};

/// Deterministic one-slot form of the drift-plus-penalty bound:
///   1/2 sum (Q'^2 - Q^2) + 1/2 sum (H'^2 - H^2) - V eta
///     <= B - V eta + sum Q_k (A_k - R_k) + sum H_n (P_n - p_avg).
/// Throws std::invalid_argument if `after` is not the queue update of `before`.
DriftCheck check_drift_inequality(const QueueState& before, const QueueState& after,
                                  std::span<const double> rates,
                                  std::span<const double> arrivals,
                                  std::span<const double> powers, double eta, double v,
                                  double p_avg, double b);

struct TradeoffPoint {
  double v = 0;
  double avg_queue = 0;
  double avg_eta = 0;
};

struct TradeoffSummary {
  double slope = 0;
  double intercept = 0;
  double r_squared = 0;
  bool eta_nondecreasing = false;  // within the relative tolerance
  bool eta_gaps_shrinking = false;
  std::vector<double> eta_series;
};

/// Least-squares fit of average queue against V plus EE monotonicity flags.
/// Points are sorted by V. Throws std::invalid_argument for fewer than 3
/// distinct V values.
TradeoffSummary tradeoff_summary(std::vector<TradeoffPoint> points, double rel_tol = 0.02);

}  // namespace hcran
