#pragma once

#include <vector>

#include <Eigen/Dense>

#include "hcran/config.hpp"
#include "hcran/controller.hpp"
#include "hcran/metrics.hpp"
#include "hcran/qcqp.hpp"
#include "hcran/scenario.hpp"

namespace hcran {

/// Block-coordinate state of the WMMSE iteration.
struct WmmseState {
  std::vector<cd> u;       // receivers
  std::vector<double> w;   // MSE weights
  std::vector<double> e;   // MSE at (u, beams)
  BeamformerSet beams;
  Eigen::MatrixXd beta;
  std::vector<double> rate_prev;
  double eta_current = 0;
};

/// e_k = |u|^2 (sum_j |h_k^H v_j|^2 + phi_k) - 2 Re{u h_k^H v_k} + 1.
double compute_mse(int k, cd u, const ChannelState& channels, const BeamformerSet& beams);

/// MMSE receiver conj(h_k^H v_k) / (sum_j |h_k^H v_j|^2 + phi_k). The conjugate
/// makes u h_k^H v_k real, so the MSE above is minimized and equals
/// 1 / (1 + SINR_k).
cd update_receiver(int k, const ChannelState& channels, const BeamformerSet& beams);

/// w = 1/e. Throws std::domain_error for e <= 0 or non-finite e.
double update_weight(double e);

/// Receivers, MSEs and weights at the MMSE fixed point of `beams`.
WmmseState make_state(const SlotProblem& problem, const BeamformerSet& beams);

/// sum_k (Y_k / ln 2)(w_k e_k - ln w_k) + sum_n X_n P_n with e_k evaluated at
/// the state's receivers and beams. At w = 1/e and the MMSE receiver this is
/// the slot objective plus the constant sum_k Y_k / ln 2.
double surrogate_objective(const SlotProblem& problem, const WmmseState& state);

/// The beamformer subproblem for fixed (u, w, beta, R~): one block per RUE,
///   min sum_k v_k^H M v_k - 2 Re{b_k^H v_k}
/// with M = sum_j (Y_j/ln2) w_j |u_j|^2 h_j h_j^H + blockdiag(X_n I) and
/// b_k = (Y_k/ln2) w_k conj(u_k) h_k, under the power, interference and
/// linearized fronthaul constraints. Fronthaul constraints are omitted when the
/// cap is infinite.
qcqp::QcqpProblem assemble_qcqp(const SlotProblem& problem, const WmmseState& state);

struct BeamUpdate {
  BeamformerSet beams;
  qcqp::Status status = qcqp::Status::Optimal;
  double kkt_residual = 0;
  bool kept_incoming = false;  // solver failed or did not improve on the incoming beams
};

/// Solves the beamformer subproblem. Never returns beams with a larger
/// subproblem objective than feasible incoming beams.
BeamUpdate update_beamformers(const SlotProblem& problem, const WmmseState& state,
                              const qcqp::Options& options = {});

/// Relative feasibility of `beams` for the slot problem under the given
/// linearization: worst (cap - value) / cap over C3, C4 and C6.
double worst_relative_slack(const SlotProblem& problem, const BeamformerSet& beams,
                            const Eigen::MatrixXd& beta, const std::vector<double>& rate_prev);

struct WmmseResult {
  BeamformerSet beams;
  WmmseState state;  // u, e, w refreshed at the returned beams
  SlotMetrics metrics;
  int iterations = 0;
  bool converged = false;
  std::vector<double> surrogate_history;  // after each full (u, w, v) sweep
  qcqp::Status last_status = qcqp::Status::Optimal;
  int solver_fallbacks = 0;
  // Of the returned beams, C3/C4/C6 under the beta and R~ they were optimized with.
  double worst_relative_slack = 1;
};

/// Alternates receiver, weight and beamformer updates until the EE utility
/// changes by at most convergence_tol relative, or max_wmmse_iters sweeps.
/// beta and R~ are refreshed after every sweep. The surrogate is non-increasing
/// whenever the fronthaul cap is infinite; with a finite cap a refresh can
/// tighten the constraint and raise it. A problem with every Y_k = 0 returns
/// zero beams after one sweep.
WmmseResult run_algorithm1(const SlotProblem& problem, const BeamformerSet& init,
                           const SystemConfig& config);

}  // namespace hcran
