#pragma once

#include <utility>

#include "hcran/controller.hpp"
#include "hcran/qcqp.hpp"
#include "hcran/metrics.hpp"
#include "hcran/scenario.hpp"

namespace hcran::oracle {

struct GridResult {
  BeamformerSet beams;
  double objective = 0;
  long long evaluated = 0;  // feasible grid points visited
};

/// Exhaustive search of sum X_n P_n - sum Y_k R_k over a grid with step
/// `resolution` on every real coordinate of the beams, inside the box
/// [-sqrt(p_max), sqrt(p_max)]. Infeasible points (C3, C4 and C6 under the
/// problem's beta and R~) are skipped. Throws std::invalid_argument when the
/// beams have more than 4 real coordinates.
GridResult grid_search_slot(const SlotProblem& problem, double resolution);

/// Search over transmit power p in [0, p_max] at step `resolution` for a
/// problem with a single complex beam coordinate; the phase is aligned with the
/// channel, which is optimal for one RUE. Throws std::invalid_argument for any
/// other shape.
GridResult grid_search_power(const SlotProblem& problem, double resolution);

/// argmax over p in [0, p_max] of Y log2(1 + h^2 p / phi) - X p:
/// clamp(Y / (X ln 2) - phi / h^2, 0, p_max). X = 0 with Y > 0 gives p_max.
double scalar_closed_form(double x, double y, double h, double phi, double p_max);

/// Sample mean of |u y_k - s_k|^2 where y_k = sum_j h_k^H v_j s_j + n_k, with
/// unit-variance complex Gaussian symbols and n_k of variance phi_k.
/// Throws std::invalid_argument for fewer than 10^4 samples.
double monte_carlo_mse(int k, cd u, const ChannelState& channels, const BeamformerSet& beams,
                       int samples, Rng& rng);

/// Desk-scale instance generators shared by tests, benchmarks and `verify`.

/// One RRH, one antenna, one RUE, one MUE; the MUE channel is `g` (0 keeps
/// the interference constraint inactive). beta and R~ come from the zero beam.
SlotProblem scalar_slot_problem(double x, double y, cd h, double phi, double p_max,
                                cd g = 0.0, double interference_cap = 1.0,
                                double fronthaul_cap = kInfinity);

/// A slot problem on a random topology and channel draw with backlogs uniform
/// in [0, max_backlog] and H_n uniform in [0, max_backlog / 10]. Returns the
/// problem and its initial beams.
std::pair<SlotProblem, BeamformerSet> random_slot_problem(const SystemConfig& config, Rng& rng,
                                                          double max_backlog = 50.0);

/// Random convex QCQP: PSD objective forms of random rank, random linear terms
/// and `constraints` PSD constraint forms with caps in [0.1, 2].
qcqp::QcqpProblem random_qcqp(int blocks, int dim, int constraints, Rng& rng);

}  // namespace hcran::oracle
