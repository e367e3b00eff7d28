#include "hcran/wmmse.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hcran {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kMaxExtrapolation = 1024;

CMatrix selector(int dim, int n, int antennas) {
  CMatrix d = CMatrix::Zero(dim, dim);
  for (int a = 0; a < antennas; ++a) d(n * antennas + a, n * antennas + a) = 1.0;
  return d;
}

double received_power(int k, const ChannelState& channels, const BeamformerSet& beams) {
  const CVector& h = channels.h.at(static_cast<std::size_t>(k));
  double total = channels.phi.at(static_cast<std::size_t>(k));
  for (int j = 0; j < beams.num_rue(); ++j) total += std::norm(h.dot(beams[j]));
  return total;
}

double fronthaul_load(int n, const BeamformerSet& beams, const Eigen::MatrixXd& beta,
                      const std::vector<double>& rate_prev) {
  double load = 0;
  for (int k = 0; k < beams.num_rue(); ++k) load += beta(n, k) * rate_prev[k] * beams.block_power(n, k);
  return load;
}

std::vector<CVector> as_blocks(const BeamformerSet& beams) {
  std::vector<CVector> x;
  for (int k = 0; k < beams.num_rue(); ++k) x.push_back(beams[k]);
  return x;
}

void refresh_receivers(const SlotProblem& problem, WmmseState& state) {
  const int num_rue = problem.num_rue();
  state.u.resize(num_rue);
  state.e.resize(num_rue);
  state.w.resize(num_rue);
  for (int k = 0; k < num_rue; ++k) {
    state.u[k] = update_receiver(k, problem.channels, state.beams);
    state.e[k] = compute_mse(k, state.u[k], problem.channels, state.beams);
    state.w[k] = update_weight(state.e[k]);
  }
}

}  // namespace

double compute_mse(int k, cd u, const ChannelState& channels, const BeamformerSet& beams) {
  const CVector& h = channels.h.at(static_cast<std::size_t>(k));
  if (h.size() != beams.stacked_dim())
    throw std::invalid_argument("dimension mismatch: channel length " + std::to_string(h.size()) +
                                " vs beam length " + std::to_string(beams.stacked_dim()));
  const double total = received_power(k, channels, beams);
  return std::norm(u) * total - 2.0 * std::real(u * h.dot(beams[k])) + 1.0;
}

cd update_receiver(int k, const ChannelState& channels, const BeamformerSet& beams) {
  const CVector& h = channels.h.at(static_cast<std::size_t>(k));
  return std::conj(h.dot(beams[k])) / received_power(k, channels, beams);
}

double update_weight(double e) {
  if (!(e > 0) || !std::isfinite(e))
    throw std::domain_error("MSE must be positive and finite, got " + std::to_string(e));
  return 1.0 / e;
}

WmmseState make_state(const SlotProblem& problem, const BeamformerSet& beams) {
  WmmseState s;
  s.beams = beams;
  s.beta = problem.beta;
  s.rate_prev = problem.rate_prev;
  refresh_receivers(problem, s);
  return s;
}

double surrogate_objective(const SlotProblem& problem, const WmmseState& state) {
  double f = 0;
  for (int k = 0; k < problem.num_rue(); ++k) {
    const double e = compute_mse(k, state.u[k], problem.channels, state.beams);
    f += problem.y[k] / kLn2 * (state.w[k] * e - std::log(state.w[k]));
  }
  for (int n = 0; n < problem.num_rrh; ++n) f += problem.x[n] * compute_power(n, state.beams);
  return f;
}

qcqp::QcqpProblem assemble_qcqp(const SlotProblem& problem, const WmmseState& state) {
  const int num_rue = problem.num_rue();
  const int dim = problem.num_rrh * problem.antennas_rrh;
  const auto& ch = problem.channels;

  CMatrix m = CMatrix::Zero(dim, dim);
  for (int j = 0; j < num_rue; ++j) {
    const double c = problem.y[j] / kLn2 * state.w[j] * std::norm(state.u[j]);
    if (c != 0) m += c * ch.h[j] * ch.h[j].adjoint();
  }
  for (int n = 0; n < problem.num_rrh; ++n)
    for (int a = 0; a < problem.antennas_rrh; ++a)
      m(n * problem.antennas_rrh + a, n * problem.antennas_rrh + a) += problem.x[n];
  m = 0.5 * (m + m.adjoint()).eval();

  qcqp::QcqpProblem q;
  q.num_blocks = num_rue;
  q.block_dim = dim;
  for (int k = 0; k < num_rue; ++k) {
    q.quad.push_back(m);
    q.linear.push_back(problem.y[k] / kLn2 * state.w[k] * std::conj(state.u[k]) * ch.h[k]);
  }

  for (int n = 0; n < problem.num_rrh; ++n) {
    qcqp::QuadraticConstraint c{qcqp::ConstraintKind::Power, n, problem.p_max, {}};
    const CMatrix d = selector(dim, n, problem.antennas_rrh);
    c.forms.assign(static_cast<std::size_t>(num_rue), d);
    q.constraints.push_back(std::move(c));
  }
  for (int i = 0; i < ch.num_mue(); ++i) {
    qcqp::QuadraticConstraint c{qcqp::ConstraintKind::Interference, i, problem.interference_cap, {}};
    const CMatrix gg = ch.g[i] * ch.g[i].adjoint();
    c.forms.assign(static_cast<std::size_t>(num_rue), 0.5 * (gg + gg.adjoint()));
    q.constraints.push_back(std::move(c));
  }
  if (std::isfinite(problem.fronthaul_cap)) {
    for (int n = 0; n < problem.num_rrh; ++n) {
      qcqp::QuadraticConstraint c{qcqp::ConstraintKind::Fronthaul, n, problem.fronthaul_cap, {}};
      const CMatrix d = selector(dim, n, problem.antennas_rrh);
      for (int k = 0; k < num_rue; ++k) {
        const double weight = state.beta(n, k) * state.rate_prev[k];
        c.forms.push_back(weight > 0 ? CMatrix(weight * d) : CMatrix());
      }
      q.constraints.push_back(std::move(c));
    }
  }
  return q;
}

BeamUpdate update_beamformers(const SlotProblem& problem, const WmmseState& state,
                              const qcqp::Options& options) {
  const qcqp::QcqpProblem q = assemble_qcqp(problem, state);
  const qcqp::QcqpSolution sol = qcqp::solve(q, options);

  BeamUpdate out;
  out.status = sol.status;
  out.kkt_residual = sol.kkt_residual;

  BeamformerSet candidate = state.beams;
  for (int k = 0; k < problem.num_rue(); ++k) candidate[k] = sol.x[k];

  const std::vector<CVector> incoming = as_blocks(state.beams);
  const bool incoming_feasible = qcqp::check_feasible(incoming, q, 0.0).feasible;
  const bool candidate_feasible = qcqp::check_feasible(sol.x, q, 0.0).feasible;
  const bool solved = sol.status != qcqp::Status::NumericalFailure && candidate_feasible;

  if (incoming_feasible && (!solved || sol.objective > q.objective(incoming))) {
    out.beams = state.beams;
    out.kept_incoming = true;
  } else if (solved) {
    out.beams = std::move(candidate);
  } else {
    // Neither point is usable; zero beams satisfy every constraint.
    out.beams = BeamformerSet(problem.num_rue(), problem.num_rrh, problem.antennas_rrh);
    out.kept_incoming = true;
  }
  return out;
}

double worst_relative_slack(const SlotProblem& problem, const BeamformerSet& beams,
                            const Eigen::MatrixXd& beta, const std::vector<double>& rate_prev) {
  double worst = 1;
  for (int n = 0; n < problem.num_rrh; ++n)
    worst = std::min(worst, (problem.p_max - compute_power(n, beams)) / problem.p_max);
  if (std::isfinite(problem.interference_cap))
    for (int i = 0; i < problem.channels.num_mue(); ++i)
      worst = std::min(worst, (problem.interference_cap -
                               compute_interference(i, problem.channels, beams)) /
                                  problem.interference_cap);
  if (std::isfinite(problem.fronthaul_cap))
    for (int n = 0; n < problem.num_rrh; ++n)
      worst = std::min(worst, (problem.fronthaul_cap - fronthaul_load(n, beams, beta, rate_prev)) /
                                  problem.fronthaul_cap);
  return worst;
}

WmmseResult run_algorithm1(const SlotProblem& problem, const BeamformerSet& init,
                           const SystemConfig& config) {
  if (config.max_wmmse_iters < 1) throw std::invalid_argument("max_wmmse_iters must be >= 1");
  const qcqp::Options options{config.qcqp_tol, config.qcqp_max_iters};

  WmmseResult r;
  // Linearization the returned beams were optimized under; feasibility is
  // reported against it, since beta and R~ are refreshed after every sweep.
  Eigen::MatrixXd used_beta = problem.beta;
  std::vector<double> used_rate = problem.rate_prev;
  auto finish = [&](const BeamformerSet& beams) {
    r.beams = beams;
    r.state.beams = beams;
    refresh_receivers(problem, r.state);
    r.metrics = compute_slot_metrics(problem.channels, beams, config);
    r.metrics.wmmse_iters = r.iterations;
    r.metrics.solver_status = qcqp::to_string(r.last_status);
    r.worst_relative_slack = worst_relative_slack(problem, beams, used_beta, used_rate);
  };

  if (problem.all_rate_weights_zero()) {
    // Only the power cost remains, so the zero action is optimal.
    const BeamformerSet zero(problem.num_rue(), problem.num_rrh, problem.antennas_rrh);
    r.state = make_state(problem, zero);
    r.iterations = 1;
    r.converged = true;
    r.surrogate_history.push_back(surrogate_objective(problem, r.state));
    finish(zero);
    return r;
  }

  WmmseState& s = r.state;
  s = make_state(problem, init);
  auto eta_of = [&](const BeamformerSet& beams) {
    return compute_eta_ee(compute_rates(problem.channels, beams), compute_powers(beams), config);
  };
  double eta = eta_of(s.beams);

  // The plain WMMSE tail is slow at high SINR under a large power price. After
  // each beam update, the step along it is doubled while the point stays
  // feasible and the slot objective keeps falling, so every sweep still
  // descends.
  for (int it = 1; it <= config.max_wmmse_iters; ++it) {
    const double eta_star = eta;
    const BeamformerSet before = s.beams;
    BeamUpdate upd = update_beamformers(problem, s, options);
    s.beams = std::move(upd.beams);
    r.last_status = upd.status;
    if (upd.status != qcqp::Status::Optimal) ++r.solver_fallbacks;

    if (!upd.kept_incoming) {
      const BeamformerSet base = s.beams;
      double best = problem.objective(base);
      for (double t = 1; t <= kMaxExtrapolation; t *= 2) {
        BeamformerSet ext = base;
        for (int k = 0; k < problem.num_rue(); ++k) ext[k] += t * (base[k] - before[k]);
        if (worst_relative_slack(problem, ext, s.beta, s.rate_prev) < 0) break;
        const double f = problem.objective(ext);
        if (!(f < best)) break;
        best = f;
        s.beams = std::move(ext);
      }
    }

    // The receivers and weights are refreshed here rather than at the top of
    // the next sweep, so the recorded surrogate is the slot objective plus a
    // constant at each sweep's beams.
    refresh_receivers(problem, s);
    r.surrogate_history.push_back(surrogate_objective(problem, s));

    const std::vector<double> rates = compute_rates(problem.channels, s.beams);
    eta = compute_eta_ee(rates, compute_powers(s.beams), config);

    used_beta = s.beta;
    used_rate = s.rate_prev;
    s.beta = reweight_beta(s.beams, problem.kappa_reg);
    s.rate_prev = rates;
    s.eta_current = eta;
    r.iterations = it;
    if (eta_star == 0 || std::abs(eta_star - eta) <= config.convergence_tol * std::abs(eta_star)) {
      r.converged = true;
      break;
    }
  }
  const BeamformerSet beams = s.beams;
  finish(beams);
  return r;
}

}  // namespace hcran
