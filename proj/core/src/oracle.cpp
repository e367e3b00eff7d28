#include "hcran/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "hcran/traffic.hpp"

namespace hcran::oracle {

namespace {

bool feasible(const SlotProblem& problem, const BeamformerSet& beams) {
  for (int n = 0; n < problem.num_rrh; ++n) {
    if (compute_power(n, beams) > problem.p_max) return false;
    if (std::isfinite(problem.fronthaul_cap)) {
      double load = 0;
      for (int k = 0; k < beams.num_rue(); ++k)
        load += problem.beta(n, k) * problem.rate_prev[k] * beams.block_power(n, k);
      if (load > problem.fronthaul_cap) return false;
    }
  }
  for (int i = 0; i < problem.channels.num_mue(); ++i)
    if (compute_interference(i, problem.channels, beams) > problem.interference_cap) return false;
  return true;
}

}  // namespace

GridResult grid_search_slot(const SlotProblem& problem, double resolution) {
  const int dim = problem.num_rrh * problem.antennas_rrh;
  const int real_dim = 2 * dim * problem.num_rue();
  if (real_dim > 4)
    throw std::invalid_argument("grid search limited to 4 real coordinates, got " +
                                std::to_string(real_dim));
  if (!(resolution > 0)) throw std::invalid_argument("grid resolution must be positive");

  const double bound = std::sqrt(problem.p_max);
  const int steps = static_cast<int>(std::floor(bound / resolution));
  std::vector<double> axis;
  for (int i = -steps; i <= steps; ++i) axis.push_back(i * resolution);
  const long long points = static_cast<long long>(axis.size());

  GridResult best;
  best.objective = std::numeric_limits<double>::infinity();
  BeamformerSet beams(problem.num_rue(), problem.num_rrh, problem.antennas_rrh);
  long long total = 1;
  for (int i = 0; i < real_dim; ++i) total *= points;
  for (long long idx = 0; idx < total; ++idx) {
    long long rest = idx;
    for (int c = 0; c < real_dim; ++c) {
      const double value = axis[static_cast<std::size_t>(rest % points)];
      rest /= points;
      const int k = c / (2 * dim);
      const int entry = (c % (2 * dim)) / 2;
      cd& z = beams[k][entry];
      z = (c % 2 == 0) ? cd(value, z.imag()) : cd(z.real(), value);
    }
    if (!feasible(problem, beams)) continue;
    ++best.evaluated;
    const double f = problem.objective(beams);
    if (f < best.objective) {
      best.objective = f;
      best.beams = beams;
    }
  }
  return best;
}

GridResult grid_search_power(const SlotProblem& problem, double resolution) {
  if (problem.num_rue() != 1 || problem.num_rrh * problem.antennas_rrh != 1)
    throw std::invalid_argument("power grid search needs exactly one complex beam coordinate");
  if (!(resolution > 0)) throw std::invalid_argument("grid resolution must be positive");
  const cd h = problem.channels.h[0][0];
  const cd phase = std::abs(h) > 0 ? h / std::abs(h) : cd(1.0);

  GridResult best;
  best.objective = std::numeric_limits<double>::infinity();
  BeamformerSet beams(1, problem.num_rrh, problem.antennas_rrh);
  const long long steps = static_cast<long long>(std::floor(problem.p_max / resolution + 1e-9));
  for (long long i = 0; i <= steps; ++i) {
    const double p = std::min(problem.p_max, static_cast<double>(i) * resolution);
    beams[0][0] = std::sqrt(p) * phase;
    if (!feasible(problem, beams)) continue;
    ++best.evaluated;
    const double f = problem.objective(beams);
    if (f < best.objective) {
      best.objective = f;
      best.beams = beams;
    }
  }
  return best;
}

double scalar_closed_form(double x, double y, double h, double phi, double p_max) {
  if (y <= 0) return 0.0;
  if (x <= 0) return p_max;
  const double p = y / (x * std::numbers::ln2) - phi / (h * h);
  return std::clamp(p, 0.0, p_max);
}

double monte_carlo_mse(int k, cd u, const ChannelState& channels, const BeamformerSet& beams,
                       int samples, Rng& rng) {
  if (samples < 10000) throw std::invalid_argument("monte_carlo_mse needs at least 1e4 samples");
  const CVector& h = channels.h.at(static_cast<std::size_t>(k));
  std::vector<cd> gains;
  for (int j = 0; j < beams.num_rue(); ++j) gains.push_back(h.dot(beams[j]));
  const double noise_std = std::sqrt(channels.phi.at(static_cast<std::size_t>(k)));

  double sum = 0;
  for (int t = 0; t < samples; ++t) {
    cd y = noise_std * complex_gaussian(rng);
    cd own;
    for (int j = 0; j < beams.num_rue(); ++j) {
      const cd s = complex_gaussian(rng);
      if (j == k) own = s;
      y += gains[j] * s;
    }
    sum += std::norm(u * y - own);
  }
  return sum / samples;
}

SlotProblem scalar_slot_problem(double x, double y, cd h, double phi, double p_max, cd g,
                                double interference_cap, double fronthaul_cap) {
  SlotProblem p;
  p.x = {x};
  p.y = {y};
  p.channels.h = {CVector::Constant(1, h)};
  p.channels.g = {CVector::Constant(1, g)};
  p.channels.g0 = {CVector::Zero(1)};
  p.channels.phi = {phi};
  p.p_max = p_max;
  p.interference_cap = interference_cap;
  p.fronthaul_cap = fronthaul_cap;
  p.kappa_reg = 1e-6 * p_max;
  p.num_rrh = 1;
  p.antennas_rrh = 1;
  p.beta = reweight_beta(BeamformerSet(1, 1, 1), p.kappa_reg);
  p.rate_prev = {0.0};
  return p;
}

std::pair<SlotProblem, BeamformerSet> random_slot_problem(const SystemConfig& config, Rng& rng,
                                                          double max_backlog) {
  const Scenario scenario = build_scenario(config, rng());
  const ChannelState channels = draw_channels(scenario.topology, scenario.mbs, config, rng);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  QueueState queues = QueueState::empty(config.num_rue, config.num_rrh);
  for (auto& q : queues.q) q = max_backlog * unit(rng);
  for (auto& h : queues.h) h = 0.1 * max_backlog * unit(rng);
  BeamformerSet start = initial_beams(channels, config);
  SlotProblem problem = build_slot_problem(queues, channels, config, start);
  return {std::move(problem), std::move(start)};
}

qcqp::QcqpProblem random_qcqp(int blocks, int dim, int constraints, Rng& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto psd = [&](int rank) {
    CMatrix f = CMatrix::Zero(dim, dim);
    for (int r = 0; r < rank; ++r) {
      CVector a(dim);
      for (auto& z : a) z = complex_gaussian(rng);
      f += a * a.adjoint();
    }
    return CMatrix(0.5 * (f + f.adjoint()));
  };
  qcqp::QcqpProblem p;
  p.num_blocks = blocks;
  p.block_dim = dim;
  for (int k = 0; k < blocks; ++k) {
    p.quad.push_back(psd(1 + static_cast<int>(unit(rng) * dim)) +
                     0.05 * unit(rng) * CMatrix::Identity(dim, dim));
    CVector b(dim);
    for (auto& z : b) z = 3.0 * complex_gaussian(rng);
    p.linear.push_back(b);
  }
  for (int i = 0; i < constraints; ++i) {
    qcqp::QuadraticConstraint c;
    c.index = i;
    c.cap = 0.1 + 1.9 * unit(rng);
    for (int k = 0; k < blocks; ++k)
      c.forms.push_back(unit(rng) < 0.2 ? CMatrix() : psd(1 + static_cast<int>(unit(rng) * dim)));
    p.constraints.push_back(std::move(c));
  }
  return p;
}

}  // namespace hcran::oracle
