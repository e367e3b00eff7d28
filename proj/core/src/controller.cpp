#include "hcran/controller.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <stdexcept>

namespace hcran {

namespace {

CVector strongest_rrh_mrt(const CVector& h, const SystemConfig& config, double power) {
  const int lr = config.antennas_rrh;
  int best = 0;
  double best_gain = -1;
  for (int n = 0; n < config.num_rrh; ++n) {
    const double gain = h.segment(n * lr, lr).squaredNorm();
    if (gain > best_gain) {
      best_gain = gain;
      best = n;
    }
  }
  CVector v = CVector::Zero(h.size());
  const auto block = h.segment(best * lr, lr);
  const double norm = block.norm();
  if (norm > 0) v.segment(best * lr, lr) = std::sqrt(power) * block / norm;
  return v;
}

void enforce_power_margin(BeamformerSet& beams, const SystemConfig& config) {
  const double limit = config.p_max / 1.1;
  double worst = 0;
  for (int n = 0; n < beams.num_rrh(); ++n) worst = std::max(worst, compute_power(n, beams));
  if (worst > limit) beams.scale(std::sqrt(limit / worst));
}

}  // namespace

Weights compute_weights(const QueueState& queues, const SystemConfig& config) {
  Weights w;
  const double n = config.num_rrh;
  const double k = config.num_rue;
  const double v = config.tradeoff_v;
  for (int i = 0; i < config.num_rrh; ++i)
    w.x.push_back(queues.h.at(i) + v * (1.0 - config.alpha) * config.mu(i) / n);
  for (int i = 0; i < config.num_rue; ++i)
    w.y.push_back(queues.q.at(i) + v * config.alpha * config.omega(i) / k);
  return w;
}

double SlotProblem::objective(const BeamformerSet& beams) const {
  double f = 0;
  for (int n = 0; n < num_rrh; ++n) f += x[n] * compute_power(n, beams);
  for (int k = 0; k < num_rue(); ++k) f -= y[k] * compute_rate(k, channels, beams);
  return f;
}

bool SlotProblem::all_rate_weights_zero() const {
  return std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; });
}

Eigen::MatrixXd reweight_beta(const BeamformerSet& beams, double kappa_reg) {
  Eigen::MatrixXd beta(beams.num_rrh(), beams.num_rue());
  for (int n = 0; n < beams.num_rrh(); ++n)
    for (int k = 0; k < beams.num_rue(); ++k)
      beta(n, k) = 1.0 / (beams.block_power(n, k) + kappa_reg);
  return beta;
}

BeamformerSet initial_beams(const ChannelState& channels, const SystemConfig& config) {
  BeamformerSet beams = BeamformerSet::zeros(config);
  const double power = config.p_max / config.num_rue;
  for (int k = 0; k < config.num_rue; ++k)
    beams[k] = strongest_rrh_mrt(channels.h[k], config, power);
  return beams;
}

BeamformerSet warm_start(const BeamformerSet& previous, const ChannelState& channels,
                         const SystemConfig& config) {
  if (previous.num_rue() != config.num_rue) return initial_beams(channels, config);
  BeamformerSet beams = previous;
  const double power = config.p_max / config.num_rue;
  for (int k = 0; k < config.num_rue; ++k)
    if (beams[k].squaredNorm() <= config.epsilon_active())
      beams[k] = strongest_rrh_mrt(channels.h[k], config, power);
  enforce_power_margin(beams, config);
  return beams;
}

SlotProblem build_slot_problem(const QueueState& queues, const ChannelState& channels,
                               const SystemConfig& config, const BeamformerSet& start) {
  const Weights w = compute_weights(queues, config);
  SlotProblem p;
  p.x = w.x;
  p.y = w.y;
  p.kappa_reg = config.kappa_reg();
  p.beta = reweight_beta(start, p.kappa_reg);
  p.rate_prev = compute_rates(channels, start);
  p.channels = channels;
  p.p_max = config.p_max;
  p.interference_cap = config.interference_cap;
  p.fronthaul_cap = config.fronthaul_cap;
  p.num_rrh = config.num_rrh;
  p.antennas_rrh = config.antennas_rrh;
  return p;
}

BoundConstants compute_bound_b(const SystemConfig& config, const TrafficConfig& traffic,
                               double gain_cap) {
  BoundConstants c;
  const double sigma2 = config.noise_power();
  const double r_max = std::log2(1.0 + gain_cap * config.num_rrh * config.p_max / sigma2);
  const double a_max = traffic.peak();
  double b = 0;
  for (int k = 0; k < config.num_rue; ++k) {
    c.r_max.push_back(r_max);
    c.a_max.push_back(a_max);
    b += 0.5 * (a_max * a_max + r_max * r_max);
  }
  // (P_n - p_avg)^2 over P_n in [0, p_max].
  const double dev = std::max(config.p_avg, config.p_max - config.p_avg);
  b += 0.5 * config.num_rrh * dev * dev;
  c.b = b;
  double eta = 0;
  for (int k = 0; k < config.num_rue; ++k) eta += config.omega(k) * r_max;
  c.eta_max = config.alpha / config.num_rue * eta;
  c.gamma = config.p_max - config.p_avg;
  return c;
}

DriftCheck check_drift_inequality(const QueueState& before, const QueueState& after,
                                  std::span<const double> rates,
                                  std::span<const double> arrivals,
                                  std::span<const double> powers, double eta, double v,
                                  double p_avg, double b) {
  if (before.q.size() != after.q.size() || before.q.size() != rates.size() ||
      before.q.size() != arrivals.size() || before.h.size() != after.h.size() ||
      before.h.size() != powers.size())
    throw std::invalid_argument("drift check: inconsistent trace dimensions");
  auto close = [](double a, double e) { return std::abs(a - e) <= 1e-9 * std::max(1.0, std::abs(e)); };

  DriftCheck d;
  double drift = 0;
  double queue_term = 0;
  for (std::size_t k = 0; k < before.q.size(); ++k) {
    if (!close(after.q[k], update_actual_queue(before.q[k], rates[k], arrivals[k])))
      throw std::invalid_argument("drift check: Q_" + std::to_string(k + 1) +
                                  " does not follow the queue update");
    drift += 0.5 * (after.q[k] * after.q[k] - before.q[k] * before.q[k]);
    queue_term += before.q[k] * (arrivals[k] - rates[k]);
  }
  for (std::size_t n = 0; n < before.h.size(); ++n) {
    if (!close(after.h[n], update_virtual_queue(before.h[n], powers[n], p_avg)))
      throw std::invalid_argument("drift check: H_" + std::to_string(n + 1) +
                                  " does not follow the virtual queue update");
    drift += 0.5 * (after.h[n] * after.h[n] - before.h[n] * before.h[n]);
    queue_term += before.h[n] * (powers[n] - p_avg);
  }
  d.lhs = drift - v * eta;
  d.rhs = b - v * eta + queue_term;
  d.holds = d.lhs <= d.rhs + 1e-9;
  return d;
}

TradeoffSummary tradeoff_summary(std::vector<TradeoffPoint> points, double rel_tol) {
  std::set<double> distinct;
  for (const auto& p : points) distinct.insert(p.v);
  if (distinct.size() < 3)
    throw std::invalid_argument("tradeoff summary needs at least 3 distinct V values");
  std::sort(points.begin(), points.end(),
            [](const TradeoffPoint& a, const TradeoffPoint& b) { return a.v < b.v; });

  const double n = static_cast<double>(points.size());
  double sx = 0, sy = 0;
  for (const auto& p : points) {
    sx += p.v;
    sy += p.avg_queue;
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& p : points) {
    sxx += (p.v - mx) * (p.v - mx);
    sxy += (p.v - mx) * (p.avg_queue - my);
    syy += (p.avg_queue - my) * (p.avg_queue - my);
  }
  TradeoffSummary s;
  s.slope = sxy / sxx;
  s.intercept = my - s.slope * mx;
  s.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;

  double scale = 0;
  for (const auto& p : points) {
    s.eta_series.push_back(p.avg_eta);
    scale = std::max(scale, std::abs(p.avg_eta));
  }
  s.eta_nondecreasing = true;
  for (std::size_t i = 1; i < points.size(); ++i)
    s.eta_nondecreasing = s.eta_nondecreasing &&
                          points[i].avg_eta >= points[i - 1].avg_eta -
                                                   rel_tol * std::abs(points[i - 1].avg_eta);
  s.eta_gaps_shrinking = true;
  for (std::size_t i = 2; i < points.size(); ++i) {
    const double prev_gap = points[i - 1].avg_eta - points[i - 2].avg_eta;
    const double gap = points[i].avg_eta - points[i - 1].avg_eta;
    s.eta_gaps_shrinking = s.eta_gaps_shrinking && gap <= prev_gap + rel_tol * scale;
  }
  return s;
}

}  // namespace hcran
