#include "hcran/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace hcran {

namespace {

void check_dims(const ChannelState& channels, const BeamformerSet& beams) {
  if (channels.num_rue() != beams.num_rue())
    throw std::invalid_argument("dimension mismatch: channels describe " +
                                std::to_string(channels.num_rue()) + " RUEs, beams " +
                                std::to_string(beams.num_rue()));
  for (const auto& h : channels.h)
    if (h.size() != beams.stacked_dim())
      throw std::invalid_argument("dimension mismatch: channel length " +
                                  std::to_string(h.size()) + " vs beam length " +
                                  std::to_string(beams.stacked_dim()));
}

}  // namespace

BeamformerSet::BeamformerSet(int num_rue, int num_rrh, int antennas_rrh)
    : num_rrh_(num_rrh),
      antennas_(antennas_rrh),
      v_(static_cast<std::size_t>(num_rue), CVector::Zero(num_rrh * antennas_rrh)) {}

BeamformerSet BeamformerSet::zeros(const SystemConfig& config) {
  return BeamformerSet(config.num_rue, config.num_rrh, config.antennas_rrh);
}

double BeamformerSet::total_power() const {
  double p = 0;
  for (const auto& v : v_) p += v.squaredNorm();
  return p;
}

bool BeamformerSet::is_zero() const {
  for (const auto& v : v_)
    if (!v.isZero(0.0)) return false;
  return true;
}

void BeamformerSet::scale(double factor) {
  for (auto& v : v_) v *= factor;
}

PolarBeam decompose(const CVector& v) {
  PolarBeam p;
  p.norm = v.norm();
  p.unit = p.norm > 0 ? CVector(v / p.norm) : CVector::Zero(v.size());
  return p;
}

CVector recompose(const PolarBeam& p) { return p.norm * p.unit; }

double compute_rate(int k, const ChannelState& channels, const BeamformerSet& beams) {
  check_dims(channels, beams);
  const CVector& h = channels.h.at(static_cast<std::size_t>(k));
  const double signal = std::norm(h.dot(beams[k]));
  double interference = channels.phi.at(static_cast<std::size_t>(k));
  for (int j = 0; j < beams.num_rue(); ++j)
    if (j != k) interference += std::norm(h.dot(beams[j]));
  return std::log2(1.0 + signal / interference);
}

std::vector<double> compute_rates(const ChannelState& channels, const BeamformerSet& beams) {
  std::vector<double> r(static_cast<std::size_t>(beams.num_rue()));
  for (int k = 0; k < beams.num_rue(); ++k) r[k] = compute_rate(k, channels, beams);
  return r;
}

double compute_power(int n, const BeamformerSet& beams) {
  if (n < 0 || n >= beams.num_rrh())
    throw std::invalid_argument("dimension mismatch: RRH index " + std::to_string(n));
  double p = 0;
  for (int k = 0; k < beams.num_rue(); ++k) p += beams.block_power(n, k);
  return p;
}

std::vector<double> compute_powers(const BeamformerSet& beams) {
  std::vector<double> p(static_cast<std::size_t>(beams.num_rrh()));
  for (int n = 0; n < beams.num_rrh(); ++n) p[n] = compute_power(n, beams);
  return p;
}

double compute_eta_ee(std::span<const double> rates, std::span<const double> powers,
                      const SystemConfig& config) {
  double rate_term = 0;
  for (std::size_t k = 0; k < rates.size(); ++k) rate_term += config.omega(static_cast<int>(k)) * rates[k];
  double power_term = 0;
  for (std::size_t n = 0; n < powers.size(); ++n) power_term += config.mu(static_cast<int>(n)) * powers[n];
  return config.alpha / static_cast<double>(rates.size()) * rate_term -
         (1.0 - config.alpha) / static_cast<double>(powers.size()) * power_term;
}

double compute_eta_ee_traditional(std::span<const double> rates, std::span<const double> powers,
                                  const SystemConfig& config) {
  double num = 0;
  for (std::size_t k = 0; k < rates.size(); ++k) num += config.trad_omega(static_cast<int>(k)) * rates[k];
  double den = 0;
  for (std::size_t n = 0; n < powers.size(); ++n) den += config.trad_mu(static_cast<int>(n)) * powers[n];
  if (!(den > 0)) throw std::domain_error("traditional EE undefined: weighted total power is zero");
  return num / den;
}

double compute_interference(int m, const ChannelState& channels, const BeamformerSet& beams) {
  const CVector& g = channels.g.at(static_cast<std::size_t>(m));
  if (g.size() != beams.stacked_dim())
    throw std::invalid_argument("dimension mismatch: MUE channel length " +
                                std::to_string(g.size()));
  double total = 0;
  for (int j = 0; j < beams.num_rue(); ++j) total += std::norm(g.dot(beams[j]));
  return total;
}

double compute_fronthaul(int n, std::span<const double> rates, const BeamformerSet& beams,
                         double eps_active) {
  double load = 0;
  for (int k = 0; k < beams.num_rue(); ++k)
    if (beams.block_power(n, k) > eps_active) load += rates[static_cast<std::size_t>(k)];
  return load;
}

SlotMetrics compute_slot_metrics(const ChannelState& channels, const BeamformerSet& beams,
                                 const SystemConfig& config) {
  SlotMetrics m;
  m.rate = compute_rates(channels, beams);
  m.power = compute_powers(beams);
  m.eta_ee = compute_eta_ee(m.rate, m.power, config);
  try {
    m.eta_ee_trad = compute_eta_ee_traditional(m.rate, m.power, config);
  } catch (const std::domain_error&) {
    m.eta_ee_trad = std::numeric_limits<double>::quiet_NaN();
  }
  for (int i = 0; i < channels.num_mue(); ++i)
    m.interference.push_back(compute_interference(i, channels, beams));
  for (int n = 0; n < beams.num_rrh(); ++n)
    m.fronthaul.push_back(compute_fronthaul(n, m.rate, beams, config.epsilon_active()));
  return m;
}

}  // namespace hcran
