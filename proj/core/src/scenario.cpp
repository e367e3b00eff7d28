#include "hcran/scenario.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hcran {

namespace {

Point uniform_in_annulus(Rng& rng, const Point& center, double r_min, double r_max) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Area-uniform radius.
  const double r = std::sqrt(r_min * r_min + unit(rng) * (r_max * r_max - r_min * r_min));
  const double theta = 2.0 * std::numbers::pi * unit(rng);
  return {center.x + r * std::cos(theta), center.y + r * std::sin(theta)};
}

bool inside(const Point& p, double radius) { return std::hypot(p.x, p.y) <= radius; }

constexpr int sample_budget = 100000;

}  // namespace

double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }

double MbsBeamformers::total_power() const {
  double p = 0;
  for (const auto& v : v0) p += v.squaredNorm();
  return p;
}

double path_loss(double d, const SystemConfig& config) {
  const double clamped = std::max(d, config.reference_distance);
  return std::pow(clamped / config.reference_distance, -config.pathloss_exponent);
}

cd complex_gaussian(Rng& rng) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(rng);
  const double im = n(rng);
  return {re, im};
}

Rng make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream),
                    static_cast<std::uint32_t>(stream >> 32), 0x48435241u};
  return Rng(seq);
}

Scenario build_scenario(const SystemConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng = make_stream(seed, 0);
  Scenario s;
  Topology& topo = s.topology;
  topo.mbs = {0.0, 0.0};

  for (int n = 0; n < config.num_rrh; ++n)
    topo.rrh.push_back(
        uniform_in_annulus(rng, topo.mbs, config.rrh_min_radius, config.rrh_max_radius));

  for (int k = 0; k < config.num_rue; ++k) {
    if (config.rue_cluster_radius > 0) {
      // User-centric placement around RRH (k mod N), kept inside the macro area.
      const Point& anchor = topo.rrh[static_cast<std::size_t>(k % config.num_rrh)];
      Point p;
      int tries = 0;
      do {
        if (++tries > sample_budget)
          throw std::invalid_argument("invalid config: cannot place RUE inside the area");
        p = uniform_in_annulus(rng, anchor, config.rue_min_distance, config.rue_cluster_radius);
      } while (!inside(p, config.area_radius));
      topo.rue.push_back(p);
    } else {
      topo.rue.push_back(uniform_in_annulus(rng, topo.mbs, 0.0, config.area_radius));
    }
  }

  for (int m = 0; m < config.num_mue; ++m) {
    Point p;
    int tries = 0;
    bool ok = false;
    while (!ok) {
      if (++tries > sample_budget)
        throw std::invalid_argument(
            "invalid config: cannot place MUE at mue_min_rrh_distance from every RRH");
      p = uniform_in_annulus(rng, topo.mbs, 0.0, config.area_radius);
      ok = true;
      for (const auto& r : topo.rrh) ok = ok && distance(p, r) >= config.mue_min_rrh_distance;
    }
    topo.mue.push_back(p);
  }

  // MRT toward each MUE on its slot-0 MBS channel, equal power split.
  const double per_mue = config.num_mue > 0 ? config.p_mbs / config.num_mue : 0.0;
  for (int m = 0; m < config.num_mue; ++m) {
    const double gain = std::sqrt(path_loss(distance(topo.mbs, topo.mue[m]), config));
    CVector g(config.antennas_mbs);
    for (int a = 0; a < config.antennas_mbs; ++a) g[a] = gain * complex_gaussian(rng);
    s.mbs.v0.push_back(std::sqrt(per_mue) * g / g.norm());
    s.mbs_mue_channel.push_back(std::move(g));
  }
  return s;
}

double mbs_interference_plus_noise(const CVector& g0, const MbsBeamformers& mbs,
                                   double noise_power) {
  double phi = noise_power;
  for (const auto& v : mbs.v0) phi += std::norm(g0.dot(v));
  return phi;
}

ChannelState draw_channels(const Topology& topology, const MbsBeamformers& mbs,
                           const SystemConfig& config, Rng& rng) {
  const int lr = config.antennas_rrh;
  const double sigma2 = config.noise_power();
  auto stacked = [&](const Point& rx) {
    CVector v(config.stacked_dim());
    for (int n = 0; n < config.num_rrh; ++n) {
      const double gain = std::sqrt(path_loss(distance(topology.rrh[n], rx), config));
      for (int a = 0; a < lr; ++a) {
        cd xi = complex_gaussian(rng);
        // Truncation keeps R_max a true bound; it fires with probability e^-cap.
        const double e = std::norm(xi);
        if (e > config.fading_gain_cap) xi *= std::sqrt(config.fading_gain_cap / e);
        v[n * lr + a] = gain * xi;
      }
    }
    return v;
  };

  ChannelState ch;
  for (const auto& p : topology.rue) ch.h.push_back(stacked(p));
  for (const auto& p : topology.mue) ch.g.push_back(stacked(p));
  for (const auto& p : topology.rue) {
    const double gain = std::sqrt(path_loss(distance(topology.mbs, p), config));
    CVector g0(config.antennas_mbs);
    for (int a = 0; a < config.antennas_mbs; ++a) g0[a] = gain * complex_gaussian(rng);
    ch.phi.push_back(mbs_interference_plus_noise(g0, mbs, sigma2));
    ch.g0.push_back(std::move(g0));
  }
  return ch;
}

double channel_gain_cap(const Topology& topology, const SystemConfig& config) {
  double best = 0;
  for (const auto& p : topology.rue) {
    double sum = 0;
    for (const auto& r : topology.rrh) sum += config.antennas_rrh * path_loss(distance(r, p), config);
    best = std::max(best, sum);
  }
  return config.fading_gain_cap * best;
}

}  // namespace hcran
