#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "hcran/config.hpp"

namespace hcran {

using cd = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using Rng = std::mt19937_64;

struct Point {
  double x = 0;
  double y = 0;
};

double distance(const Point& a, const Point& b);

struct Topology {
  Point mbs;
  std::vector<Point> rrh;
  std::vector<Point> rue;
  std::vector<Point> mue;
};

/// Fixed MBS beamformers, one L_M vector per MUE.
struct MbsBeamformers {
  std::vector<CVector> v0;

  double total_power() const;
};

/// Per-slot channel realization. All gains are absolute (path loss applied).
struct ChannelState {
  std::vector<CVector> h;    // RRHs -> RUE k, length N*L_R
  std::vector<CVector> g;    // RRHs -> MUE m, length N*L_R
  std::vector<CVector> g0;   // MBS -> RUE k, length L_M
  std::vector<double> phi;   // MBS interference plus noise at RUE k (W)

  int num_rue() const { return static_cast<int>(h.size()); }
  int num_mue() const { return static_cast<int>(g.size()); }
};

struct Scenario {
  Topology topology;
  MbsBeamformers mbs;
  std::vector<CVector> mbs_mue_channel;  // slot-0 MBS -> MUE channels the MRT was built on
};

/// Large-scale gain (d/d0)^-eta with d clamped below at d0.
double path_loss(double d, const SystemConfig& config);

/// Circularly-symmetric complex Gaussian with unit variance.
cd complex_gaussian(Rng& rng);

/// Derives an independent stream from (seed, stream id).
Rng make_stream(std::uint64_t seed, std::uint64_t stream);

/// Places nodes and freezes the MBS beamformers as maximum-ratio transmission
/// toward each MUE's slot-0 channel with equal power p_mbs / K_M.
/// Throws std::invalid_argument on an invalid config.
Scenario build_scenario(const SystemConfig& config, std::uint64_t seed);

/// phi_k = sum_i |g0_k^H v0_i|^2 + sigma^2.
double mbs_interference_plus_noise(const CVector& g0, const MbsBeamformers& mbs,
                                   double noise_power);

/// Draws one block-fading realization: every entry is sqrt(PL(d)) * xi with xi
/// i.i.d. unit-variance Rayleigh, with |xi|^2 truncated at `fading_gain_cap`.
ChannelState draw_channels(const Topology& topology, const MbsBeamformers& mbs,
                           const SystemConfig& config, Rng& rng);

/// Upper bound on ||h_k||^2 used to cap achievable rates: every fading entry is
/// bounded by `fading_gain_cap`.
double channel_gain_cap(const Topology& topology, const SystemConfig& config);

}  // namespace hcran
