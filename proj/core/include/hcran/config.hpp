#pragma once

#include <cstdint>
#include <limits>
#include <map>
#include <string>
#include <vector>

namespace hcran {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Scenario constants for one downlink H-CRAN: one macro base station (MBS)
/// overlaid with `num_rrh` remote radio heads serving `num_rue` users, while
/// the MBS serves `num_mue` users with fixed beamformers.
///
/// Defaults reproduce the small-scale simulation setup (1 MBS, 2 RRHs,
/// 4 MUEs, 4 RUEs, 2 antennas each, -174 dBm/Hz, path loss exponent 4,
/// 0.22 W peak / 0.2 W average RRH power, 20 W MBS power).
struct SystemConfig {
  // Topology sizes.
  int num_rrh = 2;
  int num_mbs = 1;
  int num_rue = 4;
  int num_mue = 4;
  int antennas_rrh = 2;
  int antennas_mbs = 2;

  // Power, fronthaul and interference caps.
  double p_max = 0.22;                  // W, per RRH, per slot
  double p_avg = 0.2;                   // W, per RRH, time average
  double p_mbs = 20.0;                  // W, total MBS transmit power
  double fronthaul_cap = kInfinity;     // bit/slot/Hz per RRH
  double interference_cap = 1e-9;       // W, per MUE

  // Weighted EE utility and Lyapunov tradeoff.
  double alpha = 0.5;
  std::vector<double> rate_weights;     // omega_k; empty means all 1
  std::vector<double> power_weights;    // mu_n (1/W); empty means all `default_power_weight`
  double default_power_weight = 200.0;
  std::vector<double> trad_rate_weights;   // omega'_k of the ratio EE; empty means all 1
  std::vector<double> trad_power_weights;  // mu'_n of the ratio EE; empty means all 1
  double tradeoff_v = 50.0;

  // Radio.
  double noise_psd_dbm = -174.0;        // dBm/Hz
  double bandwidth_hz = 10e6;
  double pathloss_exponent = 4.0;

  // Geometry (meters). MBS sits at the origin.
  double area_radius = 500.0;
  double reference_distance = 1.0;
  double rrh_min_radius = 250.0;        // RRHs uniform in the annulus [rrh_min_radius, rrh_max_radius]
  double rrh_max_radius = 450.0;
  double rue_cluster_radius = 40.0;     // <= 0 places RUEs uniformly in the whole disk
  double rue_min_distance = 10.0;
  double mue_min_rrh_distance = 150.0;

  // Solver.
  double convergence_tol = 1e-4;        // relative, on eta_EE between WMMSE iterations
  double l1_reg = 0.0;                  // <= 0 means 1e-6 * p_max
  double active_link_threshold = 0.0;   // <= 0 means 1e-6 * p_max
  int max_wmmse_iters = 100;
  double qcqp_tol = 1e-6;
  int qcqp_max_iters = 500;
  double fading_gain_cap = 30.0;        // per-entry |xi|^2 cap used for R_max

  // Run control.
  int slots = 5000;
  double warmup_fraction = 0.1;
  std::uint64_t rng_seed = 1;

  /// Noise power in watts over the configured bandwidth.
  double noise_power() const;
  double kappa_reg() const;
  double epsilon_active() const;
  double omega(int k) const;
  double mu(int n) const;
  double trad_omega(int k) const;
  double trad_mu(int n) const;
  /// Complex length of one network-wide beamformer, N * L_R.
  int stacked_dim() const { return num_rrh * antennas_rrh; }

  /// Throws std::invalid_argument describing the first violated invariant.
  void validate() const;
};

/// Mean arrival rates per RUE (bit/slot/Hz). Arrivals are i.i.d. over slots.
struct TrafficConfig {
  enum class Law { Uniform, Constant };

  std::vector<double> lambda;  // one per RUE
  double a_max = 0.0;          // <= 0 means derived as 2 * max(lambda)
  Law law = Law::Uniform;

  static TrafficConfig uniform(int num_rue, double lambda);
  double peak() const;
  void validate(int num_rue) const;
};

struct ConfigBundle {
  SystemConfig system;
  TrafficConfig traffic;
};

/// Parses flat `key = value` text; `#` starts a comment. Vector keys take
/// comma-separated values. Unknown keys are rejected.
ConfigBundle parse_config(const std::string& text);
ConfigBundle load_config(const std::string& path);

/// Applies one key to a bundle; used by the file parser and by environment
/// overrides.
void apply_config_key(ConfigBundle& bundle, const std::string& key,
                      const std::string& value);

/// Applies every `HCRAN_<KEY>` variable from `env` (key lowercased).
void apply_env_overrides(ConfigBundle& bundle,
                         const std::map<std::string, std::string>& env);
/// Same, reading the process environment.
void apply_process_env_overrides(ConfigBundle& bundle);

std::string to_config_text(const ConfigBundle& bundle);

}  // namespace hcran
