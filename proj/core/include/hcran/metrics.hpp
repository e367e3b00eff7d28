#pragma once

#include <span>
#include <string>
#include <vector>

#include "hcran/config.hpp"
#include "hcran/scenario.hpp"

namespace hcran {

/// Network-wide beamformers v_k (length N*L_R each). The block of RRH n for
/// RUE k is entries [n*L_R, (n+1)*L_R) of v_k.
class BeamformerSet {
 public:
  BeamformerSet() = default;
  BeamformerSet(int num_rue, int num_rrh, int antennas_rrh);

  static BeamformerSet zeros(const SystemConfig& config);

  int num_rue() const { return static_cast<int>(v_.size()); }
  int num_rrh() const { return num_rrh_; }
  int antennas() const { return antennas_; }
  int stacked_dim() const { return num_rrh_ * antennas_; }

  CVector& operator[](int k) { return v_[static_cast<std::size_t>(k)]; }
  const CVector& operator[](int k) const { return v_[static_cast<std::size_t>(k)]; }

  auto block(int n, int k) { return (*this)[k].segment(n * antennas_, antennas_); }
  auto block(int n, int k) const { return (*this)[k].segment(n * antennas_, antennas_); }

  /// ||v_{n,k}||^2
  double block_power(int n, int k) const { return block(n, k).squaredNorm(); }
  double total_power() const;
  bool is_zero() const;

  void scale(double factor);

 private:
  int num_rrh_ = 0;
  int antennas_ = 0;
  std::vector<CVector> v_;
};

/// Power/direction split v = ||v|| * unit; unit is zero when v is zero.
struct PolarBeam {
  double norm = 0;
  CVector unit;
};

PolarBeam decompose(const CVector& v);
CVector recompose(const PolarBeam& p);

/// Everything measured on one slot's action.
struct SlotMetrics {
  std::vector<double> rate;          // R_k, bit/slot/Hz
  std::vector<double> power;         // P_n, W
  double eta_ee = 0;                 // weighted EE utility
  double eta_ee_trad = 0;            // bit/Hz/J; NaN when total weighted power is zero
  std::vector<double> interference;  // W at each MUE
  std::vector<double> fronthaul;     // bit/slot/Hz per RRH
  int wmmse_iters = 0;
  std::string solver_status;
};

/// R_k = log2(1 + |h_k^H v_k|^2 / (sum_{j != k} |h_k^H v_j|^2 + phi_k)).
double compute_rate(int k, const ChannelState& channels, const BeamformerSet& beams);
std::vector<double> compute_rates(const ChannelState& channels, const BeamformerSet& beams);

/// P_n = sum_k ||v_{n,k}||^2.
double compute_power(int n, const BeamformerSet& beams);
std::vector<double> compute_powers(const BeamformerSet& beams);

/// (alpha/K_R) sum omega_k R_k - ((1-alpha)/N) sum mu_n P_n.
double compute_eta_ee(std::span<const double> rates, std::span<const double> powers,
                      const SystemConfig& config);

/// sum omega'_k R_k / sum mu'_n P_n. Throws std::domain_error when the
/// weighted power is zero.
double compute_eta_ee_traditional(std::span<const double> rates, std::span<const double> powers,
                                  const SystemConfig& config);

/// sum_j |g_m^H v_j|^2.
double compute_interference(int m, const ChannelState& channels, const BeamformerSet& beams);

/// sum_k 1{||v_{n,k}||^2 > eps_active} * R_k.
double compute_fronthaul(int n, std::span<const double> rates, const BeamformerSet& beams,
                         double eps_active);

SlotMetrics compute_slot_metrics(const ChannelState& channels, const BeamformerSet& beams,
                                 const SystemConfig& config);

}  // namespace hcran
