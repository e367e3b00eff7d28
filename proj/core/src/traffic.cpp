#include "hcran/traffic.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace hcran {

namespace {

void require_nonnegative(double x, const char* what) {
  if (!(x >= 0) || !std::isfinite(x))
    throw std::invalid_argument(std::string(what) + " must be finite and >= 0");
}

}  // namespace

QueueState QueueState::empty(int num_rue, int num_rrh) {
  QueueState s;
  s.q.assign(static_cast<std::size_t>(num_rue), 0.0);
  s.h.assign(static_cast<std::size_t>(num_rrh), 0.0);
  s.a.assign(static_cast<std::size_t>(num_rue), 0.0);
  return s;
}

double QueueState::total_backlog() const { return std::accumulate(q.begin(), q.end(), 0.0); }

std::vector<double> draw_arrivals(const TrafficConfig& traffic, Rng& rng) {
  std::vector<double> a(traffic.lambda.size(), 0.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double lambda = traffic.lambda[k];
    switch (traffic.law) {
      case TrafficConfig::Law::Uniform:
        // Draw even when lambda is zero so streams stay aligned across configs.
        a[k] = 2.0 * lambda * unit(rng);
        break;
      case TrafficConfig::Law::Constant:
        a[k] = lambda;
        break;
    }
  }
  return a;
}

double update_actual_queue(double q, double rate, double arrival) {
  require_nonnegative(q, "queue backlog");
  require_nonnegative(rate, "service rate");
  require_nonnegative(arrival, "arrival");
  return std::max(q - rate, 0.0) + arrival;
}

double update_virtual_queue(double h, double power, double p_avg) {
  require_nonnegative(h, "virtual backlog");
  require_nonnegative(power, "power");
  require_nonnegative(p_avg, "average power cap");
  return std::max(h - p_avg + power, 0.0);
}

double stability_slope(std::span<const double> trace, double window_fraction) {
  if (trace.size() < 100)
    throw std::invalid_argument("stability_slope needs at least 100 slots, got " +
                                std::to_string(trace.size()));
  if (!(window_fraction > 0 && window_fraction <= 1))
    throw std::invalid_argument("window_fraction must lie in (0, 1]");
  const std::size_t n = trace.size();
  const std::size_t window =
      std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(window_fraction * n)));
  double sum = 0;
  for (std::size_t i = n - window; i < n; ++i) sum += std::abs(trace[i]) / static_cast<double>(i + 1);
  return sum / static_cast<double>(window);
}

}  // namespace hcran
