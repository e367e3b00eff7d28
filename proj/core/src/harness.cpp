#include "hcran/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "hcran/controller.hpp"
#include "hcran/metrics.hpp"
#include "hcran/scenario.hpp"
#include "hcran/traffic.hpp"
#include "hcran/wmmse.hpp"

namespace hcran {

namespace {

constexpr const char* kSummaryHeader =
    "run_id,V,lambda,fronthaul_cap,slots,avg_queue_total,avg_power_mean,avg_eta_ee,"
    "avg_eta_ee_trad,stability_slope,pct_slots_converged,drift_pass_rate";

constexpr std::uint64_t kChannelStream = 1;
constexpr std::uint64_t kArrivalStream = 2;

std::string run_label(double v, double lambda, double cap) {
  return "V" + format_number(v) + "_lambda" + format_number(lambda) + "_cap" + format_number(cap);
}

double mean_lambda(const TrafficConfig& traffic) {
  if (traffic.lambda.empty()) return 0;
  double s = 0;
  for (double l : traffic.lambda) s += l;
  return s / static_cast<double>(traffic.lambda.size());
}

void run_parallel(std::size_t count, int jobs, const std::function<void(std::size_t)>& task) {
  const std::size_t workers = std::min<std::size_t>(count, static_cast<std::size_t>(std::max(1, jobs)));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w)
    pool.emplace_back([&, w] {
      try {
        for (std::size_t i = next++; i < count; i = next++) task(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

std::vector<std::string> split(const std::string& line, char sep) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, sep)) out.push_back(cell);
  if (!line.empty() && line.back() == sep) out.emplace_back();
  return out;
}

double parse_number(const std::string& s) {
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size())
    throw std::invalid_argument("malformed CSV number '" + s + "'");
  return v;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

Trajectory run_trajectory(const SystemConfig& config, const TrafficConfig& traffic,
                          std::uint64_t seed, bool keep_trace) {
  config.validate();
  traffic.validate(config.num_rue);
  const Scenario scenario = build_scenario(config, seed);
  Rng channel_rng = make_stream(seed, kChannelStream);
  Rng arrival_rng = make_stream(seed, kArrivalStream);
  const BoundConstants bound =
      compute_bound_b(config, traffic, channel_gain_cap(scenario.topology, config));

  const int slots = config.slots;
  const int warmup = static_cast<int>(std::floor(config.warmup_fraction * slots));
  const int counted = std::max(1, slots - warmup);

  Trajectory out;
  RunSummary& s = out.summary;
  s.v = config.tradeoff_v;
  s.lambda = mean_lambda(traffic);
  s.fronthaul_cap = config.fronthaul_cap;
  s.slots = slots;
  s.seed = seed;
  s.run_id = run_label(s.v, s.lambda, s.fronthaul_cap) + "_seed" + std::to_string(seed);
  s.avg_power.assign(static_cast<std::size_t>(config.num_rrh), 0.0);

  std::vector<std::vector<double>> q_trace(static_cast<std::size_t>(config.num_rue));
  std::vector<std::vector<double>> h_trace(static_cast<std::size_t>(config.num_rrh));
  std::vector<double> rate_sum(static_cast<std::size_t>(config.num_rue), 0.0);
  double queue_sum = 0, eta_sum = 0;
  int converged = 0, drift_pass = 0;
  long long iter_sum = 0;

  QueueState queues = QueueState::empty(config.num_rue, config.num_rrh);
  BeamformerSet previous;
  for (int t = 0; t < slots; ++t) {
    const ChannelState channels = draw_channels(scenario.topology, scenario.mbs, config, channel_rng);
    const std::vector<double> arrivals = draw_arrivals(traffic, arrival_rng);
    const BeamformerSet start =
        t == 0 ? initial_beams(channels, config) : warm_start(previous, channels, config);
    const SlotProblem problem = build_slot_problem(queues, channels, config, start);
    const WmmseResult res = run_algorithm1(problem, start, config);

    QueueState next = queues;
    next.a = arrivals;
    for (int k = 0; k < config.num_rue; ++k)
      next.q[k] = update_actual_queue(queues.q[k], res.metrics.rate[k], arrivals[k]);
    for (int n = 0; n < config.num_rrh; ++n)
      next.h[n] = update_virtual_queue(queues.h[n], res.metrics.power[n], config.p_avg);

    const DriftCheck drift =
        check_drift_inequality(queues, next, res.metrics.rate, arrivals, res.metrics.power,
                               res.metrics.eta_ee, config.tradeoff_v, config.p_avg, bound.b);
    drift_pass += drift.holds ? 1 : 0;
    converged += res.converged ? 1 : 0;
    iter_sum += res.iterations;
    s.solver_fallbacks += res.solver_fallbacks;
    s.worst_relative_slack = std::min(s.worst_relative_slack, res.worst_relative_slack);
    for (std::size_t i = 1; i < res.surrogate_history.size(); ++i)
      s.max_surrogate_increase = std::max(
          s.max_surrogate_increase, res.surrogate_history[i] - res.surrogate_history[i - 1]);

    queues = std::move(next);
    for (int k = 0; k < config.num_rue; ++k) q_trace[k].push_back(queues.q[k]);
    for (int n = 0; n < config.num_rrh; ++n) h_trace[n].push_back(queues.h[n]);
    if (t >= warmup) {
      queue_sum += queues.total_backlog();
      eta_sum += res.metrics.eta_ee;
      for (int n = 0; n < config.num_rrh; ++n) s.avg_power[n] += res.metrics.power[n];
      for (int k = 0; k < config.num_rue; ++k) rate_sum[k] += res.metrics.rate[k];
    }
    if (keep_trace)
      out.trace.push_back({t, queues.q, queues.h, res.metrics.rate, res.metrics.power,
                           res.metrics.eta_ee});
    previous = res.beams;
  }

  s.avg_queue_total = queue_sum / counted;
  s.avg_eta_ee = eta_sum / counted;
  double weighted_power = 0, weighted_rate = 0;
  for (int n = 0; n < config.num_rrh; ++n) {
    s.avg_power[n] /= counted;
    s.avg_power_mean += s.avg_power[n] / config.num_rrh;
    weighted_power += config.trad_mu(n) * s.avg_power[n];
  }
  for (int k = 0; k < config.num_rue; ++k)
    weighted_rate += config.trad_omega(k) * rate_sum[k] / counted;
  s.avg_eta_ee_trad = weighted_power > 0 ? weighted_rate / weighted_power
                                         : std::numeric_limits<double>::quiet_NaN();
  if (slots >= 100) {
    for (const auto& tr : q_trace) s.stability_slope = std::max(s.stability_slope, stability_slope(tr));
    for (const auto& tr : h_trace) s.stability_slope = std::max(s.stability_slope, stability_slope(tr));
  } else {
    s.stability_slope = std::numeric_limits<double>::quiet_NaN();
  }
  s.pct_slots_converged = slots > 0 ? static_cast<double>(converged) / slots : 0.0;
  s.drift_pass_rate = slots > 0 ? static_cast<double>(drift_pass) / slots : 0.0;
  s.mean_wmmse_iters = slots > 0 ? static_cast<double>(iter_sum) / slots : 0.0;
  return out;
}

RunSummary average_over_seeds(const std::vector<RunSummary>& runs) {
  if (runs.empty()) throw std::invalid_argument("cannot average an empty set of runs");
  RunSummary a;
  const RunSummary& first = runs.front();
  a.v = first.v;
  a.lambda = first.lambda;
  a.fronthaul_cap = first.fronthaul_cap;
  a.slots = first.slots;
  a.seed = first.seed;
  a.run_id = run_label(a.v, a.lambda, a.fronthaul_cap) + "_mean";
  a.avg_power.assign(first.avg_power.size(), 0.0);
  const double n = static_cast<double>(runs.size());
  for (const auto& r : runs) {
    if (r.v != a.v || r.lambda != a.lambda || r.fronthaul_cap != a.fronthaul_cap)
      throw std::invalid_argument("averaged runs must share V, lambda and fronthaul cap");
    a.avg_queue_total += r.avg_queue_total / n;
    for (std::size_t i = 0; i < a.avg_power.size() && i < r.avg_power.size(); ++i)
      a.avg_power[i] += r.avg_power[i] / n;
    a.avg_power_mean += r.avg_power_mean / n;
    a.avg_eta_ee += r.avg_eta_ee / n;
    a.avg_eta_ee_trad += r.avg_eta_ee_trad / n;
    a.pct_slots_converged += r.pct_slots_converged / n;
    a.drift_pass_rate += r.drift_pass_rate / n;
    a.mean_wmmse_iters += r.mean_wmmse_iters / n;
    a.stability_slope = std::max(a.stability_slope, r.stability_slope);
    a.worst_relative_slack = std::min(a.worst_relative_slack, r.worst_relative_slack);
    a.max_surrogate_increase = std::max(a.max_surrogate_increase, r.max_surrogate_increase);
    a.solver_fallbacks += r.solver_fallbacks;
  }
  return a;
}

SweepResult sweep(const SystemConfig& config, const TrafficConfig& traffic,
                  const std::vector<double>& v_list, const std::vector<double>& lambda_list,
                  int seeds, int jobs) {
  if (v_list.empty() || lambda_list.empty() || seeds < 1)
    throw std::invalid_argument("sweep needs nonempty V and lambda lists and seeds >= 1");
  struct Job {
    SystemConfig config;
    TrafficConfig traffic;
    std::uint64_t seed;
  };
  std::vector<Job> work;
  for (double lambda : lambda_list)
    for (double v : v_list)
      for (int i = 0; i < seeds; ++i) {
        Job j{config, traffic, config.rng_seed + static_cast<std::uint64_t>(i)};
        j.config.tradeoff_v = v;
        j.traffic.lambda.assign(static_cast<std::size_t>(config.num_rue), lambda);
        work.push_back(std::move(j));
      }

  SweepResult result;
  result.runs.resize(work.size());
  run_parallel(work.size(), jobs, [&](std::size_t i) {
    result.runs[i] = run_trajectory(work[i].config, work[i].traffic, work[i].seed, false).summary;
  });
  for (std::size_t i = 0; i < result.runs.size(); i += static_cast<std::size_t>(seeds))
    result.averaged.push_back(average_over_seeds(
        {result.runs.begin() + static_cast<std::ptrdiff_t>(i),
         result.runs.begin() + static_cast<std::ptrdiff_t>(i + seeds)}));
  return result;
}

FronthaulComparison compare_fronthaul(const SystemConfig& config, const TrafficConfig& traffic,
                                      double cap, const std::vector<double>& v_list, int seeds,
                                      int jobs) {
  if (!std::isfinite(cap) || !(cap > 0))
    throw std::invalid_argument("fronthaul comparison needs a finite positive cap");
  SystemConfig constrained = config;
  constrained.fronthaul_cap = cap;
  SystemConfig ideal = config;
  ideal.fronthaul_cap = kInfinity;

  const double lambda = mean_lambda(traffic);
  FronthaulComparison out;
  SweepResult c = sweep(constrained, traffic, v_list, {lambda}, seeds, jobs);
  SweepResult i = sweep(ideal, traffic, v_list, {lambda}, seeds, jobs);
  out.constrained = std::move(c.averaged);
  out.constrained_runs = std::move(c.runs);
  out.ideal = std::move(i.averaged);
  out.ideal_runs = std::move(i.runs);
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<RunSummary>& table) {
  out << kSummaryHeader << '\n';
  for (const auto& r : table) {
    if (r.run_id.find_first_of(",\n\"") != std::string::npos)
      throw std::invalid_argument("run_id must not contain commas, quotes or newlines");
    out << r.run_id << ',' << format_number(r.v) << ',' << format_number(r.lambda) << ','
        << format_number(r.fronthaul_cap) << ',' << r.slots << ','
        << format_number(r.avg_queue_total) << ',' << format_number(r.avg_power_mean) << ','
        << format_number(r.avg_eta_ee) << ',' << format_number(r.avg_eta_ee_trad) << ','
        << format_number(r.stability_slope) << ',' << format_number(r.pct_slots_converged) << ','
        << format_number(r.drift_pass_rate) << '\n';
  }
}

std::vector<RunSummary> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || strip_cr(line) != kSummaryHeader)
    throw std::invalid_argument("summary CSV: unexpected header");
  std::vector<RunSummary> table;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != 12)
      throw std::invalid_argument("summary CSV: expected 12 fields, got " + std::to_string(f.size()));
    RunSummary r;
    r.run_id = f[0];
    r.v = parse_number(f[1]);
    r.lambda = parse_number(f[2]);
    r.fronthaul_cap = parse_number(f[3]);
    r.slots = static_cast<int>(parse_number(f[4]));
    r.avg_queue_total = parse_number(f[5]);
    r.avg_power_mean = parse_number(f[6]);
    r.avg_eta_ee = parse_number(f[7]);
    r.avg_eta_ee_trad = parse_number(f[8]);
    r.stability_slope = parse_number(f[9]);
    r.pct_slots_converged = parse_number(f[10]);
    r.drift_pass_rate = parse_number(f[11]);
    table.push_back(std::move(r));
  }
  return table;
}

void write_trace_csv(std::ostream& out, const std::vector<SlotRecord>& trace, int num_rue,
                     int num_rrh) {
  out << "slot";
  for (int k = 1; k <= num_rue; ++k) out << ",Q_" << k;
  for (int n = 1; n <= num_rrh; ++n) out << ",H_" << n;
  for (int k = 1; k <= num_rue; ++k) out << ",R_" << k;
  for (int n = 1; n <= num_rrh; ++n) out << ",P_" << n;
  out << ",eta_ee\n";
  for (const auto& r : trace) {
    if (static_cast<int>(r.q.size()) != num_rue || static_cast<int>(r.rate.size()) != num_rue ||
        static_cast<int>(r.h.size()) != num_rrh || static_cast<int>(r.power.size()) != num_rrh)
      throw std::invalid_argument("trace row dimensions do not match the header");
    out << r.slot;
    for (double x : r.q) out << ',' << format_number(x);
    for (double x : r.h) out << ',' << format_number(x);
    for (double x : r.rate) out << ',' << format_number(x);
    for (double x : r.power) out << ',' << format_number(x);
    out << ',' << format_number(r.eta_ee) << '\n';
  }
}

std::vector<SlotRecord> read_trace_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::invalid_argument("trace CSV: missing header");
  const auto header = split(strip_cr(line), ',');
  int num_rue = 0, num_rrh = 0;
  for (const auto& h : header) {
    if (h.rfind("Q_", 0) == 0) ++num_rue;
    if (h.rfind("H_", 0) == 0) ++num_rrh;
  }
  std::ostringstream expected;
  write_trace_csv(expected, {}, num_rue, num_rrh);
  if (strip_cr(line) + "\n" != expected.str())
    throw std::invalid_argument("trace CSV: unexpected header");

  const std::size_t width = 2 + 2 * static_cast<std::size_t>(num_rue + num_rrh);
  std::vector<SlotRecord> trace;
  while (std::getline(in, line)) {
    line = strip_cr(line);
    if (line.empty()) continue;
    const auto f = split(line, ',');
    if (f.size() != width) throw std::invalid_argument("trace CSV: wrong field count");
    SlotRecord r;
    r.slot = static_cast<int>(parse_number(f[0]));
    std::size_t i = 1;
    for (int k = 0; k < num_rue; ++k) r.q.push_back(parse_number(f[i++]));
    for (int n = 0; n < num_rrh; ++n) r.h.push_back(parse_number(f[i++]));
    for (int k = 0; k < num_rue; ++k) r.rate.push_back(parse_number(f[i++]));
    for (int n = 0; n < num_rrh; ++n) r.power.push_back(parse_number(f[i++]));
    r.eta_ee = parse_number(f[i]);
    trace.push_back(std::move(r));
  }
  return trace;
}

void emit_summary_csv(const std::string& path, const std::vector<RunSummary>& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_summary_csv(out, table);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void emit_trace_csv(const std::string& path, const std::vector<SlotRecord>& trace, int num_rue,
                    int num_rrh) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path + " for writing");
  write_trace_csv(out, trace, num_rue, num_rrh);
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace hcran
