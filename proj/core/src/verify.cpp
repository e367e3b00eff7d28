#include "hcran/verify.hpp"

#include <cmath>
#include <functional>
#include <ostream>
#include <sstream>

#include "hcran/controller.hpp"
#include "hcran/harness.hpp"
#include "hcran/oracle.hpp"
#include "hcran/qcqp.hpp"
#include "hcran/wmmse.hpp"

namespace hcran {

namespace {

CheckResult check(const std::string& name, const std::function<bool(std::ostream&)>& body) {
  CheckResult r;
  r.name = name;
  std::ostringstream detail;
  try {
    r.passed = body(detail);
  } catch (const std::exception& e) {
    r.passed = false;
    detail << "exception: " << e.what();
  }
  r.detail = detail.str();
  return r;
}

}  // namespace

std::vector<CheckResult> verification_suite() {
  std::vector<CheckResult> out;

  out.push_back(check("scalar closed form matches a 1-D power grid", [](std::ostream& d) {
    const double p = oracle::scalar_closed_form(1.0, 1.0, 1.0, 0.1, 2.0);
    const SlotProblem prob = oracle::scalar_slot_problem(1.0, 1.0, 1.0, 0.1, 2.0);
    const oracle::GridResult g = oracle::grid_search_power(prob, 1e-4);
    const double grid_p = std::norm(g.beams[0][0]);
    d << "closed form " << p << ", grid " << grid_p;
    return std::abs(p - (1.0 / std::log(2.0) - 0.1)) < 1e-12 && std::abs(grid_p - p) <= 1e-4;
  }));

  out.push_back(check("WMMSE on the scalar instance is within 1% of the grid oracle",
                      [](std::ostream& d) {
    SystemConfig cfg;
    cfg.num_rrh = cfg.num_rue = cfg.num_mue = cfg.antennas_rrh = 1;
    cfg.p_max = 0.22;
    const SlotProblem prob = oracle::scalar_slot_problem(20.0, 10.0, 1.0, 0.6, cfg.p_max);
    BeamformerSet init(1, 1, 1);
    init[0][0] = std::sqrt(cfg.p_max / 2);
    const WmmseResult r = run_algorithm1(prob, init, cfg);
    const double grid = oracle::grid_search_power(prob, 1e-4).objective;
    const double f = prob.objective(r.beams);
    d << "wmmse " << f << ", grid " << grid;
    return std::abs(f - grid) <= 0.01 * std::abs(grid);
  }));

  out.push_back(check("QCQP clips the 1-D optimum at the cap", [](std::ostream& d) {
    qcqp::QcqpProblem p;
    p.num_blocks = 1;
    p.block_dim = 1;
    p.quad = {CMatrix::Identity(1, 1)};
    p.linear = {CVector::Ones(1)};
    p.constraints = {{qcqp::ConstraintKind::Power, 0, 0.25, {CMatrix::Identity(1, 1)}}};
    const qcqp::QcqpSolution s = qcqp::solve(p);
    d << "x = " << s.x[0][0] << ", kkt " << s.kkt_residual;
    return std::abs(s.x[0][0] - cd(0.5)) <= 1e-6 && s.status == qcqp::Status::Optimal;
  }));

  out.push_back(check("QCQP KKT certificate on random instances", [](std::ostream& d) {
    Rng rng = make_stream(7, 0);
    double worst = 0;
    for (int i = 0; i < 30; ++i) {
      const qcqp::QcqpProblem p = oracle::random_qcqp(3, 3, 4, rng);
      const qcqp::QcqpSolution s = qcqp::solve(p);
      worst = std::max(worst, s.kkt_residual);
      if (s.status != qcqp::Status::Optimal) {
        d << "instance " << i << " status " << qcqp::to_string(s.status);
        return false;
      }
    }
    d << "worst KKT residual " << worst;
    return worst <= 1e-6;
  }));

  out.push_back(check("WMMSE surrogate descent, duality and feasibility", [](std::ostream& d) {
    SystemConfig cfg;
    Rng rng = make_stream(11, 0);
    double worst_rise = 0, worst_dual = 0, worst_rate = 0, worst_slack = 1;
    for (int i = 0; i < 20; ++i) {
      const auto [prob, start] = oracle::random_slot_problem(cfg, rng);
      const WmmseResult r = run_algorithm1(prob, start, cfg);
      for (std::size_t t = 1; t < r.surrogate_history.size(); ++t)
        worst_rise = std::max(worst_rise, r.surrogate_history[t] - r.surrogate_history[t - 1]);
      for (int k = 0; k < prob.num_rue(); ++k) {
        worst_dual = std::max(worst_dual, std::abs(r.state.w[k] * r.state.e[k] - 1.0));
        worst_rate = std::max(worst_rate, std::abs(r.metrics.rate[k] + std::log2(r.state.e[k])));
      }
      worst_slack = std::min(worst_slack, r.worst_relative_slack);
    }
    d << "rise " << worst_rise << ", |we-1| " << worst_dual << ", |R+log2 e| " << worst_rate
      << ", slack " << worst_slack;
    return worst_rise <= 1e-9 && worst_dual <= 1e-6 && worst_rate <= 1e-9 && worst_slack >= -1e-6;
  }));

  out.push_back(check("closed-form MSE matches a Monte-Carlo estimate", [](std::ostream& d) {
    SystemConfig cfg;
    Rng rng = make_stream(13, 0);
    const auto [prob, start] = oracle::random_slot_problem(cfg, rng);
    const cd u = update_receiver(0, prob.channels, start) * cd(0.7, 0.2);
    const double closed = compute_mse(0, u, prob.channels, start);
    const double mc = oracle::monte_carlo_mse(0, u, prob.channels, start, 100000, rng);
    d << "closed " << closed << ", Monte-Carlo " << mc;
    return std::abs(mc - closed) <= 0.01 * closed;
  }));

  out.push_back(check("drift bound and constraints hold along a trajectory", [](std::ostream& d) {
    SystemConfig cfg;
    cfg.slots = 200;
    const Trajectory t = run_trajectory(cfg, TrafficConfig::uniform(cfg.num_rue, 2.0), 3, false);
    d << "drift pass rate " << t.summary.drift_pass_rate << ", worst slack "
      << t.summary.worst_relative_slack;
    return t.summary.drift_pass_rate == 1.0 && t.summary.worst_relative_slack >= -1e-6;
  }));

  return out;
}

bool run_verification(std::ostream& out) {
  bool all = true;
  for (const auto& r : verification_suite()) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.detail.empty()) out << " (" << r.detail << ")";
    out << '\n';
    all = all && r.passed;
  }
  out << (all ? "all checks passed" : "some checks failed") << '\n';
  return all;
}

}  // namespace hcran
