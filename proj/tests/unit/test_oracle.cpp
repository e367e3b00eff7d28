#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "hcran/oracle.hpp"
#include "hcran/wmmse.hpp"

using namespace hcran;

TEST_SUITE("oracle") {
  TEST_CASE("scalar closed form") {
    CHECK(oracle::scalar_closed_form(1.0, 0.0, 1.0, 0.1, 2.0) == 0.0);
    CHECK(oracle::scalar_closed_form(0.0, 1.0, 1.0, 0.1, 2.0) == 2.0);
    CHECK(oracle::scalar_closed_form(1e-9, 1.0, 1.0, 0.1, 2.0) == 2.0);
    CHECK(oracle::scalar_closed_form(1.0, 1.0, 1.0, 0.1, 2.0) == doctest::Approx(1.3427).epsilon(1e-4));
    CHECK(oracle::scalar_closed_form(1.0, 1.0, 1.0, 0.1, 1.0) == 1.0);
    CHECK(oracle::scalar_closed_form(10.0, 1.0, 1.0, 5.0, 2.0) == 0.0);
  }

  TEST_CASE("power grid agrees with the closed form") {
    Rng rng = make_stream(31, 4);
    std::uniform_real_distribution<double> u(0.1, 3.0);
    for (int i = 0; i < 20; ++i) {
      const double x = u(rng), y = u(rng), phi = 0.2 * u(rng), p_max = u(rng);
      const SlotProblem p = oracle::scalar_slot_problem(x, y, 1.0, phi, p_max);
      const double exact = oracle::scalar_closed_form(x, y, 1.0, phi, p_max);
      const oracle::GridResult g = oracle::grid_search_power(p, 1e-4);
      CHECK(std::abs(std::norm(g.beams[0][0]) - exact) <= 1e-4 + 1e-12);
      CHECK(g.objective <= 0.0);
    }
  }

  TEST_CASE("zero rate weight gives zero power on both grids") {
    const SlotProblem p = oracle::scalar_slot_problem(1.0, 0.0, 1.0, 0.1, 0.5);
    const oracle::GridResult g = oracle::grid_search_power(p, 1e-3);
    CHECK(g.objective == 0.0);
    CHECK(g.beams.is_zero());
    const oracle::GridResult s = oracle::grid_search_slot(p, 0.05);
    CHECK(s.objective == 0.0);
    CHECK(s.beams.is_zero());
  }

  TEST_CASE("coordinate grid lands within one step of a clipped optimum") {
    const double p_max = 0.25;
    const SlotProblem p = oracle::scalar_slot_problem(0.1, 5.0, 1.0, 0.05, p_max);
    const oracle::GridResult g = oracle::grid_search_slot(p, 0.01);
    CHECK(std::abs(std::abs(g.beams[0][0]) - std::sqrt(p_max)) <= 0.01 * std::sqrt(2.0));
    CHECK(g.evaluated > 0);
  }

  TEST_CASE("grid searches reject unsupported shapes") {
    SystemConfig c;
    Rng rng = make_stream(32, 4);
    const auto [p, start] = oracle::random_slot_problem(c, rng);
    CHECK_THROWS_AS(oracle::grid_search_slot(p, 0.1), std::invalid_argument);
    CHECK_THROWS_AS(oracle::grid_search_power(p, 0.1), std::invalid_argument);
    const SlotProblem s = oracle::scalar_slot_problem(1.0, 1.0, 1.0, 0.1, 1.0);
    CHECK_THROWS_AS(oracle::grid_search_power(s, 0.0), std::invalid_argument);
  }

  TEST_CASE("Monte-Carlo MSE") {
    const int n = 100000;
    Rng rng = make_stream(33, 4);
    SystemConfig c;
    const auto [p, start] = oracle::random_slot_problem(c, rng);

    // u = 0 leaves only the symbol: MSE 1.
    CHECK(std::abs(oracle::monte_carlo_mse(0, 0.0, p.channels, start, n, rng) - 1.0) <=
          3.0 / std::sqrt(n));

    // v = 0 leaves noise plus the symbol: |u|^2 phi + 1.
    const BeamformerSet zero(c.num_rue, c.num_rrh, c.antennas_rrh);
    const cd u(0.5 / std::sqrt(p.channels.phi[1]), 0.0);
    const double expected = std::norm(u) * p.channels.phi[1] + 1.0;
    CHECK(oracle::monte_carlo_mse(1, u, p.channels, zero, n, rng) ==
          doctest::Approx(expected).epsilon(0.02));

    for (int k = 0; k < c.num_rue; ++k) {
      const cd mmse = update_receiver(k, p.channels, start);
      const double closed = compute_mse(k, mmse, p.channels, start);
      CHECK(std::abs(oracle::monte_carlo_mse(k, mmse, p.channels, start, n, rng) - closed) <=
            0.01 * closed + 3.0 * closed / std::sqrt(n));
    }
    CHECK_THROWS_AS(oracle::monte_carlo_mse(0, 0.0, p.channels, start, 100, rng),
                    std::invalid_argument);
  }

  TEST_CASE("random instance generators") {
    Rng rng = make_stream(34, 4);
    const qcqp::QcqpProblem q = oracle::random_qcqp(3, 2, 5, rng);
    CHECK_NOTHROW(q.validate());
    CHECK(q.constraints.size() == 5);
    for (const auto& con : q.constraints) {
      CHECK(con.cap >= 0.1);
      CHECK(con.cap <= 2.0);
    }
    SystemConfig c;
    const auto [p, start] = oracle::random_slot_problem(c, rng, 10.0);
    CHECK(p.num_rue() == c.num_rue);
    for (int k = 0; k < c.num_rue; ++k) CHECK(p.y[k] >= 0.0);
    CHECK(worst_relative_slack(p, start, p.beta, p.rate_prev) >= -1e-12);
  }
}
