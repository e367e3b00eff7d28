#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hcran/scenario.hpp"

namespace hcran::qcqp {

enum class ConstraintKind { Power, Interference, Fronthaul, Generic };

const char* to_string(ConstraintKind kind);

/// sum_k x_k^H A_k x_k <= cap, with each A_k Hermitian positive semidefinite.
/// An empty (0x0) form means block k does not enter the constraint.
struct QuadraticConstraint {
  ConstraintKind kind = ConstraintKind::Generic;
  int index = 0;  // RRH or MUE index, for reporting
  double cap = 0;
  std::vector<CMatrix> forms;
};

/// minimize sum_k x_k^H M_k x_k - 2 Re{b_k^H x_k}
/// subject to the quadratic constraints, over K complex blocks of equal length.
///
/// Every M_k is Hermitian positive semidefinite and every cap is positive, so
/// the problem is convex and x = 0 is strictly feasible. Infinite caps are
/// allowed and simply never bind.
struct QcqpProblem {
  int num_blocks = 0;
  int block_dim = 0;
  std::vector<CMatrix> quad;
  std::vector<CVector> linear;
  std::vector<QuadraticConstraint> constraints;

  double objective(const std::vector<CVector>& x) const;
  double constraint_value(std::size_t i, const std::vector<CVector>& x) const;
  /// Throws std::invalid_argument on shape errors or non-Hermitian forms.
  void validate() const;
};

enum class Status { Optimal, MaxIters, NumericalFailure };

const char* to_string(Status status);

/// Scale-free KKT residuals. Objective terms are divided by the largest entry
/// of {M_k, b_k}; every constraint is divided by its cap.
struct KktReport {
  double stationarity = 0;
  double complementarity = 0;
  double primal_infeasibility = 0;
  double dual_infeasibility = 0;

  double max() const;
};

struct QcqpSolution {
  std::vector<CVector> x;
  double objective = 0;
  std::vector<double> slack;        // cap - value, per constraint
  std::vector<double> multipliers;  // in the problem's own units
  KktReport kkt;
  double kkt_residual = 0;
  Status status = Status::NumericalFailure;
  int iterations = 0;
};

struct Options {
  double tol = 1e-6;
  int max_iters = 500;
};

QcqpSolution solve(const QcqpProblem& problem, const Options& options = {});

/// Residuals of the KKT system at (x, multipliers), independent of the solver.
KktReport kkt_residuals(const QcqpProblem& problem, const std::vector<CVector>& x,
                        const std::vector<double>& multipliers);

struct FeasibilityReport {
  std::vector<double> slack;           // cap - value
  std::vector<double> relative_slack;  // slack / cap (1 for infinite caps)
  bool feasible = true;                // every relative slack >= -tol
  double worst_relative_slack = 1;
};

FeasibilityReport check_feasible(const std::vector<CVector>& x, const QcqpProblem& problem,
                                 double tol);

}  // namespace hcran::qcqp
