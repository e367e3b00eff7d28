#include "hcran/qcqp.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hcran::qcqp {

namespace {

using Eigen::LDLT;
using Eigen::LLT;
using Eigen::MatrixXd;
using Eigen::VectorXd;

// Complex Hermitian A (L x L) -> real symmetric [[Re A, -Im A], [Im A, Re A]],
// so that x^T S x = v^H A v for x = [Re v; Im v].
MatrixXd lift(const CMatrix& a) {
  const Eigen::Index l = a.rows();
  MatrixXd s(2 * l, 2 * l);
  s.topLeftCorner(l, l) = a.real();
  s.topRightCorner(l, l) = -a.imag();
  s.bottomLeftCorner(l, l) = a.imag();
  s.bottomRightCorner(l, l) = a.real();
  return s;
}

VectorXd lift(const CVector& v) {
  VectorXd x(2 * v.size());
  x.head(v.size()) = v.real();
  x.tail(v.size()) = v.imag();
  return x;
}

CVector unlift(const VectorXd& x) {
  const Eigen::Index l = x.size() / 2;
  CVector v(l);
  for (Eigen::Index i = 0; i < l; ++i) v[i] = cd(x[i], x[i + l]);
  return v;
}

// Normalized real form of a QcqpProblem: objective divided by `scale`, each
// finite constraint divided by its cap (so every cap is 1).
struct Lifted {
  int blocks = 0;
  int d = 0;
  std::vector<MatrixXd> m;
  std::vector<VectorXd> b;
  std::vector<std::size_t> source;           // original constraint index
  std::vector<std::vector<MatrixXd>> a;      // [constraint][block], empty = zero
  double scale = 1;

  int n() const { return blocks * d; }
  int constraints() const { return static_cast<int>(a.size()); }

  auto seg(VectorXd& x, int k) const { return x.segment(k * d, d); }
  auto seg(const VectorXd& x, int k) const { return x.segment(k * d, d); }

  double objective(const VectorXd& x) const {
    double f = 0;
    for (int k = 0; k < blocks; ++k) {
      const auto xk = seg(x, k);
      f += xk.dot(m[k] * xk) - 2.0 * b[k].dot(xk);
    }
    return f;
  }

  VectorXd objective_gradient(const VectorXd& x) const {
    VectorXd g(n());
    for (int k = 0; k < blocks; ++k) seg(g, k) = 2.0 * (m[k] * seg(x, k) - b[k]);
    return g;
  }

  double constraint(int i, const VectorXd& x) const {
    double v = 0;
    for (int k = 0; k < blocks; ++k) {
      const MatrixXd& form = a[i][k];
      if (form.size() == 0) continue;
      const auto xk = seg(x, k);
      v += xk.dot(form * xk);
    }
    return v - 1.0;
  }

  VectorXd constraint_gradient(int i, const VectorXd& x) const {
    VectorXd g = VectorXd::Zero(n());
    for (int k = 0; k < blocks; ++k) {
      const MatrixXd& form = a[i][k];
      if (form.size() == 0) continue;
      seg(g, k) = 2.0 * form * seg(x, k);
    }
    return g;
  }
};

Lifted lift_problem(const QcqpProblem& p) {
  Lifted l;
  l.blocks = p.num_blocks;
  l.d = 2 * p.block_dim;
  double scale = 0;
  for (const auto& mk : p.quad) scale = std::max(scale, mk.cwiseAbs().maxCoeff());
  for (const auto& bk : p.linear)
    if (bk.size() > 0) scale = std::max(scale, bk.cwiseAbs().maxCoeff());
  l.scale = scale > 0 ? scale : 1.0;
  for (int k = 0; k < p.num_blocks; ++k) {
    l.m.push_back(lift(p.quad[k]) / l.scale);
    l.b.push_back(lift(p.linear[k]) / l.scale);
  }
  for (std::size_t i = 0; i < p.constraints.size(); ++i) {
    const auto& c = p.constraints[i];
    if (!std::isfinite(c.cap)) continue;
    std::vector<MatrixXd> forms;
    for (const auto& f : c.forms) forms.push_back(f.size() == 0 ? MatrixXd() : MatrixXd(lift(f) / c.cap));
    l.a.push_back(std::move(forms));
    l.source.push_back(i);
  }
  return l;
}

KktReport kkt_lifted(const Lifted& l, const VectorXd& x, const VectorXd& lambda) {
  KktReport r;
  VectorXd grad = l.objective_gradient(x);
  for (int i = 0; i < l.constraints(); ++i) {
    const double q = l.constraint(i, x);
    grad += lambda[i] * l.constraint_gradient(i, x);
    r.complementarity = std::max(r.complementarity, std::abs(lambda[i] * q));
    r.primal_infeasibility = std::max(r.primal_infeasibility, q);
    r.dual_infeasibility = std::max(r.dual_infeasibility, -lambda[i]);
  }
  r.stationarity = grad.size() > 0 ? grad.cwiseAbs().maxCoeff() : 0.0;
  return r;
}

// Newton direction for (H + U diag(dw) U^T) dx = rhs with block-diagonal H.
class NewtonSystem {
 public:
  explicit NewtonSystem(const Lifted& l) : l_(l), chol_(static_cast<std::size_t>(l.blocks)) {}

  bool solve(const VectorXd& lambda, const MatrixXd& u, const VectorXd& dw_inv,
             const VectorXd& rhs, VectorXd& dx) {
    const int m = static_cast<int>(u.cols());
    bool blocks_ok = true;
    for (int k = 0; k < l_.blocks && blocks_ok; ++k) {
      MatrixXd h = 2.0 * l_.m[k];
      for (int i = 0; i < m; ++i)
        if (l_.a[i][k].size() != 0) h += 2.0 * lambda[i] * l_.a[i][k];
      chol_[k].compute(h);
      blocks_ok = chol_[k].info() == Eigen::Success;
    }
    if (blocks_ok) {
      // Woodbury: dx = H^-1 rhs - H^-1 U (D^-1 + U^T H^-1 U)^-1 U^T H^-1 rhs.
      VectorXd z(l_.n());
      MatrixXd y(l_.n(), m);
      for (int k = 0; k < l_.blocks; ++k) {
        z.segment(k * l_.d, l_.d) = chol_[k].solve(rhs.segment(k * l_.d, l_.d));
        if (m > 0) y.middleRows(k * l_.d, l_.d) = chol_[k].solve(u.middleRows(k * l_.d, l_.d));
      }
      if (m == 0) {
        dx = z;
      } else {
        MatrixXd s = u.transpose() * y;
        s.diagonal() += dw_inv;
        const LDLT<MatrixXd> sf(s);
        if (sf.info() != Eigen::Success) return false;
        dx = z - y * sf.solve(u.transpose() * z);
      }
      return dx.allFinite();
    }
    // Singular block Hessian: fall back to the dense system.
    MatrixXd full = MatrixXd::Zero(l_.n(), l_.n());
    for (int k = 0; k < l_.blocks; ++k) {
      MatrixXd h = 2.0 * l_.m[k];
      for (int i = 0; i < m; ++i)
        if (l_.a[i][k].size() != 0) h += 2.0 * lambda[i] * l_.a[i][k];
      full.block(k * l_.d, k * l_.d, l_.d, l_.d) = h;
    }
    for (int i = 0; i < m; ++i) full += (1.0 / dw_inv[i]) * u.col(i) * u.col(i).transpose();
    full.diagonal().array() += 1e-14 * std::max(1.0, full.diagonal().cwiseAbs().maxCoeff());
    const LDLT<MatrixXd> f(full);
    if (f.info() != Eigen::Success) return false;
    dx = f.solve(rhs);
    return dx.allFinite();
  }

 private:
  const Lifted& l_;
  std::vector<LLT<MatrixXd>> chol_;
};

// Unconstrained case: each block solves M_k x_k = b_k (least squares on a
// singular M_k).
VectorXd solve_unconstrained(const Lifted& l) {
  VectorXd x(l.n());
  for (int k = 0; k < l.blocks; ++k) {
    const Eigen::CompleteOrthogonalDecomposition<MatrixXd> cod(l.m[k]);
    l.seg(x, k) = cod.solve(l.b[k]);
  }
  return x;
}

}  // namespace

const char* to_string(ConstraintKind kind) {
  switch (kind) {
    case ConstraintKind::Power: return "power";
    case ConstraintKind::Interference: return "interference";
    case ConstraintKind::Fronthaul: return "fronthaul";
    case ConstraintKind::Generic: return "generic";
  }
  return "unknown";
}

const char* to_string(Status status) {
  switch (status) {
    case Status::Optimal: return "optimal";
    case Status::MaxIters: return "max_iters";
    case Status::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

double KktReport::max() const {
  return std::max({stationarity, complementarity, primal_infeasibility, dual_infeasibility});
}

double QcqpProblem::objective(const std::vector<CVector>& x) const {
  double f = 0;
  for (int k = 0; k < num_blocks; ++k)
    f += std::real(x[k].dot(quad[k] * x[k])) - 2.0 * std::real(linear[k].dot(x[k]));
  return f;
}

double QcqpProblem::constraint_value(std::size_t i, const std::vector<CVector>& x) const {
  const auto& c = constraints.at(i);
  double v = 0;
  for (int k = 0; k < num_blocks; ++k)
    if (c.forms[k].size() != 0) v += std::real(x[k].dot(c.forms[k] * x[k]));
  return v;
}

void QcqpProblem::validate() const {
  auto fail = [](const std::string& msg) { throw std::invalid_argument("qcqp: " + msg); };
  if (num_blocks < 1 || block_dim < 1) fail("need at least one block of positive length");
  if (static_cast<int>(quad.size()) != num_blocks || static_cast<int>(linear.size()) != num_blocks)
    fail("objective must have one matrix and one vector per block");
  auto hermitian = [&](const CMatrix& a) {
    const double s = std::max(1.0, a.cwiseAbs().maxCoeff());
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= 1e-10 * s;
  };
  for (int k = 0; k < num_blocks; ++k) {
    if (quad[k].rows() != block_dim || quad[k].cols() != block_dim) fail("objective matrix shape");
    if (linear[k].size() != block_dim) fail("objective vector length");
    if (!hermitian(quad[k])) fail("objective matrix is not Hermitian");
  }
  for (const auto& c : constraints) {
    if (!(c.cap > 0)) fail("constraint caps must be positive");
    if (static_cast<int>(c.forms.size()) != num_blocks) fail("constraint needs one form per block");
    for (const auto& f : c.forms) {
      if (f.size() == 0) continue;
      if (f.rows() != block_dim || f.cols() != block_dim) fail("constraint form shape");
      if (!hermitian(f)) fail("constraint form is not Hermitian");
    }
  }
}

KktReport kkt_residuals(const QcqpProblem& problem, const std::vector<CVector>& x,
                        const std::vector<double>& multipliers) {
  const Lifted l = lift_problem(problem);
  VectorXd lx(l.n());
  for (int k = 0; k < l.blocks; ++k) l.seg(lx, k) = lift(x[k]);
  VectorXd lambda(l.constraints());
  for (int i = 0; i < l.constraints(); ++i) {
    const double cap = problem.constraints[l.source[i]].cap;
    lambda[i] = multipliers.at(l.source[i]) * cap / l.scale;
  }
  return kkt_lifted(l, lx, lambda);
}

QcqpSolution solve(const QcqpProblem& problem, const Options& options) {
  problem.validate();
  const Lifted l = lift_problem(problem);
  const int n = l.n();
  const int m = l.constraints();

  VectorXd x = VectorXd::Zero(n);
  VectorXd lambda = VectorXd::Ones(m);
  int iter = 0;
  bool failed = false;

  constexpr double kMu = 10.0;
  constexpr double kAlpha = 0.01;
  constexpr double kBeta = 0.5;
  const double stop = 0.1 * options.tol;

  bool done = false;
  if (m == 0) {
    x = solve_unconstrained(l);
    done = true;
  } else {
    // When the unconstrained minimizer is strictly feasible it is optimal with
    // zero multipliers; the KKT check also rejects unbounded (singular) cases.
    const VectorXd free = solve_unconstrained(l);
    bool inside = free.allFinite();
    for (int i = 0; i < m && inside; ++i) inside = l.constraint(i, free) < 0;
    if (inside && kkt_lifted(l, free, VectorXd::Zero(m)).max() <= stop) {
      x = free;
      lambda.setZero();
      done = true;
    }
  }
  if (!done) {
    NewtonSystem newton(l);
    VectorXd q(m);
    MatrixXd u(n, m);

    auto residual_norm = [&](const VectorXd& xv, const VectorXd& lv, double t) {
      VectorXd rd = l.objective_gradient(xv);
      double rc2 = 0;
      for (int i = 0; i < m; ++i) {
        rd += lv[i] * l.constraint_gradient(i, xv);
        const double rc = -lv[i] * l.constraint(i, xv) - 1.0 / t;
        rc2 += rc * rc;
      }
      return std::sqrt(rd.squaredNorm() + rc2);
    };

    for (; iter < options.max_iters; ++iter) {
      for (int i = 0; i < m; ++i) {
        q[i] = l.constraint(i, x);
        u.col(i) = l.constraint_gradient(i, x);
      }
      if (kkt_lifted(l, x, lambda).max() <= stop) break;

      const double gap = -q.dot(lambda);
      const double t = kMu * m / gap;
      const VectorXd r_dual = l.objective_gradient(x) + u * lambda;
      const VectorXd r_cent = (-lambda.array() * q.array() - 1.0 / t).matrix();

      VectorXd rhs = -r_dual;
      for (int i = 0; i < m; ++i) rhs -= u.col(i) * (r_cent[i] / q[i]);
      const VectorXd dw_inv = (-q.array() / lambda.array()).matrix();

      VectorXd dx;
      if (!newton.solve(lambda, u, dw_inv, rhs, dx)) {
        failed = true;
        break;
      }
      VectorXd dl(m);
      for (int i = 0; i < m; ++i) dl[i] = (r_cent[i] - lambda[i] * u.col(i).dot(dx)) / q[i];

      double s_max = 1.0;
      for (int i = 0; i < m; ++i)
        if (dl[i] < 0) s_max = std::min(s_max, -lambda[i] / dl[i]);
      double s = 0.99 * s_max;

      auto strictly_feasible = [&](const VectorXd& xv) {
        for (int i = 0; i < m; ++i)
          if (!(l.constraint(i, xv) < 0)) return false;
        return true;
      };
      while (s > 1e-14 && !strictly_feasible(x + s * dx)) s *= kBeta;
      const double r0 = residual_norm(x, lambda, t);
      while (s > 1e-14 && residual_norm(x + s * dx, lambda + s * dl, t) > (1.0 - kAlpha * s) * r0)
        s *= kBeta;
      if (s <= 1e-14) {
        // No progress possible along the Newton direction.
        break;
      }
      x += s * dx;
      lambda += s * dl;
    }
  }

  QcqpSolution sol;
  sol.iterations = iter;
  const KktReport kkt = kkt_lifted(l, x, lambda);
  sol.kkt = kkt;
  sol.kkt_residual = kkt.max();
  if (!x.allFinite() || failed) {
    sol.status = Status::NumericalFailure;
  } else if (sol.kkt_residual <= options.tol) {
    sol.status = Status::Optimal;
  } else if (sol.kkt_residual <= 1e3 * options.tol) {
    sol.status = Status::MaxIters;
  } else {
    sol.status = Status::NumericalFailure;
  }

  if (!x.allFinite()) x.setZero();
  for (int k = 0; k < l.blocks; ++k) sol.x.push_back(unlift(l.seg(x, k)));
  sol.multipliers.assign(problem.constraints.size(), 0.0);
  for (int i = 0; i < m; ++i) {
    const double cap = problem.constraints[l.source[i]].cap;
    sol.multipliers[l.source[i]] = lambda[i] * l.scale / cap;
  }
  sol.objective = problem.objective(sol.x);
  for (std::size_t i = 0; i < problem.constraints.size(); ++i)
    sol.slack.push_back(problem.constraints[i].cap - problem.constraint_value(i, sol.x));
  return sol;
}

FeasibilityReport check_feasible(const std::vector<CVector>& x, const QcqpProblem& problem,
                                 double tol) {
  FeasibilityReport r;
  for (std::size_t i = 0; i < problem.constraints.size(); ++i) {
    const double cap = problem.constraints[i].cap;
    const double value = problem.constraint_value(i, x);
    const double slack = cap - value;
    const double rel = std::isfinite(cap) ? slack / cap : 1.0;
    r.slack.push_back(slack);
    r.relative_slack.push_back(rel);
    r.worst_relative_slack = std::min(r.worst_relative_slack, rel);
    r.feasible = r.feasible && rel >= -tol;
  }
  return r;
}

}  // namespace hcran::qcqp
