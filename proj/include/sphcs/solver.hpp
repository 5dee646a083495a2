#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "sphcs/types.hpp"

namespace sphcs {

struct SolverConfig {
  double radius = 0.0;       // constraint radius r; r = 0 is equality basis pursuit
  int max_iters = 5000;
  double tol_primal = 1e-9;  // relative primal residual
  double tol_dual = 1e-9;    // relative dual residual
  double feas_rel = 1e-8;    // feasibility slack relative to ||y||
  std::ostream* trace = nullptr;  // optional CSV stream: iter, objective, residual
  int trace_every = 25;

  void validate() const {
    if (radius < 0.0) throw std::invalid_argument("SolverConfig: radius must be >= 0");
    if (tol_primal <= 0.0 || tol_dual <= 0.0)
      throw std::invalid_argument("SolverConfig: tolerances must be > 0");
    if (max_iters < 1) throw std::invalid_argument("SolverConfig: max_iters must be >= 1");
  }
};

enum class SolverStatus { kConverged, kMaxIterations, kInfeasibleRadius };

inline const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::kConverged: return "converged";
    case SolverStatus::kMaxIterations: return "max-iterations";
    default: return "infeasible-radius";
  }
}

struct SolverResult {
  Eigen::VectorXcd solution;
  int iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double feasibility = 0.0;  // ||y - A z||_2 at the solution
  double objective = 0.0;    // ||z||_1 (sum of complex moduli)
  SolverStatus status = SolverStatus::kMaxIterations;
};

namespace detail {

template <typename Op>
double estimate_operator_norm(const Op& op, int iters = 20) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Ones(op.cols());
  v += 1e-3 * Eigen::VectorXcd::Unit(op.cols(), 0);  // break symmetric fixed points
  v.normalize();
  double lambda = 1.0;
  for (int i = 0; i < iters; ++i) {
    Eigen::VectorXcd w = op.applyAdjoint(op.apply(v));
    lambda = w.norm();
    if (lambda == 0.0) return 0.0;
    v = w / lambda;
  }
  return std::sqrt(lambda);
}

inline void soft_threshold(Eigen::VectorXcd& z, double t) {
  for (Eigen::Index i = 0; i < z.size(); ++i) {
    const double a = std::abs(z(i));
    z(i) = a <= t ? cplx(0.0) : z(i) * ((a - t) / a);
  }
}

}  // namespace detail

/// Quadratically constrained basis pursuit
///   min ||z||_1  subject to  ||y - A z||_2 <= r
/// by first-order primal-dual splitting (Chambolle-Pock). The l1 proximal
/// step is complex soft thresholding; the constraint enters through the dual
/// proximal of the l2-ball indicator centered at y. Only forward/adjoint
/// applications of A are required. With r = 0 this is equality-constrained
/// basis pursuit.
template <typename Op>
SolverResult solve_qcbp(const Op& op, const Eigen::VectorXcd& y, const SolverConfig& config) {
  config.validate();
  if (y.size() != op.rows()) throw std::invalid_argument("solve_qcbp: measurement size mismatch");

  const double r = config.radius;
  const double op_norm = std::max(detail::estimate_operator_norm(op), 1e-12);
  // tau * sigma * ||A||^2 < 1 guarantees convergence
  const double tau = 0.99 / op_norm;
  const double sigma = 0.99 / op_norm;

  const double y_norm = y.norm();
  Eigen::VectorXcd z = Eigen::VectorXcd::Zero(op.cols());
  Eigen::VectorXcd z_bar = z;
  Eigen::VectorXcd u = Eigen::VectorXcd::Zero(op.rows());

  SolverResult res;
  double p_res = 1.0, d_res = 1.0;
  int it = 0;
  for (it = 1; it <= config.max_iters; ++it) {
    // dual ascent + proximal of the ball indicator's conjugate
    Eigen::VectorXcd u_new = u + sigma * op.apply(z_bar);
    Eigen::VectorXcd w = u_new / sigma;
    Eigen::VectorXcd dv = w - y;
    const double dn = dv.norm();
    Eigen::VectorXcd proj = dn <= r ? w : Eigen::VectorXcd(y + (r / std::max(dn, 1e-300)) * dv);
    u_new -= sigma * proj;

    // primal descent + l1 proximal
    Eigen::VectorXcd z_new = z - tau * op.applyAdjoint(u_new);
    detail::soft_threshold(z_new, tau);

    p_res = (z_new - z).norm() / std::max(1.0, z_new.norm());
    d_res = (u_new - u).norm() / std::max(1.0, u_new.norm());

    z_bar = 2.0 * z_new - z;
    z = std::move(z_new);
    u = std::move(u_new);

    if (config.trace && (it % config.trace_every == 0 || it == 1)) {
      double obj = 0.0;
      for (Eigen::Index i = 0; i < z.size(); ++i) obj += std::abs(z(i));
      *config.trace << it << "," << obj << "," << (y - op.apply(z)).norm() << "\n";
    }
    if (p_res <= config.tol_primal && d_res <= config.tol_dual) break;
  }

  // Feasibility polish: the primal-dual iterate stops a hair outside the
  // ball. When the overshoot is small, pull the residual onto the boundary
  // with Richardson steps z += A*(d (1 - r/f)); for A with orthonormal rows
  // one step is exact. Applied only near-feasible so true infeasibility is
  // still reported.
  if (r > 0.0) {
    for (int k = 0; k < 50; ++k) {
      Eigen::VectorXcd d = y - op.apply(z);
      const double f = d.norm();
      if (f <= r * (1.0 + 1e-7) || f > r * 1.05 + 1e-6 * std::max(1.0, y_norm)) break;
      z += op.applyAdjoint(d * (1.0 - r / f));
    }
  }

  res.solution = z;
  res.iterations = std::min(it, config.max_iters);
  res.primal_residual = p_res;
  res.dual_residual = d_res;
  res.feasibility = (y - op.apply(z)).norm();
  res.objective = 0.0;
  for (Eigen::Index i = 0; i < z.size(); ++i) res.objective += std::abs(z(i));

  // Tight feasibility backs the converged status; a gap above 1% of ||y||
  // marks a radius no iterate can reach. The band between the two is slow
  // tail convergence (compressible data) and reports as max-iterations.
  const bool feasible_tight =
      res.feasibility <= r * (1.0 + 1e-6) + config.feas_rel * std::max(1.0, y_norm);
  const bool grossly_infeasible = res.feasibility > r * (1.0 + 1e-6) + 1e-2 * y_norm;
  if (p_res <= config.tol_primal && d_res <= config.tol_dual && feasible_tight)
    res.status = SolverStatus::kConverged;
  else if (grossly_infeasible)
    res.status = SolverStatus::kInfeasibleRadius;
  else
    res.status = SolverStatus::kMaxIterations;
  return res;
}

/// Dense-matrix operator adapter (used by the on-grid Wigner baseline).
struct DenseOperator {
  Eigen::MatrixXcd matrix;

  std::int64_t rows() const { return matrix.rows(); }
  std::int64_t cols() const { return matrix.cols(); }
  Eigen::VectorXcd apply(const Eigen::VectorXcd& z) const { return matrix * z; }
  Eigen::VectorXcd applyAdjoint(const Eigen::VectorXcd& y) const {
    return matrix.adjoint() * y;
  }
};

}  // namespace sphcs
