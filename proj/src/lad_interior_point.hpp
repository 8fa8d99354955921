#pragma once

#include "cenlad/core_model.hpp"

namespace cenlad::detail {

struct InteriorPointOptions {
  int max_iter = 200;
  /// Bound on (best primal - best near-feasible dual) of the (1/n)-scaled objective.
  double gap_tol = 1e-8;
  /// Gap still accepted when the iteration stalls before reaching gap_tol.
  double stall_gap_tol = 1e-6;
  /// Dual points count as lower bounds only below this relative infeasibility.
  double feasibility_tol = 1e-8;
};

struct InteriorPointResult {
  Vector beta;
  int iterations = 0;
  double gap = 0.0;
  double primal_infeasibility = 0.0;
  bool converged = false;
};

InteriorPointResult lad_lasso_interior_point(const Matrix& X, const Vector& y, double lambda,
                                             const InteriorPointOptions& opts);

}  // namespace cenlad::detail
