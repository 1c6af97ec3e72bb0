#pragma once

#include <vector>

namespace schedlaw {

struct NnlsResult {
  std::vector<double> x;          // coefficients, all >= 0
  double kkt_residual = 0.0;      // normalized stationarity residual
  bool collinearity_warning = false;
  int iterations = 0;
};

// Min ||A x - y||_2 subject to x >= 0, active-set method on the normal
// equations. `columns` holds A column-major. Columns are rescaled to unit
// max-abs internally; near-singular subproblems fall back to a symmetric
// pseudo-inverse and set the collinearity warning.
NnlsResult nnls(const std::vector<std::vector<double>>& columns,
                const std::vector<double>& y);

}  // namespace schedlaw
