#pragma once

#include <functional>

namespace schedlaw {

// Adaptive Simpson on [a, b]. Recursion accepts a panel once the classic
// |S_fine - S_coarse|/15 estimate meets abs_tol + rel_tol*|S_fine|.
double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double abs_tol, double rel_tol = 0.0,
                        int max_depth = 40);

}  // namespace schedlaw
