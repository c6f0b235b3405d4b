#pragma once

#include <cmath>
#include <functional>
#include <initializer_list>
#include <vector>

namespace harness {

// Adaptive Simpson with absolute tolerance. The tolerance is split across
// subintervals; recursion stops when the Richardson estimate of the local
// error is below the local budget.
double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth = 60);

// Same, but forces initial subdivision at the listed interior points
// (kinks, sharp peaks). Points outside (a,b) are ignored.
double integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& split_points, double abs_tol, int max_depth = 60);

}  // namespace harness
