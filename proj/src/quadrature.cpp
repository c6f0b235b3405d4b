#include "harness/quadrature.hpp"

#include <algorithm>
#include <cmath>

namespace harness {
namespace {

struct SimpsonState {
  const std::function<double(double)>& f;
  int max_depth;
};

double simpson(double fa, double fm, double fb, double h) { return h / 6.0 * (fa + 4.0 * fm + fb); }

double adapt(const SimpsonState& s, double a, double b, double fa, double fm, double fb, double whole,
             double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m);
  double rm = 0.5 * (m + b);
  double flm = s.f(lm);
  double frm = s.f(rm);
  double left = simpson(fa, flm, fm, m - a);
  double right = simpson(fm, frm, fb, b - m);
  double err = left + right - whole;
  if (depth >= s.max_depth || std::abs(err) <= 15.0 * tol) return left + right + err / 15.0;
  return adapt(s, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         adapt(s, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

double integrate_one(const SimpsonState& s, double a, double b, double tol) {
  if (a == b) return 0.0;
  double fa = s.f(a);
  double fb = s.f(b);
  double m = 0.5 * (a + b);
  double fm = s.f(m);
  double whole = simpson(fa, fm, fb, b - a);
  return adapt(s, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, double abs_tol,
                 int max_depth) {
  SimpsonState s{f, max_depth};
  return integrate_one(s, a, b, abs_tol);
}

double integrate_split(const std::function<double(double)>& f, double a, double b,
                       const std::vector<double>& split_points, double abs_tol, int max_depth) {
  std::vector<double> pts;
  pts.push_back(a);
  for (double p : split_points)
    if (p > a && p < b) pts.push_back(p);
  pts.push_back(b);
  std::sort(pts.begin(), pts.end());
  SimpsonState s{f, max_depth};
  double total = 0.0;
  double tol_per = abs_tol / static_cast<double>(pts.size() - 1);
  for (size_t i = 0; i + 1 < pts.size(); ++i) total += integrate_one(s, pts[i], pts[i + 1], tol_per);
  return total;
}

}  // namespace harness
