#pragma once

#include "harness/kernel.hpp"

namespace testutil {

// p(0) = p(1) = 1/2: mean 1/2, sigma1^2 = 1/4, q supported on {-1,0,1}.
inline harness::KernelSpec lazy_spec() {
  harness::KernelSpec s;
  s.d = 1;
  s.support = {{{0}, 0.5}, {{1}, 0.5}};
  return s;
}

// Span-2 walk: q lives on 2Z, the stationary series diverges.
inline harness::KernelSpec span2_spec() {
  harness::KernelSpec s;
  s.d = 1;
  s.support = {{{-1}, 0.5}, {{1}, 0.5}};
  return s;
}

// p(-1) = p(0) = p(1) = 1/3: centered, linear functions are harmonic.
inline harness::KernelSpec centered3_spec() {
  harness::KernelSpec s;
  s.d = 1;
  s.support = {{{-1}, 1.0 / 3.0}, {{0}, 1.0 / 3.0}, {{1}, 1.0 / 3.0}};
  return s;
}

// p(0) = 1/2, p(1) = 1/4, p(2) = 1/4: span 1, q has off-origin correlations.
inline harness::KernelSpec skewed_spec() {
  harness::KernelSpec s;
  s.d = 1;
  s.support = {{{0}, 0.5}, {{1}, 0.25}, {{2}, 0.25}};
  return s;
}

// d=2 three-point kernel from the gate example.
inline harness::KernelSpec three_point_2d_spec() {
  harness::KernelSpec s;
  s.d = 2;
  s.support = {{{0, 0}, 1.0 / 3.0}, {{1, 0}, 1.0 / 3.0}, {{0, 1}, 1.0 / 3.0}};
  return s;
}

// d=3 product of lazy kernels: 8 atoms on {0,1}^3.
inline harness::KernelSpec lazy_product_3d_spec() {
  harness::KernelSpec s;
  s.d = 3;
  for (int a = 0; a <= 1; ++a)
    for (int b = 0; b <= 1; ++b)
      for (int c = 0; c <= 1; ++c) s.support.push_back({{a, b, c}, 0.125});
  return s;
}

inline const harness::KernelAnalysis& lazy() {
  static harness::KernelAnalysis k = harness::validate_kernel(lazy_spec());
  return k;
}
inline const harness::KernelAnalysis& centered3() {
  static harness::KernelAnalysis k = harness::validate_kernel(centered3_spec());
  return k;
}
inline const harness::KernelAnalysis& skewed() {
  static harness::KernelAnalysis k = harness::validate_kernel(skewed_spec());
  return k;
}
inline const harness::KernelAnalysis& three_point_2d() {
  static harness::KernelAnalysis k = harness::validate_kernel(three_point_2d_spec());
  return k;
}
inline const harness::KernelAnalysis& lazy_product_3d() {
  static harness::KernelAnalysis k = harness::validate_kernel(lazy_product_3d_spec());
  return k;
}

}  // namespace testutil
