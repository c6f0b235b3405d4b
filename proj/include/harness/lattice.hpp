#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "harness/errors.hpp"

namespace harness {

using Site = std::vector<int>;  // lattice point in Z^d

// Axis-aligned integer box [lo, hi] (inclusive), row-major dense indexing.
struct Box {
  Site lo;
  Site hi;

  int dim() const { return static_cast<int>(lo.size()); }

  std::int64_t volume() const {
    std::int64_t v = 1;
    for (int i = 0; i < dim(); ++i) {
      if (hi[i] < lo[i]) return 0;
      v *= static_cast<std::int64_t>(hi[i]) - lo[i] + 1;
    }
    return v;
  }

  bool contains(const Site& x) const {
    for (int i = 0; i < dim(); ++i)
      if (x[i] < lo[i] || x[i] > hi[i]) return false;
    return true;
  }

  std::int64_t flatten(const Site& x) const {
    std::int64_t idx = 0;
    for (int i = 0; i < dim(); ++i) idx = idx * (static_cast<std::int64_t>(hi[i]) - lo[i] + 1) + (x[i] - lo[i]);
    return idx;
  }

  Site unflatten(std::int64_t idx) const {
    Site x(dim());
    for (int i = dim() - 1; i >= 0; --i) {
      std::int64_t w = static_cast<std::int64_t>(hi[i]) - lo[i] + 1;
      x[i] = static_cast<int>(lo[i] + idx % w);
      idx /= w;
    }
    return x;
  }

  // Minkowski sum with another box (offset ranges add).
  Box dilated(const Box& other) const {
    Box out = *this;
    for (int i = 0; i < dim(); ++i) {
      out.lo[i] += other.lo[i];
      out.hi[i] += other.hi[i];
    }
    return out;
  }

  bool covers(const Box& inner) const {
    for (int i = 0; i < dim(); ++i)
      if (inner.lo[i] < lo[i] || inner.hi[i] > hi[i]) return false;
    return true;
  }

  bool operator==(const Box& o) const { return lo == o.lo && hi == o.hi; }
};

inline Box point_box(const Site& x) { return Box{x, x}; }

inline Site origin(int d) { return Site(static_cast<size_t>(d), 0); }

// Dense real field over a box, with a time stamp where meaningful.
struct GridField {
  Box box;
  std::vector<double> values;
  long t = 0;

  double at(const Site& x) const { return values[static_cast<size_t>(box.flatten(x))]; }
  double& at(const Site& x) { return values[static_cast<size_t>(box.flatten(x))]; }
};

inline GridField make_field(Box box, long t = 0, double fill = 0.0) {
  GridField f;
  f.values.assign(static_cast<size_t>(box.volume()), fill);
  f.box = std::move(box);
  f.t = t;
  return f;
}

}  // namespace harness
