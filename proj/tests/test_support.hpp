#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "rieszlab/measure.hpp"
#include "rieszlab/quadrature.hpp"

namespace testsupport {

inline bool rel_close(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({std::abs(a), std::abs(b), 1e-300});
}

inline double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// Independent oracle for d-dimensional integrals over a box: recursively
// nested 1D adaptive quadrature. Slow, but shares nothing with the polar
// machinery under test.
inline double tensor_box_integrate(const std::function<double(const rieszlab::Vec&)>& f,
                                   const rieszlab::Box& box, const rieszlab::QuadratureSpec& q,
                                   int axis = 0, rieszlab::Vec* point = nullptr) {
  rieszlab::Vec local(box.dim());
  rieszlab::Vec* x = point ? point : &local;
  rieszlab::QuadratureSpec qa = q;
  qa.rel_tol = q.rel_tol;
  auto slice = [&](double t) {
    (*x)[axis] = t;
    if (axis + 1 == box.dim()) return f(*x);
    return tensor_box_integrate(f, box, q, axis + 1, x);
  };
  return rieszlab::integrate_1d_adaptive(slice, box.lo[axis], box.hi[axis], qa).value;
}

}  // namespace testsupport
