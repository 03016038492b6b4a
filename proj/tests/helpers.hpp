#pragma once

#include "lfa/generators.hpp"

#include <doctest.h>

namespace testutil {

inline lfa::Mat chain2() {
  lfa::Mat P(2, 2);
  P << 0, 1, 0, 1;
  return P;
}

inline lfa::ProblemInstance simple(const lfa::Mat& P, const lfa::Vec& r, double gamma, const lfa::Mat& Phi,
                                   const lfa::Vec& mu) {
  return lfa::ProblemInstance::build(P, lfa::deterministic_rewards(r), gamma, Phi, mu);
}

inline lfa::Vec vec(std::initializer_list<double> xs) {
  lfa::Vec v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace testutil
