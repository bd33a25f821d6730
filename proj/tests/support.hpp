#pragma once

#include <doctest.h>

#include <initializer_list>
#include <vector>

#include <Eigen/Dense>

#include "q4f/errors.hpp"
#include "q4f/mechanisms.hpp"

namespace q4f::test {

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

inline Eigen::VectorXd vec(const std::vector<double>& xs) {
  return Eigen::Map<const Eigen::VectorXd>(xs.data(), static_cast<Eigen::Index>(xs.size()));
}

inline ContributionProfile profile(std::initializer_list<double> xs) { return ContributionProfile(vec(xs)); }
inline ContributionProfile profile(const std::vector<double>& xs) { return ContributionProfile(vec(xs)); }

/// Code of the q4f::Error thrown by fn; fails the test if nothing is thrown.
template <typename Fn>
ErrorCode code_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected q4f::Error");
  return ErrorCode::InvalidArgument;
}

}  // namespace q4f::test
