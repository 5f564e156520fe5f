// Copyright 2026 The infofuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef INFOFUSE_TESTS_UNIT_TEST_UTIL_HPP_
#define INFOFUSE_TESTS_UNIT_TEST_UTIL_HPP_

#include <functional>
#include <random>

#include <Eigen/Dense>

namespace infofuse::testing {

// Central-difference Jacobian of a vector function.
inline Eigen::MatrixXd numeric_jacobian(const std::function<Eigen::VectorXd(const Eigen::VectorXd&)>& f,
                                        const Eigen::VectorXd& x, double h = 1e-6) {
  const Eigen::VectorXd f0 = f(x);
  Eigen::MatrixXd j(f0.size(), x.size());
  for (Eigen::Index c = 0; c < x.size(); ++c) {
    Eigen::VectorXd xp = x, xm = x;
    const double step = h * std::max(1.0, std::abs(x(c)));
    xp(c) += step;
    xm(c) -= step;
    j.col(c) = (f(xp) - f(xm)) / (2.0 * step);
  }
  return j;
}

inline Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index k = 0; k < c; ++k) m(i, k) = n(rng);
  return m;
}

inline Eigen::MatrixXd random_spd(Eigen::Index n, std::mt19937_64& rng, double ridge = 0.5) {
  const Eigen::MatrixXd a = random_matrix(n, n, rng);
  return a * a.transpose() + ridge * Eigen::MatrixXd::Identity(n, n);
}

}  // namespace infofuse::testing

#endif  // INFOFUSE_TESTS_UNIT_TEST_UTIL_HPP_
