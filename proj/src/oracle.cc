/*
 * Copyright 2026 The ppac Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ppac/oracle.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ppac {

namespace {

void CheckWeights(const Eigen::MatrixXd& w, size_t size) {
  if (w.rows() != w.cols() || static_cast<size_t>(w.rows()) != size) {
    throw std::invalid_argument("weight matrix has the wrong shape");
  }
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (w(i, j) < 0) throw std::invalid_argument("negative weight");
      if (w(i, j) != w(j, i)) throw std::invalid_argument("asymmetric weights");
    }
  }
}

Eigen::VectorXd ToEigen(const StateVector& x) {
  return Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(x.size()));
}

StateVector FromEigen(const Eigen::VectorXd& v) {
  return StateVector(v.data(), v.data() + v.size());
}

}  // namespace

Eigen::MatrixXd Laplacian(const Eigen::MatrixXd& weights) {
  Eigen::MatrixXd off = weights;
  off.diagonal().setZero();
  Eigen::MatrixXd l = -off;
  l.diagonal() = off.rowwise().sum();
  return l;
}

Eigen::MatrixXd PerronMatrix(const Eigen::MatrixXd& weights, double epsilon) {
  const auto n = weights.rows();
  return Eigen::MatrixXd::Identity(n, n) - epsilon * Laplacian(weights);
}

Trajectory PlaintextOracleDt(const StateVector& x0,
                             std::span<const Eigen::MatrixXd> weights,
                             double epsilon) {
  Trajectory out;
  out.reserve(weights.size() + 1);
  out.push_back(x0);
  Eigen::VectorXd x = ToEigen(x0);
  for (const Eigen::MatrixXd& w : weights) {
    CheckWeights(w, x0.size());
    x = x - epsilon * (Laplacian(w) * x);
    out.push_back(FromEigen(x));
  }
  return out;
}

Trajectory PlaintextOracleCt(const StateVector& x0, const WeightFunction& weight_fn,
                             double dt, double horizon) {
  if (!(dt > 0) || !(horizon >= 0)) {
    throw std::invalid_argument("dt must be positive and horizon non-negative");
  }
  const auto steps = static_cast<size_t>(std::llround(horizon / dt));
  Trajectory out;
  out.reserve(steps + 1);
  out.push_back(x0);
  Eigen::VectorXd x = ToEigen(x0);
  for (size_t k = 0; k < steps; ++k) {
    Eigen::MatrixXd w = weight_fn(static_cast<double>(k) * dt);
    CheckWeights(w, x0.size());
    Eigen::MatrixXd l = Laplacian(w);
    if (dt * l.diagonal().maxCoeff() >= 1.0) {
      throw std::domain_error("Euler step unstable: dt * max degree weight >= 1");
    }
    x = x - dt * (l * x);
    out.push_back(FromEigen(x));
  }
  return out;
}

double Disagreement(std::span<const double> states) {
  if (states.empty()) throw std::invalid_argument("Disagreement: empty input");
  auto [lo, hi] = std::minmax_element(states.begin(), states.end());
  return *hi - *lo;
}

double Mean(std::span<const double> states) {
  if (states.empty()) throw std::invalid_argument("Mean: empty input");
  return std::accumulate(states.begin(), states.end(), 0.0) /
         static_cast<double>(states.size());
}

}  // namespace ppac
