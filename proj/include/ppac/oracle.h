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

// Unencrypted reference dynamics. These are the yardsticks the encrypted
// pipeline is measured against, so they work on plain doubles and share no
// code with the protocol path.

#ifndef PPAC_ORACLE_H_
#define PPAC_ORACLE_H_

#include <Eigen/Dense>

#include <functional>
#include <span>
#include <vector>

namespace ppac {

using StateVector = std::vector<double>;
// trajectory[k] is the state vector after k steps; trajectory[0] = x0.
using Trajectory = std::vector<StateVector>;

// L = diag(W 1) - W for a symmetric non-negative weight matrix.
Eigen::MatrixXd Laplacian(const Eigen::MatrixXd& weights);
// P = I - epsilon * L.
Eigen::MatrixXd PerronMatrix(const Eigen::MatrixXd& weights, double epsilon);

// x[k+1] = (I - epsilon L^(k)) x[k] for each weight matrix in turn. Throws
// std::invalid_argument for non-square, mis-sized, asymmetric or negative
// weights.
Trajectory PlaintextOracleDt(const StateVector& x0,
                             std::span<const Eigen::MatrixXd> weights,
                             double epsilon);

using WeightFunction = std::function<Eigen::MatrixXd(double)>;

// Explicit Euler integration of dx/dt = -L(t) x from 0 to horizon with step
// dt; entry k of the result is the state at time k * dt. Throws
// std::domain_error if some step has dt * max_i L_ii(t) >= 1.
Trajectory PlaintextOracleCt(const StateVector& x0, const WeightFunction& weight_fn,
                             double dt, double horizon);

// max_i x_i - min_i x_i. Throws std::invalid_argument on empty input.
double Disagreement(std::span<const double> states);

double Mean(std::span<const double> states);

}  // namespace ppac

#endif  // PPAC_ORACLE_H_
