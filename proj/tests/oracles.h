// Copyright 2026 The LooseIMU Authors
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

#ifndef LOOSEIMU_TESTS_ORACLES_H_
#define LOOSEIMU_TESTS_ORACLES_H_

// Independent reference implementations used by the unit and acceptance
// tests. They deliberately avoid the library's own math paths.

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "looseimu/kinematics.h"
#include "looseimu/tensor.h"

namespace looseimu::testing {

// Uniform random rotation from a normalized 4-D Gaussian.
inline Rotation RandomRotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  return Rotation(n(rng), n(rng), n(rng), n(rng));
}

// 2 acos(|<qa, qb>|) in degrees.
inline double QuaternionDotAngleDeg(const Rotation& a, const Rotation& b) {
  const auto& qa = a.quat();
  const auto& qb = b.quat();
  double dot = qa.w() * qb.w() + qa.x() * qb.x() + qa.y() * qb.y() + qa.z() * qb.z();
  dot = std::min(1.0, std::abs(dot));
  return 2.0 * std::acos(dot) * 180.0 / M_PI;
}

using Mat4 = std::array<std::array<double, 4>, 4>;

inline Mat4 Multiply(const Mat4& a, const Mat4& b) {
  Mat4 c{};
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      for (int k = 0; k < 4; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

// Homogeneous transform from a quaternion written out by hand.
inline Mat4 Transform(const Rotation& r, const Vec3& t) {
  const double w = r.quat().w(), x = r.quat().x(), y = r.quat().y(),
               z = r.quat().z();
  Mat4 m{};
  m[0] = {1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y), t.x()};
  m[1] = {2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x), t.y()};
  m[2] = {2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y), t.z()};
  m[3] = {0, 0, 0, 1};
  return m;
}

// Walks from the root down to `joint`, composing 4x4 transforms.
inline Vec3 ChainWalkPosition(const Skeleton& s, const std::vector<Rotation>& local,
                              const Vec3& root, int joint) {
  std::vector<int> chain;
  for (int j = joint; j >= 0; j = s.parent[j]) chain.insert(chain.begin(), j);
  Mat4 acc = Transform(local[0], root);
  for (size_t i = 1; i < chain.size(); ++i) {
    const int j = chain[i];
    acc = Multiply(acc, Transform(local[j], s.rest_offset[j]));
  }
  return Vec3(acc[0][3], acc[1][3], acc[2][3]);
}

// Elementwise mean absolute difference.
inline double LoopL1(const Matrix& a, const Matrix& b) {
  double sum = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (Eigen::Index c = 0; c < a.cols(); ++c) sum += std::abs(a(r, c) - b(r, c));
  return sum / static_cast<double>(a.size());
}

// Mean absolute difference restricted to columns `cols`.
inline double LoopL1Cols(const Matrix& a, const Matrix& b, const std::vector<int>& cols) {
  double sum = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r)
    for (int c : cols) sum += std::abs(a(r, c) - b(r, c));
  return sum / static_cast<double>(a.rows() * cols.size());
}

}  // namespace looseimu::testing

#endif  // LOOSEIMU_TESTS_ORACLES_H_
