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

#include "looseimu/losses.h"

#include <cmath>

#include "looseimu/diffusion.h"
#include "looseimu/errors.h"

namespace looseimu {
namespace {

double Sign(double x) { return (x > 0.0) - (x < 0.0); }

// Mean |a - b| over `cols`; adds scale * d/da into grad_a and its negation
// into grad_b.
double L1OverColumns(const Matrix& a, const Matrix& b,
                     const std::vector<int>& cols, double scale,
                     Matrix* grad_a, Matrix* grad_b) {
  if (cols.empty() || a.rows() == 0) return 0.0;
  const double count = static_cast<double>(cols.size()) * a.rows();
  double sum = 0.0;
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    for (int c : cols) {
      const double diff = a(r, c) - b(r, c);
      sum += std::abs(diff);
      const double g = scale * Sign(diff) / count;
      if (grad_a) (*grad_a)(r, c) += g;
      if (grad_b) (*grad_b)(r, c) -= g;
    }
  }
  return sum / count;
}

std::vector<int> AllColumns(int width) {
  std::vector<int> cols(width);
  for (int c = 0; c < width; ++c) cols[c] = c;
  return cols;
}

void CheckSameShape(const Matrix& a, const Matrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw ShapeError(std::string(what) + ": shape mismatch");
  }
}

void AddTerm(LossBreakdown& out, const std::string& name, double weight,
             double value) {
  out.terms.push_back({name, weight, value});
  out.total += weight * value;
}

// Applies the gap-g forward difference `order` times to rows of `x`.
Matrix Difference(const Matrix& x, int gap, int order) {
  Matrix cur = x;
  for (int k = 0; k < order; ++k) {
    const Eigen::Index n = cur.rows() - gap;
    Matrix next = cur.bottomRows(n) - cur.topRows(n);
    cur = std::move(next);
  }
  return cur;
}

// Adjoint of Difference: maps d/d(output) back to d/d(input) rows.
Matrix DifferenceAdjoint(const Matrix& dy, int gap, int order) {
  Matrix cur = dy;
  for (int k = 0; k < order; ++k) {
    Matrix prev = Matrix::Zero(cur.rows() + gap, cur.cols());
    prev.bottomRows(cur.rows()) += cur;
    prev.topRows(cur.rows()) -= cur;
    cur = std::move(prev);
  }
  return cur;
}

// Mean |Delta^order_gap (pred - target)| over the column block, per window.
double DifferenceTerm(const Matrix& pred, const Matrix& target, int begin,
                      int width, int window, int gap, int order, double weight,
                      Matrix* grad) {
  const Eigen::Index windows = pred.rows() / window;
  double sum = 0.0;
  double count = 0.0;
  std::vector<Matrix> diffs;
  for (Eigen::Index w = 0; w < windows; ++w) {
    const Matrix err = pred.block(w * window, begin, window, width) -
                       target.block(w * window, begin, window, width);
    diffs.push_back(Difference(err, gap, order));
    sum += diffs.back().cwiseAbs().sum();
    count += static_cast<double>(diffs.back().size());
  }
  if (count == 0.0) return 0.0;
  if (grad && weight != 0.0) {
    for (Eigen::Index w = 0; w < windows; ++w) {
      const Matrix sign = diffs[w].unaryExpr(&Sign) * (weight / count);
      grad->block(w * window, begin, window, width) +=
          DifferenceAdjoint(sign, gap, order);
    }
  }
  return sum / count;
}

}  // namespace

void LossWeights::Validate() const {
  for (double w : {root_rotation, joint_rotation, extremity_position,
                   other_position, tight, consistency, loose_recon}) {
    if (!(w >= 0.0)) throw ConfigError("loss weights must be non-negative");
  }
}

double LossBreakdown::Value(const std::string& name) const {
  for (const auto& t : terms)
    if (t.name == name) return t.value;
  throw ConfigError("no loss term named " + name);
}

double SecondaryLoss(const Matrix& truth, const Matrix& pred,
                     Matrix* grad_pred) {
  CheckSameShape(truth, pred, "secondary_loss");
  return L1OverColumns(pred, truth, AllColumns(static_cast<int>(pred.cols())),
                       1.0, grad_pred, nullptr);
}

LossBreakdown PoseLoss(const Matrix& pred, const Matrix& target,
                       const FeatureLayout& layout, const LossWeights& w,
                       const Matrix* noisy_pred, Matrix* grad_pred,
                       Matrix* grad_noisy) {
  w.Validate();
  CheckSameShape(pred, target, "pose_loss");
  if (pred.cols() != layout.target_width) {
    throw ShapeError("pose_loss: prediction width does not match layout");
  }
  if (w.consistency > 0.0 && noisy_pred == nullptr) {
    throw ConfigError("consistency weight > 0 requires a noisy prediction");
  }
  LossBreakdown out;
  AddTerm(out, "root_rotation", w.root_rotation,
          L1OverColumns(pred, target, layout.root_rotation_cols,
                        w.root_rotation, grad_pred, nullptr));
  AddTerm(out, "joint_rotation", w.joint_rotation,
          L1OverColumns(pred, target, layout.joint_rotation_cols,
                        w.joint_rotation, grad_pred, nullptr));
  AddTerm(out, "extremity_position", w.extremity_position,
          L1OverColumns(pred, target, layout.extremity_position_cols,
                        w.extremity_position, grad_pred, nullptr));
  AddTerm(out, "other_position", w.other_position,
          L1OverColumns(pred, target, layout.other_position_cols,
                        w.other_position, grad_pred, nullptr));
  AddTerm(out, "tight", w.tight,
          L1OverColumns(pred, target, layout.tight_cols, w.tight, grad_pred,
                        nullptr));
  double consistency = 0.0;
  if (noisy_pred != nullptr) {
    CheckSameShape(pred, *noisy_pred, "pose_loss consistency pair");
    consistency = L1OverColumns(
        pred, *noisy_pred, AllColumns(static_cast<int>(pred.cols())),
        w.consistency, grad_pred, grad_noisy);
  }
  AddTerm(out, "consistency", w.consistency, consistency);
  return out;
}

Matrix ConsistencyCondition(const Matrix& condition, std::mt19937_64& rng,
                            double scale) {
  if (scale == 0.0) return condition;
  return condition +
         scale * GaussianMatrix(static_cast<int>(condition.rows()),
                                static_cast<int>(condition.cols()), rng);
}

Matrix ConsistencyCondition(const Matrix& condition, uint64_t seed,
                            double scale) {
  std::mt19937_64 rng(seed);
  return ConsistencyCondition(condition, rng, scale);
}

Matrix InpaintMaskApply(const Matrix& x0, const Matrix& mask) {
  if (mask.cols() != x0.cols() ||
      (mask.rows() != x0.rows() && mask.rows() != 1)) {
    throw ShapeError("inpaint mask shape does not match x0");
  }
  for (Eigen::Index i = 0; i < mask.size(); ++i) {
    const double m = mask.data()[i];
    if (m != 0.0 && m != 1.0) throw ValidationError("inpaint mask must be 0/1");
  }
  if (mask.rows() == 1) {
    Matrix out = x0.array().rowwise() * (1.0 - mask.row(0).array());
    return out;
  }
  return x0.array() * (1.0 - mask.array());
}

Matrix RootSensorMask(const FeatureLayout& layout, int rows) {
  Matrix mask = Matrix::Zero(rows, layout.loose.width);
  for (int c : layout.root_sensor_loose_cols)
    mask.col(c - layout.loose.begin).setOnes();
  return mask;
}

LossBreakdown UnconditionalLoss(const Matrix& pred, const Matrix& target,
                                const FeatureLayout& layout,
                                const LossWeights& weights,
                                const Matrix& loose_mask,
                                const Matrix* noisy_pred, Matrix* grad_pred,
                                Matrix* grad_noisy) {
  if (layout.kind != ModelKind::kUnconditional) {
    throw ConfigError("unconditional loss needs the inpainting layout");
  }
  if (loose_mask.rows() != pred.rows() ||
      loose_mask.cols() != layout.loose.width) {
    throw ShapeError("loose mask must be rows x loose width");
  }
  LossBreakdown out =
      PoseLoss(pred, target, layout, weights, noisy_pred, grad_pred, grad_noisy);
  double sum = 0.0;
  double count = 0.0;
  for (Eigen::Index r = 0; r < pred.rows(); ++r) {
    for (int c = 0; c < layout.loose.width; ++c) {
      if (loose_mask(r, c) != 0.0) {
        sum += std::abs(pred(r, layout.loose.begin + c) -
                        target(r, layout.loose.begin + c));
        count += 1.0;
      }
    }
  }
  const double value = count > 0.0 ? sum / count : 0.0;
  if (grad_pred && count > 0.0) {
    for (Eigen::Index r = 0; r < pred.rows(); ++r) {
      for (int c = 0; c < layout.loose.width; ++c) {
        if (loose_mask(r, c) == 0.0) continue;
        const int col = layout.loose.begin + c;
        (*grad_pred)(r, col) +=
            weights.loose_recon * Sign(pred(r, col) - target(r, col)) / count;
      }
    }
  }
  AddTerm(out, "loose_recon", weights.loose_recon, value);
  return out;
}

AblationWeights AblationWeights::PoseOnly() {
  AblationWeights w;
  for (auto& row : w.rotation_diff) row = {0.0, 0.0, 0.0};
  w.position_velocity = {0.0, 0.0, 0.0};
  return w;
}

LossBreakdown PoseOnlyAblationLoss(const Matrix& pred, const Matrix& target,
                                   const FeatureLayout& layout,
                                   const AblationWeights& weights,
                                   int window_frames, Matrix* grad_pred) {
  CheckSameShape(pred, target, "pose_only_ablation_loss");
  if (window_frames < kAblationMinFrames) {
    throw SequenceLengthError("ablation loss needs windows of at least " +
                              std::to_string(kAblationMinFrames) + " frames");
  }
  if (pred.rows() % window_frames != 0) {
    throw ShapeError("rows are not a whole number of windows");
  }
  if (layout.pose.width == 0) throw ConfigError("layout has no pose channels");
  LossBreakdown out;
  std::vector<int> pose_cols;
  for (int c = layout.pose.begin; c < layout.pose.end(); ++c) pose_cols.push_back(c);
  AddTerm(out, "pose", weights.pose,
          L1OverColumns(pred, target, pose_cols, weights.pose, grad_pred,
                        nullptr));
  static const char* kOrderNames[] = {"velocity", "acceleration", "jerk"};
  for (int order = 1; order <= 3; ++order) {
    for (int g = 0; g < 3; ++g) {
      const int gap = AblationWeights::kGaps[g];
      const double w = weights.rotation_diff[order - 1][g];
      const double v =
          DifferenceTerm(pred, target, layout.pose.begin, layout.pose.width,
                         window_frames, gap, order, w, grad_pred);
      AddTerm(out,
              std::string("rotation_") + kOrderNames[order - 1] + "_" +
                  std::to_string(gap),
              w, v);
    }
  }
  for (int g = 0; g < 3; ++g) {
    const int gap = AblationWeights::kGaps[g];
    const double w = weights.position_velocity[g];
    double v = 0.0;
    if (layout.positions.width > 0) {
      v = DifferenceTerm(pred, target, layout.positions.begin,
                         layout.positions.width, window_frames, gap, 1, w,
                         grad_pred);
    }
    AddTerm(out, "position_velocity_" + std::to_string(gap), w, v);
  }
  return out;
}

}  // namespace looseimu
