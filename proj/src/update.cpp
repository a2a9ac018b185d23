// Copyright 2026 The radlio Authors
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


#include "radlio/update.hpp"

#include <Eigen/Dense>

#include "radlio/errors.hpp"

namespace radlio {

ResidualBlock ResidualBlock::scalar(double r, const Eigen::Matrix<double, 1, 15>& H,
                                    double R, BlockTag tag) {
  ResidualBlock b;
  b.r = Eigen::VectorXd::Constant(1, r);
  b.H = H;
  b.R = Eigen::MatrixXd::Constant(1, 1, R);
  b.tag = tag;
  return b;
}

std::optional<ResidualBlock> lidar_residual(const State& x, const Vec3& p_lidar,
                                            const PlaneFit& plane,
                                            const Extrinsic& imu_T_lidar,
                                            double variance) {
  if (!plane.valid) return std::nullopt;
  const Vec3 pw = x.R() * imu_T_lidar.apply(p_lidar) + x.p();
  const Vec3& u = plane.normal;
  Eigen::Matrix<double, 1, 15> H = Eigen::Matrix<double, 1, 15>::Zero();
  H.segment<3>(idx::kRot) = -u.transpose() * skew(pw);
  H.segment<3>(idx::kPos) = u.transpose();
  return ResidualBlock::scalar(u.dot(pw - plane.centroid), H, variance,
                               BlockTag::kLidar);
}

ResidualBlock radar_residual(const State& x, const RadarPoint& pt,
                             const Vec3& gyro, const Extrinsic& imu_T_radar,
                             double variance) {
  const Vec3 u = pt.p.normalized();
  const Vec3 w = gyro - x.bg;
  const Vec3& lever = imu_T_radar.t;
  const Vec3 v_radar =
      imu_T_radar.R.transpose() * (x.R().transpose() * x.v() + w.cross(lever));
  const Eigen::Matrix<double, 1, 3> uR = u.transpose() * imu_T_radar.R.transpose();
  Eigen::Matrix<double, 1, 15> H = Eigen::Matrix<double, 1, 15>::Zero();
  H.segment<3>(idx::kVel) = uR * x.R().transpose();
  H.segment<3>(idx::kBg) = uR * skew(lever);
  return ResidualBlock::scalar(u.dot(v_radar) - pt.doppler, H, variance,
                               BlockTag::kRadar);
}

namespace {

Mat15 inverse_boxminus_jacobian(const Tangent15& e) {
  Mat15 J = Mat15::Identity();
  J.topLeftCorner<9, 9>() = se23_left_jacobian(e.head<9>());
  return J;
}

}  // namespace

UpdateResult iterated_update(const State& xhat, const Covariance15& Phat,
                             const ResidualModel& model,
                             const UpdateOptions& opts) {
  if (!Phat.allFinite()) throw InvalidInput("iterated_update: non-finite prior");
  UpdateResult out;
  State xj = xhat;
  Tangent15 step = Tangent15::Zero();
  Mat15 Ppost = Phat;
  const Eigen::LLT<Mat15> prior_llt(Phat);
  auto cost_of = [&](const State& x, const std::vector<ResidualBlock>& bl) {
    const Tangent15 e = boxminus(x, xhat);
    double c = e.dot(prior_llt.solve(e));
    for (const ResidualBlock& b : bl) c += b.r.dot(b.R.llt().solve(b.r));
    return c;
  };
  std::vector<ResidualBlock> blocks = model(xj);
  double cost = cost_of(xj, blocks);

  for (int j = 0; j < opts.max_iterations; ++j) {
    const Tangent15 e = boxminus(xj, xhat);
    // Prior re-expressed in the tangent space at x^j: mean m, covariance P.
    const Mat15 Ainv = inverse_boxminus_jacobian(e);
    const Mat15 P = Ainv * Phat * Ainv.transpose();
    const Tangent15 m = -Ainv * e;

    int rows = 0;
    for (const ResidualBlock& b : blocks) rows += b.rows();

    if (rows == 0) {
      step = m;
      Ppost = P;
    } else if (rows > 15) {
      Mat15 info = Mat15::Zero();
      Tangent15 grad = Tangent15::Zero();
      for (const ResidualBlock& b : blocks) {
        if (b.rows() == 1) {
          const double w = 1.0 / b.R(0, 0);
          info.noalias() += w * b.H.transpose() * b.H;
          grad.noalias() += w * b.r(0) * b.H.transpose();
        } else {
          const Eigen::MatrixXd HtRi =
              b.H.transpose() * b.R.llt().solve(Eigen::MatrixXd::Identity(b.rows(), b.rows()));
          info.noalias() += HtRi * b.H;
          grad.noalias() += HtRi * b.r;
        }
      }
      const Mat15 Pinv = P.llt().solve(Mat15::Identity());
      const Mat15 S = Pinv + info;
      Eigen::LDLT<Mat15> ldlt(S);
      step = ldlt.solve(Pinv * m - grad);
      Ppost = ldlt.solve(Mat15::Identity());
    } else {
      Jacobian15 H(rows, 15);
      Eigen::VectorXd r(rows);
      Eigen::MatrixXd R = Eigen::MatrixXd::Zero(rows, rows);
      int k = 0;
      for (const ResidualBlock& b : blocks) {
        H.middleRows(k, b.rows()) = b.H;
        r.segment(k, b.rows()) = b.r;
        R.block(k, k, b.rows(), b.rows()) = b.R;
        k += b.rows();
      }
      const Eigen::MatrixXd S = H * P * H.transpose() + R;
      const Eigen::MatrixXd K = P * H.transpose() * S.ldlt().solve(
                                    Eigen::MatrixXd::Identity(rows, rows));
      step = m + K * (-r - H * m);
      const Mat15 IKH = Mat15::Identity() - K * H;
      // Joseph form keeps the result symmetric PSD.
      Ppost = IKH * P * IKH.transpose() + K * R * K.transpose();
    }

    out.iterations = j + 1;
    // Halve the step while it raises the objective. Needed where the
    // residual is flat at its minimum (the gravity cosine) and the Gauss-
    // Newton model overshoots.
    State trial = boxplus(xj, step);
    std::vector<ResidualBlock> trial_blocks = model(trial);
    double trial_cost = cost_of(trial, trial_blocks);
    for (int h = 0; h < opts.max_halvings && trial_cost > cost; ++h) {
      step *= 0.5;
      trial = boxplus(xj, step);
      trial_blocks = model(trial);
      trial_cost = cost_of(trial, trial_blocks);
    }
    if (trial_cost > cost) {
      step.setZero();
      break;
    }
    xj = trial;
    blocks = std::move(trial_blocks);
    cost = trial_cost;
    if (step.norm() < opts.tolerance) {
      out.converged = true;
      break;
    }
  }

  // The posterior lives in the tangent space at the last linearization
  // point; move it to the tangent space at the final iterate.
  const Mat15 Jl = inverse_boxminus_jacobian(step);
  out.P = Jl * Ppost * Jl.transpose();
  out.P = 0.5 * (out.P + out.P.transpose());
  out.clamped = make_psd(out.P);
  out.x = xj;
  return out;
}

double map_cost(const State& x, const State& xhat, const Covariance15& Phat,
                const std::vector<ResidualBlock>& blocks) {
  const Tangent15 e = boxminus(x, xhat);
  double c = e.dot(Phat.llt().solve(e));
  for (const ResidualBlock& b : blocks) c += b.r.dot(b.R.llt().solve(b.r));
  return c;
}

}  // namespace radlio
