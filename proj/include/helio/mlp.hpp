// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <nlohmann/json_fwd.hpp>

#include "helio/geometry.hpp"

namespace helio {

/// Fully connected tanh network R^3 -> R with an identity output layer.
struct MlpSpec {
  int depth = 3;  ///< hidden layers
  int width = 15; ///< neurons per hidden layer
  static constexpr int input_dim = 3;
  static constexpr int output_dim = 1;

  friend bool operator==(const MlpSpec&, const MlpSpec&) = default;
};

struct DenseLayer {
  Eigen::MatrixXd weights;  ///< fan_out x fan_in
  Eigen::VectorXd biases;
};

/// Trainable parameters: depth hidden layers followed by the output layer.
/// Gradients use the same type.
struct MlpParams {
  MlpSpec spec;
  std::vector<DenseLayer> layers;

  static MlpParams zeros(const MlpSpec& spec);

  bool same_shape(const MlpParams& other) const;
  bool all_finite() const;
  std::size_t size() const;

  /// Flat view in layer order (weights row-major, then biases).
  std::vector<double> flatten() const;
  void assign(std::span<const double> flat);

  MlpParams& operator+=(const MlpParams& other);
  MlpParams& operator*=(double s);
};

struct Sample {
  Point3 point;
  double target = 0.0;
};

long count_params(const MlpSpec& spec);

/// Uniform Xavier weights in +-sqrt(6 / (fan_in + fan_out)), zero biases.
MlpParams xavier_init(const MlpSpec& spec, std::uint64_t seed);

double forward(const MlpParams& params, const Point3& p);

/// Gradient of the mean squared error over the batch.
MlpParams backprop(const MlpParams& params, std::span<const Sample> batch);

/// Sum of unmixed second input derivatives of forward(params, .) at p.
double laplacian(const MlpParams& params, const Point3& p);

MlpParams laplacian_param_grad(const MlpParams& params, const Point3& p);

/// Batched evaluation over a fixed point set. Runs the network together with
/// its input Jacobian and Laplacian (when requested) and keeps every
/// intermediate needed for a reverse sweep.
class BatchEvaluator {
 public:
  /// points is 3 x N.
  BatchEvaluator(Eigen::Matrix3Xd points, bool with_laplacian);

  std::size_t size() const { return static_cast<std::size_t>(points_.cols()); }
  bool with_laplacian() const { return with_laplacian_; }

  /// Forward sweep; afterwards outputs() and laplacians() are valid.
  void evaluate(const MlpParams& params);

  const Eigen::VectorXd& outputs() const { return out_; }
  const Eigen::VectorXd& laplacians() const { return lap_; }

  /// Reverse sweep for the cotangents of outputs and Laplacians of the last
  /// evaluate(). Writes the parameter gradient into grad (shape of params).
  void pullback(const MlpParams& params, const Eigen::VectorXd& d_out,
                const Eigen::VectorXd* d_lap, MlpParams& grad);

 private:
  struct LayerCache {
    Eigen::MatrixXd input;  // n_in x (B*N): value block then jet blocks
    Eigen::MatrixXd s;      // tanh(z)
    Eigen::MatrixXd pre;    // n_out x (B*N): z, G_x, G_y, G_z, R
    Eigen::MatrixXd q;      // sum_a G_a^2
  };

  Eigen::Matrix3Xd points_;
  bool with_laplacian_;
  int blocks_;
  std::vector<LayerCache> cache_;
  Eigen::MatrixXd last_hidden_;
  Eigen::VectorXd out_;
  Eigen::VectorXd lap_;
};

struct AdamState {
  long step = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  MlpParams m;
  MlpParams v;

  static AdamState fresh(const MlpParams& like, double lr);
};

/// One bias-corrected Adam update in place.
void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads);

/// {spec:{L,W}, layers:[{weights, biases}], adam:{...}, seed, epoch}
nlohmann::json checkpoint_to_json(const MlpParams& params, const AdamState* adam,
                                  std::uint64_t seed, long epoch);
MlpParams params_from_json(const nlohmann::json& j);

}  // namespace helio
