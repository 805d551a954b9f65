// SPDX-License-Identifier: Apache-2.0
#include "helio/mlp.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "helio/error.hpp"
#include "helio/rng.hpp"

namespace helio {

MlpParams MlpParams::zeros(const MlpSpec& spec) {
  if (spec.depth < 1 || spec.width < 1)
    throw DomainError("network depth and width must be at least 1");
  MlpParams p;
  p.spec = spec;
  int fan_in = MlpSpec::input_dim;
  for (int l = 0; l < spec.depth; ++l) {
    p.layers.push_back({Eigen::MatrixXd::Zero(spec.width, fan_in),
                        Eigen::VectorXd::Zero(spec.width)});
    fan_in = spec.width;
  }
  p.layers.push_back({Eigen::MatrixXd::Zero(MlpSpec::output_dim, fan_in),
                      Eigen::VectorXd::Zero(MlpSpec::output_dim)});
  return p;
}

bool MlpParams::same_shape(const MlpParams& other) const {
  if (layers.size() != other.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].weights.rows() != other.layers[i].weights.rows() ||
        layers[i].weights.cols() != other.layers[i].weights.cols() ||
        layers[i].biases.size() != other.layers[i].biases.size())
      return false;
  }
  return true;
}

bool MlpParams::all_finite() const {
  for (const auto& l : layers)
    if (!l.weights.allFinite() || !l.biases.allFinite()) return false;
  return true;
}

std::size_t MlpParams::size() const {
  std::size_t n = 0;
  for (const auto& l : layers) n += l.weights.size() + l.biases.size();
  return n;
}

std::vector<double> MlpParams::flatten() const {
  std::vector<double> flat;
  flat.reserve(size());
  for (const auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) flat.push_back(l.weights(r, c));
    for (Eigen::Index r = 0; r < l.biases.size(); ++r) flat.push_back(l.biases(r));
  }
  return flat;
}

void MlpParams::assign(std::span<const double> flat) {
  if (flat.size() != size()) throw PreconditionError("flat parameter size mismatch");
  std::size_t k = 0;
  for (auto& l : layers) {
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = flat[k++];
    for (Eigen::Index r = 0; r < l.biases.size(); ++r) l.biases(r) = flat[k++];
  }
}

MlpParams& MlpParams::operator+=(const MlpParams& other) {
  if (!same_shape(other)) throw PreconditionError("parameter shape mismatch");
  for (std::size_t i = 0; i < layers.size(); ++i) {
    layers[i].weights += other.layers[i].weights;
    layers[i].biases += other.layers[i].biases;
  }
  return *this;
}

MlpParams& MlpParams::operator*=(double s) {
  for (auto& l : layers) {
    l.weights *= s;
    l.biases *= s;
  }
  return *this;
}

long count_params(const MlpSpec& spec) {
  const long w = spec.width;
  const long in = MlpSpec::input_dim;
  const long out = MlpSpec::output_dim;
  return (in + 1) * w + (spec.depth - 1) * (w * w + w) + (w + 1) * out;
}

MlpParams xavier_init(const MlpSpec& spec, std::uint64_t seed) {
  MlpParams p = MlpParams::zeros(spec);
  Rng rng(seed);
  for (auto& l : p.layers) {
    const double fan_sum = static_cast<double>(l.weights.rows() + l.weights.cols());
    const double bound = std::sqrt(6.0 / fan_sum);
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c)
        l.weights(r, c) = rng.uniform(-bound, bound);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Batched forward / reverse sweeps.
//
// Each hidden layer carries, per point, the activation h, its input Jacobian
// J (one column block per axis) and the Laplacian T of every neuron. With
// z = W h + b, G = W J, R = W T and s = tanh(z):
//   h' = s,  J' = s1 * G,  T' = s2 * sum_a G_a^2 + s1 * R
// where s1 = 1 - s^2 and s2 = -2 s s1. The network Laplacian is w_o . T_L.
// Columns of every matrix are laid out as [values | J_x | J_y | J_z | T],
// one block of N points each.
// ---------------------------------------------------------------------------

BatchEvaluator::BatchEvaluator(Eigen::Matrix3Xd points, bool with_laplacian)
    : points_(std::move(points)),
      with_laplacian_(with_laplacian),
      blocks_(with_laplacian ? 5 : 1) {}

void BatchEvaluator::evaluate(const MlpParams& params) {
  const Eigen::Index n = points_.cols();
  const std::size_t depth = params.layers.size() - 1;
  cache_.resize(depth);

  Eigen::MatrixXd input(3, blocks_ * n);
  input.leftCols(n) = points_;
  if (with_laplacian_) {
    input.middleCols(n, 3 * n).setZero();
    for (int a = 0; a < 3; ++a) input.block(a, (1 + a) * n, 1, n).setOnes();
    input.rightCols(n).setZero();
  }

  for (std::size_t l = 0; l < depth; ++l) {
    const DenseLayer& layer = params.layers[l];
    LayerCache& c = cache_[l];
    c.input = std::move(input);
    c.pre.noalias() = layer.weights * c.input;
    c.pre.leftCols(n).colwise() += layer.biases;
    c.s = c.pre.leftCols(n).array().tanh().matrix();

    const Eigen::Index w = layer.weights.rows();
    input.resize(w, blocks_ * n);
    input.leftCols(n) = c.s;
    if (with_laplacian_) {
      const auto s = c.s.array();
      const Eigen::ArrayXXd s1 = 1.0 - s.square();
      const Eigen::ArrayXXd s2 = -2.0 * s * s1;
      c.q = (c.pre.middleCols(n, n).array().square() +
             c.pre.middleCols(2 * n, n).array().square() +
             c.pre.middleCols(3 * n, n).array().square())
                .matrix();
      for (int a = 0; a < 3; ++a)
        input.middleCols((1 + a) * n, n) = (s1 * c.pre.middleCols((1 + a) * n, n).array()).matrix();
      input.rightCols(n) = (s2 * c.q.array() + s1 * c.pre.rightCols(n).array()).matrix();
    }
  }

  last_hidden_ = std::move(input);
  const DenseLayer& outl = params.layers.back();
  const Eigen::RowVectorXd w_o = outl.weights.row(0);
  out_ = (w_o * last_hidden_.leftCols(n)).transpose();
  out_.array() += outl.biases(0);
  if (with_laplacian_)
    lap_ = (w_o * last_hidden_.rightCols(n)).transpose();
  else
    lap_.resize(0);
}

void BatchEvaluator::pullback(const MlpParams& params, const Eigen::VectorXd& d_out,
                              const Eigen::VectorXd* d_lap, MlpParams& grad) {
  const Eigen::Index n = points_.cols();
  if (d_out.size() != n) throw PreconditionError("output cotangent size mismatch");
  if (d_lap != nullptr && (!with_laplacian_ || d_lap->size() != n))
    throw PreconditionError("Laplacian cotangent requires a Laplacian evaluator of matching size");
  if (!grad.same_shape(params)) grad = MlpParams::zeros(params.spec);

  const std::size_t depth = params.layers.size() - 1;
  const DenseLayer& outl = params.layers.back();

  // Cotangent of the output layer's pre-activation blocks.
  Eigen::RowVectorXd d_pre_o = Eigen::RowVectorXd::Zero(blocks_ * n);
  d_pre_o.leftCols(n) = d_out.transpose();
  if (d_lap != nullptr) d_pre_o.rightCols(n) = d_lap->transpose();
  grad.layers.back().weights.noalias() = d_pre_o * last_hidden_.transpose();
  grad.layers.back().biases(0) = d_out.sum();

  Eigen::MatrixXd d_hidden = outl.weights.transpose() * d_pre_o;

  Eigen::MatrixXd d_pre;
  for (std::size_t li = depth; li-- > 0;) {
    const DenseLayer& layer = params.layers[li];
    const LayerCache& c = cache_[li];
    const auto s = c.s.array();
    const Eigen::ArrayXXd s1 = 1.0 - s.square();

    d_pre.resize(layer.weights.rows(), blocks_ * n);
    Eigen::ArrayXXd ds = d_hidden.leftCols(n).array();
    if (with_laplacian_) {
      const Eigen::ArrayXXd s2 = -2.0 * s * s1;
      const auto dT = d_hidden.rightCols(n).array();
      const Eigen::ArrayXXd dq = dT * s2;
      Eigen::ArrayXXd ds1 = dT * c.pre.rightCols(n).array();
      for (int a = 0; a < 3; ++a) {
        const auto dJ = d_hidden.middleCols((1 + a) * n, n).array();
        const auto G = c.pre.middleCols((1 + a) * n, n).array();
        ds1 += dJ * G;
        d_pre.middleCols((1 + a) * n, n) = (s1 * dJ + 2.0 * G * dq).matrix();
      }
      d_pre.rightCols(n) = (dT * s1).matrix();
      ds += dT * c.q.array() * (6.0 * s.square() - 2.0) - 2.0 * s * ds1;
    }
    d_pre.leftCols(n) = (ds * s1).matrix();

    DenseLayer& g = grad.layers[li];
    g.weights.noalias() = d_pre * c.input.transpose();
    g.biases = d_pre.leftCols(n).rowwise().sum();
    if (li > 0) d_hidden.noalias() = layer.weights.transpose() * d_pre;
  }
}

// ---------------------------------------------------------------------------

namespace {

Eigen::Matrix3Xd column(const Point3& p) {
  Eigen::Matrix3Xd m(3, 1);
  m << p.x, p.y, p.z;
  return m;
}

}  // namespace

double forward(const MlpParams& params, const Point3& p) {
  BatchEvaluator ev(column(p), false);
  ev.evaluate(params);
  return ev.outputs()(0);
}

MlpParams backprop(const MlpParams& params, std::span<const Sample> batch) {
  if (batch.empty()) throw PreconditionError("backprop needs a nonempty batch");
  Eigen::Matrix3Xd pts(3, batch.size());
  Eigen::VectorXd targets(batch.size());
  for (std::size_t i = 0; i < batch.size(); ++i) {
    pts.col(i) << batch[i].point.x, batch[i].point.y, batch[i].point.z;
    targets(i) = batch[i].target;
  }
  BatchEvaluator ev(std::move(pts), false);
  ev.evaluate(params);
  const Eigen::VectorXd d_out =
      (2.0 / static_cast<double>(batch.size())) * (ev.outputs() - targets);
  MlpParams grad = MlpParams::zeros(params.spec);
  ev.pullback(params, d_out, nullptr, grad);
  return grad;
}

double laplacian(const MlpParams& params, const Point3& p) {
  BatchEvaluator ev(column(p), true);
  ev.evaluate(params);
  return ev.laplacians()(0);
}

MlpParams laplacian_param_grad(const MlpParams& params, const Point3& p) {
  BatchEvaluator ev(column(p), true);
  ev.evaluate(params);
  const Eigen::VectorXd zero = Eigen::VectorXd::Zero(1);
  const Eigen::VectorXd one = Eigen::VectorXd::Ones(1);
  MlpParams grad = MlpParams::zeros(params.spec);
  ev.pullback(params, zero, &one, grad);
  return grad;
}

// ---------------------------------------------------------------------------

AdamState AdamState::fresh(const MlpParams& like, double lr) {
  if (!(lr > 0.0)) throw DomainError("learning rate must be positive");
  AdamState s;
  s.lr = lr;
  s.m = MlpParams::zeros(like.spec);
  s.v = MlpParams::zeros(like.spec);
  return s;
}

void adam_step(AdamState& state, MlpParams& params, const MlpParams& grads) {
  if (!params.same_shape(grads) || !params.same_shape(state.m) || !params.same_shape(state.v))
    throw PreconditionError("adam_step shape mismatch");
  ++state.step;
  const double t = static_cast<double>(state.step);
  const double c1 = 1.0 - std::pow(state.beta1, t);
  const double c2 = 1.0 - std::pow(state.beta2, t);
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double lr = state.lr;
  const double eps = state.epsilon;
  auto update = [&](auto& p, auto& m, auto& v, const auto& g) {
    m.array() = b1 * m.array() + (1.0 - b1) * g.array();
    v.array() = b2 * v.array() + (1.0 - b2) * g.array().square();
    p.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + eps);
  };
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    update(params.layers[i].weights, state.m.layers[i].weights, state.v.layers[i].weights,
           grads.layers[i].weights);
    update(params.layers[i].biases, state.m.layers[i].biases, state.v.layers[i].biases,
           grads.layers[i].biases);
  }
}

// ---------------------------------------------------------------------------

nlohmann::json checkpoint_to_json(const MlpParams& params, const AdamState* adam,
                                  std::uint64_t seed, long epoch) {
  nlohmann::json j;
  j["spec"] = {{"L", params.spec.depth}, {"W", params.spec.width}};
  nlohmann::json layers = nlohmann::json::array();
  for (const auto& l : params.layers) {
    std::vector<double> w;
    w.reserve(l.weights.size());
    for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
      for (Eigen::Index c = 0; c < l.weights.cols(); ++c) w.push_back(l.weights(r, c));
    std::vector<double> b(l.biases.data(), l.biases.data() + l.biases.size());
    layers.push_back({{"weights", w}, {"biases", b}});
  }
  j["layers"] = std::move(layers);
  if (adam != nullptr) {
    j["adam"] = {{"t", adam->step},
                 {"lr", adam->lr},
                 {"beta1", adam->beta1},
                 {"beta2", adam->beta2},
                 {"epsilon", adam->epsilon}};
  }
  j["seed"] = seed;
  j["epoch"] = epoch;
  return j;
}

MlpParams params_from_json(const nlohmann::json& j) {
  try {
    MlpSpec spec{j.at("spec").at("L").get<int>(), j.at("spec").at("W").get<int>()};
    MlpParams p = MlpParams::zeros(spec);
    const auto& layers = j.at("layers");
    if (layers.size() != p.layers.size())
      throw ConfigError("checkpoint layer count does not match its spec");
    for (std::size_t i = 0; i < p.layers.size(); ++i) {
      auto w = layers[i].at("weights").get<std::vector<double>>();
      auto b = layers[i].at("biases").get<std::vector<double>>();
      DenseLayer& l = p.layers[i];
      if (w.size() != static_cast<std::size_t>(l.weights.size()) ||
          b.size() != static_cast<std::size_t>(l.biases.size()))
        throw ConfigError("checkpoint layer " + std::to_string(i) + " has the wrong shape");
      std::size_t k = 0;
      for (Eigen::Index r = 0; r < l.weights.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weights.cols(); ++c) l.weights(r, c) = w[k++];
      for (std::size_t r = 0; r < b.size(); ++r) l.biases(static_cast<Eigen::Index>(r)) = b[r];
    }
    return p;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed network checkpoint: ") + e.what());
  }
}

}  // namespace helio
