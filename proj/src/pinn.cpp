// SPDX-License-Identifier: Apache-2.0
#include "helio/pinn.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <tuple>

#include <nlohmann/json.hpp>

#include "helio/error.hpp"

namespace helio {

PhysicsParams PhysicsParams::make(double freq_hz, double speed_of_sound) {
  if (!(freq_hz > 0.0)) throw DomainError("frequency must be positive");
  if (!(speed_of_sound > 0.0)) throw DomainError("speed of sound must be positive");
  return {freq_hz, 2.0 * std::numbers::pi * freq_hz, speed_of_sound};
}

const char* part_name(Part p) {
  switch (p) {
    case Part::real_left: return "real_left";
    case Part::real_right: return "real_right";
    case Part::imag_left: return "imag_left";
    case Part::imag_right: return "imag_right";
  }
  return "?";
}

bool part_is_left(Part p) { return p == Part::real_left || p == Part::imag_left; }
bool part_is_real(Part p) { return p == Part::real_left || p == Part::real_right; }

double part_value(Part p, cdouble pressure) {
  return part_is_real(p) ? pressure.real() : pressure.imag();
}

std::array<PartData, 4> split_parts(const FieldDataset& ds) {
  std::array<PartData, 4> parts;
  for (const auto& e : ds.entries) {
    const bool left = is_left(e.point);
    for (Part p : all_parts) {
      if (part_is_left(p) != left) continue;
      auto& pd = parts[static_cast<int>(p)];
      pd.colloc.points.push_back(e.point);
      if (e.tag == SetTag::known) pd.train.push_back({e.point, part_value(p, e.pressure)});
    }
  }
  return parts;
}

int pinn_width_for_freq(double freq_hz) {
  if (!(freq_hz > 0.0)) throw DomainError("frequency must be positive");
  if (freq_hz < 3000.0) return static_cast<int>(std::ceil(freq_hz / 500.0));
  if (freq_hz <= 6000.0) return 6;
  return static_cast<int>(std::ceil(freq_hz / 1000.0));
}

namespace {

Eigen::Matrix3Xd to_matrix(std::span<const Point3> pts) {
  Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(pts.size()));
  for (std::size_t i = 0; i < pts.size(); ++i) m.col(static_cast<Eigen::Index>(i)) << pts[i].x, pts[i].y, pts[i].z;
  return m;
}

Eigen::Matrix3Xd to_matrix(std::span<const Sample> batch) {
  Eigen::Matrix3Xd m(3, static_cast<Eigen::Index>(batch.size()));
  for (std::size_t i = 0; i < batch.size(); ++i)
    m.col(static_cast<Eigen::Index>(i)) << batch[i].point.x, batch[i].point.y, batch[i].point.z;
  return m;
}

}  // namespace

double data_loss(const MlpParams& params, std::span<const Sample> batch) {
  if (batch.empty()) throw PreconditionError("data_loss needs a nonempty batch");
  BatchEvaluator ev(to_matrix(batch), false);
  ev.evaluate(params);
  double sum = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    const double r = batch[i].target - ev.outputs()(static_cast<Eigen::Index>(i));
    sum += r * r;
  }
  return sum / static_cast<double>(batch.size());
}

double pde_loss(const MlpParams& params, const CollocationSet& colloc, const PhysicsParams& phys) {
  if (colloc.points.empty()) throw PreconditionError("pde_loss needs collocation points");
  BatchEvaluator ev(to_matrix(colloc.points), true);
  ev.evaluate(params);
  double sum = 0.0;
  for (Eigen::Index i = 0; i < ev.outputs().size(); ++i) {
    const double r = helmholtz_residual(ev.laplacians()(i), ev.outputs()(i), phys);
    sum += r * r;
  }
  return sum / static_cast<double>(colloc.points.size());
}

double pde_loss(const FieldFunction& field, const CollocationSet& colloc, const PhysicsParams& phys) {
  if (colloc.points.empty()) throw PreconditionError("pde_loss needs collocation points");
  double sum = 0.0;
  for (const auto& p : colloc.points) {
    const FieldSample f = field(p);
    const double r = helmholtz_residual(f.laplacian, f.value, phys);
    sum += r * r;
  }
  return sum / static_cast<double>(colloc.points.size());
}

TrainResult train(std::span<const Sample> data, const CollocationSet& colloc,
                  const PhysicsParams& phys, const TrainConfig& cfg) {
  if (data.empty()) throw PreconditionError("training needs at least one sample");
  if (cfg.epochs < 1) throw DomainError("epochs must be at least 1");
  const bool pde = cfg.pde_loss_enabled;
  if (pde && colloc.points.empty())
    throw PreconditionError("PDE loss enabled but the collocation set is empty");

  const auto q = static_cast<Eigen::Index>(data.size());
  Eigen::VectorXd targets(q);
  for (Eigen::Index i = 0; i < q; ++i) targets(i) = data[static_cast<std::size_t>(i)].target;

  // With the PDE loss every training point is also a collocation point, so a
  // single sweep over the collocation set serves both loss terms.
  std::vector<Eigen::Index> data_index(static_cast<std::size_t>(q));
  std::optional<BatchEvaluator> ev;
  if (pde) {
    std::map<std::tuple<double, double, double>, Eigen::Index> where;
    for (std::size_t i = 0; i < colloc.points.size(); ++i) {
      const auto& p = colloc.points[i];
      where.emplace(std::make_tuple(p.x, p.y, p.z), static_cast<Eigen::Index>(i));
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& p = data[i].point;
      const auto it = where.find(std::make_tuple(p.x, p.y, p.z));
      if (it == where.end()) {
        std::ostringstream os;
        os << "training point (" << p.x << ", " << p.y << ", " << p.z
           << ") is not in the collocation set";
        throw PreconditionError(os.str());
      }
      data_index[i] = it->second;
    }
    ev.emplace(to_matrix(colloc.points), true);
  } else {
    for (Eigen::Index i = 0; i < q; ++i) data_index[static_cast<std::size_t>(i)] = i;
    ev.emplace(to_matrix(data), false);
  }

  const Eigen::Index n = static_cast<Eigen::Index>(ev->size());
  const double k2 = phys.wavenumber_sq();
  const double inv_q = 1.0 / static_cast<double>(q);
  const double inv_d = 1.0 / static_cast<double>(n);

  TrainResult result{xavier_init(cfg.spec, cfg.seed), {}, {}};
  result.adam = AdamState::fresh(result.params, cfg.lr);
  MlpParams grad = MlpParams::zeros(cfg.spec);
  Eigen::VectorXd d_out(n);
  Eigen::VectorXd d_lap(n);

  for (long epoch = 0; epoch < cfg.epochs; ++epoch) {
    ev->evaluate(result.params);
    const Eigen::VectorXd& out = ev->outputs();

    d_out.setZero();
    double data_sum = 0.0;
    for (Eigen::Index i = 0; i < q; ++i) {
      const Eigen::Index j = data_index[static_cast<std::size_t>(i)];
      const double r = out(j) - targets(i);
      data_sum += r * r;
      d_out(j) += 2.0 * inv_q * r;
    }
    const double l_data = data_sum * inv_q;

    double l_pde = 0.0;
    if (pde) {
      const Eigen::VectorXd& lap = ev->laplacians();
      double pde_sum = 0.0;
      for (Eigen::Index j = 0; j < n; ++j) {
        const double r = lap(j) / k2 + out(j);
        pde_sum += r * r;
        d_out(j) += 2.0 * inv_d * r;
        d_lap(j) = 2.0 * inv_d * r / k2;
      }
      l_pde = pde_sum * inv_d;
    }

    const double total = l_data + l_pde;
    if (!std::isfinite(total)) {
      std::ostringstream os;
      os << "non-finite loss at epoch " << epoch << " (data " << l_data << ", pde " << l_pde << ")";
      throw NumericError(os.str());
    }
    if (cfg.log_every > 0 && (epoch % cfg.log_every == 0 || epoch + 1 == cfg.epochs))
      result.log.push_back({epoch, l_data, l_pde, total});

    ev->pullback(result.params, d_out, pde ? &d_lap : nullptr, grad);
    adam_step(result.adam, result.params, grad);
  }
  return result;
}

QuadrantModel assemble(std::array<MlpParams, 4> nets, const PhysicsParams& phys,
                       const SphereGeometry& geometry, double scale) {
  for (const auto& n : nets)
    if (!(n.spec == nets[0].spec) || !n.same_shape(nets[0]))
      throw PreconditionError("all four part networks must share one spec");
  return {std::move(nets), phys, geometry, scale};
}

QuadrantModel train_quadrant(const FieldDataset& ds, const TrainConfig& base,
                             const std::array<std::uint64_t, 4>& seeds, double speed_of_sound,
                             int jobs) {
  const auto parts = split_parts(ds);
  const PhysicsParams phys = PhysicsParams::make(ds.freq_hz, speed_of_sound);
  std::array<MlpParams, 4> nets;
  std::array<std::exception_ptr, 4> errors;
  auto run = [&](int p) {
    try {
      TrainConfig cfg = base;
      cfg.seed = seeds[static_cast<std::size_t>(p)];
      nets[static_cast<std::size_t>(p)] = train(parts[static_cast<std::size_t>(p)].train,
                                                parts[static_cast<std::size_t>(p)].colloc, phys, cfg)
                                              .params;
    } catch (...) {
      errors[static_cast<std::size_t>(p)] = std::current_exception();
    }
  };
  if (jobs <= 1) {
    for (int p = 0; p < 4; ++p) run(p);
  } else {
    std::atomic<int> next{0};
    std::vector<std::jthread> pool;
    for (int i = 0; i < std::min(jobs, 4); ++i)
      pool.emplace_back([&] {
        for (int p = next++; p < 4; p = next++) run(p);
      });
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return assemble(std::move(nets), phys, ds.geometry, ds.scale);
}

std::vector<cdouble> predict(const QuadrantModel& model, std::span<const Direction> dirs) {
  std::vector<cdouble> out(dirs.size());
  for (int side = 0; side < 2; ++side) {
    const bool left = side == 0;
    std::vector<std::size_t> idx;
    std::vector<Point3> pts;
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      const Point3 p = sph_to_cart(dirs[i], model.geometry.radius_m);
      if (is_left(p) == left) {
        idx.push_back(i);
        pts.push_back(p);
      }
    }
    if (pts.empty()) continue;
    const Part re = left ? Part::real_left : Part::real_right;
    const Part im = left ? Part::imag_left : Part::imag_right;
    BatchEvaluator ev(to_matrix(pts), false);
    ev.evaluate(model.nets[static_cast<int>(re)]);
    const Eigen::VectorXd re_out = ev.outputs();
    ev.evaluate(model.nets[static_cast<int>(im)]);
    for (std::size_t k = 0; k < idx.size(); ++k)
      out[idx[k]] = {re_out(static_cast<Eigen::Index>(k)), ev.outputs()(static_cast<Eigen::Index>(k))};
  }
  return out;
}

nlohmann::json quadrant_to_json(const QuadrantModel& model,
                                const std::array<std::uint64_t, 4>& seeds, long epoch) {
  nlohmann::json parts = nlohmann::json::object();
  for (Part p : all_parts) {
    const int i = static_cast<int>(p);
    parts[part_name(p)] = checkpoint_to_json(model.nets[i], nullptr, seeds[i], epoch);
  }
  return {{"freq_hz", model.phys.freq_hz},
          {"c", model.phys.speed_of_sound},
          {"radius_m", model.geometry.radius_m},
          {"scale", model.scale},
          {"parts", std::move(parts)}};
}

QuadrantModel quadrant_from_json(const nlohmann::json& j) {
  try {
    std::array<MlpParams, 4> nets;
    for (Part p : all_parts) nets[static_cast<int>(p)] = params_from_json(j.at("parts").at(part_name(p)));
    return assemble(std::move(nets),
                    PhysicsParams::make(j.at("freq_hz").get<double>(), j.at("c").get<double>()),
                    SphereGeometry{j.at("radius_m").get<double>()}, j.at("scale").get<double>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed quadrant checkpoint: ") + e.what());
  }
}

}  // namespace helio
