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

#include "infofuse/unrolled.hpp"

#include <algorithm>
#include <stdexcept>

#include <fmt/format.h>

#include "infofuse/tape.hpp"

namespace infofuse {

NodeSpec node_spec(const LocalModel& model) {
  NodeSpec s;
  s.transform = model.transform;
  s.transition = localize_motion(model.transform, model.transform, transition_matrix(model.motion));
  s.process_noise = model.process_noise();
  s.noise_cov = model.sensor.noise_cov;
  s.measure = [model](const Vector& x) { return model.predicted_measurement(x); };
  s.jacobian = [model](const Vector& x) { return model.measurement_jacobian(x); };
  if (!model.sensor.is_linear()) {
    s.hessians = [model](const Vector& x) {
      const Matrix& tp = model.transform.pinv();
      std::vector<Matrix> out;
      for (const Matrix& h : measurement_hessians(model.sensor, model.lift(x))) out.push_back(tp.transpose() * h * tp);
      return out;
    };
  }
  s.angular = angular_rows(model.sensor);
  return s;
}

NodeSpec linear_node_spec(const InternodalTransform& transform, const Matrix& global_transition,
                          const Matrix& global_process_noise, const Matrix& c, const Matrix& noise_cov) {
  NodeSpec s;
  s.transform = transform;
  s.transition = localize_motion(transform, transform, global_transition);
  s.process_noise = symmetrize(transform.matrix() * global_process_noise * transform.matrix().transpose());
  s.noise_cov = noise_cov;
  s.measure = [c](const Vector& x) -> Vector { return c * x; };
  s.jacobian = [c](const Vector&) -> Matrix { return c; };
  s.angular.assign(static_cast<std::size_t>(c.rows()), false);
  return s;
}

NetworkSpec network_spec(std::vector<NodeSpec> nodes, const GaussianBelief& initial) {
  NetworkSpec spec;
  std::vector<InternodalTransform> ts;
  for (const auto& n : nodes) ts.push_back(n.transform);
  spec.graph = build_graph(ts);
  spec.nodes = std::move(nodes);
  spec.initial = initial;
  return spec;
}

NetworkSpec network_spec(const std::vector<LocalModel>& nodes, const GaussianBelief& initial) {
  std::vector<NodeSpec> specs;
  for (const auto& n : nodes) specs.push_back(node_spec(n));
  return network_spec(std::move(specs), initial);
}

namespace {

using ad::Tape;
using ad::Var;

struct BoundModel {
  std::vector<Var> blocks;  // ParamBlock order
  Matrix input_scale;
  int m = 0;

  Var operator[](ParamBlock b) const { return blocks[static_cast<std::size_t>(b)]; }
};

BoundModel bind(Tape& t, const DifnetModel& model, bool track) {
  BoundModel b;
  b.m = model.shape().m;
  b.input_scale = model.input_scale();
  for (int k = 0; k < kNumParamBlocks; ++k) {
    Matrix v = model.block(static_cast<ParamBlock>(k));
    b.blocks.push_back(track ? t.leaf(std::move(v)) : t.constant(std::move(v)));
  }
  return b;
}

Vector gather(const Tape& t, const BoundModel& b, const DifnetModel& model) {
  Vector g(model.params().size());
  const auto layout = param_layout(model.shape());
  for (int k = 0; k < kNumParamBlocks; ++k) {
    const Matrix gk = t.grad(b.blocks[static_cast<std::size_t>(k)]);
    g.segment(layout[k].offset, gk.size()) = Eigen::Map<const Vector>(gk.data(), gk.size());
  }
  return g;
}

// Records one trajectory. Returns the per-node losses.
std::vector<Var> unroll(Tape& t, const NetworkSpec& spec, const std::vector<BoundModel>& models,
                        const Trajectory& traj, bool detach_exchange) {
  const int n = static_cast<int>(spec.nodes.size());
  const int m = spec.state_dim();
  if (static_cast<int>(models.size()) != n) throw std::invalid_argument("unroll: one model per node");
  if (static_cast<int>(traj.measurements.size()) != n) {
    throw std::invalid_argument("unroll: trajectory sensor count differs from the network");
  }

  std::vector<Var> f, ft, q, r, tj, tjt;
  std::vector<std::vector<Var>> tij(static_cast<std::size_t>(n)), tijt(static_cast<std::size_t>(n));
  std::vector<Var> x, p, hidden;
  for (int j = 0; j < n; ++j) {
    const NodeSpec& s = spec.nodes[static_cast<std::size_t>(j)];
    f.push_back(t.constant(s.transition));
    ft.push_back(t.constant(s.transition.transpose()));
    q.push_back(t.constant(s.process_noise));
    r.push_back(t.constant(s.noise_cov));
    tj.push_back(t.constant(s.transform.matrix()));
    tjt.push_back(t.constant(s.transform.matrix().transpose()));
    const Matrix& tm = s.transform.matrix();
    x.push_back(t.constant(tm * spec.initial.mean));
    p.push_back(t.constant(symmetrize(tm * spec.initial.cov * tm.transpose())));
    hidden.push_back(t.constant(Vector::Zero(models[static_cast<std::size_t>(j)][ParamBlock::kBz].rows())));
    for (int k = 0; k < n; ++k) {
      tij[static_cast<std::size_t>(j)].push_back(t.constant(spec.graph.transform(j, k)));
      tijt[static_cast<std::size_t>(j)].push_back(t.constant(spec.graph.transform(j, k).transpose()));
    }
  }
  const int slot = m + m * m;

  std::vector<std::vector<Var>> sq_err(static_cast<std::size_t>(n));
  for (int k = 1; k <= traj.steps(); ++k) {
    std::vector<Var> xp(n, Var{}), yprior(n, Var{}), ivec(n, Var{}), imat(n, Var{});
    for (int j = 0; j < n; ++j) {
      const auto ju = static_cast<std::size_t>(j);
      const NodeSpec& s = spec.nodes[ju];
      xp[ju] = ad::matmul(f[ju], x[ju]);
      Var pp = ad::symmetrize(ad::add(ad::matmul(ad::matmul(f[ju], p[ju]), ft[ju]), q[ju]));
      const Vector xv = xp[ju].value();
      Var zhat, h;
      if (s.hessians) {
        const Matrix jac = s.jacobian(xv);
        zhat = ad::apply(xp[ju], s.measure(xv), jac);
        h = ad::jacobian_of(xp[ju], jac, s.hessians(xv));
      } else {
        h = t.constant(s.jacobian(xv));
        zhat = ad::matmul(h, xp[ju]);
      }
      Var z = t.constant(traj.measurements[ju].row(k - 1).transpose());
      Var innov = ad::sub(z, zhat);
      if (std::any_of(s.angular.begin(), s.angular.end(), [](bool a) { return a; })) {
        innov = ad::wrap_rows(innov, s.angular);
      }
      Var pht = ad::matmul(pp, ad::transpose(h));
      Var sc = ad::symmetrize(ad::add(ad::matmul(h, pht), r[ju]));
      Var gain = ad::matmul(pht, ad::spd_inverse(sc));
      Var xpost = ad::add(xp[ju], ad::matmul(gain, innov));
      Var ppost = ad::symmetrize(ad::sub(pp, ad::matmul(ad::matmul(gain, sc), ad::transpose(gain))));
      yprior[ju] = ad::spd_inverse(pp);
      Var ypost = ad::spd_inverse(ppost);
      ivec[ju] = ad::sub(ad::matmul(ypost, xpost), ad::matmul(yprior[ju], xp[ju]));
      imat[ju] = ad::symmetrize(ad::sub(ypost, yprior[ju]));
    }

    // What the nodes receive from the exchange.
    std::vector<Var> ivec_c = ivec, imat_c = imat;
    if (detach_exchange) {
      for (int j = 0; j < n; ++j) {
        ivec_c[static_cast<std::size_t>(j)] = ad::detach(ivec[static_cast<std::size_t>(j)]);
        imat_c[static_cast<std::size_t>(j)] = ad::detach(imat[static_cast<std::size_t>(j)]);
      }
    }

    for (int i = 0; i < n; ++i) {
      const auto iu = static_cast<std::size_t>(i);
      const BoundModel& bm = models[iu];
      const auto& hood = spec.graph.neighborhood(i);
      std::vector<Var> parts;
      for (int j = 0; j < n; ++j) {
        const auto ju = static_cast<std::size_t>(j);
        if (std::find(hood.begin(), hood.end(), j) == hood.end()) {
          parts.push_back(t.constant(Vector::Zero(slot)));
          continue;
        }
        const Var iv = ivec_c[ju], im = imat_c[ju];
        parts.push_back(ad::matmul(tjt[ju], iv));
        parts.push_back(ad::flatten_row_major(ad::matmul(ad::matmul(tjt[ju], im), tj[ju])));
      }
      Var u = ad::cwise_scale(ad::concat_rows(parts), bm.input_scale);
      Var a1 = ad::affine(bm[ParamBlock::kInW], u, bm[ParamBlock::kInB], true);
      const ad::GruParams gp{bm[ParamBlock::kWz], bm[ParamBlock::kUz], bm[ParamBlock::kBz],
                             bm[ParamBlock::kWr], bm[ParamBlock::kUr], bm[ParamBlock::kBr],
                             bm[ParamBlock::kWh], bm[ParamBlock::kUh], bm[ParamBlock::kBh]};
      hidden[iu] = ad::gru_cell(gp, a1, hidden[iu]);
      Var a2 = ad::affine(bm[ParamBlock::kMidW], hidden[iu], bm[ParamBlock::kMidB], true);
      Var out = ad::affine(bm[ParamBlock::kOutW], a2, bm[ParamBlock::kOutB], false);

      std::vector<Var> info_terms{yprior[iu]};
      std::vector<Var> vec_terms{ad::matmul(yprior[iu], xp[iu])};
      for (int j : hood) {
        const auto ju = static_cast<std::size_t>(j);
        const Var iv = ivec_c[ju], im = imat_c[ju];
        Var w = ad::reshape_row_major(ad::segment(out, static_cast<Eigen::Index>(j) * m * m, m * m), m, m);
        Var mt = ad::matmul(ad::matmul(tj[iu], w), tjt[iu]);
        Var a = ad::matmul(mt, tijt[iu][ju]);
        info_terms.push_back(ad::matmul(ad::matmul(a, im), tij[iu][ju]));
        vec_terms.push_back(ad::matmul(a, iv));
      }
      p[iu] = ad::spd_inverse(ad::symmetrize(ad::sum(info_terms)));
      x[iu] = ad::matmul(p[iu], ad::sum(vec_terms));

      const Vector target = spec.nodes[iu].transform.matrix() * traj.state(k);
      sq_err[iu].push_back(ad::squared_norm(ad::sub(x[iu], t.constant(target))));
    }
  }

  std::vector<Var> losses;
  for (int i = 0; i < n; ++i) losses.push_back(ad::scale(ad::sum(sq_err[static_cast<std::size_t>(i)]), 1.0 / traj.steps()));
  return losses;
}

}  // namespace

std::vector<double> trajectory_loss(const NetworkSpec& spec, const std::vector<DifnetModel>& models,
                                    const Trajectory& trajectory) {
  Tape t;
  std::vector<BoundModel> bound;
  for (const auto& m : models) bound.push_back(bind(t, m, false));
  std::vector<double> out;
  for (Var l : unroll(t, spec, bound, trajectory, false)) out.push_back(l.scalar());
  return out;
}

TrajectoryGradient trajectory_gradient(const NetworkSpec& spec, const std::vector<DifnetModel>& models,
                                       const Trajectory& trajectory, GradientMode mode) {
  Tape t;
  t.reserve(static_cast<std::size_t>(trajectory.steps()) * spec.nodes.size() * 96);
  std::vector<BoundModel> bound;
  for (const auto& m : models) bound.push_back(bind(t, m, true));
  const std::vector<Var> losses = unroll(t, spec, bound, trajectory, mode == GradientMode::kLocal);

  TrajectoryGradient out;
  for (Var l : losses) out.loss.push_back(l.scalar());
  out.grads.resize(models.size());
  if (mode == GradientMode::kLocal) {
    t.backward(ad::sum(losses));
    for (std::size_t i = 0; i < models.size(); ++i) out.grads[i] = gather(t, bound[i], models[i]);
  } else {
    for (std::size_t i = 0; i < models.size(); ++i) {
      t.backward(losses[i]);
      out.grads[i] = gather(t, bound[i], models[i]);
    }
  }
  return out;
}

}  // namespace infofuse
