#include "msplat/neuralode.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "msplat/nninit.hpp"

namespace msplat {

std::vector<double> sample_times(int n) {
  if (n < 2) throw std::invalid_argument("sample_times: need at least 2 samples");
  std::vector<double> taus(static_cast<size_t>(n));
  for (int i = 0; i < n; ++i) taus[static_cast<size_t>(i)] = static_cast<double>(i) / static_cast<double>(n - 1);
  return taus;
}

int anchor_index(int n) { return n / 2; }

Var rk4_step(Var z, double tau, double h, const DerivFn& f) {
  Var k1 = f(z, tau);
  Var k2 = f(add(z, mul(k1, h * 0.5)), tau + h * 0.5);
  Var k3 = f(add(z, mul(k2, h * 0.5)), tau + h * 0.5);
  Var k4 = f(add(z, mul(k3, h)), tau + h);
  Var incr = add(add(k1, mul(add(k2, k3), 2.0)), k4);
  return add(z, mul(incr, h / 6.0));
}

std::vector<Var> integrate(Var z_anchor, double tau_anchor, const std::vector<double>& targets, int substeps,
                           const DerivFn& f) {
  if (substeps < 1) throw std::invalid_argument("integrate: substeps must be >= 1");
  for (double t : targets)
    if (t < 0.0 || t > 1.0) throw std::invalid_argument("integrate: target outside [0,1]");

  const size_t n = targets.size();
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return targets[a] < targets[b]; });

  std::vector<Var> out(n);
  auto run_interval = [&](Var z, double from, double to) {
    const double h = (to - from) / substeps;
    for (int i = 0; i < substeps; ++i) z = rk4_step(z, from + i * h, h, f);
    return z;
  };

  // Forward sweep over targets above the anchor.
  Var z = z_anchor;
  double tau = tau_anchor;
  for (size_t k = 0; k < n; ++k) {
    const size_t idx = order[k];
    const double target = targets[idx];
    if (target < tau_anchor) continue;
    if (target == tau_anchor) {
      out[idx] = z_anchor;
      continue;
    }
    z = run_interval(z, tau, target);
    tau = target;
    out[idx] = z;
  }
  // Backward sweep below the anchor.
  z = z_anchor;
  tau = tau_anchor;
  for (size_t k = n; k-- > 0;) {
    const size_t idx = order[k];
    const double target = targets[idx];
    if (target >= tau_anchor) continue;
    z = run_interval(z, tau, target);
    tau = target;
    out[idx] = z;
  }
  return out;
}

std::vector<Var> integrate_grid(Var z_anchor, const std::vector<double>& taus, int anchor_idx, int substeps,
                                const DerivFn& f) {
  const int n = static_cast<int>(taus.size());
  if (n < 2) throw std::invalid_argument("integrate_grid: need at least 2 samples");
  if (anchor_idx < 0 || anchor_idx >= n) throw std::invalid_argument("integrate_grid: anchor index out of range");
  if (substeps < 1) throw std::invalid_argument("integrate_grid: substeps must be >= 1");
  const double tau_anchor = taus[static_cast<size_t>(anchor_idx)];
  const double h = (taus.back() - taus.front()) / (static_cast<double>(n - 1) * substeps);

  std::vector<Var> out(static_cast<size_t>(n));
  out[static_cast<size_t>(anchor_idx)] = z_anchor;
  // Step counts are relative to the anchor so refined grids with
  // proportionally fewer substeps revisit identical (tau, h) pairs.
  Var z = z_anchor;
  int64_t step = 0;
  for (int i = anchor_idx + 1; i < n; ++i) {
    for (int s = 0; s < substeps; ++s, ++step) z = rk4_step(z, tau_anchor + static_cast<double>(step) * h, h, f);
    out[static_cast<size_t>(i)] = z;
  }
  z = z_anchor;
  step = 0;
  for (int i = anchor_idx - 1; i >= 0; --i) {
    for (int s = 0; s < substeps; ++s, ++step) z = rk4_step(z, tau_anchor - static_cast<double>(step) * h, -h, f);
    out[static_cast<size_t>(i)] = z;
  }
  return out;
}

DerivativeNet::DerivativeNet(ParamStore& store, std::string prefix, int latent_dim, std::mt19937_64& rng)
    : store_(&store), prefix_(std::move(prefix)), dim_(latent_dim) {
  if (latent_dim % 2 != 0) throw std::invalid_argument("DerivativeNet: latent_dim must be even");
  const int half = latent_dim / 2;
  store.create(prefix_ + ".rot.W", nninit::xavier(half, half, rng));
  store.create(prefix_ + ".rot.b", nninit::zeros({1, half}));
  store.create(prefix_ + ".tr.W", nninit::xavier(half, half, rng));
  store.create(prefix_ + ".tr.b", nninit::zeros({1, half}));
}

DerivFn DerivativeNet::bind(Tape& tape) const {
  const int half = dim_ / 2;
  Var Wr = tape.param(*store_, prefix_ + ".rot.W");
  Var br = tape.param(*store_, prefix_ + ".rot.b");
  Var Wt = tape.param(*store_, prefix_ + ".tr.W");
  Var bt = tape.param(*store_, prefix_ + ".tr.b");
  return [=, dim = dim_](Var z, double) -> Var {
    if (z.shape() != std::vector<int>{1, dim})
      throw std::runtime_error("DerivativeNet: latent must be [1," + std::to_string(dim) + "], got " +
                               z.val().shape_str());
    Var zr = slice(z, 1, 0, half);
    Var zt = slice(z, 1, half, half);
    Var dr = relu(add(matmul(zr, Wr), br));
    Var dt = relu(add(matmul(zt, Wt), bt));
    return concat({dr, dt}, 1);
  };
}

}  // namespace msplat
