#pragma once

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "msplat/tape.hpp"

namespace msplat {

/// Uniform exposure-time samples tau_i = i/(N-1), i = 0..N-1. Rejects N < 2.
std::vector<double> sample_times(int n);

/// Index of the mid-exposure anchor sample (middle for odd N).
int anchor_index(int n);

/// Latent derivative callable: dz/dtau at (z, tau). z is a [1,D] row.
using DerivFn = std::function<Var(Var, double)>;

/// Classical fourth-order Runge-Kutta update. Negative h integrates
/// backward in time.
Var rk4_step(Var z, double tau, double h, const DerivFn& f);

/// Integrates from (z_anchor, tau_anchor) to each target time, chaining
/// through the sorted targets with `substeps` RK4 steps per adjacent
/// interval. A target equal to tau_anchor returns z_anchor itself.
/// Results are in the order of `targets` (which need not be sorted).
std::vector<Var> integrate(Var z_anchor, double tau_anchor, const std::vector<double>& targets, int substeps,
                           const DerivFn& f);

/// Grid variant used for trajectories: taus must be uniformly spaced with
/// the anchor at anchor_idx. All RK4 steps use the single global step
/// h = span/((N-1)*substeps) and times tau_anchor +/- j*h, so resampling
/// at a refined grid with proportionally fewer substeps reproduces the
/// coarse-grid states bit-exactly at shared times.
std::vector<Var> integrate_grid(Var z_anchor, const std::vector<double>& taus, int anchor_idx, int substeps,
                                const DerivFn& f);

/// Learned latent derivative: two parallel single-layer affine maps with
/// relu, one acting on the rotation-related half of the latent and one on
/// the translation-related half, outputs concatenated.
class DerivativeNet {
 public:
  /// Registers parameters "<prefix>.rot.W/.rot.b/.tr.W/.tr.b" (Xavier
  /// uniform weights, zero biases). latent_dim must be even.
  DerivativeNet(ParamStore& store, std::string prefix, int latent_dim, std::mt19937_64& rng);

  /// Binds the parameters on a tape; the callable stays valid while the
  /// tape lives.
  DerivFn bind(Tape& tape) const;

  int latent_dim() const { return dim_; }

 private:
  ParamStore* store_;
  std::string prefix_;
  int dim_;
};

}  // namespace msplat
