#pragma once

#include "msplat/liegroup.hpp"
#include "msplat/tape.hpp"

namespace msplat {

/// Rigid transform whose rotation and translation live on a tape, so
/// gradients flow through pose chains into whatever produced them.
struct PoseVar {
  Var R;  // [3,3]
  Var t;  // [3]
};

namespace dg {

/// Skew-symmetric [3,3] from a [3] vector.
Var skew(Var w);

/// w / max(||w||, eps).
Var normalize(Var w, double eps = 1e-8);

/// Rodrigues rotation, I + sin(theta) K + (1 - cos(theta)) K^2.
/// axis: [3] (unit), theta: [1].
Var rodrigues(Var axis, Var theta);

/// I*theta + (1-cos theta) K + (theta - sin theta) K^2.
Var g_theta(Var axis, Var theta);

/// Screw exponential: R = rodrigues, t = G(theta) * v.
PoseVar se3_exp(Var axis, Var theta, Var v);

/// [3,3] times [3] -> [3].
Var matvec(Var m, Var v);

PoseVar compose(const PoseVar& a, const PoseVar& b);
PoseVar inverse(const PoseVar& p);
PoseVar constant(Tape& tape, const Pose& p);

/// Reads a PoseVar's current forward value.
Pose value(const PoseVar& p);

}  // namespace dg
}  // namespace msplat
