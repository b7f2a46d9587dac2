#include "msplat/diffgeo.hpp"

namespace msplat::dg {

Var skew(Var w) {
  Tape& t = *w.tape;
  Var zero = t.constant(0.0);
  Var x = slice(w, 0, 0, 1), y = slice(w, 0, 1, 1), z = slice(w, 0, 2, 1);
  std::vector<Var> cells = {zero, neg(z), y, z, zero, neg(x), neg(y), x, zero};
  return reshape(concat(cells, 0), {3, 3});
}

Var normalize(Var w, double eps) { return div(w, max_const(vec_norm(w), eps)); }

namespace {
Var eye3(Tape& t) {
  Array I({3, 3});
  I[0] = I[4] = I[8] = 1.0;
  return t.constant(std::move(I));
}
}  // namespace

Var rodrigues(Var axis, Var theta) {
  Tape& t = *axis.tape;
  Var K = skew(axis);
  Var K2 = matmul(K, K);
  Var s = sin(theta);
  Var c1 = sub(1.0, cos(theta));
  return add(eye3(t), add(mul(K, s), mul(K2, c1)));
}

Var g_theta(Var axis, Var theta) {
  Tape& t = *axis.tape;
  Var K = skew(axis);
  Var K2 = matmul(K, K);
  Var c1 = sub(1.0, cos(theta));
  Var ts = sub(theta, sin(theta));
  return add(mul(eye3(t), theta), add(mul(K, c1), mul(K2, ts)));
}

Var matvec(Var m, Var v) { return reshape(matmul(m, reshape(v, {3, 1})), {3}); }

PoseVar se3_exp(Var axis, Var theta, Var v) {
  PoseVar p;
  p.R = rodrigues(axis, theta);
  p.t = matvec(g_theta(axis, theta), v);
  return p;
}

PoseVar compose(const PoseVar& a, const PoseVar& b) {
  PoseVar p;
  p.R = matmul(a.R, b.R);
  p.t = add(matvec(a.R, b.t), a.t);
  return p;
}

PoseVar inverse(const PoseVar& p) {
  PoseVar q;
  q.R = mtranspose(p.R);
  q.t = neg(matvec(q.R, p.t));
  return q;
}

PoseVar constant(Tape& tape, const Pose& p) {
  Array R({3, 3}), t({3});
  for (int i = 0; i < 3; ++i) {
    t[i] = p.t[i];
    for (int j = 0; j < 3; ++j) R[i * 3 + j] = p.R(i, j);
  }
  return {tape.constant(std::move(R)), tape.constant(std::move(t))};
}

Pose value(const PoseVar& p) {
  Pose out;
  const Array& R = p.R.val();
  const Array& t = p.t.val();
  for (int i = 0; i < 3; ++i) {
    out.t[i] = t[i];
    for (int j = 0; j < 3; ++j) out.R(i, j) = R[i * 3 + j];
  }
  return out;
}

}  // namespace msplat::dg
