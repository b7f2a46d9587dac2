#include <cmath>
#include <stdexcept>

#include "msplat/tape.hpp"

namespace msplat {

namespace {

void require_same_tape(Var a, Var b, const char* where) {
  if (a.tape != b.tape) throw std::runtime_error(std::string(where) + ": operands from different tapes");
}

// --------------------------------------------------------------------------
// Elementwise binary ops with scalar broadcast.
// --------------------------------------------------------------------------

enum class BinKind { Add, Sub, Mul, Div };

struct BinNode : Node {
  BinKind kind;
  // 0: equal shapes, 1: a scalar, 2: b scalar
  int mode = 0;

  void backward(Tape& t) override {
    const Array& av = t.node(parents[0]).value;
    const Array& bv = t.node(parents[1]).value;
    const Array& g = grad;
    const bool need_a = t.node(parents[0]).needs_grad;
    const bool need_b = t.node(parents[1]).needs_grad;
    const int64_t n = value.size();
    auto aval = [&](int64_t i) { return mode == 1 ? av[0] : av[i]; };
    auto bval = [&](int64_t i) { return mode == 2 ? bv[0] : bv[i]; };

    if (need_a) {
      Array& ga = t.grad_buf(parents[0]);
      for (int64_t i = 0; i < n; ++i) {
        double d;
        switch (kind) {
          case BinKind::Add: d = g[i]; break;
          case BinKind::Sub: d = g[i]; break;
          case BinKind::Mul: d = g[i] * bval(i); break;
          default: d = g[i] / bval(i); break;
        }
        ga[mode == 1 ? 0 : i] += d;
      }
    }
    if (need_b) {
      Array& gb = t.grad_buf(parents[1]);
      for (int64_t i = 0; i < n; ++i) {
        double d;
        switch (kind) {
          case BinKind::Add: d = g[i]; break;
          case BinKind::Sub: d = -g[i]; break;
          case BinKind::Mul: d = g[i] * aval(i); break;
          default: {
            double b = bval(i);
            d = -g[i] * aval(i) / (b * b);
            break;
          }
        }
        gb[mode == 2 ? 0 : i] += d;
      }
    }
  }
};

Var binary(Var a, Var b, BinKind kind, const char* name) {
  require_same_tape(a, b, name);
  const Array& av = a.val();
  const Array& bv = b.val();
  auto n = std::make_unique<BinNode>();
  n->kind = kind;
  if (av.same_shape(bv))
    n->mode = 0;
  else if (av.is_scalar())
    n->mode = 1;
  else if (bv.is_scalar())
    n->mode = 2;
  else
    throw std::runtime_error(std::string(name) + ": shape mismatch " + av.shape_str() + " vs " + bv.shape_str());
  const Array& big = n->mode == 1 ? bv : av;
  Array out(big.shape());
  const int64_t cnt = out.size();
  for (int64_t i = 0; i < cnt; ++i) {
    double x = n->mode == 1 ? av[0] : av[i];
    double y = n->mode == 2 ? bv[0] : bv[i];
    switch (kind) {
      case BinKind::Add: out[i] = x + y; break;
      case BinKind::Sub: out[i] = x - y; break;
      case BinKind::Mul: out[i] = x * y; break;
      default: out[i] = x / y; break;
    }
  }
  n->value = std::move(out);
  n->parents = {a.id, b.id};
  return a.tape->push(std::move(n));
}

// --------------------------------------------------------------------------
// Elementwise unary ops.
// --------------------------------------------------------------------------

enum class UnKind { Neg, Relu, Abs, Sqrt, Square, Exp, Sin, Cos, Tanh, Sigmoid, MaxConst };

struct UnNode : Node {
  UnKind kind;
  double c = 0.0;  // MaxConst threshold

  void backward(Tape& t) override {
    if (!t.node(parents[0]).needs_grad) return;
    const Array& x = t.node(parents[0]).value;
    const Array& y = value;
    Array& gx = t.grad_buf(parents[0]);
    const int64_t n = x.size();
    for (int64_t i = 0; i < n; ++i) {
      double d;
      switch (kind) {
        case UnKind::Neg: d = -1.0; break;
        case UnKind::Relu: d = x[i] > 0.0 ? 1.0 : 0.0; break;
        case UnKind::Abs: d = x[i] > 0.0 ? 1.0 : (x[i] < 0.0 ? -1.0 : 0.0); break;
        case UnKind::Sqrt: d = 0.5 / y[i]; break;
        case UnKind::Square: d = 2.0 * x[i]; break;
        case UnKind::Exp: d = y[i]; break;
        case UnKind::Sin: d = std::cos(x[i]); break;
        case UnKind::Cos: d = -std::sin(x[i]); break;
        case UnKind::Tanh: d = 1.0 - y[i] * y[i]; break;
        case UnKind::Sigmoid: d = y[i] * (1.0 - y[i]); break;
        default: d = x[i] > c ? 1.0 : 0.0; break;
      }
      gx[i] += grad[i] * d;
    }
  }
};

Var unary(Var a, UnKind kind, double c = 0.0) {
  const Array& x = a.val();
  Array out(x.shape());
  const int64_t n = x.size();
  for (int64_t i = 0; i < n; ++i) {
    switch (kind) {
      case UnKind::Neg: out[i] = -x[i]; break;
      case UnKind::Relu: out[i] = x[i] > 0.0 ? x[i] : 0.0; break;
      case UnKind::Abs: out[i] = std::fabs(x[i]); break;
      case UnKind::Sqrt: out[i] = std::sqrt(x[i]); break;
      case UnKind::Square: out[i] = x[i] * x[i]; break;
      case UnKind::Exp: out[i] = std::exp(x[i]); break;
      case UnKind::Sin: out[i] = std::sin(x[i]); break;
      case UnKind::Cos: out[i] = std::cos(x[i]); break;
      case UnKind::Tanh: out[i] = std::tanh(x[i]); break;
      case UnKind::Sigmoid: out[i] = 1.0 / (1.0 + std::exp(-x[i])); break;
      default: out[i] = x[i] > c ? x[i] : c; break;
    }
  }
  auto node = std::make_unique<UnNode>();
  node->kind = kind;
  node->c = c;
  node->value = std::move(out);
  node->parents = {a.id};
  return a.tape->push(std::move(node));
}

// --------------------------------------------------------------------------
// Matmul / batched matmul / transpose.
// --------------------------------------------------------------------------

// C[m,n] += A[m,k] * B[k,n], raw row-major buffers.
void gemm_acc(const double* A, const double* B, double* C, int m, int k, int n, bool transA, bool transB) {
  for (int i = 0; i < m; ++i) {
    for (int p = 0; p < k; ++p) {
      const double a = transA ? A[p * m + i] : A[i * k + p];
      const double* brow = transB ? nullptr : B + p * n;
      double* crow = C + i * n;
      if (!transB) {
        for (int j = 0; j < n; ++j) crow[j] += a * brow[j];
      } else {
        for (int j = 0; j < n; ++j) crow[j] += a * B[j * k + p];
      }
    }
  }
}

struct MatMulNode : Node {
  int m, k, n;

  void backward(Tape& t) override {
    const Array& A = t.node(parents[0]).value;
    const Array& B = t.node(parents[1]).value;
    if (t.node(parents[0]).needs_grad) {
      Array& gA = t.grad_buf(parents[0]);
      // dA = G * B^T
      gemm_acc(grad.data(), B.data(), gA.data(), m, n, k, false, true);
    }
    if (t.node(parents[1]).needs_grad) {
      Array& gB = t.grad_buf(parents[1]);
      // dB = A^T * G
      gemm_acc(A.data(), grad.data(), gB.data(), k, m, n, true, false);
    }
  }
};

struct BmmNode : Node {
  int batch, m, k, n;
  bool a2d, b2d;

  void backward(Tape& t) override {
    const Array& A = t.node(parents[0]).value;
    const Array& B = t.node(parents[1]).value;
    const bool need_a = t.node(parents[0]).needs_grad;
    const bool need_b = t.node(parents[1]).needs_grad;
    Array* gA = need_a ? &t.grad_buf(parents[0]) : nullptr;
    Array* gB = need_b ? &t.grad_buf(parents[1]) : nullptr;
    for (int b = 0; b < batch; ++b) {
      const double* Ab = A.data() + (a2d ? 0 : static_cast<int64_t>(b) * m * k);
      const double* Bb = B.data() + (b2d ? 0 : static_cast<int64_t>(b) * k * n);
      const double* Gb = grad.data() + static_cast<int64_t>(b) * m * n;
      if (need_a) gemm_acc(Gb, Bb, gA->data() + (a2d ? 0 : static_cast<int64_t>(b) * m * k), m, n, k, false, true);
      if (need_b) gemm_acc(Ab, Gb, gB->data() + (b2d ? 0 : static_cast<int64_t>(b) * k * n), k, m, n, true, false);
    }
  }
};

struct MTransposeNode : Node {
  int batch, r, c;

  void backward(Tape& t) override {
    if (!t.node(parents[0]).needs_grad) return;
    Array& gx = t.grad_buf(parents[0]);
    for (int b = 0; b < batch; ++b) {
      const double* g = grad.data() + static_cast<int64_t>(b) * r * c;
      double* d = gx.data() + static_cast<int64_t>(b) * r * c;
      // grad has shape [c,r] per batch; accumulate transposed
      for (int i = 0; i < c; ++i)
        for (int j = 0; j < r; ++j) d[j * c + i] += g[i * r + j];
    }
  }
};

// --------------------------------------------------------------------------
// Softmax over an axis.
// --------------------------------------------------------------------------

struct AxisLanes {
  int64_t outer, len, inner;
};

AxisLanes lanes_for(const std::vector<int>& shape, int axis, const char* where) {
  if (axis < 0 || axis >= static_cast<int>(shape.size()))
    throw std::runtime_error(std::string(where) + ": axis out of range");
  AxisLanes l{1, shape[static_cast<size_t>(axis)], 1};
  for (int i = 0; i < axis; ++i) l.outer *= shape[static_cast<size_t>(i)];
  for (size_t i = static_cast<size_t>(axis) + 1; i < shape.size(); ++i) l.inner *= shape[i];
  return l;
}

struct SoftmaxNode : Node {
  AxisLanes l;

  void backward(Tape& t) override {
    if (!t.node(parents[0]).needs_grad) return;
    Array& gx = t.grad_buf(parents[0]);
    const Array& y = value;
    for (int64_t o = 0; o < l.outer; ++o)
      for (int64_t i = 0; i < l.inner; ++i) {
        const int64_t base = o * l.len * l.inner + i;
        double dot = 0.0;
        for (int64_t k = 0; k < l.len; ++k) dot += grad[base + k * l.inner] * y[base + k * l.inner];
        for (int64_t k = 0; k < l.len; ++k) {
          const int64_t idx = base + k * l.inner;
          gx[idx] += y[idx] * (grad[idx] - dot);
        }
      }
  }
};

// --------------------------------------------------------------------------
// Reductions.
// --------------------------------------------------------------------------

struct SumNode : Node {
  double scale;  // 1 for sum, 1/n for mean

  void backward(Tape& t) override {
    if (!t.node(parents[0]).needs_grad) return;
    Array& gx = t.grad_buf(parents[0]);
    const double g = grad[0] * scale;
    for (int64_t i = 0, e = gx.size(); i < e; ++i) gx[i] += g;
  }
};

struct SumAxisNode : Node {
  AxisLanes l;
  double scale;

  void backward(Tape& t) override {
    if (!t.node(parents[0]).needs_grad) return;
    Array& gx = t.grad_buf(parents[0]);
    for (int64_t o = 0; o < l.outer; ++o)
      for (int64_t i = 0; i < l.inner; ++i) {
        const double g = grad[o * l.inner + i] * scale;
        const int64_t base = o * l.len * l.inner + i;
        for (int64_t k = 0; k < l.len; ++k) gx[base + k * l.inner] += g;
      }
  }
};

// --------------------------------------------------------------------------
// Shape ops.
// --------------------------------------------------------------------------

struct ConcatNode : Node {
  AxisLanes out_lanes;
  std::vector<int64_t> part_lens;  // extent along axis per part

  void backward(Tape& t) override {
    int64_t off = 0;
    for (size_t p = 0; p < parents.size(); ++p) {
      const int64_t len = part_lens[p];
      if (t.node(parents[p]).needs_grad) {
        Array& gx = t.grad_buf(parents[p]);
        for (int64_t o = 0; o < out_lanes.outer; ++o)
          for (int64_t k = 0; k < len; ++k) {
            const double* src = grad.data() + (o * out_lanes.len + off + k) * out_lanes.inner;
            double* dst = gx.data() + (o * len + k) * out_lanes.inner;
            for (int64_t i = 0; i < out_lanes.inner; ++i) dst[i] += src[i];
          }
      }
      off += len;
    }
  }
};

struct SliceNode : Node {
  AxisLanes in_lanes;
  int64_t start, len;

  void backward(Tape& t) override {
    if (!t.node(parents[0]).needs_grad) return;
    Array& gx = t.grad_buf(parents[0]);
    for (int64_t o = 0; o < in_lanes.outer; ++o)
      for (int64_t k = 0; k < len; ++k) {
        const double* src = grad.data() + (o * len + k) * in_lanes.inner;
        double* dst = gx.data() + (o * in_lanes.len + start + k) * in_lanes.inner;
        for (int64_t i = 0; i < in_lanes.inner; ++i) dst[i] += src[i];
      }
  }
};

struct ReshapeNode : Node {
  void backward(Tape& t) override {
    if (!t.node(parents[0]).needs_grad) return;
    Array& gx = t.grad_buf(parents[0]);
    for (int64_t i = 0, e = gx.size(); i < e; ++i) gx[i] += grad[i];
  }
};

struct BroadcastNode : Node {
  std::vector<int64_t> src_strides;  // per output axis; 0 on broadcast axes
  std::vector<int> out_shape;

  void backward(Tape& t) override {
    if (!t.node(parents[0]).needs_grad) return;
    Array& gx = t.grad_buf(parents[0]);
    const int nd = static_cast<int>(out_shape.size());
    std::vector<int> idx(static_cast<size_t>(nd), 0);
    const int64_t total = value.size();
    int64_t src = 0;
    for (int64_t flat = 0; flat < total; ++flat) {
      gx[src] += grad[flat];
      // odometer increment
      for (int d = nd - 1; d >= 0; --d) {
        idx[static_cast<size_t>(d)]++;
        src += src_strides[static_cast<size_t>(d)];
        if (idx[static_cast<size_t>(d)] < out_shape[static_cast<size_t>(d)]) break;
        src -= src_strides[static_cast<size_t>(d)] * out_shape[static_cast<size_t>(d)];
        idx[static_cast<size_t>(d)] = 0;
      }
    }
  }
};

}  // namespace

Var add(Var a, Var b) { return binary(a, b, BinKind::Add, "add"); }
Var sub(Var a, Var b) { return binary(a, b, BinKind::Sub, "sub"); }
Var mul(Var a, Var b) { return binary(a, b, BinKind::Mul, "mul"); }
Var div(Var a, Var b) { return binary(a, b, BinKind::Div, "div"); }
Var add(Var a, double c) { return add(a, a.tape->constant(c)); }
Var sub(Var a, double c) { return sub(a, a.tape->constant(c)); }
Var sub(double c, Var a) { return sub(a.tape->constant(c), a); }
Var mul(Var a, double c) { return mul(a, a.tape->constant(c)); }
Var div(double c, Var a) { return div(a.tape->constant(c), a); }

Var neg(Var a) { return unary(a, UnKind::Neg); }
Var relu(Var a) { return unary(a, UnKind::Relu); }
Var abs(Var a) { return unary(a, UnKind::Abs); }
Var sqrt(Var a) { return unary(a, UnKind::Sqrt); }
Var square(Var a) { return unary(a, UnKind::Square); }
Var exp(Var a) { return unary(a, UnKind::Exp); }
Var sin(Var a) { return unary(a, UnKind::Sin); }
Var cos(Var a) { return unary(a, UnKind::Cos); }
Var tanh(Var a) { return unary(a, UnKind::Tanh); }
Var sigmoid(Var a) { return unary(a, UnKind::Sigmoid); }
Var max_const(Var a, double c) { return unary(a, UnKind::MaxConst, c); }

Var matmul(Var a, Var b) {
  require_same_tape(a, b, "matmul");
  const Array& A = a.val();
  const Array& B = b.val();
  if (A.ndim() != 2 || B.ndim() != 2 || A.dim(1) != B.dim(0))
    throw std::runtime_error("matmul: incompatible shapes " + A.shape_str() + " x " + B.shape_str());
  auto n = std::make_unique<MatMulNode>();
  n->m = A.dim(0);
  n->k = A.dim(1);
  n->n = B.dim(1);
  Array out({n->m, n->n});
  gemm_acc(A.data(), B.data(), out.data(), n->m, n->k, n->n, false, false);
  n->value = std::move(out);
  n->parents = {a.id, b.id};
  return a.tape->push(std::move(n));
}

Var bmm(Var a, Var b) {
  require_same_tape(a, b, "bmm");
  const Array& A = a.val();
  const Array& B = b.val();
  const bool a2d = A.ndim() == 2, b2d = B.ndim() == 2;
  if ((A.ndim() != 2 && A.ndim() != 3) || (B.ndim() != 2 && B.ndim() != 3) || (a2d && b2d))
    throw std::runtime_error("bmm: expects at least one 3-D operand, got " + A.shape_str() + " x " + B.shape_str());
  const int batch = a2d ? B.dim(0) : A.dim(0);
  if (!a2d && !b2d && A.dim(0) != B.dim(0))
    throw std::runtime_error("bmm: batch mismatch " + A.shape_str() + " x " + B.shape_str());
  const int m = a2d ? A.dim(0) : A.dim(1);
  const int k = a2d ? A.dim(1) : A.dim(2);
  const int kb = b2d ? B.dim(0) : B.dim(1);
  const int nn = b2d ? B.dim(1) : B.dim(2);
  if (k != kb) throw std::runtime_error("bmm: inner dim mismatch " + A.shape_str() + " x " + B.shape_str());
  auto node = std::make_unique<BmmNode>();
  node->batch = batch;
  node->m = m;
  node->k = k;
  node->n = nn;
  node->a2d = a2d;
  node->b2d = b2d;
  Array out({batch, m, nn});
  for (int bi = 0; bi < batch; ++bi)
    gemm_acc(A.data() + (a2d ? 0 : static_cast<int64_t>(bi) * m * k), B.data() + (b2d ? 0 : static_cast<int64_t>(bi) * k * nn),
             out.data() + static_cast<int64_t>(bi) * m * nn, m, k, nn, false, false);
  node->value = std::move(out);
  node->parents = {a.id, b.id};
  return a.tape->push(std::move(node));
}

Var mtranspose(Var a) {
  const Array& A = a.val();
  if (A.ndim() != 2 && A.ndim() != 3)
    throw std::runtime_error("mtranspose: expects 2-D or 3-D, got " + A.shape_str());
  const int batch = A.ndim() == 3 ? A.dim(0) : 1;
  const int r = A.dim(A.ndim() - 2), c = A.dim(A.ndim() - 1);
  auto node = std::make_unique<MTransposeNode>();
  node->batch = batch;
  node->r = r;
  node->c = c;
  std::vector<int> oshape = A.shape();
  std::swap(oshape[static_cast<size_t>(A.ndim() - 2)], oshape[static_cast<size_t>(A.ndim() - 1)]);
  Array out(oshape);
  for (int b = 0; b < batch; ++b) {
    const double* src = A.data() + static_cast<int64_t>(b) * r * c;
    double* dst = out.data() + static_cast<int64_t>(b) * r * c;
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) dst[j * r + i] = src[i * c + j];
  }
  node->value = std::move(out);
  node->parents = {a.id};
  return a.tape->push(std::move(node));
}

Var softmax(Var a, int axis) {
  const Array& x = a.val();
  auto node = std::make_unique<SoftmaxNode>();
  node->l = lanes_for(x.shape(), axis, "softmax");
  Array out(x.shape());
  const auto& l = node->l;
  for (int64_t o = 0; o < l.outer; ++o)
    for (int64_t i = 0; i < l.inner; ++i) {
      const int64_t base = o * l.len * l.inner + i;
      double mx = x[base];
      for (int64_t k = 1; k < l.len; ++k) mx = std::max(mx, x[base + k * l.inner]);
      double denom = 0.0;
      for (int64_t k = 0; k < l.len; ++k) {
        const double e = std::exp(x[base + k * l.inner] - mx);
        out[base + k * l.inner] = e;
        denom += e;
      }
      for (int64_t k = 0; k < l.len; ++k) out[base + k * l.inner] /= denom;
    }
  node->value = std::move(out);
  node->parents = {a.id};
  return a.tape->push(std::move(node));
}

namespace {
Var reduce_all(Var a, bool is_mean) {
  const Array& x = a.val();
  auto node = std::make_unique<SumNode>();
  node->scale = is_mean ? 1.0 / static_cast<double>(x.size()) : 1.0;
  double s = 0.0;
  for (int64_t i = 0, e = x.size(); i < e; ++i) s += x[i];
  node->value = Array::scalar(is_mean ? s / static_cast<double>(x.size()) : s);
  node->parents = {a.id};
  return a.tape->push(std::move(node));
}

Var reduce_axis(Var a, int axis, bool keepdim, bool is_mean) {
  const Array& x = a.val();
  auto node = std::make_unique<SumAxisNode>();
  node->l = lanes_for(x.shape(), axis, "sum_axis");
  node->scale = is_mean ? 1.0 / static_cast<double>(node->l.len) : 1.0;
  std::vector<int> oshape;
  for (int i = 0; i < x.ndim(); ++i) {
    if (i == axis) {
      if (keepdim) oshape.push_back(1);
    } else {
      oshape.push_back(x.dim(i));
    }
  }
  if (oshape.empty()) oshape.push_back(1);
  Array out(oshape);
  const auto& l = node->l;
  for (int64_t o = 0; o < l.outer; ++o)
    for (int64_t i = 0; i < l.inner; ++i) {
      const int64_t base = o * l.len * l.inner + i;
      double s = 0.0;
      for (int64_t k = 0; k < l.len; ++k) s += x[base + k * l.inner];
      out[o * l.inner + i] = s * node->scale;
    }
  node->value = std::move(out);
  node->parents = {a.id};
  return a.tape->push(std::move(node));
}
}  // namespace

Var sum(Var a) { return reduce_all(a, false); }
Var mean(Var a) { return reduce_all(a, true); }
Var sum_axis(Var a, int axis, bool keepdim) { return reduce_axis(a, axis, keepdim, false); }
Var mean_axis(Var a, int axis, bool keepdim) { return reduce_axis(a, axis, keepdim, true); }

Var concat(const std::vector<Var>& parts, int axis) {
  if (parts.empty()) throw std::runtime_error("concat: no parts");
  Tape* tape = parts[0].tape;
  const Array& first = parts[0].val();
  std::vector<int> oshape = first.shape();
  if (axis < 0 || axis >= first.ndim()) throw std::runtime_error("concat: axis out of range");
  int64_t total_len = 0;
  for (const Var& p : parts) {
    if (p.tape != tape) throw std::runtime_error("concat: operands from different tapes");
    const Array& v = p.val();
    if (v.ndim() != first.ndim()) throw std::runtime_error("concat: rank mismatch " + v.shape_str());
    for (int d = 0; d < v.ndim(); ++d)
      if (d != axis && v.dim(d) != first.dim(d))
        throw std::runtime_error("concat: shape mismatch " + v.shape_str() + " vs " + first.shape_str());
    total_len += v.dim(axis);
  }
  oshape[static_cast<size_t>(axis)] = static_cast<int>(total_len);

  auto node = std::make_unique<ConcatNode>();
  node->out_lanes = lanes_for(oshape, axis, "concat");
  Array out(oshape);
  int64_t off = 0;
  const auto& l = node->out_lanes;
  for (const Var& p : parts) {
    const Array& v = p.val();
    const int64_t len = v.dim(axis);
    node->part_lens.push_back(len);
    node->parents.push_back(p.id);
    for (int64_t o = 0; o < l.outer; ++o)
      for (int64_t k = 0; k < len; ++k) {
        const double* src = v.data() + (o * len + k) * l.inner;
        double* dst = out.data() + (o * l.len + off + k) * l.inner;
        for (int64_t i = 0; i < l.inner; ++i) dst[i] = src[i];
      }
    off += len;
  }
  node->value = std::move(out);
  return tape->push(std::move(node));
}

Var slice(Var a, int axis, int start, int len) {
  const Array& x = a.val();
  if (axis < 0 || axis >= x.ndim()) throw std::runtime_error("slice: axis out of range");
  if (start < 0 || len < 0 || start + len > x.dim(axis))
    throw std::runtime_error("slice: range [" + std::to_string(start) + "," + std::to_string(start + len) +
                             ") out of bounds for " + x.shape_str());
  auto node = std::make_unique<SliceNode>();
  node->in_lanes = lanes_for(x.shape(), axis, "slice");
  node->start = start;
  node->len = len;
  std::vector<int> oshape = x.shape();
  oshape[static_cast<size_t>(axis)] = len;
  Array out(oshape);
  const auto& l = node->in_lanes;
  for (int64_t o = 0; o < l.outer; ++o)
    for (int64_t k = 0; k < len; ++k) {
      const double* src = x.data() + (o * l.len + start + k) * l.inner;
      double* dst = out.data() + (o * len + k) * l.inner;
      for (int64_t i = 0; i < l.inner; ++i) dst[i] = src[i];
    }
  node->value = std::move(out);
  node->parents = {a.id};
  return a.tape->push(std::move(node));
}

Var reshape(Var a, std::vector<int> shape) {
  auto node = std::make_unique<ReshapeNode>();
  node->value = a.val().reshaped(std::move(shape));
  node->parents = {a.id};
  return a.tape->push(std::move(node));
}

Var broadcast_to(Var a, std::vector<int> shape) {
  const Array& x = a.val();
  const int nd = static_cast<int>(shape.size());
  if (x.ndim() > nd) throw std::runtime_error("broadcast_to: source rank exceeds target " + x.shape_str());
  // Right-align source shape, compute per-output-axis source strides.
  std::vector<int> sshape(static_cast<size_t>(nd), 1);
  for (int i = 0; i < x.ndim(); ++i) sshape[static_cast<size_t>(nd - x.ndim() + i)] = x.dim(i);
  std::vector<int64_t> strides(static_cast<size_t>(nd), 0);
  int64_t st = 1;
  for (int i = nd - 1; i >= 0; --i) {
    if (sshape[static_cast<size_t>(i)] == shape[static_cast<size_t>(i)]) {
      strides[static_cast<size_t>(i)] = sshape[static_cast<size_t>(i)] == 1 ? 0 : st;
    } else if (sshape[static_cast<size_t>(i)] == 1) {
      strides[static_cast<size_t>(i)] = 0;
    } else {
      throw std::runtime_error("broadcast_to: cannot broadcast " + x.shape_str() + " to " +
                               Array(shape).shape_str());
    }
    st *= sshape[static_cast<size_t>(i)];
  }
  auto node = std::make_unique<BroadcastNode>();
  node->src_strides = strides;
  node->out_shape = shape;
  Array out(shape);
  std::vector<int> idx(static_cast<size_t>(nd), 0);
  int64_t src = 0;
  for (int64_t flat = 0, e = out.size(); flat < e; ++flat) {
    out[flat] = x[src];
    for (int d = nd - 1; d >= 0; --d) {
      idx[static_cast<size_t>(d)]++;
      src += strides[static_cast<size_t>(d)];
      if (idx[static_cast<size_t>(d)] < shape[static_cast<size_t>(d)]) break;
      src -= strides[static_cast<size_t>(d)] * shape[static_cast<size_t>(d)];
      idx[static_cast<size_t>(d)] = 0;
    }
  }
  node->value = std::move(out);
  node->parents = {a.id};
  return a.tape->push(std::move(node));
}

Var stack0(const std::vector<Var>& parts) {
  std::vector<Var> expanded;
  expanded.reserve(parts.size());
  for (const Var& p : parts) {
    std::vector<int> s = p.val().shape();
    s.insert(s.begin(), 1);
    expanded.push_back(reshape(p, s));
  }
  return concat(expanded, 0);
}

Var vec_norm(Var a) { return sqrt(sum(square(a))); }

}  // namespace msplat
