#pragma once

#include <memory>
#include <string>
#include <vector>

#include "msplat/array.hpp"
#include "msplat/param_store.hpp"

namespace msplat {

class Tape;

/// One recorded operation. Subclasses hold whatever the backward pass
/// needs (parent ids, axis attributes); forward values live in `value`.
struct Node {
  Array value;
  Array grad;
  bool has_grad = false;    // grad buffer allocated and seeded
  bool needs_grad = false;  // reachable from a learnable parameter
  std::vector<int> parents;

  virtual ~Node() = default;
  virtual void backward(Tape&) {}
};

/// Handle to a node on a tape. Cheap to copy; valid while the tape lives.
struct Var {
  Tape* tape = nullptr;
  int id = -1;

  bool valid() const { return tape != nullptr && id >= 0; }
  const Array& val() const;
  const std::vector<int>& shape() const { return val().shape(); }
  double scalar() const { return val()[0]; }
};

/// Define-by-run reverse-mode tape. Built once per training step and
/// discarded; nodes are appended in topological order by construction.
class Tape {
 public:
  Var constant(Array v);
  Var constant(double v);
  /// Leaf bound to a ParamStore entry; backward accumulates into its grad.
  Var param(ParamStore& store, const std::string& name);
  /// Installs a custom node (used by the rasterizer). Parents must already
  /// be on this tape.
  Var push(std::unique_ptr<Node> n);

  Node& node(int id) { return *nodes_[static_cast<size_t>(id)]; }
  const Node& node(int id) const { return *nodes_[static_cast<size_t>(id)]; }
  int size() const { return static_cast<int>(nodes_.size()); }

  /// Grad buffer for a node, allocated zero on first touch.
  Array& grad_buf(int id);
  /// Adds g into the node's grad if that node needs gradients.
  void accumulate(int id, const Array& g);

  /// Reverse sweep from a scalar loss. Visits nodes in reverse insertion
  /// order exactly once and adds leaf gradients into their ParamStore
  /// entries. Rejects non-scalar losses.
  void backward(Var loss);

 private:
  struct Link {
    int id;
    ParamStore* store;
    std::string name;
  };
  std::vector<std::unique_ptr<Node>> nodes_;
  std::vector<Link> links_;
};

// ---------------------------------------------------------------------------
// Forward ops. Binary elementwise ops accept equal shapes or a scalar
// (size-1) operand; anything else is a hard error naming both shapes.
// ---------------------------------------------------------------------------

Var add(Var a, Var b);
Var sub(Var a, Var b);
Var mul(Var a, Var b);
Var div(Var a, Var b);
Var add(Var a, double c);
Var sub(Var a, double c);
Var sub(double c, Var a);
Var mul(Var a, double c);
Var div(double c, Var a);
Var neg(Var a);

Var relu(Var a);
Var abs(Var a);
Var sqrt(Var a);
Var square(Var a);
Var exp(Var a);
Var sin(Var a);
Var cos(Var a);
Var tanh(Var a);
Var sigmoid(Var a);

/// max(a, c) elementwise against a constant; subgradient 0 where a < c.
Var max_const(Var a, double c);

/// [m,k] x [k,n] -> [m,n]
Var matmul(Var a, Var b);
/// Batched matmul: [B,m,k] x [B,k,n] -> [B,m,n]; either operand may be
/// 2-D and is then shared across the batch.
Var bmm(Var a, Var b);
/// Swaps the last two axes (ndim 2 or 3).
Var mtranspose(Var a);

Var softmax(Var a, int axis);

Var sum(Var a);
Var mean(Var a);
Var sum_axis(Var a, int axis, bool keepdim = false);
Var mean_axis(Var a, int axis, bool keepdim = false);

Var concat(const std::vector<Var>& parts, int axis);
Var slice(Var a, int axis, int start, int len);
Var reshape(Var a, std::vector<int> shape);
/// Right-aligned broadcast (each source extent must equal the target or 1).
Var broadcast_to(Var a, std::vector<int> shape);

/// NHWC convolution, stride 1, zero padding preserving spatial size.
/// x: [B,H,W,Ci], w: [kh,kw,Ci,Co] (odd kernel extents) -> [B,H,W,Co].
Var conv2d(Var x, Var w);

// Convenience built on the primitives above.
inline Var operator+(Var a, Var b) { return add(a, b); }
inline Var operator-(Var a, Var b) { return sub(a, b); }
inline Var operator*(Var a, Var b) { return mul(a, b); }
inline Var operator/(Var a, Var b) { return div(a, b); }
inline Var operator-(Var a) { return neg(a); }
inline Var operator+(Var a, double c) { return add(a, c); }
inline Var operator-(Var a, double c) { return sub(a, c); }
inline Var operator*(Var a, double c) { return mul(a, c); }
inline Var operator*(double c, Var a) { return mul(a, c); }
inline Var operator-(double c, Var a) { return sub(c, a); }

/// Stacks equally shaped parts along a new leading axis.
Var stack0(const std::vector<Var>& parts);
/// Euclidean norm of a vector as a [1] scalar.
Var vec_norm(Var a);

}  // namespace msplat
