#include "msplat/tape.hpp"

#include <stdexcept>

namespace msplat {

const Array& Var::val() const { return tape->node(id).value; }

namespace {
struct ConstNode : Node {};

struct ParamNode : Node {};
}  // namespace

Var Tape::constant(Array v) {
  auto n = std::make_unique<ConstNode>();
  n->value = std::move(v);
  return push(std::move(n));
}

Var Tape::constant(double v) { return constant(Array::scalar(v)); }

Var Tape::param(ParamStore& store, const std::string& name) {
  auto n = std::make_unique<ParamNode>();
  n->value = store.value(name);
  n->needs_grad = true;
  Var v = push(std::move(n));
  links_.push_back({v.id, &store, name});
  return v;
}

Var Tape::push(std::unique_ptr<Node> n) {
  for (int p : n->parents) {
    if (p < 0 || p >= size()) throw std::runtime_error("Tape: parent node not on this tape");
    if (node(p).needs_grad) n->needs_grad = true;
  }
  nodes_.push_back(std::move(n));
  return Var{this, size() - 1};
}

Array& Tape::grad_buf(int id) {
  Node& n = node(id);
  if (!n.has_grad) {
    n.grad = Array(n.value.shape());
    n.has_grad = true;
  }
  return n.grad;
}

void Tape::accumulate(int id, const Array& g) {
  Node& n = node(id);
  if (!n.needs_grad) return;
  Array& buf = grad_buf(id);
  check_same_shape(buf, g, "Tape::accumulate");
  double* d = buf.data();
  const double* s = g.data();
  for (int64_t i = 0, e = g.size(); i < e; ++i) d[i] += s[i];
}

void Tape::backward(Var loss) {
  if (loss.tape != this) throw std::runtime_error("Tape::backward: loss from a different tape");
  Node& ln = node(loss.id);
  if (ln.value.size() != 1)
    throw std::runtime_error("Tape::backward: loss must be scalar, got shape " + ln.value.shape_str());
  if (!ln.needs_grad) return;  // no parameters reachable
  grad_buf(loss.id)[0] = 1.0;
  for (int id = loss.id; id >= 0; --id) {
    Node& n = node(id);
    if (n.has_grad && n.needs_grad) n.backward(*this);
  }
  for (const Link& l : links_) {
    Node& n = node(l.id);
    if (!n.has_grad) continue;
    Array& g = l.store->grad(l.name);
    const double* s = n.grad.data();
    double* d = g.data();
    for (int64_t i = 0, e = g.size(); i < e; ++i) d[i] += s[i];
  }
}

}  // namespace msplat
