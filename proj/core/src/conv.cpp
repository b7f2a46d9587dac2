#include <stdexcept>

#include "msplat/parallel.hpp"
#include "msplat/tape.hpp"

namespace msplat {

namespace {

struct Conv2dNode : Node {
  int B, H, W, Ci, Co, kh, kw;

  void backward(Tape& t) override;
};

void conv_forward(const Array& x, const Array& w, Array& out, int B, int H, int W, int Ci, int Co, int kh, int kw) {
  const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
  const double* X = x.data();
  const double* Wt = w.data();
  double* O = out.data();
  parallel_for_blocks(static_cast<int64_t>(B) * H, [&](int64_t lo, int64_t hi) {
    for (int64_t row = lo; row < hi; ++row) {
      const int b = static_cast<int>(row / H);
      const int oh = static_cast<int>(row % H);
      double* orow = O + ((static_cast<int64_t>(b) * H + oh) * W) * Co;
      for (int ow = 0; ow < W; ++ow) {
        double* opix = orow + static_cast<int64_t>(ow) * Co;
        for (int ky = 0; ky < kh; ++ky) {
          const int iy = oh + ky - ph;
          if (iy < 0 || iy >= H) continue;
          for (int kx = 0; kx < kw; ++kx) {
            const int ix = ow + kx - pw;
            if (ix < 0 || ix >= W) continue;
            const double* xpix = X + ((static_cast<int64_t>(b) * H + iy) * W + ix) * Ci;
            const double* wtap = Wt + (static_cast<int64_t>(ky) * kw + kx) * Ci * Co;
            for (int ci = 0; ci < Ci; ++ci) {
              const double xv = xpix[ci];
              const double* wrow = wtap + static_cast<int64_t>(ci) * Co;
              for (int co = 0; co < Co; ++co) opix[co] += xv * wrow[co];
            }
          }
        }
      }
    }
  });
}

void Conv2dNode::backward(Tape& t) {
  const Array& x = t.node(parents[0]).value;
  const Array& w = t.node(parents[1]).value;
  const int ph = (kh - 1) / 2, pw = (kw - 1) / 2;
  const double* G = grad.data();
  if (t.node(parents[0]).needs_grad) {
    Array& gx = t.grad_buf(parents[0]);
    const double* Wt = w.data();
    double* GX = gx.data();
    // Gather form: every input pixel reads the output pixels it fed.
    parallel_for_blocks(static_cast<int64_t>(B) * H, [&](int64_t lo, int64_t hi) {
      for (int64_t row = lo; row < hi; ++row) {
        const int b = static_cast<int>(row / H);
        const int iy = static_cast<int>(row % H);
        for (int ix = 0; ix < W; ++ix) {
          double* gpix = GX + ((static_cast<int64_t>(b) * H + iy) * W + ix) * Ci;
          for (int ky = 0; ky < kh; ++ky) {
            const int oh = iy - ky + ph;
            if (oh < 0 || oh >= H) continue;
            for (int kx = 0; kx < kw; ++kx) {
              const int ow = ix - kx + pw;
              if (ow < 0 || ow >= W) continue;
              const double* gout = G + ((static_cast<int64_t>(b) * H + oh) * W + ow) * Co;
              const double* wtap = Wt + (static_cast<int64_t>(ky) * kw + kx) * Ci * Co;
              for (int ci = 0; ci < Ci; ++ci) {
                const double* wrow = wtap + static_cast<int64_t>(ci) * Co;
                double acc = 0.0;
                for (int co = 0; co < Co; ++co) acc += gout[co] * wrow[co];
                gpix[ci] += acc;
              }
            }
          }
        }
      }
    });
  }
  if (t.node(parents[1]).needs_grad) {
    Array& gw = t.grad_buf(parents[1]);
    const double* X = x.data();
    double* GW = gw.data();
    // One worker owns a whole kernel tap, so each weight gradient is
    // accumulated sequentially in a fixed order.
    parallel_for_blocks(static_cast<int64_t>(kh) * kw, [&](int64_t lo, int64_t hi) {
      for (int64_t tap = lo; tap < hi; ++tap) {
        const int ky = static_cast<int>(tap / kw);
        const int kx = static_cast<int>(tap % kw);
        double* gtap = GW + tap * Ci * Co;
        for (int b = 0; b < B; ++b)
          for (int oh = 0; oh < H; ++oh) {
            const int iy = oh + ky - ph;
            if (iy < 0 || iy >= H) continue;
            for (int ow = 0; ow < W; ++ow) {
              const int ix = ow + kx - pw;
              if (ix < 0 || ix >= W) continue;
              const double* xpix = X + ((static_cast<int64_t>(b) * H + iy) * W + ix) * Ci;
              const double* gout = G + ((static_cast<int64_t>(b) * H + oh) * W + ow) * Co;
              for (int ci = 0; ci < Ci; ++ci) {
                const double xv = xpix[ci];
                double* grow = gtap + static_cast<int64_t>(ci) * Co;
                for (int co = 0; co < Co; ++co) grow[co] += xv * gout[co];
              }
            }
          }
      }
    });
  }
}

}  // namespace

Var conv2d(Var x, Var w) {
  if (x.tape != w.tape) throw std::runtime_error("conv2d: operands from different tapes");
  const Array& xv = x.val();
  const Array& wv = w.val();
  if (xv.ndim() != 4 || wv.ndim() != 4)
    throw std::runtime_error("conv2d: expects x [B,H,W,Ci] and w [kh,kw,Ci,Co], got " + xv.shape_str() + " and " +
                             wv.shape_str());
  if (wv.dim(2) != xv.dim(3))
    throw std::runtime_error("conv2d: channel mismatch " + xv.shape_str() + " vs " + wv.shape_str());
  if (wv.dim(0) % 2 == 0 || wv.dim(1) % 2 == 0)
    throw std::runtime_error("conv2d: kernel extents must be odd for same-size padding, got " + wv.shape_str());
  auto node = std::make_unique<Conv2dNode>();
  node->B = xv.dim(0);
  node->H = xv.dim(1);
  node->W = xv.dim(2);
  node->Ci = xv.dim(3);
  node->kh = wv.dim(0);
  node->kw = wv.dim(1);
  node->Co = wv.dim(3);
  Array out({node->B, node->H, node->W, node->Co});
  conv_forward(xv, wv, out, node->B, node->H, node->W, node->Ci, node->Co, node->kh, node->kw);
  node->value = std::move(out);
  node->parents = {x.id, w.id};
  return x.tape->push(std::move(node));
}

}  // namespace msplat
