#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <thread>
#include <utility>
#include <vector>

#include "rffs/common.hpp"
#include "rffs/tensor.hpp"

namespace rffs {

/// Handle to a tape entry.
struct Var {
  int id = -1;
  bool valid() const { return id >= 0; }
};

namespace detail {

/// Deterministic row-chunked parallelism: output rows are partitioned into
/// disjoint contiguous chunks, each written by exactly one thread with a
/// fixed inner reduction order, so results are bit-identical for any thread
/// count.
inline void parallel_rows(int64_t rows, int64_t work_per_row,
                          const std::function<void(int64_t, int64_t)>& fn) {
  const int64_t total = rows * work_per_row;
  unsigned hw = std::thread::hardware_concurrency();
  int threads = static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
  if (threads <= 1 || total < (1 << 20) || rows < 2 * threads) {
    fn(0, rows);
    return;
  }
  std::vector<std::thread> pool;
  int64_t chunk = (rows + threads - 1) / threads;
  for (int t = 0; t < threads; ++t) {
    int64_t lo = t * chunk, hi = std::min(rows, lo + chunk);
    if (lo >= hi) break;
    pool.emplace_back(fn, lo, hi);
  }
  for (auto& th : pool) th.join();
}

// out[r,c] += sum_k a[r,k] * b[k,c]
template <class S>
void matmul_acc(const S* a, const S* b, S* out, int64_t rows, int k, int cols) {
  parallel_rows(rows, static_cast<int64_t>(k) * cols, [&](int64_t lo, int64_t hi) {
    for (int64_t r = lo; r < hi; ++r) {
      const S* ar = a + r * k;
      S* orow = out + r * cols;
      for (int kk = 0; kk < k; ++kk) {
        const S av = ar[kk];
        const S* brow = b + static_cast<int64_t>(kk) * cols;
        for (int c = 0; c < cols; ++c) orow[c] += av * brow[c];
      }
    }
  });
}

// out[r,k] += sum_c dy[r,c] * b[k,c]   (dy . b^T)
template <class S>
void matmul_bt_acc(const S* dy, const S* b, S* out, int64_t rows, int cols, int k) {
  parallel_rows(rows, static_cast<int64_t>(k) * cols, [&](int64_t lo, int64_t hi) {
    for (int64_t r = lo; r < hi; ++r) {
      const S* dyr = dy + r * cols;
      S* orow = out + r * k;
      for (int kk = 0; kk < k; ++kk) {
        const S* brow = b + static_cast<int64_t>(kk) * cols;
        S acc = S(0);
        for (int c = 0; c < cols; ++c) acc += dyr[c] * brow[c];
        orow[kk] += acc;
      }
    }
  });
}

// dw[k,c] += sum_r x[r,k] * dy[r,c]   (x^T . dy). Rows are split into a
// FIXED number of chunks with per-chunk partial buffers merged in chunk
// order, so the reduction order (and the result, bit for bit) is independent
// of the thread count.
template <class S>
void matmul_at_acc(const S* x, const S* dy, S* dw, int64_t rows, int k, int cols) {
  const int64_t wsize = static_cast<int64_t>(k) * cols;
  auto sweep = [&](int64_t r_lo, int64_t r_hi, S* acc) {
    for (int64_t r = r_lo; r < r_hi; ++r) {
      const S* xr = x + r * k;
      const S* dyr = dy + r * cols;
      for (int kk = 0; kk < k; ++kk) {
        const S xv = xr[kk];
        if (xv == S(0)) continue;
        S* dwr = acc + static_cast<int64_t>(kk) * cols;
        for (int c = 0; c < cols; ++c) dwr[c] += xv * dyr[c];
      }
    }
  };
  if (rows * wsize < (1 << 21) || rows < 16) {
    sweep(0, rows, dw);
    return;
  }
  constexpr int kChunks = 8;
  std::vector<S> partials(static_cast<size_t>(kChunks) * wsize, S(0));
  parallel_rows(kChunks, rows / kChunks * wsize, [&](int64_t lo, int64_t hi) {
    for (int64_t chunk = lo; chunk < hi; ++chunk)
      sweep(chunk * rows / kChunks, (chunk + 1) * rows / kChunks,
            partials.data() + chunk * wsize);
  });
  for (int64_t i = 0; i < wsize; ++i) {
    S s = partials[static_cast<size_t>(i)];
    for (int chunk = 1; chunk < kChunks; ++chunk)
      s += partials[static_cast<size_t>(chunk * wsize + i)];
    dw[i] += s;
  }
}

}  // namespace detail

/// Reverse-mode autodiff tape. Values are recorded in creation order (inputs
/// always precede outputs); backward() replays the recorded rules once, in
/// strict reverse order, accumulating gradients additively — two runs over
/// the same tape are bit-identical.
template <class S>
class TapeT {
 public:
  using Tensor = TensorT<S>;
  /// Backward rule: reads grad(out), accumulates into grads of the inputs.
  using BackwardFn = std::function<void(TapeT&, Var out)>;

  struct Node {
    std::vector<int> inputs;
    int output = -1;
    BackwardFn backward;
  };

  Var leaf(Tensor t, bool requires_grad = false) {
    t.requires_grad = requires_grad;
    values_.push_back(std::move(t));
    grads_.emplace_back();
    needs_grad_.push_back(requires_grad ? 1 : 0);
    return Var{static_cast<int>(values_.size()) - 1};
  }

  Var record(Tensor value, const std::vector<Var>& inputs, BackwardFn bw) {
    bool ng = false;
    std::vector<int> in_ids;
    in_ids.reserve(inputs.size());
    for (Var v : inputs) {
      check(v.valid() && v.id < static_cast<int>(values_.size()), "tape: invalid input var");
      ng = ng || needs_grad_[static_cast<size_t>(v.id)];
      in_ids.push_back(v.id);
    }
    value.requires_grad = ng;
    values_.push_back(std::move(value));
    grads_.emplace_back();
    needs_grad_.push_back(ng ? 1 : 0);
    int out = static_cast<int>(values_.size()) - 1;
    if (ng) nodes_.push_back(Node{std::move(in_ids), out, std::move(bw)});
    return Var{out};
  }

  const Tensor& val(Var v) const { return values_[static_cast<size_t>(v.id)]; }
  bool needs_grad(Var v) const { return needs_grad_[static_cast<size_t>(v.id)] != 0; }

  /// Gradient tensor for v, allocated as zeros on first touch.
  Tensor& grad_mut(Var v) {
    auto& g = grads_[static_cast<size_t>(v.id)];
    if (g.data.empty()) g = Tensor::zeros(values_[static_cast<size_t>(v.id)].shape);
    return g;
  }

  /// Gradient of v, or zeros if nothing flowed into it (unused parameter).
  Tensor grad(Var v) const {
    const auto& g = grads_[static_cast<size_t>(v.id)];
    if (g.data.empty()) return Tensor::zeros(values_[static_cast<size_t>(v.id)].shape);
    return g;
  }

  bool grad_present(Var v) const { return !grads_[static_cast<size_t>(v.id)].data.empty(); }

  void accumulate(Var v, const S* src, int64_t n) {
    if (!needs_grad(v)) return;
    Tensor& g = grad_mut(v);
    S* dst = g.data.data();
    for (int64_t i = 0; i < n; ++i) dst[i] += src[i];
  }

  /// Reverse sweep from a scalar loss.
  void backward(Var loss) {
    check(loss.valid(), "backward: invalid loss var");
    check(val(loss).numel() == 1, "backward: loss must be scalar, got " + val(loss).shape_str());
    check(needs_grad(loss), "backward: loss does not depend on any differentiable input");
    grad_mut(loss).data[0] = S(1);
    for (auto it = nodes_.rbegin(); it != nodes_.rend(); ++it) {
      Var out{it->output};
      if (!grad_present(out)) continue;
      it->backward(*this, out);
    }
  }

  size_t size() const { return values_.size(); }

 private:
  std::vector<Tensor> values_;
  std::vector<Tensor> grads_;
  std::vector<char> needs_grad_;
  std::vector<Node> nodes_;
};

using Tape = TapeT<float>;

// ---------------------------------------------------------------------------
// Tape operations. Each op validates its contract, computes the value, and
// records a backward rule.
// ---------------------------------------------------------------------------

namespace ops {

/// out[r] = x[r].W + b over the last axis ([N,K,Cin] -> [N,K,Cout]).
template <class S>
Var linear(TapeT<S>& t, Var x, Var w, Var b) {
  const auto& xv = t.val(x);
  const auto& wv = t.val(w);
  check(wv.ndim() == 2, "linear: weight must be [C_in x C_out], got " + wv.shape_str());
  const int cin = wv.dim(0), cout = wv.dim(1);
  check(xv.last_dim() == cin,
        "linear: input " + xv.shape_str() + " does not match weight " + wv.shape_str());
  const int64_t rows = xv.rows();
  std::vector<int> oshape = xv.shape;
  oshape.back() = cout;
  TensorT<S> out(oshape);
  if (b.valid()) {
    const auto& bv = t.val(b);
    check(bv.numel() == cout, "linear: bias length " + std::to_string(bv.numel()) +
                                  " does not match output channels " + std::to_string(cout));
    for (int64_t r = 0; r < rows; ++r)
      std::copy(bv.data.begin(), bv.data.end(), out.data.begin() + r * cout);
  }
  detail::matmul_acc(xv.data.data(), wv.data.data(), out.data.data(), rows, cin, cout);

  std::vector<Var> ins = b.valid() ? std::vector<Var>{x, w, b} : std::vector<Var>{x, w};
  return t.record(std::move(out), ins, [x, w, b, rows, cin, cout](TapeT<S>& tp, Var out_v) {
    const auto& dy = tp.grad_mut(out_v);
    if (tp.needs_grad(x)) {
      auto& dx = tp.grad_mut(x);
      detail::matmul_bt_acc(dy.data.data(), tp.val(w).data.data(), dx.data.data(), rows, cout,
                            cin);
    }
    if (tp.needs_grad(w)) {
      auto& dw = tp.grad_mut(w);
      detail::matmul_at_acc(tp.val(x).data.data(), dy.data.data(), dw.data.data(), rows, cin,
                            cout);
    }
    if (b.valid() && tp.needs_grad(b)) {
      auto& db = tp.grad_mut(b);
      for (int64_t r = 0; r < rows; ++r)
        for (int c = 0; c < cout; ++c) db.data[static_cast<size_t>(c)] += dy.data[r * cout + c];
    }
  });
}

/// Elementwise max(0, x); subgradient 0 at x == 0.
template <class S>
Var relu(TapeT<S>& t, Var x) {
  TensorT<S> out = t.val(x);
  for (S& v : out.data) v = v > S(0) ? v : S(0);
  return t.record(std::move(out), {x}, [x](TapeT<S>& tp, Var out_v) {
    const auto& dy = tp.grad_mut(out_v);
    if (!tp.needs_grad(x)) return;
    auto& dx = tp.grad_mut(x);
    const auto& xv = tp.val(x);
    for (int64_t i = 0; i < xv.numel(); ++i)
      if (xv.data[static_cast<size_t>(i)] > S(0))
        dx.data[static_cast<size_t>(i)] += dy.data[static_cast<size_t>(i)];
  });
}

template <class S>
Var add(TapeT<S>& t, Var a, Var b) {
  const auto& av = t.val(a);
  const auto& bv = t.val(b);
  check(av.same_shape(bv), "add: shape mismatch " + av.shape_str() + " vs " + bv.shape_str());
  TensorT<S> out = av;
  for (int64_t i = 0; i < out.numel(); ++i)
    out.data[static_cast<size_t>(i)] += bv.data[static_cast<size_t>(i)];
  return t.record(std::move(out), {a, b}, [a, b](TapeT<S>& tp, Var out_v) {
    const auto& dy = tp.grad_mut(out_v);
    tp.accumulate(a, dy.data.data(), dy.numel());
    tp.accumulate(b, dy.data.data(), dy.numel());
  });
}

template <class S>
Var sub(TapeT<S>& t, Var a, Var b) {
  const auto& av = t.val(a);
  const auto& bv = t.val(b);
  check(av.same_shape(bv), "sub: shape mismatch " + av.shape_str() + " vs " + bv.shape_str());
  TensorT<S> out = av;
  for (int64_t i = 0; i < out.numel(); ++i)
    out.data[static_cast<size_t>(i)] -= bv.data[static_cast<size_t>(i)];
  return t.record(std::move(out), {a, b}, [a, b](TapeT<S>& tp, Var out_v) {
    const auto& dy = tp.grad_mut(out_v);
    tp.accumulate(a, dy.data.data(), dy.numel());
    if (!tp.needs_grad(b)) return;
    auto& db = tp.grad_mut(b);
    for (int64_t i = 0; i < dy.numel(); ++i)
      db.data[static_cast<size_t>(i)] -= dy.data[static_cast<size_t>(i)];
  });
}

template <class S>
Var mul(TapeT<S>& t, Var a, Var b) {
  const auto& av = t.val(a);
  const auto& bv = t.val(b);
  check(av.same_shape(bv), "mul: shape mismatch " + av.shape_str() + " vs " + bv.shape_str());
  TensorT<S> out = av;
  for (int64_t i = 0; i < out.numel(); ++i)
    out.data[static_cast<size_t>(i)] *= bv.data[static_cast<size_t>(i)];
  return t.record(std::move(out), {a, b}, [a, b](TapeT<S>& tp, Var out_v) {
    const auto& dy = tp.grad_mut(out_v);
    if (tp.needs_grad(a)) {
      auto& da = tp.grad_mut(a);
      const auto& bval = tp.val(b);
      for (int64_t i = 0; i < dy.numel(); ++i)
        da.data[static_cast<size_t>(i)] +=
            dy.data[static_cast<size_t>(i)] * bval.data[static_cast<size_t>(i)];
    }
    if (tp.needs_grad(b)) {
      auto& db = tp.grad_mut(b);
      const auto& aval = tp.val(a);
      for (int64_t i = 0; i < dy.numel(); ++i)
        db.data[static_cast<size_t>(i)] +=
            dy.data[static_cast<size_t>(i)] * aval.data[static_cast<size_t>(i)];
    }
  });
}

template <class S>
Var scale(TapeT<S>& t, Var x, S c) {
  TensorT<S> out = t.val(x);
  for (S& v : out.data) v *= c;
  return t.record(std::move(out), {x}, [x, c](TapeT<S>& tp, Var out_v) {
    const auto& dy = tp.grad_mut(out_v);
    if (!tp.needs_grad(x)) return;
    auto& dx = tp.grad_mut(x);
    for (int64_t i = 0; i < dy.numel(); ++i)
      dx.data[static_cast<size_t>(i)] += c * dy.data[static_cast<size_t>(i)];
  });
}

/// Concatenation along the last axis; all inputs share leading dimensions.
/// Gradient splits back by column range, so slicing the result recovers each
/// input exactly.
template <class S>
Var concat(TapeT<S>& t, const std::vector<Var>& xs) {
  check(!xs.empty(), "concat: needs at least one input");
  const auto& first = t.val(xs[0]);
  const int64_t rows = first.rows();
  int total = 0;
  std::vector<int> widths;
  for (Var v : xs) {
    const auto& tv = t.val(v);
    check(tv.rows() == rows, "concat: row count mismatch " + tv.shape_str() + " vs " +
                                 first.shape_str());
    widths.push_back(tv.last_dim());
    total += tv.last_dim();
  }
  std::vector<int> oshape = first.shape;
  oshape.back() = total;
  TensorT<S> out(oshape);
  int off = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const auto& tv = t.val(xs[i]);
    const int w = widths[i];
    for (int64_t r = 0; r < rows; ++r)
      std::copy_n(tv.data.begin() + r * w, w, out.data.begin() + r * total + off);
    off += w;
  }
  return t.record(std::move(out), xs, [xs, widths, rows, total](TapeT<S>& tp, Var out_v) {
    const auto& dy = tp.grad_mut(out_v);
    int off2 = 0;
    for (size_t i = 0; i < xs.size(); ++i) {
      const int w = widths[i];
      if (tp.needs_grad(xs[i])) {
        auto& dx = tp.grad_mut(xs[i]);
        for (int64_t r = 0; r < rows; ++r)
          for (int c = 0; c < w; ++c)
            dx.data[static_cast<size_t>(r * w + c)] +=
                dy.data[static_cast<size_t>(r * total + off2 + c)];
      }
      off2 += w;
    }
  });
}

/// out[i] = x[idx[i]] for x [N x C]. A flat index list ([M]) yields [M x C];
/// an [M x K] index matrix yields [M x K x C]. Backward scatter-adds into the
/// source rows (duplicate indices accumulate).
template <class S>
Var gather_rows(TapeT<S>& t, Var x, const IndexMatrix& idx) {
  const auto& xv = t.val(x);
  check(xv.ndim() == 2, "gather_rows: input must be [N x C], got " + xv.shape_str());
  const int n = xv.dim(0), c = xv.dim(1);
  for (int32_t i : idx.v)
    check(i >= 0 && i < n,
          "gather_rows: index " + std::to_string(i) + " out of range [0," + std::to_string(n) + ")");
  std::vector<int> oshape = idx.cols > 0 ? std::vector<int>{idx.rows, idx.cols, c}
                                         : std::vector<int>{static_cast<int>(idx.v.size()), c};
  TensorT<S> out(oshape);
  const int64_t m = static_cast<int64_t>(idx.v.size());
  for (int64_t i = 0; i < m; ++i)
    std::copy_n(xv.data.begin() + static_cast<int64_t>(idx.v[static_cast<size_t>(i)]) * c, c,
                out.data.begin() + i * c);
  // The index list is captured by value: graphs are tiny next to features.
  std::vector<int32_t> flat = idx.v;
  return t.record(std::move(out), {x}, [x, flat = std::move(flat), c](TapeT<S>& tp, Var out_v) {
    if (!tp.needs_grad(x)) return;
    const auto& dy = tp.grad_mut(out_v);
    auto& dx = tp.grad_mut(x);
    for (size_t i = 0; i < flat.size(); ++i) {
      S* dst = dx.data.data() + static_cast<int64_t>(flat[i]) * c;
      const S* src = dy.data.data() + static_cast<int64_t>(i) * c;
      for (int j = 0; j < c; ++j) dst[j] += src[j];
    }
  });
}

/// Fused edge-feature assembly for graph convolutions: for every center i
/// and neighbor j = idx[i][k], out[i,k] = concat(x[i], x[j] - x[i]).
/// Equivalent to gather/gather/sub/concat but materializes one tensor
/// instead of four. Backward: dx[i] += g_center - g_rel, dx[j] += g_rel.
template <class S>
Var edge_features(TapeT<S>& t, Var x, const IndexMatrix& idx) {
  const auto& xv = t.val(x);
  check(xv.ndim() == 2, "edge_features: input must be [N x C], got " + xv.shape_str());
  const int n = xv.dim(0), c = xv.dim(1), k = idx.cols;
  check(idx.rows == n, "edge_features: graph has " + std::to_string(idx.rows) +
                           " centers for " + std::to_string(n) + " feature rows");
  for (int32_t i : idx.v)
    check(i >= 0 && i < n, "edge_features: index " + std::to_string(i) + " out of range");
  TensorT<S> out({n, k, 2 * c});
  for (int i = 0; i < n; ++i) {
    const S* xi = xv.data.data() + static_cast<int64_t>(i) * c;
    for (int j = 0; j < k; ++j) {
      const S* xj =
          xv.data.data() + static_cast<int64_t>(idx.at(i, j)) * c;
      S* dst = out.data.data() + (static_cast<int64_t>(i) * k + j) * 2 * c;
      for (int q = 0; q < c; ++q) {
        dst[q] = xi[q];
        dst[c + q] = xj[q] - xi[q];
      }
    }
  }
  auto flat = std::make_shared<std::vector<int32_t>>(idx.v);
  return t.record(std::move(out), {x}, [x, flat, k, c](TapeT<S>& tp, Var out_v) {
    if (!tp.needs_grad(x)) return;
    const auto& dy = tp.grad_mut(out_v);
    auto& dx = tp.grad_mut(x);
    const int64_t n64 = dy.dim(0);
    for (int64_t i = 0; i < n64; ++i) {
      S* di = dx.data.data() + i * c;
      for (int j = 0; j < k; ++j) {
        const S* g = dy.data.data() + (i * k + j) * 2 * c;
        S* dj = dx.data.data() + static_cast<int64_t>((*flat)[static_cast<size_t>(i * k + j)]) * c;
        for (int q = 0; q < c; ++q) {
          di[q] += g[q] - g[c + q];
          dj[q] += g[c + q];
        }
      }
    }
  });
}

/// Per-point, per-channel max over the middle (neighbor) axis of [N x K x C].
/// Ties route the gradient to the first occurrence.
template <class S>
Var max_neighbors(TapeT<S>& t, Var x) {
  const auto& xv = t.val(x);
  check(xv.ndim() == 3, "max_neighbors: input must be [N x K x C], got " + xv.shape_str());
  const int n = xv.dim(0), k = xv.dim(1), c = xv.dim(2);
  check(k >= 1, "max_neighbors: neighbor axis must be non-empty");
  TensorT<S> out({n, c});
  auto argmax = std::make_shared<std::vector<int32_t>>(static_cast<size_t>(n) * c);
  for (int i = 0; i < n; ++i) {
    const S* base = xv.data.data() + static_cast<int64_t>(i) * k * c;
    S* orow = out.data.data() + static_cast<int64_t>(i) * c;
    int32_t* arow = argmax->data() + static_cast<int64_t>(i) * c;
    for (int j = 0; j < c; ++j) {
      S best = base[j];
      int32_t bestk = 0;
      for (int kk = 1; kk < k; ++kk) {
        const S v = base[kk * c + j];
        if (v > best) { best = v; bestk = kk; }
      }
      orow[j] = best;
      arow[j] = bestk;
    }
  }
  return t.record(std::move(out), {x}, [x, argmax, k, c](TapeT<S>& tp, Var out_v) {
    if (!tp.needs_grad(x)) return;
    const auto& dy = tp.grad_mut(out_v);
    auto& dx = tp.grad_mut(x);
    const int64_t n64 = dy.dim(0);
    for (int64_t i = 0; i < n64; ++i)
      for (int j = 0; j < c; ++j) {
        const int32_t kk = (*argmax)[static_cast<size_t>(i * c + j)];
        dx.data[static_cast<size_t>((i * k + kk) * c + j)] += dy.data[static_cast<size_t>(i * c + j)];
      }
  });
}

/// out[n,c] = sum_k w[n,k] * x[n,k,c] with constant weights (inverse-distance
/// interpolation and similar gather-reductions).
template <class S>
Var weighted_neighbor_sum(TapeT<S>& t, Var x, std::vector<S> w) {
  const auto& xv = t.val(x);
  check(xv.ndim() == 3, "weighted_neighbor_sum: input must be [N x K x C]");
  const int n = xv.dim(0), k = xv.dim(1), c = xv.dim(2);
  check(static_cast<int64_t>(w.size()) == static_cast<int64_t>(n) * k,
        "weighted_neighbor_sum: weight count mismatch");
  TensorT<S> out({n, c});
  auto wp = std::make_shared<std::vector<S>>(std::move(w));
  for (int i = 0; i < n; ++i) {
    const S* base = xv.data.data() + static_cast<int64_t>(i) * k * c;
    S* orow = out.data.data() + static_cast<int64_t>(i) * c;
    for (int kk = 0; kk < k; ++kk) {
      const S wv = (*wp)[static_cast<size_t>(i) * k + kk];
      for (int j = 0; j < c; ++j) orow[j] += wv * base[kk * c + j];
    }
  }
  return t.record(std::move(out), {x}, [x, wp, k, c](TapeT<S>& tp, Var out_v) {
    if (!tp.needs_grad(x)) return;
    const auto& dy = tp.grad_mut(out_v);
    auto& dx = tp.grad_mut(x);
    const int64_t n64 = dy.dim(0);
    for (int64_t i = 0; i < n64; ++i)
      for (int kk = 0; kk < k; ++kk) {
        const S wv = (*wp)[static_cast<size_t>(i) * k + kk];
        S* dst = dx.data.data() + (i * k + kk) * c;
        const S* src = dy.data.data() + i * c;
        for (int j = 0; j < c; ++j) dst[j] += wv * src[j];
      }
  });
}

template <class S>
Var sum_all(TapeT<S>& t, Var x) {
  const auto& xv = t.val(x);
  S acc = S(0);
  for (S v : xv.data) acc += v;
  return t.record(TensorT<S>::scalar(acc), {x}, [x](TapeT<S>& tp, Var out_v) {
    if (!tp.needs_grad(x)) return;
    const S g = tp.grad_mut(out_v).data[0];
    auto& dx = tp.grad_mut(x);
    for (S& v : dx.data) v += g;
  });
}

}  // namespace ops

}  // namespace rffs
