#pragma once

#include <cstdint>
#include <initializer_list>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "rffs/common.hpp"

namespace rffs {

/// Dense row-major tensor over scalar S. Production code uses S = float;
/// the finite-difference test oracle instantiates S = double so numeric
/// derivatives are computed against an f64 forward pass.
template <class S>
struct TensorT {
  std::vector<int> shape;
  std::vector<S> data;
  bool requires_grad = false;

  TensorT() = default;
  TensorT(std::vector<int> shp, S fill = S(0)) : shape(std::move(shp)) {
    data.assign(static_cast<size_t>(count(shape)), fill);
  }
  TensorT(std::vector<int> shp, std::vector<S> d) : shape(std::move(shp)), data(std::move(d)) {
    if (static_cast<int64_t>(data.size()) != count(shape))
      throw std::invalid_argument("Tensor: data length does not match shape");
  }

  static int64_t count(const std::vector<int>& shp) {
    int64_t n = 1;
    for (int d : shp) {
      if (d < 1) throw std::invalid_argument("Tensor: shape dimensions must be >= 1");
      n *= d;
    }
    return n;
  }

  int64_t numel() const { return static_cast<int64_t>(data.size()); }
  int dim(int i) const { return shape[static_cast<size_t>(i)]; }
  int ndim() const { return static_cast<int>(shape.size()); }
  /// Size of the last axis; tensors are treated as [rows() x last_dim()] by
  /// row-wise ops.
  int last_dim() const { return shape.empty() ? 1 : shape.back(); }
  int64_t rows() const { return numel() / last_dim(); }

  S& at(int64_t r, int c) { return data[static_cast<size_t>(r * last_dim() + c)]; }
  S at(int64_t r, int c) const { return data[static_cast<size_t>(r * last_dim() + c)]; }

  bool same_shape(const TensorT& o) const { return shape == o.shape; }

  static TensorT zeros(std::vector<int> shp) { return TensorT(std::move(shp)); }
  static TensorT full(std::vector<int> shp, S v) { return TensorT(std::move(shp), v); }
  static TensorT scalar(S v) { return TensorT({1}, std::vector<S>{v}); }

  static TensorT from_rows(std::initializer_list<std::initializer_list<S>> rows_in) {
    int r = static_cast<int>(rows_in.size());
    int c = r > 0 ? static_cast<int>(rows_in.begin()->size()) : 0;
    TensorT t({r, c});
    size_t i = 0;
    for (const auto& row : rows_in) {
      if (static_cast<int>(row.size()) != c)
        throw std::invalid_argument("Tensor::from_rows: ragged rows");
      for (S v : row) t.data[i++] = v;
    }
    return t;
  }

  std::string shape_str() const {
    std::ostringstream os;
    os << "[";
    for (size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
    os << "]";
    return os.str();
  }
};

using Tensor = TensorT<float>;

}  // namespace rffs
