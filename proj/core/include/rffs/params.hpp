#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "rffs/common.hpp"
#include "rffs/tape.hpp"
#include "rffs/tensor.hpp"

namespace rffs {

/// Named, ordered parameter registry. Order is creation order and defines
/// the checkpoint layout and optimizer-state alignment.
template <class S>
class ParamStoreT {
 public:
  struct Entry {
    std::string name;
    TensorT<S> value;
  };

  int add(std::string name, TensorT<S> value) {
    for (const auto& e : entries_)
      check(e.name != name, "ParamStore: duplicate parameter name " + name);
    entries_.push_back(Entry{std::move(name), std::move(value)});
    return static_cast<int>(entries_.size()) - 1;
  }

  /// Kaiming-style uniform fan-in init, deterministic in (seed, entry order).
  int add_linear_weight(const std::string& name, int cin, int cout, Rng& rng) {
    TensorT<S> w({cin, cout});
    const double bound = std::sqrt(6.0 / cin);
    for (S& v : w.data) v = static_cast<S>(rng.uniform(-bound, bound));
    return add(name, std::move(w));
  }

  int add_zeros(const std::string& name, std::vector<int> shape) {
    return add(name, TensorT<S>::zeros(std::move(shape)));
  }

  int count() const { return static_cast<int>(entries_.size()); }
  Entry& entry(int i) { return entries_[static_cast<size_t>(i)]; }
  const Entry& entry(int i) const { return entries_[static_cast<size_t>(i)]; }
  const std::vector<Entry>& entries() const { return entries_; }
  std::vector<Entry>& entries() { return entries_; }

  int find(const std::string& name) const {
    for (int i = 0; i < count(); ++i)
      if (entries_[static_cast<size_t>(i)].name == name) return i;
    return -1;
  }

  int64_t total_scalars() const {
    int64_t n = 0;
    for (const auto& e : entries_) n += e.value.numel();
    return n;
  }

 private:
  std::vector<Entry> entries_;
};

using ParamStore = ParamStoreT<float>;

/// A linear map's parameter handles inside a ParamStore: weight [C_in x C_out]
/// and bias [C_out].
struct LinearParams {
  int weight = -1;
  int bias = -1;
  int in_channels = 0;
  int out_channels = 0;
};

template <class S>
LinearParams make_linear(ParamStoreT<S>& store, const std::string& name, int cin, int cout,
                         Rng& rng) {
  check(cin >= 1 && cout >= 1, "make_linear: channel counts must be positive");
  LinearParams p;
  p.in_channels = cin;
  p.out_channels = cout;
  p.weight = store.add_linear_weight(name + ".weight", cin, cout, rng);
  p.bias = store.add_zeros(name + ".bias", {cout});
  return p;
}

/// Per-forward tape handles for every entry of a store, aligned by index.
template <class S>
struct ParamVarsT {
  std::vector<Var> vars;

  static ParamVarsT push_all(TapeT<S>& tape, const ParamStoreT<S>& store, bool requires_grad) {
    ParamVarsT pv;
    pv.vars.reserve(static_cast<size_t>(store.count()));
    for (int i = 0; i < store.count(); ++i)
      pv.vars.push_back(tape.leaf(store.entry(i).value, requires_grad));
    return pv;
  }

  Var operator[](int i) const { return vars[static_cast<size_t>(i)]; }
};

using ParamVars = ParamVarsT<float>;

/// relu(x.W + b) — the shared per-edge map used throughout the network.
template <class S>
Var linear_relu(TapeT<S>& t, Var x, const ParamVarsT<S>& pv, const LinearParams& lp) {
  return ops::relu(t, ops::linear(t, x, pv[lp.weight], pv[lp.bias]));
}

template <class S>
Var linear_only(TapeT<S>& t, Var x, const ParamVarsT<S>& pv, const LinearParams& lp) {
  return ops::linear(t, x, pv[lp.weight], pv[lp.bias]);
}

}  // namespace rffs
