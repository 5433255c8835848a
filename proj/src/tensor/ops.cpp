#include "slotzero/tensor/ops.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "slotzero/tensor/kernels.hpp"
#include "slotzero/tensor/tape.hpp"

namespace sz::ops {

namespace {

using NodePtr = std::shared_ptr<detail::Node>;

bool should_track(std::initializer_list<const Tensor*> inputs) {
  if (active_tape() == nullptr) return false;
  return std::any_of(inputs.begin(), inputs.end(),
                     [](const Tensor* t) { return t->requires_grad(); });
}

Tensor make_result(Shape shape, std::vector<double> values, bool track) {
  Tensor out(std::move(shape), std::move(values), track);
  out.node()->leaf = false;
  return out;
}

void record(const Tensor& out, Tape::Backward fn) { active_tape()->record(out.node(), std::move(fn)); }

// Splits `shape` around `axis` into (outer, extent, inner) for strided loops.
struct AxisSplit {
  std::size_t outer = 1;
  std::size_t extent = 1;
  std::size_t inner = 1;
};

AxisSplit split_axis(const Shape& shape, std::size_t axis, const char* op) {
  if (axis >= shape.size()) {
    throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) + " invalid for " +
                     shape_string(shape));
  }
  AxisSplit s;
  for (std::size_t i = 0; i < axis; ++i) s.outer *= shape[i];
  s.extent = shape[axis];
  for (std::size_t i = axis + 1; i < shape.size(); ++i) s.inner *= shape[i];
  return s;
}

Shape drop_axis(const Shape& shape, std::size_t axis) {
  Shape out;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i != axis) out.push_back(shape[i]);
  }
  return out;
}

Tensor binary(Elementwise kind, const Tensor& a, const Tensor& b) {
  const bool same = a.shape() == b.shape();
  const bool a_scalar = !same && a.numel() == 1;
  const bool b_scalar = !same && !a_scalar && b.numel() == 1;
  if (!same && !a_scalar && !b_scalar) {
    throw ShapeError("elementwise: shapes " + shape_string(a.shape()) + " and " +
                     shape_string(b.shape()) + " are not broadcastable");
  }
  const Shape out_shape = a_scalar ? b.shape() : a.shape();
  const std::size_t n = shape_numel(out_shape);
  const auto av = a.values();
  const auto bv = b.values();
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x0 = av[a_scalar ? 0 : i];
    const double x1 = bv[b_scalar ? 0 : i];
    switch (kind) {
      case Elementwise::add: y[i] = x0 + x1; break;
      case Elementwise::sub: y[i] = x0 - x1; break;
      case Elementwise::mul: y[i] = x0 * x1; break;
      default: throw std::logic_error("binary: unary kind");
    }
  }
  const bool track = should_track({&a, &b});
  Tensor out = make_result(out_shape, std::move(y), track);
  if (track) {
    record(out, [pa = a.node(), pb = b.node(), kind, a_scalar, b_scalar](const detail::Node& o) {
      const std::size_t n = o.grad.size();
      if (pa->requires_grad) {
        pa->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
          const double g = o.grad[i];
          const double d = kind == Elementwise::mul ? g * pb->value[b_scalar ? 0 : i] : g;
          pa->grad[a_scalar ? 0 : i] += d;
        }
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < n; ++i) {
          const double g = o.grad[i];
          double d = g;
          if (kind == Elementwise::sub) d = -g;
          if (kind == Elementwise::mul) d = g * pa->value[a_scalar ? 0 : i];
          pb->grad[b_scalar ? 0 : i] += d;
        }
      }
    });
  }
  return out;
}

// Unary map whose local derivative is a function of (input, output).
template <class Forward, class Derivative>
Tensor unary(const Tensor& a, Forward forward, Derivative derivative) {
  const auto av = a.values();
  std::vector<double> y(av.size());
  for (std::size_t i = 0; i < av.size(); ++i) y[i] = forward(av[i]);
  const bool track = should_track({&a});
  Tensor out = make_result(a.shape(), std::move(y), track);
  if (track) {
    record(out, [pa = a.node(), derivative](const detail::Node& o) {
      if (!pa->requires_grad) return;
      pa->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) {
        pa->grad[i] += o.grad[i] * derivative(pa->value[i], o.value[i]);
      }
    });
  }
  return out;
}

}  // namespace

Tensor matmul(const Tensor& a, const Tensor& b) {
  if (b.rank() != 2 || (a.rank() != 2 && a.rank() != 3)) {
    throw ShapeError("matmul: expected [..,k] x [k,n], got " + shape_string(a.shape()) + " x " +
                     shape_string(b.shape()));
  }
  const std::size_t k = a.shape().back();
  if (k != b.dim(0)) {
    throw ShapeError("matmul: inner extents disagree, " + shape_string(a.shape()) + " x " +
                     shape_string(b.shape()));
  }
  const std::size_t n = b.dim(1);
  const std::size_t m = a.numel() / std::max<std::size_t>(k, 1);
  Shape out_shape = a.shape();
  out_shape.back() = n;
  std::vector<double> y(m * n);
  kernels::gemm(a.values(), b.values(), y, m, k, n, false);
  const bool track = should_track({&a, &b});
  Tensor out = make_result(std::move(out_shape), std::move(y), track);
  if (track) {
    record(out, [pa = a.node(), pb = b.node(), m, k, n](const detail::Node& o) {
      if (pa->requires_grad) {
        pa->ensure_grad();
        kernels::gemm_nt_acc(o.grad, pb->value, pa->grad, m, k, n);
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        kernels::gemm_tn_acc(pa->value, o.grad, pb->grad, m, k, n);
      }
    });
  }
  return out;
}

Tensor linear(const Tensor& x, const Tensor& w, const Tensor& b) {
  if (w.rank() != 2 || b.rank() != 1 || x.rank() < 1 || x.shape().back() != w.dim(0) ||
      b.dim(0) != w.dim(1)) {
    throw ShapeError("linear: incompatible shapes x" + shape_string(x.shape()) + " w" +
                     shape_string(w.shape()) + " b" + shape_string(b.shape()));
  }
  const std::size_t k = w.dim(0);
  const std::size_t n = w.dim(1);
  const std::size_t m = x.numel() / std::max<std::size_t>(k, 1);
  Shape out_shape = x.shape();
  out_shape.back() = n;
  std::vector<double> y(m * n);
  const auto bv = b.values();
  for (std::size_t i = 0; i < m; ++i) std::copy(bv.begin(), bv.end(), y.begin() + i * n);
  kernels::gemm(x.values(), w.values(), y, m, k, n, true);
  const bool track = should_track({&x, &w, &b});
  Tensor out = make_result(std::move(out_shape), std::move(y), track);
  if (track) {
    record(out, [px = x.node(), pw = w.node(), pb = b.node(), m, k, n](const detail::Node& o) {
      if (px->requires_grad) {
        px->ensure_grad();
        kernels::gemm_nt_acc(o.grad, pw->value, px->grad, m, k, n);
      }
      if (pw->requires_grad) {
        pw->ensure_grad();
        kernels::gemm_tn_acc(px->value, o.grad, pw->grad, m, k, n);
      }
      if (pb->requires_grad) {
        pb->ensure_grad();
        for (std::size_t i = 0; i < m; ++i) {
          for (std::size_t j = 0; j < n; ++j) pb->grad[j] += o.grad[i * n + j];
        }
      }
    });
  }
  return out;
}

Tensor elementwise(Elementwise kind, const Tensor& a, const Tensor* b, double factor) {
  switch (kind) {
    case Elementwise::add:
    case Elementwise::sub:
    case Elementwise::mul:
      if (b == nullptr) throw ShapeError("elementwise: binary kind needs a second operand");
      return binary(kind, a, *b);
    case Elementwise::relu:
      return unary(a, [](double x) { return x > 0.0 ? x : 0.0; },
                   [](double x, double) { return x > 0.0 ? 1.0 : 0.0; });
    case Elementwise::tanh: {
      // Same shape as unary(), routed through the vectorised kernel.
      const auto av = a.values();
      std::vector<double> y(av.size());
      kernels::tanh_map(av, y);
      const bool track = should_track({&a});
      Tensor out = make_result(a.shape(), std::move(y), track);
      if (track) {
        record(out, [pa = a.node()](const detail::Node& o) {
          if (!pa->requires_grad) return;
          pa->ensure_grad();
          for (std::size_t i = 0; i < o.grad.size(); ++i) {
            pa->grad[i] += o.grad[i] * (1.0 - o.value[i] * o.value[i]);
          }
        });
      }
      return out;
    }
    case Elementwise::exp:
      return unary(a, [](double x) { return std::exp(x); }, [](double, double y) { return y; });
    case Elementwise::log: {
      for (double x : a.values()) {
        if (!(x > 0.0)) throw DomainError("log: non-positive input " + std::to_string(x));
      }
      return unary(a, [](double x) { return std::log(x); },
                   [](double x, double) { return 1.0 / x; });
    }
    case Elementwise::scale:
      return unary(a, [factor](double x) { return factor * x; },
                   [factor](double, double) { return factor; });
  }
  throw std::logic_error("elementwise: unknown kind");
}

Tensor add(const Tensor& a, const Tensor& b) { return elementwise(Elementwise::add, a, &b); }
Tensor sub(const Tensor& a, const Tensor& b) { return elementwise(Elementwise::sub, a, &b); }
Tensor mul(const Tensor& a, const Tensor& b) { return elementwise(Elementwise::mul, a, &b); }
Tensor scale(const Tensor& a, double factor) {
  return elementwise(Elementwise::scale, a, nullptr, factor);
}
Tensor relu(const Tensor& a) { return elementwise(Elementwise::relu, a); }
Tensor tanh(const Tensor& a) { return elementwise(Elementwise::tanh, a); }
Tensor exp(const Tensor& a) { return elementwise(Elementwise::exp, a); }
Tensor log(const Tensor& a) { return elementwise(Elementwise::log, a); }

Tensor add_scalar(const Tensor& a, double value) {
  return unary(a, [value](double x) { return x + value; }, [](double, double) { return 1.0; });
}

Tensor square(const Tensor& a) {
  return unary(a, [](double x) { return x * x; }, [](double x, double) { return 2.0 * x; });
}

Tensor clamp(const Tensor& a, double lo, double hi) {
  return unary(a, [lo, hi](double x) { return std::clamp(x, lo, hi); },
               [lo, hi](double x, double) { return (x < lo || x > hi) ? 0.0 : 1.0; });
}

Tensor reduce(Reduce kind, const Tensor& a, std::size_t axis) {
  const auto s = split_axis(a.shape(), axis, "reduce");
  const auto av = a.values();
  std::vector<double> y(s.outer * s.inner);
  std::vector<std::size_t> winner;
  if (kind == Reduce::max) {
    if (s.extent == 0) throw ShapeError("reduce max over an empty axis");
    winner.resize(y.size());
  }
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.extent * s.inner + i;
      double acc = 0.0;
      if (kind == Reduce::max) {
        std::size_t best = 0;
        acc = av[base];
        for (std::size_t l = 1; l < s.extent; ++l) {
          const double v = av[base + l * s.inner];
          if (v > acc) {  // strict: first maximum wins ties
            acc = v;
            best = l;
          }
        }
        winner[o * s.inner + i] = best;
      } else {
        for (std::size_t l = 0; l < s.extent; ++l) acc += av[base + l * s.inner];
        if (kind == Reduce::mean) acc /= static_cast<double>(s.extent);
      }
      y[o * s.inner + i] = acc;
    }
  }
  const bool track = should_track({&a});
  Tensor out = make_result(drop_axis(a.shape(), axis), std::move(y), track);
  if (track) {
    record(out, [pa = a.node(), kind, s, winner = std::move(winner)](const detail::Node& o) {
      if (!pa->requires_grad) return;
      pa->ensure_grad();
      const double mean_factor = 1.0 / static_cast<double>(std::max<std::size_t>(s.extent, 1));
      for (std::size_t oi = 0; oi < s.outer; ++oi) {
        for (std::size_t i = 0; i < s.inner; ++i) {
          const double g = o.grad[oi * s.inner + i];
          const std::size_t base = oi * s.extent * s.inner + i;
          if (kind == Reduce::max) {
            pa->grad[base + winner[oi * s.inner + i] * s.inner] += g;
          } else {
            const double d = kind == Reduce::mean ? g * mean_factor : g;
            for (std::size_t l = 0; l < s.extent; ++l) pa->grad[base + l * s.inner] += d;
          }
        }
      }
    });
  }
  return out;
}

Tensor sum(const Tensor& a, std::size_t axis) { return reduce(Reduce::sum, a, axis); }
Tensor mean(const Tensor& a, std::size_t axis) { return reduce(Reduce::mean, a, axis); }
Tensor max(const Tensor& a, std::size_t axis) { return reduce(Reduce::max, a, axis); }

Tensor sum_all(const Tensor& a) { return reduce(Reduce::sum, reshape(a, {a.numel()}), 0); }
Tensor mean_all(const Tensor& a) { return reduce(Reduce::mean, reshape(a, {a.numel()}), 0); }

namespace {

Tensor softmax_impl(const Tensor& a, std::size_t axis, bool log_space) {
  const auto s = split_axis(a.shape(), axis, log_space ? "log_softmax" : "softmax");
  const auto av = a.values();
  for (double x : av) {
    if (!std::isfinite(x)) throw DomainError("softmax: non-finite input");
  }
  std::vector<double> y(av.size());
  std::vector<double> probs(av.size());
  for (std::size_t o = 0; o < s.outer; ++o) {
    for (std::size_t i = 0; i < s.inner; ++i) {
      const std::size_t base = o * s.extent * s.inner + i;
      double m = -std::numeric_limits<double>::infinity();
      for (std::size_t l = 0; l < s.extent; ++l) m = std::max(m, av[base + l * s.inner]);
      double total = 0.0;
      for (std::size_t l = 0; l < s.extent; ++l) {
        const double e = std::exp(av[base + l * s.inner] - m);
        probs[base + l * s.inner] = e;
        total += e;
      }
      const double log_total = std::log(total);
      for (std::size_t l = 0; l < s.extent; ++l) {
        const std::size_t idx = base + l * s.inner;
        probs[idx] /= total;
        y[idx] = log_space ? av[idx] - m - log_total : probs[idx];
      }
    }
  }
  const bool track = should_track({&a});
  Tensor out = make_result(a.shape(), std::move(y), track);
  if (track) {
    record(out, [pa = a.node(), s, log_space, probs = std::move(probs)](const detail::Node& o) {
      if (!pa->requires_grad) return;
      pa->ensure_grad();
      for (std::size_t oi = 0; oi < s.outer; ++oi) {
        for (std::size_t i = 0; i < s.inner; ++i) {
          const std::size_t base = oi * s.extent * s.inner + i;
          double dot = 0.0;
          for (std::size_t l = 0; l < s.extent; ++l) {
            const std::size_t idx = base + l * s.inner;
            dot += log_space ? o.grad[idx] : o.grad[idx] * probs[idx];
          }
          for (std::size_t l = 0; l < s.extent; ++l) {
            const std::size_t idx = base + l * s.inner;
            pa->grad[idx] += log_space ? o.grad[idx] - probs[idx] * dot
                                       : probs[idx] * (o.grad[idx] - dot);
          }
        }
      }
    });
  }
  return out;
}

}  // namespace

Tensor softmax(const Tensor& a, std::size_t axis) { return softmax_impl(a, axis, false); }
Tensor log_softmax(const Tensor& a, std::size_t axis) { return softmax_impl(a, axis, true); }

Tensor reshape(const Tensor& a, Shape shape) {
  if (shape_numel(shape) != a.numel()) {
    throw ShapeError("reshape: " + shape_string(a.shape()) + " -> " + shape_string(shape));
  }
  const auto av = a.values();
  const bool track = should_track({&a});
  Tensor out = make_result(std::move(shape), std::vector<double>(av.begin(), av.end()), track);
  if (track) {
    record(out, [pa = a.node()](const detail::Node& o) {
      if (!pa->requires_grad) return;
      pa->ensure_grad();
      for (std::size_t i = 0; i < o.grad.size(); ++i) pa->grad[i] += o.grad[i];
    });
  }
  return out;
}

Tensor slice(const Tensor& a, std::size_t axis, std::size_t start, std::size_t count) {
  const auto s = split_axis(a.shape(), axis, "slice");
  if (start + count > s.extent) throw ShapeError("slice: range exceeds axis extent");
  Shape out_shape = a.shape();
  out_shape[axis] = count;
  const auto av = a.values();
  const std::size_t width = count * s.inner;
  std::vector<double> y(s.outer * width);
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::copy_n(av.begin() + (o * s.extent + start) * s.inner, width, y.begin() + o * width);
  }
  const bool track = should_track({&a});
  Tensor out = make_result(std::move(out_shape), std::move(y), track);
  if (track) {
    record(out, [pa = a.node(), s, start, width](const detail::Node& o) {
      if (!pa->requires_grad) return;
      pa->ensure_grad();
      for (std::size_t oi = 0; oi < s.outer; ++oi) {
        const std::size_t base = (oi * s.extent + start) * s.inner;
        for (std::size_t j = 0; j < width; ++j) pa->grad[base + j] += o.grad[oi * width + j];
      }
    });
  }
  return out;
}

Tensor concat(std::span<const Tensor> parts, std::size_t axis) {
  if (parts.empty()) throw ShapeError("concat: no inputs");
  const Shape& first = parts.front().shape();
  if (axis >= first.size()) throw ShapeError("concat: invalid axis");
  Shape out_shape = first;
  out_shape[axis] = 0;
  for (const auto& p : parts) {
    const Shape& ps = p.shape();
    bool ok = ps.size() == first.size();
    for (std::size_t i = 0; ok && i < ps.size(); ++i) ok = (i == axis) || ps[i] == first[i];
    if (!ok) {
      throw ShapeError("concat: " + shape_string(ps) + " incompatible with " +
                       shape_string(first));
    }
    out_shape[axis] += ps[axis];
  }
  const auto s = split_axis(out_shape, axis, "concat");
  std::vector<std::size_t> widths;
  std::vector<NodePtr> nodes;
  bool track = false;
  for (const auto& p : parts) {
    widths.push_back(p.dim(axis) * s.inner);
    nodes.push_back(p.node());
    track = track || p.requires_grad();
  }
  track = track && active_tape() != nullptr;
  const std::size_t row = s.extent * s.inner;
  std::vector<double> y(s.outer * row);
  for (std::size_t o = 0; o < s.outer; ++o) {
    std::size_t offset = o * row;
    for (std::size_t p = 0; p < parts.size(); ++p) {
      const auto pv = parts[p].values();
      std::copy_n(pv.begin() + o * widths[p], widths[p], y.begin() + offset);
      offset += widths[p];
    }
  }
  Tensor out = make_result(std::move(out_shape), std::move(y), track);
  if (track) {
    record(out, [nodes = std::move(nodes), widths = std::move(widths), outer = s.outer,
                 row](const detail::Node& o) {
      for (std::size_t oi = 0; oi < outer; ++oi) {
        std::size_t offset = oi * row;
        for (std::size_t p = 0; p < nodes.size(); ++p) {
          if (nodes[p]->requires_grad) {
            nodes[p]->ensure_grad();
            for (std::size_t j = 0; j < widths[p]; ++j) {
              nodes[p]->grad[oi * widths[p] + j] += o.grad[offset + j];
            }
          }
          offset += widths[p];
        }
      }
    });
  }
  return out;
}

Tensor concat(std::initializer_list<Tensor> parts, std::size_t axis) {
  return concat(std::span<const Tensor>(parts.begin(), parts.size()), axis);
}

Tensor gather_rows(const Tensor& a, std::span<const std::size_t> index) {
  if (a.rank() != 2) throw ShapeError("gather_rows: expected rank 2, got " + shape_string(a.shape()));
  const std::size_t rows = a.dim(0);
  const std::size_t width = a.dim(1);
  const auto av = a.values();
  std::vector<double> y(index.size() * width);
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= rows) throw ShapeError("gather_rows: index out of range");
    std::copy_n(av.begin() + index[r] * width, width, y.begin() + r * width);
  }
  const bool track = should_track({&a});
  Tensor out = make_result({index.size(), width}, std::move(y), track);
  if (track) {
    record(out, [pa = a.node(), idx = std::vector<std::size_t>(index.begin(), index.end()),
                 width](const detail::Node& o) {
      if (!pa->requires_grad) return;
      pa->ensure_grad();
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t j = 0; j < width; ++j) pa->grad[idx[r] * width + j] += o.grad[r * width + j];
      }
    });
  }
  return out;
}

Tensor scatter_add_rows(const Tensor& a, std::span<const std::size_t> index, std::size_t rows) {
  if (a.rank() != 2 || a.dim(0) != index.size()) {
    throw ShapeError("scatter_add_rows: expected one index per row of " + shape_string(a.shape()));
  }
  const std::size_t width = a.dim(1);
  const auto av = a.values();
  std::vector<double> y(rows * width, 0.0);
  for (std::size_t r = 0; r < index.size(); ++r) {
    if (index[r] >= rows) throw ShapeError("scatter_add_rows: index out of range");
    for (std::size_t j = 0; j < width; ++j) y[index[r] * width + j] += av[r * width + j];
  }
  const bool track = should_track({&a});
  Tensor out = make_result({rows, width}, std::move(y), track);
  if (track) {
    record(out, [pa = a.node(), idx = std::vector<std::size_t>(index.begin(), index.end()),
                 width](const detail::Node& o) {
      if (!pa->requires_grad) return;
      pa->ensure_grad();
      for (std::size_t r = 0; r < idx.size(); ++r) {
        for (std::size_t j = 0; j < width; ++j) pa->grad[r * width + j] += o.grad[idx[r] * width + j];
      }
    });
  }
  return out;
}

}  // namespace sz::ops
