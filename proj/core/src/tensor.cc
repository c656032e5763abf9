// Copyright 2026 The Molfuse Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
#include "molfuse/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_set>

#include "molfuse/errors.h"

namespace molfuse {

namespace {

thread_local bool grad_recording = true;

[[noreturn]] void ThrowShape(const std::string& op, const Shape& a,
                             const Shape& b) {
  throw ShapeError(op + ": incompatible shapes " + ShapeToString(a) + " and " +
                   ShapeToString(b));
}

[[noreturn]] void ThrowShape(const std::string& op, const Shape& a,
                             const std::string& what) {
  throw ShapeError(op + ": shape " + ShapeToString(a) + " " + what);
}

void RequireMatrix(const std::string& op, const Tensor& t) {
  if (!t.defined()) throw ShapeError(op + ": undefined tensor");
  if (t.rank() > 2) ThrowShape(op, t.shape(), "has rank above 2");
}

}  // namespace

std::string ShapeToString(const Shape& shape) {
  std::ostringstream out;
  out << "[";
  for (size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) out << "x";
    out << shape[i];
  }
  out << "]";
  return out.str();
}

int64_t NumElements(const Shape& shape) {
  int64_t n = 1;
  for (int64_t d : shape) n *= d;
  return n;
}

std::vector<double>& internal::Node::MutableGrad() {
  if (grad.empty()) grad.assign(data.size(), 0.0);
  return grad;
}

// Creates op results and gives op implementations access to nodes.
class OpBuilder {
 public:
  using BackwardFn = std::function<void(internal::Node&)>;

  static Tensor Make(Shape shape, std::vector<double> data,
                     std::initializer_list<Tensor> inputs, BackwardFn backward) {
    return Make(std::move(shape), std::move(data),
                std::vector<Tensor>(inputs), std::move(backward));
  }

  static Tensor Make(Shape shape, std::vector<double> data,
                     const std::vector<Tensor>& inputs, BackwardFn backward) {
    auto node = std::make_shared<internal::Node>();
    node->shape = std::move(shape);
    node->data = std::move(data);
    bool any = false;
    for (const Tensor& t : inputs) any = any || t.requires_grad();
    if (any && grad_recording) {
      node->requires_grad = true;
      node->is_leaf = false;
      for (const Tensor& t : inputs) node->inputs.push_back(t.node_);
      node->backward = std::move(backward);
    }
    return Tensor(std::move(node));
  }

  static internal::Node& node(const Tensor& t) { return *t.node_; }
};

namespace {

// Gradient buffer of an op input, or nullptr when it takes no gradient.
std::vector<double>* InputGrad(internal::Node& self, size_t i) {
  internal::Node& in = *self.inputs[i];
  if (!in.requires_grad) return nullptr;
  return &in.MutableGrad();
}

const std::vector<double>& InputData(internal::Node& self, size_t i) {
  return self.inputs[i]->data;
}

}  // namespace

Tensor Tensor::Zeros(Shape shape, bool requires_grad) {
  return Full(std::move(shape), 0.0, requires_grad);
}

Tensor Tensor::Full(Shape shape, double value, bool requires_grad) {
  const int64_t n = NumElements(shape);
  return FromData(std::move(shape), std::vector<double>(n, value),
                  requires_grad);
}

Tensor Tensor::FromData(Shape shape, std::vector<double> data,
                        bool requires_grad) {
  for (int64_t d : shape) {
    if (d < 0) ThrowShape("FromData", shape, "has a negative dimension");
  }
  if (NumElements(shape) != static_cast<int64_t>(data.size())) {
    throw ShapeError("FromData: shape " + ShapeToString(shape) + " needs " +
                     std::to_string(NumElements(shape)) + " values, got " +
                     std::to_string(data.size()));
  }
  auto node = std::make_shared<internal::Node>();
  node->shape = std::move(shape);
  node->data = std::move(data);
  node->requires_grad = requires_grad;
  return Tensor(std::move(node));
}

Tensor Tensor::Row(std::vector<double> data, bool requires_grad) {
  const int64_t n = static_cast<int64_t>(data.size());
  return FromData({1, n}, std::move(data), requires_grad);
}

Tensor Tensor::Scalar(double value, bool requires_grad) {
  return FromData({1, 1}, {value}, requires_grad);
}

int64_t Tensor::rows() const {
  const Shape& s = node_->shape;
  if (s.size() == 2) return s[0];
  return 1;
}

int64_t Tensor::cols() const {
  const Shape& s = node_->shape;
  if (s.size() == 2) return s[1];
  if (s.size() == 1) return s[0];
  return 1;
}

double Tensor::item() const {
  if (node_->data.size() != 1) {
    ThrowShape("item", node_->shape, "does not hold exactly one element");
  }
  return node_->data[0];
}

std::span<const double> Tensor::grad() const {
  if (node_->grad.empty()) node_->grad.assign(node_->data.size(), 0.0);
  return node_->grad;
}

void Tensor::ZeroGrad() {
  if (!node_->grad.empty()) {
    std::fill(node_->grad.begin(), node_->grad.end(), 0.0);
  }
}

Tensor Tensor::Detach() const { return FromData(shape(), node_->data, false); }

Tensor Tensor::Clone() const {
  return FromData(shape(), node_->data, node_->requires_grad);
}

void Tensor::Backward() const {
  if (node_->data.size() != 1) {
    throw std::invalid_argument("Backward: loss must be a scalar, got shape " +
                                ShapeToString(node_->shape));
  }
  if (!node_->requires_grad) return;

  // Iterative post-order DFS gives a topological order.
  std::vector<internal::Node*> order;
  std::unordered_set<internal::Node*> visited;
  std::vector<std::pair<internal::Node*, size_t>> stack;
  stack.emplace_back(node_.get(), 0);
  visited.insert(node_.get());
  while (!stack.empty()) {
    auto& [n, next] = stack.back();
    if (next < n->inputs.size()) {
      internal::Node* child = n->inputs[next++].get();
      if (child->requires_grad && visited.insert(child).second) {
        stack.emplace_back(child, 0);
      }
    } else {
      order.push_back(n);
      stack.pop_back();
    }
  }

  node_->MutableGrad()[0] += 1.0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    internal::Node* n = *it;
    if (n->backward && !n->grad.empty()) n->backward(*n);
  }
}

NoGradGuard::NoGradGuard() : previous_(grad_recording) {
  grad_recording = false;
}

NoGradGuard::~NoGradGuard() { grad_recording = previous_; }

bool GradRecordingEnabled() { return grad_recording; }

// ---------------------------------------------------------------------------

Tensor MatMul(const Tensor& a, const Tensor& b) {
  RequireMatrix("MatMul", a);
  RequireMatrix("MatMul", b);
  const int64_t m = a.rows(), k = a.cols(), n = b.cols();
  if (b.rows() != k) ThrowShape("MatMul", a.shape(), b.shape());
  std::vector<double> out(m * n, 0.0);
  const auto A = a.data();
  const auto B = b.data();
  for (int64_t i = 0; i < m; ++i) {
    double* row = &out[i * n];
    for (int64_t p = 0; p < k; ++p) {
      const double av = A[i * k + p];
      if (av == 0.0) continue;
      const double* brow = &B[p * n];
      for (int64_t j = 0; j < n; ++j) row[j] += av * brow[j];
    }
  }
  return OpBuilder::Make(
      {m, n}, std::move(out), {a, b}, [m, k, n](internal::Node& self) {
        const auto& A = InputData(self, 0);
        const auto& B = InputData(self, 1);
        const auto& G = self.grad;
        if (auto* ga = InputGrad(self, 0)) {
          for (int64_t i = 0; i < m; ++i) {
            for (int64_t p = 0; p < k; ++p) {
              double s = 0.0;
              for (int64_t j = 0; j < n; ++j) s += G[i * n + j] * B[p * n + j];
              (*ga)[i * k + p] += s;
            }
          }
        }
        if (auto* gb = InputGrad(self, 1)) {
          for (int64_t i = 0; i < m; ++i) {
            for (int64_t p = 0; p < k; ++p) {
              const double av = A[i * k + p];
              if (av == 0.0) continue;
              for (int64_t j = 0; j < n; ++j) {
                (*gb)[p * n + j] += av * G[i * n + j];
              }
            }
          }
        }
      });
}

Tensor MatMulTransposed(const Tensor& a, const Tensor& b) {
  RequireMatrix("MatMulTransposed", a);
  RequireMatrix("MatMulTransposed", b);
  const int64_t m = a.rows(), k = a.cols(), n = b.rows();
  if (b.cols() != k) ThrowShape("MatMulTransposed", a.shape(), b.shape());
  std::vector<double> out(m * n);
  const auto A = a.data();
  const auto B = b.data();
  for (int64_t i = 0; i < m; ++i) {
    const double* arow = &A[i * k];
    for (int64_t j = 0; j < n; ++j) {
      const double* brow = &B[j * k];
      double s = 0.0;
      for (int64_t p = 0; p < k; ++p) s += arow[p] * brow[p];
      out[i * n + j] = s;
    }
  }
  return OpBuilder::Make(
      {m, n}, std::move(out), {a, b}, [m, k, n](internal::Node& self) {
        const auto& A = InputData(self, 0);
        const auto& B = InputData(self, 1);
        const auto& G = self.grad;
        auto* ga = InputGrad(self, 0);
        auto* gb = InputGrad(self, 1);
        for (int64_t i = 0; i < m; ++i) {
          for (int64_t j = 0; j < n; ++j) {
            const double g = G[i * n + j];
            if (g == 0.0) continue;
            if (ga) {
              double* dst = &(*ga)[i * k];
              const double* brow = &B[j * k];
              for (int64_t p = 0; p < k; ++p) dst[p] += g * brow[p];
            }
            if (gb) {
              double* dst = &(*gb)[j * k];
              const double* arow = &A[i * k];
              for (int64_t p = 0; p < k; ++p) dst[p] += g * arow[p];
            }
          }
        }
      });
}

namespace {

enum class Binary { kAdd, kSub, kMul };

Tensor ElementwiseBinary(const char* op, Binary kind, const Tensor& a,
                         const Tensor& b) {
  RequireMatrix(op, a);
  RequireMatrix(op, b);
  const int64_t m = a.rows(), n = a.cols();
  bool broadcast = false;
  if (a.shape() != b.shape()) {
    if (b.rows() == 1 && b.cols() == n && b.size() == n) {
      broadcast = true;
    } else {
      ThrowShape(op, a.shape(), b.shape());
    }
  }
  std::vector<double> out(m * n);
  const auto A = a.data();
  const auto B = b.data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) {
      const double x = A[i * n + j];
      const double y = B[broadcast ? j : i * n + j];
      switch (kind) {
        case Binary::kAdd: out[i * n + j] = x + y; break;
        case Binary::kSub: out[i * n + j] = x - y; break;
        case Binary::kMul: out[i * n + j] = x * y; break;
      }
    }
  }
  return OpBuilder::Make(
      a.shape(), std::move(out), {a, b},
      [m, n, broadcast, kind](internal::Node& self) {
        const auto& A = InputData(self, 0);
        const auto& B = InputData(self, 1);
        const auto& G = self.grad;
        auto* ga = InputGrad(self, 0);
        auto* gb = InputGrad(self, 1);
        for (int64_t i = 0; i < m; ++i) {
          for (int64_t j = 0; j < n; ++j) {
            const int64_t ai = i * n + j;
            const int64_t bi = broadcast ? j : ai;
            const double g = G[ai];
            switch (kind) {
              case Binary::kAdd:
                if (ga) (*ga)[ai] += g;
                if (gb) (*gb)[bi] += g;
                break;
              case Binary::kSub:
                if (ga) (*ga)[ai] += g;
                if (gb) (*gb)[bi] -= g;
                break;
              case Binary::kMul:
                if (ga) (*ga)[ai] += g * B[bi];
                if (gb) (*gb)[bi] += g * A[ai];
                break;
            }
          }
        }
      });
}

// Unary op given the forward map and the derivative expressed through the
// input x and output y.
template <typename F, typename D>
Tensor ElementwiseUnary(const char* op, const Tensor& x, F f, D df) {
  RequireMatrix(op, x);
  std::vector<double> out(x.size());
  const auto X = x.data();
  for (size_t i = 0; i < out.size(); ++i) out[i] = f(X[i]);
  return OpBuilder::Make(x.shape(), std::move(out), {x},
                         [df](internal::Node& self) {
                           auto* gx = InputGrad(self, 0);
                           if (!gx) return;
                           const auto& X = InputData(self, 0);
                           for (size_t i = 0; i < self.data.size(); ++i) {
                             (*gx)[i] += self.grad[i] * df(X[i], self.data[i]);
                           }
                         });
}

}  // namespace

Tensor Add(const Tensor& a, const Tensor& b) {
  return ElementwiseBinary("Add", Binary::kAdd, a, b);
}

Tensor Sub(const Tensor& a, const Tensor& b) {
  return ElementwiseBinary("Sub", Binary::kSub, a, b);
}

Tensor Mul(const Tensor& a, const Tensor& b) {
  return ElementwiseBinary("Mul", Binary::kMul, a, b);
}

Tensor Scale(const Tensor& a, double factor) {
  return ElementwiseUnary(
      "Scale", a, [factor](double x) { return factor * x; },
      [factor](double, double) { return factor; });
}

Tensor Relu(const Tensor& x) {
  return ElementwiseUnary(
      "Relu", x, [](double v) { return v > 0.0 ? v : 0.0; },
      [](double v, double) { return v > 0.0 ? 1.0 : 0.0; });
}

Tensor Sigmoid(const Tensor& x) {
  return ElementwiseUnary(
      "Sigmoid", x,
      [](double v) {
        if (v >= 0.0) return 1.0 / (1.0 + std::exp(-v));
        const double e = std::exp(v);
        return e / (1.0 + e);
      },
      [](double, double y) { return y * (1.0 - y); });
}

Tensor Tanh(const Tensor& x) {
  return ElementwiseUnary(
      "Tanh", x, [](double v) { return std::tanh(v); },
      [](double, double y) { return 1.0 - y * y; });
}

Tensor Softmax(const Tensor& x) {
  RequireMatrix("Softmax", x);
  const int64_t m = x.rows(), n = x.cols();
  if (n == 0) ThrowShape("Softmax", x.shape(), "has an empty last axis");
  std::vector<double> out(m * n);
  const auto X = x.data();
  for (int64_t i = 0; i < m; ++i) {
    const double* row = &X[i * n];
    const double hi = *std::max_element(row, row + n);
    double total = 0.0;
    for (int64_t j = 0; j < n; ++j) {
      out[i * n + j] = std::exp(row[j] - hi);
      total += out[i * n + j];
    }
    for (int64_t j = 0; j < n; ++j) out[i * n + j] /= total;
  }
  return OpBuilder::Make(x.shape(), std::move(out), {x},
                         [m, n](internal::Node& self) {
                           auto* gx = InputGrad(self, 0);
                           if (!gx) return;
                           const auto& Y = self.data;
                           const auto& G = self.grad;
                           for (int64_t i = 0; i < m; ++i) {
                             double dot = 0.0;
                             for (int64_t j = 0; j < n; ++j) {
                               dot += G[i * n + j] * Y[i * n + j];
                             }
                             for (int64_t j = 0; j < n; ++j) {
                               (*gx)[i * n + j] +=
                                   Y[i * n + j] * (G[i * n + j] - dot);
                             }
                           }
                         });
}

Tensor Concat(const std::vector<Tensor>& parts, int axis) {
  if (parts.empty()) throw ShapeError("Concat: no inputs");
  if (axis != 0 && axis != 1) {
    throw ShapeError("Concat: axis must be 0 or 1, got " +
                     std::to_string(axis));
  }
  for (const Tensor& t : parts) RequireMatrix("Concat", t);
  const int64_t fixed = axis == 0 ? parts[0].cols() : parts[0].rows();
  int64_t total = 0;
  for (const Tensor& t : parts) {
    const int64_t f = axis == 0 ? t.cols() : t.rows();
    if (f != fixed) ThrowShape("Concat", parts[0].shape(), t.shape());
    total += axis == 0 ? t.rows() : t.cols();
  }
  const int64_t m = axis == 0 ? total : fixed;
  const int64_t n = axis == 0 ? fixed : total;
  std::vector<double> out(m * n);
  // offsets[i] is where part i begins along the concatenation axis.
  std::vector<int64_t> offsets;
  int64_t offset = 0;
  for (const Tensor& t : parts) {
    offsets.push_back(offset);
    const auto D = t.data();
    const int64_t r = t.rows(), c = t.cols();
    for (int64_t i = 0; i < r; ++i) {
      for (int64_t j = 0; j < c; ++j) {
        const int64_t oi = axis == 0 ? offset + i : i;
        const int64_t oj = axis == 0 ? j : offset + j;
        out[oi * n + oj] = D[i * c + j];
      }
    }
    offset += axis == 0 ? r : c;
  }
  return OpBuilder::Make(
      {m, n}, std::move(out), parts,
      [axis, n, offsets](internal::Node& self) {
        for (size_t p = 0; p < self.inputs.size(); ++p) {
          auto* gp = InputGrad(self, p);
          if (!gp) continue;
          const internal::Node& in = *self.inputs[p];
          const int64_t r = in.shape.size() == 2 ? in.shape[0] : 1;
          const int64_t c = static_cast<int64_t>(in.data.size()) /
                            std::max<int64_t>(r, 1);
          for (int64_t i = 0; i < r; ++i) {
            for (int64_t j = 0; j < c; ++j) {
              const int64_t oi = axis == 0 ? offsets[p] + i : i;
              const int64_t oj = axis == 0 ? j : offsets[p] + j;
              (*gp)[i * c + j] += self.grad[oi * n + oj];
            }
          }
        }
      });
}

Tensor Sum(const Tensor& x, int axis) {
  RequireMatrix("Sum", x);
  if (axis != 0 && axis != 1) {
    throw ShapeError("Sum: axis must be 0 or 1, got " + std::to_string(axis));
  }
  const int64_t m = x.rows(), n = x.cols();
  const auto X = x.data();
  std::vector<double> out(axis == 0 ? n : m, 0.0);
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < n; ++j) out[axis == 0 ? j : i] += X[i * n + j];
  }
  Shape shape = axis == 0 ? Shape{1, n} : Shape{m, 1};
  return OpBuilder::Make(shape, std::move(out), {x},
                         [m, n, axis](internal::Node& self) {
                           auto* gx = InputGrad(self, 0);
                           if (!gx) return;
                           for (int64_t i = 0; i < m; ++i) {
                             for (int64_t j = 0; j < n; ++j) {
                               (*gx)[i * n + j] +=
                                   self.grad[axis == 0 ? j : i];
                             }
                           }
                         });
}

Tensor SumAll(const Tensor& x) {
  RequireMatrix("SumAll", x);
  double total = 0.0;
  for (double v : x.data()) total += v;
  return OpBuilder::Make({1, 1}, {total}, {x}, [](internal::Node& self) {
    auto* gx = InputGrad(self, 0);
    if (!gx) return;
    for (double& g : *gx) g += self.grad[0];
  });
}

Tensor Max(const Tensor& x, int axis) {
  RequireMatrix("Max", x);
  if (axis != 0 && axis != 1) {
    throw ShapeError("Max: axis must be 0 or 1, got " + std::to_string(axis));
  }
  const int64_t m = x.rows(), n = x.cols();
  if ((axis == 0 ? m : n) == 0) {
    ThrowShape("Max", x.shape(), "has an empty reduction axis");
  }
  const auto X = x.data();
  const int64_t outer = axis == 0 ? n : m;
  const int64_t inner = axis == 0 ? m : n;
  std::vector<double> out(outer);
  std::vector<int64_t> argmax(outer);
  for (int64_t o = 0; o < outer; ++o) {
    int64_t best = -1;
    double best_value = 0.0;
    for (int64_t r = 0; r < inner; ++r) {
      const int64_t idx = axis == 0 ? r * n + o : o * n + r;
      if (best < 0 || X[idx] > best_value) {
        best = idx;
        best_value = X[idx];
      }
    }
    out[o] = best_value;
    argmax[o] = best;
  }
  Shape shape = axis == 0 ? Shape{1, n} : Shape{m, 1};
  return OpBuilder::Make(shape, std::move(out), {x},
                         [argmax](internal::Node& self) {
                           auto* gx = InputGrad(self, 0);
                           if (!gx) return;
                           for (size_t o = 0; o < argmax.size(); ++o) {
                             (*gx)[argmax[o]] += self.grad[o];
                           }
                         });
}

Tensor EmbeddingLookup(const Tensor& table, std::span<const int64_t> indices) {
  RequireMatrix("EmbeddingLookup", table);
  const int64_t vocab = table.rows(), d = table.cols();
  std::vector<int64_t> idx(indices.begin(), indices.end());
  for (int64_t i : idx) {
    if (i < 0 || i >= vocab) {
      throw ShapeError("EmbeddingLookup: index " + std::to_string(i) +
                       " out of range for table " +
                       ShapeToString(table.shape()));
    }
  }
  const int64_t count = static_cast<int64_t>(idx.size());
  std::vector<double> out(count * d);
  const auto T = table.data();
  for (int64_t r = 0; r < count; ++r) {
    std::copy_n(&T[idx[r] * d], d, &out[r * d]);
  }
  return OpBuilder::Make({count, d}, std::move(out), {table},
                         [idx = std::move(idx), d](internal::Node& self) {
                           auto* gt = InputGrad(self, 0);
                           if (!gt) return;
                           for (size_t r = 0; r < idx.size(); ++r) {
                             for (int64_t j = 0; j < d; ++j) {
                               (*gt)[idx[r] * d + j] += self.grad[r * d + j];
                             }
                           }
                         });
}

Tensor SegmentSum(const Tensor& x, std::span<const int64_t> segment,
                  int64_t num_segments) {
  RequireMatrix("SegmentSum", x);
  const int64_t m = x.rows(), d = x.cols();
  if (static_cast<int64_t>(segment.size()) != m) {
    throw ShapeError("SegmentSum: " + std::to_string(segment.size()) +
                     " segment ids for shape " + ShapeToString(x.shape()));
  }
  std::vector<int64_t> seg(segment.begin(), segment.end());
  for (int64_t s : seg) {
    if (s < 0 || s >= num_segments) {
      throw ShapeError("SegmentSum: segment id " + std::to_string(s) +
                       " outside [0, " + std::to_string(num_segments) + ")");
    }
  }
  std::vector<double> out(num_segments * d, 0.0);
  const auto X = x.data();
  for (int64_t i = 0; i < m; ++i) {
    for (int64_t j = 0; j < d; ++j) out[seg[i] * d + j] += X[i * d + j];
  }
  return OpBuilder::Make({num_segments, d}, std::move(out), {x},
                         [seg = std::move(seg), d](internal::Node& self) {
                           auto* gx = InputGrad(self, 0);
                           if (!gx) return;
                           for (size_t i = 0; i < seg.size(); ++i) {
                             for (int64_t j = 0; j < d; ++j) {
                               (*gx)[i * d + j] += self.grad[seg[i] * d + j];
                             }
                           }
                         });
}

Tensor CrossEntropy(const Tensor& probs, std::span<const int64_t> gold) {
  constexpr double kFloor = 1e-12;
  RequireMatrix("CrossEntropy", probs);
  const int64_t m = probs.rows(), n = probs.cols();
  if (static_cast<int64_t>(gold.size()) != m || m == 0) {
    throw ShapeError("CrossEntropy: " + std::to_string(gold.size()) +
                     " gold labels for predictions " +
                     ShapeToString(probs.shape()));
  }
  const auto P = probs.data();
  std::vector<int64_t> labels(gold.begin(), gold.end());
  double loss = 0.0;
  for (int64_t i = 0; i < m; ++i) {
    if (labels[i] < 0 || labels[i] >= n) {
      throw std::out_of_range("CrossEntropy: class index " +
                              std::to_string(labels[i]) + " outside [0, " +
                              std::to_string(n) + ")");
    }
    double row_total = 0.0;
    for (int64_t j = 0; j < n; ++j) row_total += P[i * n + j];
    if (std::abs(row_total - 1.0) > 1e-6) {
      throw std::invalid_argument(
          "CrossEntropy: prediction row " + std::to_string(i) +
          " sums to " + std::to_string(row_total) + ", expected 1");
    }
    loss -= std::log(P[i * n + labels[i]] + kFloor);
  }
  loss /= static_cast<double>(m);
  return OpBuilder::Make({1, 1}, {loss}, {probs},
                         [labels = std::move(labels), m, n](
                             internal::Node& self) {
                           auto* gp = InputGrad(self, 0);
                           if (!gp) return;
                           const auto& P = InputData(self, 0);
                           const double g = self.grad[0] / m;
                           for (int64_t i = 0; i < m; ++i) {
                             const int64_t k = i * n + labels[i];
                             (*gp)[k] -= g / (P[k] + kFloor);
                           }
                         });
}

}  // namespace molfuse
