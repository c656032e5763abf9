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
// Dense tensors with reverse-mode differentiation.
//
// A Tensor is a cheap handle onto a shared node. Ops record their inputs and
// a backward closure whenever at least one input requires a gradient, so
// calling Backward() on a scalar result accumulates d(loss)/d(x) into every
// reachable tensor that was created with requires_grad. All values are
// 64-bit floats stored row-major. Most ops work on rank-2 tensors; vectors
// are represented as 1 x n rows.

#ifndef MOLFUSE_TENSOR_H_
#define MOLFUSE_TENSOR_H_

#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace molfuse {

using Shape = std::vector<int64_t>;

std::string ShapeToString(const Shape& shape);
int64_t NumElements(const Shape& shape);

namespace internal {

struct Node {
  Shape shape;
  std::vector<double> data;
  // Allocated lazily; empty until a gradient flows in.
  std::vector<double> grad;
  bool requires_grad = false;
  bool is_leaf = true;
  std::vector<std::shared_ptr<Node>> inputs;
  std::function<void(Node& self)> backward;

  std::vector<double>& MutableGrad();
};

}  // namespace internal

class Tensor {
 public:
  Tensor() = default;

  static Tensor Zeros(Shape shape, bool requires_grad = false);
  static Tensor Full(Shape shape, double value, bool requires_grad = false);
  static Tensor FromData(Shape shape, std::vector<double> data,
                         bool requires_grad = false);
  // 1 x n row vector.
  static Tensor Row(std::vector<double> data, bool requires_grad = false);
  static Tensor Scalar(double value, bool requires_grad = false);

  bool defined() const { return node_ != nullptr; }
  const Shape& shape() const { return node_->shape; }
  int64_t rank() const { return static_cast<int64_t>(node_->shape.size()); }
  int64_t size() const { return static_cast<int64_t>(node_->data.size()); }
  // Rows and columns of a rank-2 tensor (rank 1 counts as a single row).
  int64_t rows() const;
  int64_t cols() const;

  std::span<const double> data() const { return node_->data; }
  std::span<double> mutable_data() { return node_->data; }
  double at(int64_t i) const { return node_->data[i]; }
  double at(int64_t r, int64_t c) const { return node_->data[r * cols() + c]; }
  // Value of a single-element tensor.
  double item() const;

  bool requires_grad() const { return node_->requires_grad; }
  bool has_grad() const { return !node_->grad.empty(); }
  // Gradient buffer; all zeros if nothing has flowed in yet.
  std::span<const double> grad() const;
  void ZeroGrad();

  // Copy of the values with no history and no gradient requirement.
  Tensor Detach() const;
  // Independent copy of the values preserving requires_grad.
  Tensor Clone() const;

  // Populates gradients of every reachable tensor that requires them.
  // Throws std::invalid_argument unless this tensor holds one element.
  void Backward() const;

  bool SameNode(const Tensor& other) const { return node_ == other.node_; }

 private:
  friend class OpBuilder;
  explicit Tensor(std::shared_ptr<internal::Node> node)
      : node_(std::move(node)) {}

  std::shared_ptr<internal::Node> node_;
};

// Disables graph recording on the current thread while alive. Ops still
// compute values; results never require gradients.
class NoGradGuard {
 public:
  NoGradGuard();
  ~NoGradGuard();
  NoGradGuard(const NoGradGuard&) = delete;
  NoGradGuard& operator=(const NoGradGuard&) = delete;

 private:
  bool previous_;
};

bool GradRecordingEnabled();

// ---------------------------------------------------------------------------
// Ops. Shape violations throw ShapeError naming the op and operand shapes.

// (m x k) * (k x n) -> m x n.
Tensor MatMul(const Tensor& a, const Tensor& b);
// a * b^T for (m x k), (n x k) -> m x n. Used for row-major linear layers.
Tensor MatMulTransposed(const Tensor& a, const Tensor& b);

// Elementwise; b may also be a 1 x n row broadcast over the rows of a.
Tensor Add(const Tensor& a, const Tensor& b);
Tensor Sub(const Tensor& a, const Tensor& b);
Tensor Mul(const Tensor& a, const Tensor& b);
Tensor Scale(const Tensor& a, double factor);

// Concatenates rank-2 tensors along axis 0 (rows) or 1 (columns).
Tensor Concat(const std::vector<Tensor>& parts, int axis);

Tensor Relu(const Tensor& x);
Tensor Sigmoid(const Tensor& x);
Tensor Tanh(const Tensor& x);
// Row-wise softmax over the last axis.
Tensor Softmax(const Tensor& x);

// Reductions over axis 0 (-> 1 x n) or 1 (-> m x 1) of a rank-2 tensor.
Tensor Sum(const Tensor& x, int axis);
// Ties route the gradient to the first maximal element.
Tensor Max(const Tensor& x, int axis);
// Sum of every element, -> 1 x 1.
Tensor SumAll(const Tensor& x);

// Rows of table selected by index: (V x d), n indices -> n x d.
// Gradient scatter-adds into the selected rows.
Tensor EmbeddingLookup(const Tensor& table, std::span<const int64_t> indices);
// Sums rows of x into segments: out[segment[i]] += x[i]; -> segments x d.
Tensor SegmentSum(const Tensor& x, std::span<const int64_t> segment,
                  int64_t num_segments);

// Mean over rows of -log(p[row, gold[row]] + 1e-12). probs rows must each
// sum to one within 1e-6.
Tensor CrossEntropy(const Tensor& probs, std::span<const int64_t> gold);

}  // namespace molfuse

#endif  // MOLFUSE_TENSOR_H_
