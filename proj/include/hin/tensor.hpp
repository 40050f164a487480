#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include "hin/errors.hpp"

namespace hin {

using Rng = std::mt19937_64;

namespace detail {

struct TensorData {
    std::vector<std::size_t> shape;
    std::vector<double> value;
    std::vector<double> grad;  // empty until first needed
    bool requires_grad = false;
};

}  // namespace detail

/// Dense row-major tensor handle with shared storage. Copies alias the
/// same buffer; autodiff closures capture handles to keep storage alive.
class Tensor {
public:
    Tensor() = default;
    Tensor(std::vector<std::size_t> shape, std::vector<double> data, bool requires_grad = false);

    static Tensor zeros(std::vector<std::size_t> shape, bool requires_grad = false);
    static Tensor full(std::vector<std::size_t> shape, double v, bool requires_grad = false);
    static Tensor scalar(double v, bool requires_grad = false);
    static Tensor row(std::vector<double> v, bool requires_grad = false);

    bool defined() const { return static_cast<bool>(d_); }

    const std::vector<std::size_t>& shape() const { return data().shape; }
    std::size_t rank() const { return data().shape.size(); }
    std::size_t size() const { return data().value.size(); }
    std::size_t dim(std::size_t i) const;
    std::size_t rows() const { return dim(0); }
    std::size_t cols() const { return dim(1); }

    std::vector<double>& value() { return data().value; }
    const std::vector<double>& value() const { return data().value; }
    double& at(std::size_t i) { return data().value[i]; }
    double at(std::size_t i) const { return data().value[i]; }
    double& at(std::size_t i, std::size_t j);
    double at(std::size_t i, std::size_t j) const;

    /// Value of a one-element tensor.
    double item() const;

    bool requires_grad() const { return data().requires_grad; }
    void set_requires_grad(bool b) { data().requires_grad = b; }

    bool has_grad() const { return !data().grad.empty(); }
    /// Allocates a zeroed gradient buffer if absent.
    std::vector<double>& grad() const;
    void zero_grad() const;

    bool same_storage(const Tensor& other) const { return d_ == other.d_; }

private:
    detail::TensorData& data();
    const detail::TensorData& data() const;

    std::shared_ptr<detail::TensorData> d_;
};

std::string shape_str(const std::vector<std::size_t>& shape);

/// Ordered record of executed differentiable operations. Each op appears
/// after the ops producing its inputs; backward replays in exact reverse
/// execution order.
class Tape {
public:
    void record(std::function<void()> backward_fn);

    /// Seeds grad(loss) = 1 and runs every recorded backward step in
    /// reverse. Gradients accumulate additively; tensors not reachable
    /// from recorded ops are untouched.
    void backward(const Tensor& loss);

    void clear() { ops_.clear(); }
    std::size_t size() const { return ops_.size(); }

private:
    std::vector<std::function<void()>> ops_;
};

// --- differentiable operations -------------------------------------------

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b);
Tensor transpose2d(Tape& tape, const Tensor& x);

/// Elementwise sum. Also accepts b of shape [1,n] broadcast over the rows
/// of a [m,n] tensor (bias convention).
Tensor add(Tape& tape, const Tensor& a, const Tensor& b);
Tensor mul(Tape& tape, const Tensor& a, const Tensor& b);

/// out = mul_c * x + add_c, elementwise with scalar constants.
Tensor affine(Tape& tape, const Tensor& x, double mul_c, double add_c);

Tensor tanh(Tape& tape, const Tensor& x);
Tensor sigmoid(Tape& tape, const Tensor& x);

/// Numerically stable softmax along `axis` (negative counts from the back).
Tensor softmax(Tape& tape, const Tensor& x, int axis);

Tensor concat(Tape& tape, const std::vector<Tensor>& parts, int axis);
Tensor slice(Tape& tape, const Tensor& x, int axis, std::size_t start, std::size_t len);

/// Mean over `axis`; the axis is removed from the shape (rank-1 input
/// yields a scalar of shape {1}).
Tensor mean_axis(Tape& tape, const Tensor& x, int axis);
Tensor sum_all(Tape& tape, const Tensor& x);
Tensor reshape(Tape& tape, const Tensor& x, std::vector<std::size_t> shape);

/// Inverted dropout: survivors scaled by 1/(1-p) at training time so that
/// evaluation mode is the exact identity (the input handle is returned).
Tensor dropout(Tape& tape, const Tensor& x, double p, bool training, Rng* rng);

/// -log softmax(logits)[gold]; gold is a 1-based class index.
Tensor cross_entropy(Tape& tape, const Tensor& logits, int gold);

/// Gathers rows of `table` ([V,d]) by id; gradients scatter-add back.
Tensor embed(Tape& tape, const Tensor& table, const std::vector<int>& ids);

/// Row-wise layer normalization of x [m,n] with gain/bias [1,n].
Tensor layer_norm(Tape& tape, const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps = 1e-5);

}  // namespace hin
