#include "hin/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <utility>

namespace hin {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return n;
}

int normalize_axis(int axis, std::size_t rank, const char* op) {
    int r = static_cast<int>(rank);
    if (axis < 0) axis += r;
    if (axis < 0 || axis >= r) {
        throw ShapeError(std::string(op) + ": axis " + std::to_string(axis) +
                         " out of range for rank " + std::to_string(rank));
    }
    return axis;
}

void require_rank2(const Tensor& t, const char* op) {
    if (t.rank() != 2) {
        throw ShapeError(std::string(op) + ": expected a rank-2 tensor, got " +
                         shape_str(t.shape()));
    }
}

// C[m,n] += A[m,k] * B[k,n]
void gemm_acc(const double* a, const double* b, double* c,
              std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t p = 0; p < k; ++p) {
            const double av = arow[p];
            if (av == 0.0) continue;
            const double* brow = b + p * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

// C[m,n] += A[m,k] * B[n,k]^T
void gemm_acc_bt(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a + i * k;
        double* crow = c + i * n;
        for (std::size_t j = 0; j < n; ++j) {
            const double* brow = b + j * k;
            double acc = 0.0;
            for (std::size_t p = 0; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] += acc;
        }
    }
}

// C[m,n] += A[k,m]^T * B[k,n]
void gemm_acc_at(const double* a, const double* b, double* c,
                 std::size_t m, std::size_t k, std::size_t n) {
    for (std::size_t p = 0; p < k; ++p) {
        const double* arow = a + p * m;
        const double* brow = b + p * n;
        for (std::size_t i = 0; i < m; ++i) {
            const double av = arow[i];
            if (av == 0.0) continue;
            double* crow = c + i * n;
            for (std::size_t j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

}  // namespace

std::string shape_str(const std::vector<std::size_t>& shape) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < shape.size(); ++i) {
        if (i) os << 'x';
        os << shape[i];
    }
    os << ']';
    return os.str();
}

// --- Tensor ----------------------------------------------------------------

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<double> data, bool requires_grad) {
    for (std::size_t d : shape) {
        if (d == 0) throw ShapeError("tensor dimensions must be positive, got " + shape_str(shape));
    }
    if (shape_product(shape) != data.size()) {
        throw ShapeError("tensor data length " + std::to_string(data.size()) +
                         " does not match shape " + shape_str(shape));
    }
    d_ = std::make_shared<detail::TensorData>();
    d_->shape = std::move(shape);
    d_->value = std::move(data);
    d_->requires_grad = requires_grad;
}

Tensor Tensor::zeros(std::vector<std::size_t> shape, bool requires_grad) {
    std::size_t n = shape_product(shape);
    return Tensor(std::move(shape), std::vector<double>(n, 0.0), requires_grad);
}

Tensor Tensor::full(std::vector<std::size_t> shape, double v, bool requires_grad) {
    std::size_t n = shape_product(shape);
    return Tensor(std::move(shape), std::vector<double>(n, v), requires_grad);
}

Tensor Tensor::scalar(double v, bool requires_grad) {
    return Tensor({1}, {v}, requires_grad);
}

Tensor Tensor::row(std::vector<double> v, bool requires_grad) {
    std::size_t n = v.size();
    return Tensor({1, n}, std::move(v), requires_grad);
}

detail::TensorData& Tensor::data() {
    if (!d_) throw UsageError("operation on an empty tensor handle");
    return *d_;
}

const detail::TensorData& Tensor::data() const {
    if (!d_) throw UsageError("operation on an empty tensor handle");
    return *d_;
}

std::size_t Tensor::dim(std::size_t i) const {
    const auto& s = data().shape;
    if (i >= s.size()) {
        throw ShapeError("dim " + std::to_string(i) + " out of range for " + shape_str(s));
    }
    return s[i];
}

double& Tensor::at(std::size_t i, std::size_t j) {
    require_rank2(*this, "at");
    return data().value[i * cols() + j];
}

double Tensor::at(std::size_t i, std::size_t j) const {
    require_rank2(*this, "at");
    return data().value[i * cols() + j];
}

double Tensor::item() const {
    if (size() != 1) {
        throw UsageError("item(): tensor of shape " + shape_str(shape()) + " is not a scalar");
    }
    return data().value[0];
}

std::vector<double>& Tensor::grad() const {
    auto& d = const_cast<detail::TensorData&>(data());
    if (d.grad.size() != d.value.size()) d.grad.assign(d.value.size(), 0.0);
    return d.grad;
}

void Tensor::zero_grad() const {
    auto& d = const_cast<detail::TensorData&>(data());
    if (!d.grad.empty()) std::fill(d.grad.begin(), d.grad.end(), 0.0);
}

// --- Tape --------------------------------------------------------------------

void Tape::record(std::function<void()> backward_fn) {
    ops_.push_back(std::move(backward_fn));
}

void Tape::backward(const Tensor& loss) {
    if (loss.size() != 1) {
        throw UsageError("backward: loss must be a scalar, got shape " + shape_str(loss.shape()));
    }
    loss.grad()[0] += 1.0;
    for (auto it = ops_.rbegin(); it != ops_.rend(); ++it) (*it)();
}

// --- op helpers ----------------------------------------------------------------

namespace {

bool track(const Tensor& a) { return a.requires_grad(); }

Tensor make_out(std::vector<std::size_t> shape, std::vector<double> value, bool req) {
    return Tensor(std::move(shape), std::move(value), req);
}

}  // namespace

// --- operations ------------------------------------------------------------

Tensor matmul(Tape& tape, const Tensor& a, const Tensor& b) {
    require_rank2(a, "matmul");
    require_rank2(b, "matmul");
    if (a.cols() != b.rows()) {
        throw ShapeError("matmul: inner dimensions disagree: " + shape_str(a.shape()) + " x " +
                         shape_str(b.shape()));
    }
    const std::size_t m = a.rows(), k = a.cols(), n = b.cols();
    std::vector<double> out(m * n, 0.0);
    gemm_acc(a.value().data(), b.value().data(), out.data(), m, k, n);
    Tensor c = make_out({m, n}, std::move(out), track(a) || track(b));
    if (c.requires_grad()) {
        tape.record([a, b, c, m, k, n]() {
            if (!c.has_grad()) return;
            const double* gc = c.grad().data();
            if (a.requires_grad()) {
                // dA += dC * B^T
                gemm_acc_bt(gc, b.value().data(), a.grad().data(), m, n, k);
            }
            if (b.requires_grad()) {
                // dB += A^T * dC
                gemm_acc_at(a.value().data(), gc, b.grad().data(), k, m, n);
            }
        });
    }
    return c;
}

Tensor transpose2d(Tape& tape, const Tensor& x) {
    require_rank2(x, "transpose");
    const std::size_t m = x.rows(), n = x.cols();
    std::vector<double> out(m * n);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) out[j * m + i] = x.value()[i * n + j];
    Tensor y = make_out({n, m}, std::move(out), track(x));
    if (y.requires_grad()) {
        tape.record([x, y, m, n]() {
            if (!y.has_grad()) return;
            auto& gx = x.grad();
            const auto& gy = y.grad();
            for (std::size_t i = 0; i < m; ++i)
                for (std::size_t j = 0; j < n; ++j) gx[i * n + j] += gy[j * m + i];
        });
    }
    return y;
}

Tensor add(Tape& tape, const Tensor& a, const Tensor& b) {
    const bool same = a.shape() == b.shape();
    const bool rowcast = !same && a.rank() == 2 && b.rank() == 2 && b.rows() == 1 &&
                         a.cols() == b.cols();
    if (!same && !rowcast) {
        throw ShapeError("add: incompatible shapes " + shape_str(a.shape()) + " and " +
                         shape_str(b.shape()));
    }
    std::vector<double> out(a.value());
    if (same) {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] += b.value()[i];
    } else {
        const std::size_t n = a.cols();
        for (std::size_t i = 0; i < a.rows(); ++i)
            for (std::size_t j = 0; j < n; ++j) out[i * n + j] += b.value()[j];
    }
    Tensor c = make_out(a.shape(), std::move(out), track(a) || track(b));
    if (c.requires_grad()) {
        tape.record([a, b, c, same]() {
            if (!c.has_grad()) return;
            const auto& gc = c.grad();
            if (a.requires_grad()) {
                auto& ga = a.grad();
                for (std::size_t i = 0; i < gc.size(); ++i) ga[i] += gc[i];
            }
            if (b.requires_grad()) {
                auto& gb = b.grad();
                if (same) {
                    for (std::size_t i = 0; i < gc.size(); ++i) gb[i] += gc[i];
                } else {
                    const std::size_t n = a.cols();
                    for (std::size_t i = 0; i < a.rows(); ++i)
                        for (std::size_t j = 0; j < n; ++j) gb[j] += gc[i * n + j];
                }
            }
        });
    }
    return c;
}

Tensor mul(Tape& tape, const Tensor& a, const Tensor& b) {
    if (a.shape() != b.shape()) {
        throw ShapeError("mul: shape mismatch " + shape_str(a.shape()) + " vs " +
                         shape_str(b.shape()));
    }
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = a.value()[i] * b.value()[i];
    Tensor c = make_out(a.shape(), std::move(out), track(a) || track(b));
    if (c.requires_grad()) {
        tape.record([a, b, c]() {
            if (!c.has_grad()) return;
            const auto& gc = c.grad();
            if (a.requires_grad()) {
                auto& ga = a.grad();
                for (std::size_t i = 0; i < gc.size(); ++i) ga[i] += gc[i] * b.value()[i];
            }
            if (b.requires_grad()) {
                auto& gb = b.grad();
                for (std::size_t i = 0; i < gc.size(); ++i) gb[i] += gc[i] * a.value()[i];
            }
        });
    }
    return c;
}

Tensor affine(Tape& tape, const Tensor& x, double mul_c, double add_c) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = mul_c * x.value()[i] + add_c;
    Tensor y = make_out(x.shape(), std::move(out), track(x));
    if (y.requires_grad()) {
        tape.record([x, y, mul_c]() {
            if (!y.has_grad()) return;
            auto& gx = x.grad();
            const auto& gy = y.grad();
            for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += mul_c * gy[i];
        });
    }
    return y;
}

Tensor tanh(Tape& tape, const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::tanh(x.value()[i]);
    Tensor y = make_out(x.shape(), std::move(out), track(x));
    if (y.requires_grad()) {
        tape.record([x, y]() {
            if (!y.has_grad()) return;
            auto& gx = x.grad();
            const auto& gy = y.grad();
            for (std::size_t i = 0; i < gy.size(); ++i) {
                const double t = y.value()[i];
                gx[i] += (1.0 - t * t) * gy[i];
            }
        });
    }
    return y;
}

Tensor sigmoid(Tape& tape, const Tensor& x) {
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double v = x.value()[i];
        out[i] = v >= 0.0 ? 1.0 / (1.0 + std::exp(-v)) : std::exp(v) / (1.0 + std::exp(v));
    }
    Tensor y = make_out(x.shape(), std::move(out), track(x));
    if (y.requires_grad()) {
        tape.record([x, y]() {
            if (!y.has_grad()) return;
            auto& gx = x.grad();
            const auto& gy = y.grad();
            for (std::size_t i = 0; i < gy.size(); ++i) {
                const double s = y.value()[i];
                gx[i] += s * (1.0 - s) * gy[i];
            }
        });
    }
    return y;
}

Tensor softmax(Tape& tape, const Tensor& x, int axis) {
    const int ax = normalize_axis(axis, x.rank(), "softmax");
    const auto& shape = x.shape();
    const std::size_t len = shape[ax];
    std::size_t outer = 1, inner = 1;
    for (int i = 0; i < ax; ++i) outer *= shape[i];
    for (std::size_t i = ax + 1; i < shape.size(); ++i) inner *= shape[i];

    std::vector<double> out(x.size());
    const auto& v = x.value();
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t base = o * len * inner + in;
            double mx = v[base];
            for (std::size_t j = 1; j < len; ++j) mx = std::max(mx, v[base + j * inner]);
            double sum = 0.0;
            for (std::size_t j = 0; j < len; ++j) {
                const double e = std::exp(v[base + j * inner] - mx);
                out[base + j * inner] = e;
                sum += e;
            }
            for (std::size_t j = 0; j < len; ++j) out[base + j * inner] /= sum;
        }
    }
    Tensor y = make_out(shape, std::move(out), track(x));
    if (y.requires_grad()) {
        tape.record([x, y, outer, inner, len]() {
            if (!y.has_grad()) return;
            auto& gx = x.grad();
            const auto& gy = y.grad();
            const auto& yv = y.value();
            for (std::size_t o = 0; o < outer; ++o) {
                for (std::size_t in = 0; in < inner; ++in) {
                    const std::size_t base = o * len * inner + in;
                    double dot = 0.0;
                    for (std::size_t j = 0; j < len; ++j)
                        dot += gy[base + j * inner] * yv[base + j * inner];
                    for (std::size_t j = 0; j < len; ++j) {
                        const std::size_t k = base + j * inner;
                        gx[k] += yv[k] * (gy[k] - dot);
                    }
                }
            }
        });
    }
    return y;
}

Tensor concat(Tape& tape, const std::vector<Tensor>& parts, int axis) {
    if (parts.empty()) throw ShapeError("concat: empty tensor list");
    const int ax = normalize_axis(axis, parts[0].rank(), "concat");
    const auto& ref = parts[0].shape();
    std::size_t total = 0;
    for (const auto& t : parts) {
        if (t.rank() != ref.size()) {
            throw ShapeError("concat: rank mismatch " + shape_str(t.shape()) + " vs " +
                             shape_str(ref));
        }
        for (std::size_t i = 0; i < ref.size(); ++i) {
            if (static_cast<int>(i) != ax && t.shape()[i] != ref[i]) {
                throw ShapeError("concat: shape mismatch " + shape_str(t.shape()) + " vs " +
                                 shape_str(ref) + " on axis " + std::to_string(i));
            }
        }
        total += t.shape()[ax];
    }
    std::vector<std::size_t> oshape(ref);
    oshape[ax] = total;

    std::size_t outer = 1, inner = 1;
    for (int i = 0; i < ax; ++i) outer *= ref[i];
    for (std::size_t i = ax + 1; i < ref.size(); ++i) inner *= ref[i];

    std::vector<double> out(outer * total * inner);
    bool req = false;
    std::size_t off = 0;
    for (const auto& t : parts) {
        const std::size_t block = t.shape()[ax] * inner;
        for (std::size_t o = 0; o < outer; ++o) {
            std::copy_n(t.value().data() + o * block, block,
                        out.data() + o * total * inner + off);
        }
        off += block;
        req = req || track(t);
    }
    Tensor y = make_out(std::move(oshape), std::move(out), req);
    if (y.requires_grad()) {
        std::vector<Tensor> held(parts);
        tape.record([held, y, outer, inner, total, ax]() {
            if (!y.has_grad()) return;
            const auto& gy = y.grad();
            std::size_t off = 0;
            for (const auto& t : held) {
                const std::size_t block = t.shape()[ax] * inner;
                if (t.requires_grad()) {
                    auto& gt = t.grad();
                    for (std::size_t o = 0; o < outer; ++o) {
                        const double* src = gy.data() + o * total * inner + off;
                        double* dst = gt.data() + o * block;
                        for (std::size_t i = 0; i < block; ++i) dst[i] += src[i];
                    }
                }
                off += block;
            }
        });
    }
    return y;
}

Tensor slice(Tape& tape, const Tensor& x, int axis, std::size_t start, std::size_t len) {
    const int ax = normalize_axis(axis, x.rank(), "slice");
    const auto& shape = x.shape();
    if (len == 0 || start + len > shape[ax]) {
        throw ShapeError("slice: range [" + std::to_string(start) + ", " +
                         std::to_string(start + len) + ") invalid for axis size " +
                         std::to_string(shape[ax]));
    }
    std::size_t outer = 1, inner = 1;
    for (int i = 0; i < ax; ++i) outer *= shape[i];
    for (std::size_t i = ax + 1; i < shape.size(); ++i) inner *= shape[i];

    std::vector<std::size_t> oshape(shape);
    oshape[ax] = len;
    std::vector<double> out(outer * len * inner);
    const std::size_t full = shape[ax] * inner;
    for (std::size_t o = 0; o < outer; ++o) {
        std::copy_n(x.value().data() + o * full + start * inner, len * inner,
                    out.data() + o * len * inner);
    }
    Tensor y = make_out(std::move(oshape), std::move(out), track(x));
    if (y.requires_grad()) {
        tape.record([x, y, outer, inner, len, start, full]() {
            if (!y.has_grad()) return;
            auto& gx = x.grad();
            const auto& gy = y.grad();
            for (std::size_t o = 0; o < outer; ++o) {
                const double* src = gy.data() + o * len * inner;
                double* dst = gx.data() + o * full + start * inner;
                for (std::size_t i = 0; i < len * inner; ++i) dst[i] += src[i];
            }
        });
    }
    return y;
}

Tensor mean_axis(Tape& tape, const Tensor& x, int axis) {
    const int ax = normalize_axis(axis, x.rank(), "mean_axis");
    const auto& shape = x.shape();
    const std::size_t len = shape[ax];
    std::size_t outer = 1, inner = 1;
    for (int i = 0; i < ax; ++i) outer *= shape[i];
    for (std::size_t i = ax + 1; i < shape.size(); ++i) inner *= shape[i];

    std::vector<std::size_t> oshape;
    for (std::size_t i = 0; i < shape.size(); ++i)
        if (static_cast<int>(i) != ax) oshape.push_back(shape[i]);
    if (oshape.empty()) oshape.push_back(1);

    std::vector<double> out(outer * inner, 0.0);
    const auto& v = x.value();
    for (std::size_t o = 0; o < outer; ++o)
        for (std::size_t j = 0; j < len; ++j)
            for (std::size_t in = 0; in < inner; ++in)
                out[o * inner + in] += v[o * len * inner + j * inner + in];
    const double scale = 1.0 / static_cast<double>(len);
    for (double& d : out) d *= scale;

    Tensor y = make_out(std::move(oshape), std::move(out), track(x));
    if (y.requires_grad()) {
        tape.record([x, y, outer, inner, len, scale]() {
            if (!y.has_grad()) return;
            auto& gx = x.grad();
            const auto& gy = y.grad();
            for (std::size_t o = 0; o < outer; ++o)
                for (std::size_t j = 0; j < len; ++j)
                    for (std::size_t in = 0; in < inner; ++in)
                        gx[o * len * inner + j * inner + in] += scale * gy[o * inner + in];
        });
    }
    return y;
}

Tensor sum_all(Tape& tape, const Tensor& x) {
    double s = 0.0;
    for (double v : x.value()) s += v;
    Tensor y = Tensor::scalar(s, track(x));
    if (y.requires_grad()) {
        tape.record([x, y]() {
            if (!y.has_grad()) return;
            const double g = y.grad()[0];
            auto& gx = x.grad();
            for (double& d : gx) d += g;
        });
    }
    return y;
}

Tensor reshape(Tape& tape, const Tensor& x, std::vector<std::size_t> shape) {
    if (shape_product(shape) != x.size()) {
        throw ShapeError("reshape: cannot view " + shape_str(x.shape()) + " as " +
                         shape_str(shape));
    }
    Tensor y = make_out(std::move(shape), x.value(), track(x));
    if (y.requires_grad()) {
        tape.record([x, y]() {
            if (!y.has_grad()) return;
            auto& gx = x.grad();
            const auto& gy = y.grad();
            for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i];
        });
    }
    return y;
}

Tensor dropout(Tape& tape, const Tensor& x, double p, bool training, Rng* rng) {
    if (p < 0.0 || p >= 1.0) {
        throw ConfigError("dropout probability must lie in [0,1), got " + std::to_string(p));
    }
    if (!training || p == 0.0) return x;
    if (rng == nullptr) throw UsageError("dropout: training mode requires an rng");

    const double keep_scale = 1.0 / (1.0 - p);
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    auto mask = std::make_shared<std::vector<double>>(x.size());
    std::vector<double> out(x.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double m = uni(*rng) >= p ? keep_scale : 0.0;
        (*mask)[i] = m;
        out[i] = x.value()[i] * m;
    }
    Tensor y = make_out(x.shape(), std::move(out), track(x));
    if (y.requires_grad()) {
        tape.record([x, y, mask]() {
            if (!y.has_grad()) return;
            auto& gx = x.grad();
            const auto& gy = y.grad();
            for (std::size_t i = 0; i < gy.size(); ++i) gx[i] += gy[i] * (*mask)[i];
        });
    }
    return y;
}

Tensor cross_entropy(Tape& tape, const Tensor& logits, int gold) {
    if (logits.rank() > 2 || (logits.rank() == 2 && logits.rows() != 1)) {
        throw ShapeError("cross_entropy: expected logits of shape [K] or [1,K], got " +
                         shape_str(logits.shape()));
    }
    const std::size_t k = logits.size();
    if (k < 2) throw ShapeError("cross_entropy: need at least 2 classes, got " + std::to_string(k));
    if (gold < 1 || static_cast<std::size_t>(gold) > k) {
        throw LabelError("cross_entropy: gold label " + std::to_string(gold) +
                         " outside [1.." + std::to_string(k) + "]");
    }
    const auto& v = logits.value();
    double mx = v[0];
    for (double d : v) mx = std::max(mx, d);
    double sum = 0.0;
    for (double d : v) sum += std::exp(d - mx);
    const double lse = mx + std::log(sum);
    const double loss = lse - v[static_cast<std::size_t>(gold - 1)];

    Tensor y = Tensor::scalar(loss, track(logits));
    if (y.requires_grad()) {
        tape.record([logits, y, lse, gold]() {
            if (!y.has_grad()) return;
            const double g = y.grad()[0];
            auto& gx = logits.grad();
            const auto& v = logits.value();
            for (std::size_t i = 0; i < v.size(); ++i) {
                const double p = std::exp(v[i] - lse);
                const double onehot = (static_cast<std::size_t>(gold - 1) == i) ? 1.0 : 0.0;
                gx[i] += g * (p - onehot);
            }
        });
    }
    return y;
}

Tensor embed(Tape& tape, const Tensor& table, const std::vector<int>& ids) {
    require_rank2(table, "embed");
    if (ids.empty()) throw ShapeError("embed: empty id list");
    const std::size_t v = table.rows(), d = table.cols();
    std::vector<double> out(ids.size() * d);
    for (std::size_t i = 0; i < ids.size(); ++i) {
        const int id = ids[i];
        if (id < 0 || static_cast<std::size_t>(id) >= v) {
            throw UsageError("embed: token id " + std::to_string(id) +
                             " outside table of " + std::to_string(v) + " rows");
        }
        std::copy_n(table.value().data() + static_cast<std::size_t>(id) * d, d,
                    out.data() + i * d);
    }
    Tensor y = make_out({ids.size(), d}, std::move(out), track(table));
    if (y.requires_grad()) {
        tape.record([table, y, ids, d]() {
            if (!y.has_grad()) return;
            auto& gt = table.grad();
            const auto& gy = y.grad();
            for (std::size_t i = 0; i < ids.size(); ++i) {
                double* dst = gt.data() + static_cast<std::size_t>(ids[i]) * d;
                const double* src = gy.data() + i * d;
                for (std::size_t j = 0; j < d; ++j) dst[j] += src[j];
            }
        });
    }
    return y;
}

Tensor layer_norm(Tape& tape, const Tensor& x, const Tensor& gain, const Tensor& bias,
                  double eps) {
    require_rank2(x, "layer_norm");
    const std::size_t m = x.rows(), n = x.cols();
    if (gain.size() != n || bias.size() != n) {
        throw ShapeError("layer_norm: gain/bias must have " + std::to_string(n) + " elements");
    }
    auto xhat = std::make_shared<std::vector<double>>(m * n);
    auto inv = std::make_shared<std::vector<double>>(m);
    std::vector<double> out(m * n);
    const auto& v = x.value();
    for (std::size_t i = 0; i < m; ++i) {
        const double* rowv = v.data() + i * n;
        double mu = 0.0;
        for (std::size_t j = 0; j < n; ++j) mu += rowv[j];
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            const double c = rowv[j] - mu;
            var += c * c;
        }
        var /= static_cast<double>(n);
        const double is = 1.0 / std::sqrt(var + eps);
        (*inv)[i] = is;
        for (std::size_t j = 0; j < n; ++j) {
            const double xh = (rowv[j] - mu) * is;
            (*xhat)[i * n + j] = xh;
            out[i * n + j] = gain.value()[j] * xh + bias.value()[j];
        }
    }
    Tensor y = make_out({m, n}, std::move(out), track(x) || track(gain) || track(bias));
    if (y.requires_grad()) {
        tape.record([x, gain, bias, y, xhat, inv, m, n]() {
            if (!y.has_grad()) return;
            const auto& gy = y.grad();
            for (std::size_t i = 0; i < m; ++i) {
                const double* gyr = gy.data() + i * n;
                const double* xh = xhat->data() + i * n;
                if (x.requires_grad()) {
                    double mg = 0.0, mgx = 0.0;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double g = gyr[j] * gain.value()[j];
                        mg += g;
                        mgx += g * xh[j];
                    }
                    mg /= static_cast<double>(n);
                    mgx /= static_cast<double>(n);
                    double* gx = x.grad().data() + i * n;
                    for (std::size_t j = 0; j < n; ++j) {
                        const double g = gyr[j] * gain.value()[j];
                        gx[j] += (*inv)[i] * (g - mg - xh[j] * mgx);
                    }
                }
                if (gain.requires_grad()) {
                    auto& gg = gain.grad();
                    for (std::size_t j = 0; j < n; ++j) gg[j] += gyr[j] * xh[j];
                }
                if (bias.requires_grad()) {
                    auto& gb = bias.grad();
                    for (std::size_t j = 0; j < n; ++j) gb[j] += gyr[j];
                }
            }
        });
    }
    return y;
}

}  // namespace hin
