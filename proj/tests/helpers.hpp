#pragma once

#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hin/tensor.hpp"

namespace testutil {

inline std::vector<double> random_vec(std::size_t n, hin::Rng& rng, double lo = -1.0,
                                      double hi = 1.0) {
    std::uniform_real_distribution<double> uni(lo, hi);
    std::vector<double> v(n);
    for (double& d : v) d = uni(rng);
    return v;
}

inline hin::Tensor random_tensor(std::vector<std::size_t> shape, hin::Rng& rng,
                                 bool requires_grad = true, double lo = -1.0, double hi = 1.0) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    return hin::Tensor(std::move(shape), random_vec(n, rng, lo, hi), requires_grad);
}

// Independent triple-loop product, the brute-force oracle for matmul.
inline std::vector<double> matmul_oracle(const std::vector<double>& a, std::size_t m,
                                         std::size_t k, const std::vector<double>& b,
                                         std::size_t n) {
    std::vector<double> c(m * n, 0.0);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j)
            for (std::size_t p = 0; p < k; ++p) c[i * n + j] += a[i * k + p] * b[p * n + j];
    return c;
}

struct GradCheckResult {
    double max_rel_err = 0.0;
    std::size_t checked = 0;
};

// Central finite differences against the analytic gradients produced by one
// backward pass. `build` must be a pure function of the param values.
inline GradCheckResult check_gradients(const std::vector<hin::Tensor>& params,
                                       const std::function<hin::Tensor(hin::Tape&)>& build,
                                       double h = 1e-5) {
    for (const auto& p : params) p.zero_grad();
    hin::Tape tape;
    hin::Tensor loss = build(tape);
    tape.backward(loss);
    std::vector<std::vector<double>> analytic;
    analytic.reserve(params.size());
    for (const auto& p : params) analytic.push_back(p.grad());

    auto eval = [&]() {
        hin::Tape t;
        return build(t).item();
    };

    GradCheckResult res;
    for (std::size_t pi = 0; pi < params.size(); ++pi) {
        auto& vals = const_cast<hin::Tensor&>(params[pi]).value();
        for (std::size_t i = 0; i < vals.size(); ++i) {
            const double orig = vals[i];
            vals[i] = orig + h;
            const double fp = eval();
            vals[i] = orig - h;
            const double fm = eval();
            vals[i] = orig;
            const double fd = (fp - fm) / (2.0 * h);
            const double an = analytic[pi][i];
            const double rel = std::fabs(an - fd) / std::max(std::fabs(an) + std::fabs(fd), 1e-6);
            res.max_rel_err = std::max(res.max_rel_err, rel);
            ++res.checked;
        }
    }
    return res;
}

class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() /
                ("hin_test_" + tag + "_" + std::to_string(::getpid()));
        std::filesystem::remove_all(path_);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string str() const { return path_.string(); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

private:
    std::filesystem::path path_;
};

}  // namespace testutil
