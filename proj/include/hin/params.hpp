#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hin/tensor.hpp"

namespace hin {

enum class ParamInit { kGlorot, kZero, kOne };

/// Named trainable tensors in registration order. Registration order is
/// deterministic (it follows model construction), which keeps optimizer
/// state, checkpoints, and rng draws reproducible.
class ParamStore {
public:
    Tensor add(const std::string& name, std::vector<std::size_t> shape, ParamInit init, Rng& rng);

    bool has(const std::string& name) const { return index_.count(name) != 0; }
    const Tensor& get(const std::string& name) const;
    Tensor& get(const std::string& name);

    std::size_t count() const { return params_.size(); }
    const std::string& name(std::size_t i) const { return names_[i]; }
    Tensor& param(std::size_t i) { return params_[i]; }
    const Tensor& param(std::size_t i) const { return params_[i]; }

    void zero_grad();
    std::size_t total_size() const;

    std::vector<std::vector<double>> snapshot() const;
    void restore(const std::vector<std::vector<double>>& snap);

    /// Copies values for every identically named, identically shaped
    /// parameter present in both stores. Returns the number copied.
    std::size_t copy_common_from(const ParamStore& other);

private:
    std::vector<std::string> names_;
    std::vector<Tensor> params_;
    std::unordered_map<std::string, std::size_t> index_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

/// Adam with bias correction; state is per parameter element and the step
/// count is shared.
class Adam {
public:
    Adam(const ParamStore& params, AdamConfig cfg);
    void step(ParamStore& params);
    long step_count() const { return step_; }

private:
    AdamConfig cfg_;
    std::vector<std::vector<double>> m_, v_;
    long step_ = 0;
};

// Checkpoint file: magic, parameter count, then per parameter the name,
// shape, and raw little-endian doubles. Round-trips bit-exactly.
void save_checkpoint(const ParamStore& params, const std::string& path);
void load_checkpoint(ParamStore& params, const std::string& path);

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed = 0xcbf29ce484222325ull);
std::uint64_t content_hash(const ParamStore& params);

}  // namespace hin
