#include "hin/params.hpp"

#include <cmath>
#include <cstring>
#include <fstream>

namespace hin {

namespace {

constexpr char kMagic[8] = {'H', 'I', 'N', 'C', 'P', '0', '0', '1'};

std::vector<double> init_values(const std::vector<std::size_t>& shape, ParamInit init, Rng& rng) {
    std::size_t n = 1;
    for (std::size_t d : shape) n *= d;
    std::vector<double> v(n, 0.0);
    switch (init) {
        case ParamInit::kZero:
            break;
        case ParamInit::kOne:
            std::fill(v.begin(), v.end(), 1.0);
            break;
        case ParamInit::kGlorot: {
            // fan_in = rows, fan_out = cols under the x*W row-vector convention
            const double fan_in = static_cast<double>(shape.size() >= 1 ? shape[0] : 1);
            const double fan_out = static_cast<double>(shape.size() >= 2 ? shape[1] : 1);
            const double a = std::sqrt(6.0 / (fan_in + fan_out));
            std::uniform_real_distribution<double> uni(-a, a);
            for (double& d : v) d = uni(rng);
            break;
        }
    }
    return v;
}

template <typename T>
void write_pod(std::ofstream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::ifstream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

}  // namespace

Tensor ParamStore::add(const std::string& name, std::vector<std::size_t> shape, ParamInit init,
                       Rng& rng) {
    if (index_.count(name)) throw UsageError("duplicate parameter name: " + name);
    Tensor t(shape, init_values(shape, init, rng), /*requires_grad=*/true);
    index_[name] = params_.size();
    names_.push_back(name);
    params_.push_back(t);
    return t;
}

const Tensor& ParamStore::get(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw UsageError("unknown parameter: " + name);
    return params_[it->second];
}

Tensor& ParamStore::get(const std::string& name) {
    auto it = index_.find(name);
    if (it == index_.end()) throw UsageError("unknown parameter: " + name);
    return params_[it->second];
}

void ParamStore::zero_grad() {
    for (auto& p : params_) p.zero_grad();
}

std::size_t ParamStore::total_size() const {
    std::size_t n = 0;
    for (const auto& p : params_) n += p.size();
    return n;
}

std::vector<std::vector<double>> ParamStore::snapshot() const {
    std::vector<std::vector<double>> snap;
    snap.reserve(params_.size());
    for (const auto& p : params_) snap.push_back(p.value());
    return snap;
}

void ParamStore::restore(const std::vector<std::vector<double>>& snap) {
    if (snap.size() != params_.size()) throw UsageError("snapshot/parameter count mismatch");
    for (std::size_t i = 0; i < snap.size(); ++i) {
        if (snap[i].size() != params_[i].size()) {
            throw UsageError("snapshot size mismatch for " + names_[i]);
        }
        params_[i].value() = snap[i];
    }
}

std::size_t ParamStore::copy_common_from(const ParamStore& other) {
    std::size_t copied = 0;
    for (std::size_t i = 0; i < params_.size(); ++i) {
        if (!other.has(names_[i])) continue;
        const Tensor& src = other.get(names_[i]);
        if (src.shape() != params_[i].shape()) continue;
        params_[i].value() = src.value();
        ++copied;
    }
    return copied;
}

Adam::Adam(const ParamStore& params, AdamConfig cfg) : cfg_(cfg) {
    if (cfg.lr <= 0.0) throw ConfigError("adam: learning rate must be positive");
    if (cfg.beta1 < 0.0 || cfg.beta1 >= 1.0 || cfg.beta2 < 0.0 || cfg.beta2 >= 1.0) {
        throw ConfigError("adam: betas must lie in [0,1)");
    }
    if (cfg.eps <= 0.0) throw ConfigError("adam: eps must be positive");
    m_.resize(params.count());
    v_.resize(params.count());
    for (std::size_t i = 0; i < params.count(); ++i) {
        m_[i].assign(params.param(i).size(), 0.0);
        v_[i].assign(params.param(i).size(), 0.0);
    }
}

void Adam::step(ParamStore& params) {
    if (params.count() != m_.size()) throw UsageError("adam: parameter count changed");
    ++step_;
    const double bc1 = 1.0 - std::pow(cfg_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(cfg_.beta2, static_cast<double>(step_));
    for (std::size_t i = 0; i < params.count(); ++i) {
        Tensor& p = params.param(i);
        if (!p.has_grad()) continue;
        const auto& g = p.grad();
        auto& val = p.value();
        auto& m = m_[i];
        auto& v = v_[i];
        for (std::size_t j = 0; j < val.size(); ++j) {
            m[j] = cfg_.beta1 * m[j] + (1.0 - cfg_.beta1) * g[j];
            v[j] = cfg_.beta2 * v[j] + (1.0 - cfg_.beta2) * g[j] * g[j];
            const double mhat = m[j] / bc1;
            const double vhat = v[j] / bc2;
            val[j] -= cfg_.lr * mhat / (std::sqrt(vhat) + cfg_.eps);
        }
    }
}

void save_checkpoint(const ParamStore& params, const std::string& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw CheckpointError("cannot open checkpoint for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    const std::uint64_t count = params.count();
    write_pod(os, count);
    for (std::size_t i = 0; i < params.count(); ++i) {
        const std::string& name = params.name(i);
        const Tensor& p = params.param(i);
        const std::uint32_t nlen = static_cast<std::uint32_t>(name.size());
        write_pod(os, nlen);
        os.write(name.data(), nlen);
        const std::uint32_t rank = static_cast<std::uint32_t>(p.rank());
        write_pod(os, rank);
        for (std::size_t d : p.shape()) {
            const std::uint64_t dd = d;
            write_pod(os, dd);
        }
        os.write(reinterpret_cast<const char*>(p.value().data()),
                 static_cast<std::streamsize>(p.size() * sizeof(double)));
    }
    if (!os) throw CheckpointError("short write to checkpoint: " + path);
}

void load_checkpoint(ParamStore& params, const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw CheckpointError("cannot open checkpoint: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw CheckpointError("bad checkpoint magic in " + path);
    }
    std::uint64_t count = 0;
    read_pod(is, count);
    if (count != params.count()) {
        throw CheckpointError("checkpoint holds " + std::to_string(count) + " parameters, model has " +
                              std::to_string(params.count()));
    }
    for (std::size_t i = 0; i < count; ++i) {
        std::uint32_t nlen = 0;
        read_pod(is, nlen);
        std::string name(nlen, '\0');
        is.read(name.data(), nlen);
        std::uint32_t rank = 0;
        read_pod(is, rank);
        std::vector<std::size_t> shape(rank);
        for (auto& d : shape) {
            std::uint64_t dd = 0;
            read_pod(is, dd);
            d = static_cast<std::size_t>(dd);
        }
        if (!is) throw CheckpointError("truncated checkpoint: " + path);
        if (name != params.name(i)) {
            throw CheckpointError("checkpoint parameter '" + name + "' does not match model parameter '" +
                                  params.name(i) + "'");
        }
        Tensor& p = params.param(i);
        if (shape != p.shape()) {
            throw CheckpointError("shape mismatch for " + name + ": file " + shape_str(shape) +
                                  " vs model " + shape_str(p.shape()));
        }
        is.read(reinterpret_cast<char*>(p.value().data()),
                static_cast<std::streamsize>(p.size() * sizeof(double)));
        if (!is) throw CheckpointError("truncated checkpoint: " + path);
    }
}

std::uint64_t fnv1a64(const void* data, std::size_t len, std::uint64_t seed) {
    const unsigned char* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

std::uint64_t content_hash(const ParamStore& params) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (std::size_t i = 0; i < params.count(); ++i) {
        const std::string& name = params.name(i);
        h = fnv1a64(name.data(), name.size(), h);
        const Tensor& p = params.param(i);
        h = fnv1a64(p.value().data(), p.size() * sizeof(double), h);
    }
    return h;
}

}  // namespace hin
