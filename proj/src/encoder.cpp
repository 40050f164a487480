#include "hin/encoder.hpp"

#include <cmath>

namespace hin {

namespace {
constexpr double kMaskedScore = -1e30;
}

void EncoderConfig::validate() const {
    if (d_model < 1 || layers < 0 || heads < 1 || d_ff < 1 || max_len < 8 || vocab_size < 5) {
        throw ConfigError("encoder config: sizes must be positive (vocab >= 5, N >= 8)");
    }
    if (d_model % heads != 0) {
        throw ConfigError("encoder config: d_model " + std::to_string(d_model) +
                          " not divisible by heads " + std::to_string(heads));
    }
}

PairEncoder::PairEncoder(const EncoderConfig& cfg, ParamStore& params, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    const std::size_t d = static_cast<std::size_t>(cfg_.d_model);
    tok_emb_ = params.add("enc.tok_emb", {static_cast<std::size_t>(cfg_.vocab_size), d},
                          ParamInit::kGlorot, rng);
    pos_emb_ = params.add("enc.pos_emb", {static_cast<std::size_t>(cfg_.max_len), d},
                          ParamInit::kGlorot, rng);
    layers_.resize(static_cast<std::size_t>(cfg_.layers));
    for (int l = 0; l < cfg_.layers; ++l) {
        const std::string pre = "enc.l" + std::to_string(l) + ".";
        Layer& L = layers_[static_cast<std::size_t>(l)];
        L.wq = params.add(pre + "attn.wq", {d, d}, ParamInit::kGlorot, rng);
        L.bq = params.add(pre + "attn.bq", {1, d}, ParamInit::kZero, rng);
        L.wk = params.add(pre + "attn.wk", {d, d}, ParamInit::kGlorot, rng);
        L.bk = params.add(pre + "attn.bk", {1, d}, ParamInit::kZero, rng);
        L.wv = params.add(pre + "attn.wv", {d, d}, ParamInit::kGlorot, rng);
        L.bv = params.add(pre + "attn.bv", {1, d}, ParamInit::kZero, rng);
        L.wo = params.add(pre + "attn.wo", {d, d}, ParamInit::kGlorot, rng);
        L.bo = params.add(pre + "attn.bo", {1, d}, ParamInit::kZero, rng);
        L.ln1_g = params.add(pre + "ln1.gain", {1, d}, ParamInit::kOne, rng);
        L.ln1_b = params.add(pre + "ln1.bias", {1, d}, ParamInit::kZero, rng);
        const std::size_t f = static_cast<std::size_t>(cfg_.d_ff);
        L.ff1_w = params.add(pre + "ff.w1", {d, f}, ParamInit::kGlorot, rng);
        L.ff1_b = params.add(pre + "ff.b1", {1, f}, ParamInit::kZero, rng);
        L.ff2_w = params.add(pre + "ff.w2", {f, d}, ParamInit::kGlorot, rng);
        L.ff2_b = params.add(pre + "ff.b2", {1, d}, ParamInit::kZero, rng);
        L.ln2_g = params.add(pre + "ln2.gain", {1, d}, ParamInit::kOne, rng);
        L.ln2_b = params.add(pre + "ln2.bias", {1, d}, ParamInit::kZero, rng);
    }
}

Tensor PairEncoder::run_stack(Tape& tape, const std::vector<int>& ids,
                              const std::vector<int>& mask, EncoderTrace* trace) const {
    const std::size_t n = ids.size();
    if (n != static_cast<std::size_t>(cfg_.max_len)) {
        throw EncodeError("sequence length " + std::to_string(n) + " does not match configured N " +
                          std::to_string(cfg_.max_len));
    }
    const std::size_t d = static_cast<std::size_t>(cfg_.d_model);
    const int heads = cfg_.heads;
    const std::size_t dh = d / static_cast<std::size_t>(heads);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));

    // additive attention bias over key positions: 0 on real tokens,
    // a large negative on padding so softmax assigns them exactly zero
    std::vector<double> bias(n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        if (!mask[i]) bias[i] = kMaskedScore;
    Tensor key_bias = Tensor::row(bias);

    if (trace) trace->n = static_cast<int>(n);

    Tensor x = add(tape, embed(tape, tok_emb_, ids), pos_emb_);
    for (const Layer& L : layers_) {
        Tensor q = add(tape, matmul(tape, x, L.wq), L.bq);
        Tensor k = add(tape, matmul(tape, x, L.wk), L.bk);
        Tensor v = add(tape, matmul(tape, x, L.wv), L.bv);

        std::vector<Tensor> head_outs;
        head_outs.reserve(static_cast<std::size_t>(heads));
        for (int h = 0; h < heads; ++h) {
            const std::size_t off = static_cast<std::size_t>(h) * dh;
            Tensor qh = slice(tape, q, 1, off, dh);
            Tensor kh = slice(tape, k, 1, off, dh);
            Tensor vh = slice(tape, v, 1, off, dh);
            Tensor scores = affine(tape, matmul(tape, qh, transpose2d(tape, kh)), scale, 0.0);
            scores = add(tape, scores, key_bias);
            Tensor probs = softmax(tape, scores, 1);
            if (trace) trace->attention.push_back(probs.value());
            head_outs.push_back(matmul(tape, probs, vh));
        }
        Tensor attn = head_outs.size() == 1 ? head_outs[0] : concat(tape, head_outs, 1);
        attn = add(tape, matmul(tape, attn, L.wo), L.bo);
        x = layer_norm(tape, add(tape, x, attn), L.ln1_g, L.ln1_b);

        Tensor ff = tanh(tape, add(tape, matmul(tape, x, L.ff1_w), L.ff1_b));
        ff = add(tape, matmul(tape, ff, L.ff2_w), L.ff2_b);
        x = layer_norm(tape, add(tape, x, ff), L.ln2_g, L.ln2_b);
    }
    return x;
}

PairEncoder::PairOutput PairEncoder::encode(Tape& tape, const PairSequence& pair,
                                            EncoderTrace* trace) const {
    if (pair.cand_end <= pair.cand_begin) {
        throw EncodeError("pair has an empty candidate span");
    }
    Tensor hidden = run_stack(tape, pair.ids, pair.mask, trace);
    PairOutput out;
    out.summary_vec = slice(tape, hidden, 0, 0, 1);  // [CLS] position
    const std::size_t cb = static_cast<std::size_t>(pair.cand_begin);
    const std::size_t cl = static_cast<std::size_t>(pair.cand_end - pair.cand_begin);
    Tensor span = slice(tape, hidden, 0, cb, cl);
    out.candidate_vec = reshape(tape, mean_axis(tape, span, 0), {1, span.cols()});
    return out;
}

Tensor PairEncoder::encode_single(Tape& tape, const std::vector<int>& token_ids,
                                  EncoderTrace* trace) const {
    if (token_ids.empty()) throw EncodeError("encode_single: empty input");
    const std::size_t n = static_cast<std::size_t>(cfg_.max_len);
    std::vector<int> ids;
    ids.reserve(n);
    ids.push_back(Vocabulary::kCls);
    const std::size_t keep = std::min(token_ids.size(), n - 2);
    ids.insert(ids.end(), token_ids.begin(), token_ids.begin() + keep);
    ids.push_back(Vocabulary::kSep);
    std::vector<int> mask(ids.size(), 1);
    while (ids.size() < n) {
        ids.push_back(Vocabulary::kPad);
        mask.push_back(0);
    }
    Tensor hidden = run_stack(tape, ids, mask, trace);
    return slice(tape, hidden, 0, 0, 1);
}

}  // namespace hin
