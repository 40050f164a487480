#pragma once

#include <string>
#include <vector>

#include "hin/params.hpp"
#include "hin/tensor.hpp"
#include "hin/text.hpp"

namespace hin {

struct EncoderConfig {
    int d_model = 64;
    int layers = 2;
    int heads = 2;
    int d_ff = 128;
    int max_len = 256;  // N, fixed sequence length of every input
    int vocab_size = 0;

    void validate() const;
};

/// Attention probabilities captured during encode, one [N,N] matrix per
/// (layer, head) in order; row = query position, column = key position.
struct EncoderTrace {
    int n = 0;
    std::vector<std::vector<double>> attention;
};

/// Contextual encoder over padded token sequences. Maps a summary/candidate
/// pair to the [CLS] hidden state and the mean hidden state over the
/// candidate span.
class PairEncoder {
public:
    PairEncoder(const EncoderConfig& cfg, ParamStore& params, Rng& rng);

    struct PairOutput {
        Tensor summary_vec;    // [1,d]
        Tensor candidate_vec;  // [1,d]
    };

    PairOutput encode(Tape& tape, const PairSequence& pair, EncoderTrace* trace = nullptr) const;

    /// Encodes [CLS] tokens [SEP] alone and returns the [CLS] hidden state.
    Tensor encode_single(Tape& tape, const std::vector<int>& token_ids,
                         EncoderTrace* trace = nullptr) const;

    const EncoderConfig& config() const { return cfg_; }

private:
    Tensor run_stack(Tape& tape, const std::vector<int>& ids, const std::vector<int>& mask,
                     EncoderTrace* trace) const;

    EncoderConfig cfg_;
    Tensor tok_emb_, pos_emb_;
    struct Layer {
        Tensor wq, bq, wk, bk, wv, bv, wo, bo;
        Tensor ln1_g, ln1_b;
        Tensor ff1_w, ff1_b, ff2_w, ff2_b;
        Tensor ln2_g, ln2_b;
    };
    std::vector<Layer> layers_;
};

}  // namespace hin
