#pragma once

#include <string>
#include <vector>

#include "hin/encoder.hpp"
#include "hin/params.hpp"
#include "hin/tensor.hpp"
#include "hin/text.hpp"

namespace hin {

/// Ablation variants: which interaction stages participate in the forward
/// pass. Each variant is trained as its own model.
enum class Mode { kFull, kNoDoc, kNoDocSeg, kNoInteract, kNoSummary };

Mode mode_from_string(const std::string& name);
std::string mode_to_string(Mode mode);
const std::vector<Mode>& all_modes();

struct ModelConfig {
    EncoderConfig encoder;
    int d_gru = 64;
    int attn_dim = 64;
    int num_classes = 0;
    int T = 3;
    double dropout = 0.1;

    void validate() const;
};

struct GruParams {
    Tensor wz, uz, bz;
    Tensor wr, ur, br;
    Tensor wh, uh, bh;
};

/// One step of the update/reset-gate recurrence:
///   z = sigmoid(x Wz + h Uz + bz), r = sigmoid(x Wr + h Ur + br),
///   hcand = tanh(x Wh + (r*h) Uh + bh), h' = (1-z)*h + z*hcand.
Tensor gru_cell(Tape& tape, const Tensor& x, const Tensor& h_prev, const GruParams& p);

struct ForwardResult {
    Tensor logits;      // [1,K]
    Tensor probs;       // softmax of logits
    Tensor feature;     // classifier input (the document vector in full mode)
    Tensor alpha;       // [T,1] attention weights; undefined handle outside full mode
    Tensor seg_states;  // [T,2*d_gru] h_ij; undefined outside full/no_doc
    int prediction = 0;  // argmax class, 1-based, lowest index on ties
};

class HinModel {
public:
    HinModel(const ModelConfig& cfg, Mode mode, std::uint64_t seed);

    ForwardResult forward(Tape& tape, const EncodedSample& sample, bool training = false,
                          Rng* rng = nullptr, EncoderTrace* trace = nullptr) const;

    /// Reward head: softmax(W_r s + b_r) over the same feature the decoder
    /// sees; a separate head used only to produce rewards.
    Tensor feedback_logits(Tape& tape, const Tensor& feature) const;

    // exposed stages, useful on their own and for tests
    Tensor segment_interaction(Tape& tape, const Tensor& summary_vec,
                               const std::vector<Tensor>& candidate_vecs, bool training,
                               Rng* rng) const;
    Tensor segment_summary(Tape& tape, const Tensor& states) const;
    struct AttentionOut {
        Tensor doc_vec;  // [1,2*d_gru]
        Tensor alpha;    // [T,1]
    };
    AttentionOut document_attention(Tape& tape, const Tensor& states,
                                    const Tensor& seg_summary) const;
    Tensor classify_logits(Tape& tape, const Tensor& feature) const;

    const ModelConfig& config() const { return cfg_; }
    Mode mode() const { return mode_; }
    ParamStore& params() { return params_; }
    const ParamStore& params() const { return params_; }
    const PairEncoder& encoder() const { return encoder_; }
    int feature_dim() const { return feature_dim_; }

    static int prediction_from(const Tensor& probs);

private:
    static ModelConfig validated(ModelConfig cfg);

    ModelConfig cfg_;
    Mode mode_;
    ParamStore params_;
    Rng init_rng_;  // consumed during construction only
    PairEncoder encoder_;

    // set per mode during construction
    int feature_dim_ = 0;
    GruParams gru_fwd_, gru_bwd_;
    Tensor seg_w_, seg_b_;    // segment summary projection
    Tensor attn_w_, attn_b_;  // document attention projection
    Tensor proj_w_, proj_b_;  // pair projection for the no-recurrence variant
    Tensor cls_w_, cls_b_;
    Tensor fb_w_, fb_b_;

    GruParams make_gru(const std::string& prefix, std::size_t in_dim, std::size_t hidden);
};

}  // namespace hin
