#include "hin/model.hpp"

#include <algorithm>

namespace hin {

Mode mode_from_string(const std::string& name) {
    if (name == "full") return Mode::kFull;
    if (name == "no_doc") return Mode::kNoDoc;
    if (name == "no_doc_seg") return Mode::kNoDocSeg;
    if (name == "no_interact") return Mode::kNoInteract;
    if (name == "no_summary") return Mode::kNoSummary;
    throw ConfigError("unknown mode '" + name +
                      "' (expected full, no_doc, no_doc_seg, no_interact or no_summary)");
}

std::string mode_to_string(Mode mode) {
    switch (mode) {
        case Mode::kFull: return "full";
        case Mode::kNoDoc: return "no_doc";
        case Mode::kNoDocSeg: return "no_doc_seg";
        case Mode::kNoInteract: return "no_interact";
        case Mode::kNoSummary: return "no_summary";
    }
    throw ConfigError("unknown mode enum value");
}

const std::vector<Mode>& all_modes() {
    static const std::vector<Mode> modes = {Mode::kFull, Mode::kNoDoc, Mode::kNoDocSeg,
                                            Mode::kNoInteract, Mode::kNoSummary};
    return modes;
}

void ModelConfig::validate() const {
    encoder.validate();
    if (d_gru < 1) throw ConfigError("model config: d_gru must be positive");
    if (attn_dim < 1) throw ConfigError("model config: attn_dim must be positive");
    if (num_classes < 2) throw ConfigError("model config: need at least 2 classes");
    if (T < 1) throw ConfigError("model config: T must be >= 1");
    if (dropout < 0.0 || dropout >= 1.0) throw ConfigError("model config: dropout outside [0,1)");
}

Tensor gru_cell(Tape& tape, const Tensor& x, const Tensor& h_prev, const GruParams& p) {
    Tensor z = sigmoid(tape, add(tape, add(tape, matmul(tape, x, p.wz), matmul(tape, h_prev, p.uz)), p.bz));
    Tensor r = sigmoid(tape, add(tape, add(tape, matmul(tape, x, p.wr), matmul(tape, h_prev, p.ur)), p.br));
    Tensor hcand = tanh(
        tape, add(tape, add(tape, matmul(tape, x, p.wh), matmul(tape, mul(tape, r, h_prev), p.uh)), p.bh));
    Tensor keep = mul(tape, affine(tape, z, -1.0, 1.0), h_prev);  // (1-z) * h_prev
    return add(tape, keep, mul(tape, z, hcand));
}

ModelConfig HinModel::validated(ModelConfig cfg) {
    cfg.validate();
    return cfg;
}

HinModel::HinModel(const ModelConfig& cfg, Mode mode, std::uint64_t seed)
    : cfg_(validated(cfg)),
      mode_(mode),
      init_rng_(seed),
      encoder_(cfg_.encoder, params_, init_rng_) {
    Rng& rng = init_rng_;
    const std::size_t d = static_cast<std::size_t>(cfg_.encoder.d_model);
    const std::size_t g = static_cast<std::size_t>(cfg_.d_gru);
    const std::size_t a = static_cast<std::size_t>(cfg_.attn_dim);
    const std::size_t k = static_cast<std::size_t>(cfg_.num_classes);

    switch (mode_) {
        case Mode::kFull:
            gru_fwd_ = make_gru("gru.fwd.", 2 * d, g);
            gru_bwd_ = make_gru("gru.bwd.", 2 * d, g);
            seg_w_ = params_.add("seg.w", {2 * g, a}, ParamInit::kGlorot, rng);
            seg_b_ = params_.add("seg.b", {1, a}, ParamInit::kZero, rng);
            attn_w_ = params_.add("attn.w", {2 * g, a}, ParamInit::kGlorot, rng);
            attn_b_ = params_.add("attn.b", {1, a}, ParamInit::kZero, rng);
            feature_dim_ = static_cast<int>(2 * g);
            break;
        case Mode::kNoDoc:
            gru_fwd_ = make_gru("gru.fwd.", 2 * d, g);
            gru_bwd_ = make_gru("gru.bwd.", 2 * d, g);
            feature_dim_ = static_cast<int>(2 * g);
            break;
        case Mode::kNoDocSeg:
            proj_w_ = params_.add("pair_proj.w", {2 * d, 2 * g}, ParamInit::kGlorot, rng);
            proj_b_ = params_.add("pair_proj.b", {1, 2 * g}, ParamInit::kZero, rng);
            feature_dim_ = static_cast<int>(2 * g);
            break;
        case Mode::kNoInteract:
            feature_dim_ = static_cast<int>(2 * d);
            break;
        case Mode::kNoSummary:
            feature_dim_ = static_cast<int>(d);
            break;
    }
    const std::size_t f = static_cast<std::size_t>(feature_dim_);
    cls_w_ = params_.add("cls.w", {f, k}, ParamInit::kGlorot, rng);
    cls_b_ = params_.add("cls.b", {1, k}, ParamInit::kZero, rng);
    fb_w_ = params_.add("fb.w", {f, k}, ParamInit::kGlorot, rng);
    fb_b_ = params_.add("fb.b", {1, k}, ParamInit::kZero, rng);
}

GruParams HinModel::make_gru(const std::string& prefix, std::size_t in_dim, std::size_t hidden) {
    GruParams p;
    Rng& rng = init_rng_;
    p.wz = params_.add(prefix + "wz", {in_dim, hidden}, ParamInit::kGlorot, rng);
    p.uz = params_.add(prefix + "uz", {hidden, hidden}, ParamInit::kGlorot, rng);
    p.bz = params_.add(prefix + "bz", {1, hidden}, ParamInit::kZero, rng);
    p.wr = params_.add(prefix + "wr", {in_dim, hidden}, ParamInit::kGlorot, rng);
    p.ur = params_.add(prefix + "ur", {hidden, hidden}, ParamInit::kGlorot, rng);
    p.br = params_.add(prefix + "br", {1, hidden}, ParamInit::kZero, rng);
    p.wh = params_.add(prefix + "wh", {in_dim, hidden}, ParamInit::kGlorot, rng);
    p.uh = params_.add(prefix + "uh", {hidden, hidden}, ParamInit::kGlorot, rng);
    p.bh = params_.add(prefix + "bh", {1, hidden}, ParamInit::kZero, rng);
    return p;
}

Tensor HinModel::segment_interaction(Tape& tape, const Tensor& summary_vec,
                                     const std::vector<Tensor>& candidate_vecs, bool training,
                                     Rng* rng) const {
    if (candidate_vecs.empty()) throw ShapeError("segment_interaction: no candidates");
    const std::size_t t = candidate_vecs.size();
    const std::size_t g = static_cast<std::size_t>(cfg_.d_gru);

    std::vector<Tensor> inputs;
    inputs.reserve(t);
    for (const Tensor& cand : candidate_vecs) {
        Tensor in = concat(tape, {summary_vec, cand}, 1);
        inputs.push_back(dropout(tape, in, cfg_.dropout, training, rng));
    }

    Tensor zero = Tensor::zeros({1, g});
    std::vector<Tensor> fwd(t), bwd(t);
    Tensor h = zero;
    for (std::size_t j = 0; j < t; ++j) {
        h = gru_cell(tape, inputs[j], h, gru_fwd_);
        fwd[j] = h;
    }
    h = zero;
    for (std::size_t j = t; j-- > 0;) {
        h = gru_cell(tape, inputs[j], h, gru_bwd_);
        bwd[j] = h;
    }
    std::vector<Tensor> states;
    states.reserve(t);
    for (std::size_t j = 0; j < t; ++j) states.push_back(concat(tape, {fwd[j], bwd[j]}, 1));
    return states.size() == 1 ? states[0] : concat(tape, states, 0);
}

Tensor HinModel::segment_summary(Tape& tape, const Tensor& states) const {
    Tensor proj = tanh(tape, add(tape, matmul(tape, states, seg_w_), seg_b_));
    return reshape(tape, mean_axis(tape, proj, 0), {1, proj.cols()});
}

HinModel::AttentionOut HinModel::document_attention(Tape& tape, const Tensor& states,
                                                    const Tensor& seg_summary) const {
    Tensor u = tanh(tape, add(tape, matmul(tape, states, attn_w_), attn_b_));
    // plain dot product with the segment summary, no scaling
    Tensor scores = matmul(tape, u, transpose2d(tape, seg_summary));  // [T,1]
    AttentionOut out;
    out.alpha = softmax(tape, scores, 0);
    out.doc_vec = matmul(tape, transpose2d(tape, out.alpha), states);  // [1,2g]
    return out;
}

Tensor HinModel::classify_logits(Tape& tape, const Tensor& feature) const {
    return add(tape, matmul(tape, feature, cls_w_), cls_b_);
}

Tensor HinModel::feedback_logits(Tape& tape, const Tensor& feature) const {
    return add(tape, matmul(tape, feature, fb_w_), fb_b_);
}

int HinModel::prediction_from(const Tensor& probs) {
    const auto& v = probs.value();
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return static_cast<int>(best) + 1;
}

ForwardResult HinModel::forward(Tape& tape, const EncodedSample& sample, bool training, Rng* rng,
                                EncoderTrace* trace) const {
    ForwardResult res;

    if (mode_ == Mode::kFull || mode_ == Mode::kNoDoc || mode_ == Mode::kNoDocSeg) {
        if (sample.pairs.size() != static_cast<std::size_t>(cfg_.T)) {
            throw ShapeError("sample has " + std::to_string(sample.pairs.size()) +
                             " pairs, model expects T=" + std::to_string(cfg_.T));
        }
        std::vector<Tensor> summary_vecs, cand_vecs;
        summary_vecs.reserve(sample.pairs.size());
        cand_vecs.reserve(sample.pairs.size());
        for (const auto& pair : sample.pairs) {
            auto enc = encoder_.encode(tape, pair, trace);
            summary_vecs.push_back(enc.summary_vec);
            cand_vecs.push_back(enc.candidate_vec);
        }
        // one summary vector per document: the mean of the per-pair [CLS] states
        Tensor y_c = summary_vecs.size() == 1
                         ? summary_vecs[0]
                         : reshape(tape, mean_axis(tape, concat(tape, summary_vecs, 0), 0),
                                   {1, summary_vecs[0].cols()});

        if (mode_ == Mode::kNoDocSeg) {
            std::vector<Tensor> projected;
            projected.reserve(cand_vecs.size());
            for (const Tensor& cand : cand_vecs) {
                Tensor in = concat(tape, {y_c, cand}, 1);
                projected.push_back(add(tape, matmul(tape, in, proj_w_), proj_b_));
            }
            Tensor stacked = projected.size() == 1 ? projected[0] : concat(tape, projected, 0);
            res.feature = reshape(tape, mean_axis(tape, stacked, 0), {1, stacked.cols()});
        } else {
            Tensor states = segment_interaction(tape, y_c, cand_vecs, training, rng);
            res.seg_states = states;
            if (mode_ == Mode::kFull) {
                Tensor y_s = segment_summary(tape, states);
                AttentionOut att = document_attention(tape, states, y_s);
                res.feature = att.doc_vec;
                res.alpha = att.alpha;
            } else {
                res.feature = reshape(tape, mean_axis(tape, states, 0), {1, states.cols()});
            }
        }
    } else if (mode_ == Mode::kNoInteract) {
        if (sample.summary_ids.empty()) throw EncodeError("sample has an empty summary");
        Tensor y = encoder_.encode_single(tape, sample.summary_ids, trace);
        Tensor x = encoder_.encode_single(tape, sample.doc_ids, trace);
        res.feature = concat(tape, {y, x}, 1);
    } else {  // kNoSummary
        res.feature = encoder_.encode_single(tape, sample.doc_ids, trace);
    }

    res.logits = classify_logits(tape, res.feature);
    res.probs = softmax(tape, res.logits, 1);
    res.prediction = prediction_from(res.probs);
    return res;
}

}  // namespace hin
