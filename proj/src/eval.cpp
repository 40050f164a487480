#include "hin/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "json.hpp"

namespace hin {

double accuracy(const std::vector<int>& preds, const std::vector<int>& golds) {
    if (preds.empty() || preds.size() != golds.size()) {
        throw EvalError("accuracy: need equally sized, nonempty prediction/gold lists");
    }
    std::size_t correct = 0;
    for (std::size_t i = 0; i < preds.size(); ++i)
        if (preds[i] == golds[i]) ++correct;
    return static_cast<double>(correct) / static_cast<double>(preds.size());
}

EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& golds,
                    int num_classes) {
    if (preds.empty() || preds.size() != golds.size()) {
        throw EvalError("evaluate: need equally sized, nonempty prediction/gold lists");
    }
    if (num_classes < 2) throw EvalError("evaluate: need at least 2 classes");
    EvalReport rep;
    rep.total = preds.size();
    rep.confusion.assign(num_classes, std::vector<int>(num_classes, 0));
    for (std::size_t i = 0; i < preds.size(); ++i) {
        const int g = golds[i], p = preds[i];
        if (g < 1 || g > num_classes) throw LabelError("evaluate: gold label " + std::to_string(g) + " outside [1..K]");
        if (p < 1 || p > num_classes) throw LabelError("evaluate: predicted label " + std::to_string(p) + " outside [1..K]");
        ++rep.confusion[g - 1][p - 1];
    }
    rep.per_class.resize(num_classes);
    std::size_t trace = 0;
    double f1_sum = 0.0;
    for (int c = 0; c < num_classes; ++c) {
        const int tp = rep.confusion[c][c];
        int fp = 0, fn = 0;
        for (int o = 0; o < num_classes; ++o) {
            if (o == c) continue;
            fp += rep.confusion[o][c];
            fn += rep.confusion[c][o];
        }
        trace += static_cast<std::size_t>(tp);
        ClassStats& st = rep.per_class[c];
        st.precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
        st.recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
        st.f1 = (st.precision + st.recall > 0.0)
                    ? 2.0 * st.precision * st.recall / (st.precision + st.recall)
                    : 0.0;
        f1_sum += st.f1;
    }
    rep.accuracy = static_cast<double>(trace) / static_cast<double>(rep.total);
    rep.macro_f1 = f1_sum / static_cast<double>(num_classes);
    return rep;
}

double macro_f1(const std::vector<int>& preds, const std::vector<int>& golds, int num_classes) {
    return evaluate(preds, golds, num_classes).macro_f1;
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

}  // namespace

void write_eval_report_csv(const std::string& path, const EvalReport& report) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw EvalError("cannot write eval report: " + path);
    os << "metric,class,value\n";
    os << "accuracy,," << fmt_double(report.accuracy) << '\n';
    os << "macro_f1,," << fmt_double(report.macro_f1) << '\n';
    for (std::size_t c = 0; c < report.per_class.size(); ++c) {
        os << "precision," << (c + 1) << ',' << fmt_double(report.per_class[c].precision) << '\n';
        os << "recall," << (c + 1) << ',' << fmt_double(report.per_class[c].recall) << '\n';
        os << "f1," << (c + 1) << ',' << fmt_double(report.per_class[c].f1) << '\n';
    }
    for (std::size_t g = 0; g < report.confusion.size(); ++g) {
        for (std::size_t p = 0; p < report.confusion[g].size(); ++p) {
            os << "confusion," << (g + 1) << '>' << (p + 1) << ',' << report.confusion[g][p] << '\n';
        }
    }
}

LengthBucketReport length_buckets(const std::vector<EncodedSample>& test_set,
                                  const std::vector<int>& preds) {
    if (test_set.empty() || test_set.size() != preds.size()) {
        throw EvalError("length_buckets: need equally sized, nonempty test set and predictions");
    }
    constexpr int kBuckets = 6;
    std::vector<int> lengths;
    lengths.reserve(test_set.size());
    for (const auto& s : test_set) lengths.push_back(s.doc_token_count);
    std::vector<int> sorted(lengths);
    std::sort(sorted.begin(), sorted.end());

    LengthBucketReport rep;
    const std::size_t n = sorted.size();
    for (int i = 1; i < kBuckets; ++i) {
        rep.cut_lengths.push_back(sorted[std::min(n - 1, i * n / kBuckets)]);
    }
    rep.counts.assign(kBuckets, 0);
    rep.correct.assign(kBuckets, 0);
    for (std::size_t i = 0; i < test_set.size(); ++i) {
        int bucket = 0;
        for (int c : rep.cut_lengths)
            if (c <= lengths[i]) ++bucket;
        ++rep.counts[bucket];
        if (preds[i] == test_set[i].label) ++rep.correct[bucket];
    }
    rep.bucket_accuracy.assign(kBuckets, std::numeric_limits<double>::quiet_NaN());
    for (int b = 0; b < kBuckets; ++b) {
        rep.total += rep.counts[b];
        rep.total_correct += rep.correct[b];
        if (rep.counts[b]) {
            rep.bucket_accuracy[b] =
                static_cast<double>(rep.correct[b]) / static_cast<double>(rep.counts[b]);
        }
    }
    return rep;
}

void write_length_report_csv(const std::string& path, const LengthBucketReport& report) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw EvalError("cannot write length report: " + path);
    os << "bucket,max_length,count,correct,accuracy\n";
    for (std::size_t b = 0; b < report.counts.size(); ++b) {
        os << b << ',';
        if (b < report.cut_lengths.size())
            os << report.cut_lengths[b];
        else
            os << "inf";
        os << ',' << report.counts[b] << ',' << report.correct[b] << ',';
        if (report.counts[b])
            os << fmt_double(report.bucket_accuracy[b]);
        else
            os << "na";
        os << '\n';
    }
}

AttentionExport export_attention(const HinModel& model, const EncodedSample& sample,
                                 const Vocabulary& vocab) {
    if (model.mode() != Mode::kFull) {
        throw UsageError("export_attention requires a full-mode model");
    }
    EncoderTrace trace;
    Tape tape;
    ForwardResult res = model.forward(tape, sample, false, nullptr, &trace);

    AttentionExport rec;
    rec.prediction = res.prediction;
    rec.label = sample.label;
    rec.alpha = res.alpha.value();

    const int layers = model.config().encoder.layers;
    const int heads = model.config().encoder.heads;
    const int n = trace.n;
    const std::size_t mats_per_pair = static_cast<std::size_t>(layers) * heads;
    for (std::size_t j = 0; j < sample.pairs.size(); ++j) {
        const PairSequence& pair = sample.pairs[j];
        std::vector<std::string> toks;
        for (int t = pair.cand_begin; t < pair.cand_end; ++t) toks.push_back(vocab.token(pair.ids[t]));
        rec.tokens.push_back(std::move(toks));

        // mass each candidate token assigns to summary positions, averaged
        // over the heads of the last layer
        std::vector<double> mass(static_cast<std::size_t>(pair.cand_end - pair.cand_begin), 0.0);
        if (mats_per_pair > 0) {
            const std::size_t base = j * mats_per_pair + mats_per_pair - heads;
            for (int h = 0; h < heads; ++h) {
                const auto& probs = trace.attention[base + h];
                for (int t = pair.cand_begin; t < pair.cand_end; ++t) {
                    double m = 0.0;
                    for (int s = pair.summary_begin; s < pair.summary_end; ++s) {
                        m += probs[static_cast<std::size_t>(t) * n + s];
                    }
                    mass[static_cast<std::size_t>(t - pair.cand_begin)] += m / heads;
                }
            }
        }
        rec.summary_mass.push_back(std::move(mass));
    }
    return rec;
}

std::string attention_export_json(const AttentionExport& rec) {
    nlohmann::json j;
    j["prediction"] = rec.prediction;
    j["label"] = rec.label;
    j["alpha"] = rec.alpha;
    j["candidates"] = nlohmann::json::array();
    for (std::size_t i = 0; i < rec.tokens.size(); ++i) {
        nlohmann::json c;
        c["tokens"] = rec.tokens[i];
        c["summary_attention"] = rec.summary_mass[i];
        c["alpha"] = rec.alpha.size() > i ? rec.alpha[i] : 0.0;
        j["candidates"].push_back(c);
    }
    return j.dump(2);
}

}  // namespace hin
