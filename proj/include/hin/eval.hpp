#pragma once

#include <string>
#include <vector>

#include "hin/model.hpp"
#include "hin/text.hpp"

namespace hin {

double accuracy(const std::vector<int>& preds, const std::vector<int>& golds);

/// Unweighted mean of per-class F1 over classes 1..K; a class with zero
/// precision+recall contributes 0.
double macro_f1(const std::vector<int>& preds, const std::vector<int>& golds, int num_classes);

struct ClassStats {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

struct EvalReport {
    std::size_t total = 0;
    double accuracy = 0.0;
    double macro_f1 = 0.0;
    std::vector<ClassStats> per_class;
    std::vector<std::vector<int>> confusion;  // [gold][pred], 0-based over classes 1..K
};

EvalReport evaluate(const std::vector<int>& preds, const std::vector<int>& golds, int num_classes);
void write_eval_report_csv(const std::string& path, const EvalReport& report);

struct LengthBucketReport {
    std::vector<int> cut_lengths;      // 5 quantile cuts
    std::vector<std::size_t> counts;   // 6 buckets
    std::vector<std::size_t> correct;  // 6 buckets
    std::vector<double> bucket_accuracy;  // NaN on empty buckets
    std::size_t total = 0;
    std::size_t total_correct = 0;
};

/// Six equal-mass quantile buckets over test-set document token lengths.
LengthBucketReport length_buckets(const std::vector<EncodedSample>& test_set,
                                  const std::vector<int>& preds);
void write_length_report_csv(const std::string& path, const LengthBucketReport& report);

struct AttentionExport {
    std::vector<double> alpha;                      // per candidate
    std::vector<std::vector<std::string>> tokens;   // candidate tokens
    std::vector<std::vector<double>> summary_mass;  // per candidate token, attention mass on the summary span
    int prediction = 0;
    int label = 0;
};

AttentionExport export_attention(const HinModel& model, const EncodedSample& sample,
                                 const Vocabulary& vocab);
std::string attention_export_json(const AttentionExport& rec);

}  // namespace hin
