#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "hin/corpus.hpp"
#include "hin/errors.hpp"

namespace hin {

/// Lowercased word tokens for Latin script, single-character tokens for
/// CJK; punctuation characters are their own tokens. Deterministic.
std::vector<std::string> tokenize(const std::string& text);

class Vocabulary {
public:
    static constexpr int kPad = 0;
    static constexpr int kUnk = 1;
    static constexpr int kCls = 2;
    static constexpr int kSep = 3;

    /// Tokens with frequency >= min_count get dense ids after the four
    /// reserved ones, ordered by (frequency desc, token asc).
    static Vocabulary build(const std::vector<Sample>& corpus, int min_count);

    int id(const std::string& token) const;
    std::vector<int> ids(const std::vector<std::string>& tokens) const;
    const std::string& token(int id) const;
    int size() const { return static_cast<int>(tokens_.size()); }

private:
    std::unordered_map<std::string, int> index_;
    std::vector<std::string> tokens_;
};

/// Smoothed inverse document frequencies from the training documents.
class TfIdfIndex {
public:
    static TfIdfIndex build(const std::vector<Sample>& train);

    double idf(const std::string& token) const;
    double cosine(const std::vector<std::string>& a, const std::vector<std::string>& b) const;
    std::size_t num_docs() const { return num_docs_; }

private:
    std::unordered_map<std::string, double> idf_;
    double default_idf_ = 1.0;
    std::size_t num_docs_ = 0;
};

struct SegmentCandidate {
    int index = 0;                     // position among the document's segments
    std::vector<std::string> tokens;   // capped at max_candidate_tokens
    std::size_t begin = 0, end = 0;    // byte span in the document
    double score = 0.0;                // TF-IDF cosine against the summary
};

/// Sentence-boundary split on [.!?;\n], greedily merged up to
/// max_candidate_tokens per segment. The segments partition the document.
std::vector<SegmentCandidate> split_segments(const std::string& document,
                                             int max_candidate_tokens);

/// Scores every segment against the summary and returns the T best,
/// reordered by document position; ties break toward earlier segments.
/// Short documents pad by repeating the last candidate.
std::vector<SegmentCandidate> extract_candidates(const Sample& sample, int T,
                                                 int max_candidate_tokens,
                                                 const TfIdfIndex& idf);

struct PairSequence {
    std::vector<int> ids;    // exactly N
    std::vector<int> mask;   // 1 on real tokens, 0 on padding
    int summary_begin = 0, summary_end = 0;  // token index ranges [begin,end)
    int cand_begin = 0, cand_end = 0;
};

/// [CLS] summary [SEP] candidate [SEP] padded to exactly N tokens. The
/// candidate is truncated from its tail to fit; the summary is only cut
/// when it alone would crowd the candidate out entirely.
PairSequence make_pair(const std::vector<std::string>& summary_tokens,
                       const std::vector<std::string>& candidate_tokens, int N,
                       const Vocabulary& vocab);

struct PipelineConfig {
    int T = 3;
    int max_len = 256;              // N
    int max_candidate_tokens = 80;
    int min_count = 1;
};

struct EncodedSample {
    std::vector<SegmentCandidate> candidates;  // exactly T
    std::vector<PairSequence> pairs;           // exactly T
    std::vector<int> summary_ids;              // content tokens, no specials
    std::vector<int> doc_ids;
    int doc_token_count = 0;
    int label = 0;
    std::size_t id = 0;
    bool noisy = false;
};

/// Fits the vocabulary and IDF table on the training split, then maps any
/// sample to model inputs. Pure and thread-safe after fit.
class TextPipeline {
public:
    static TextPipeline fit(const std::vector<Sample>& train, const PipelineConfig& cfg);

    EncodedSample transform(const Sample& sample) const;
    std::vector<EncodedSample> transform_all(const std::vector<Sample>& samples) const;

    const Vocabulary& vocab() const { return vocab_; }
    const TfIdfIndex& idf() const { return idf_; }
    const PipelineConfig& config() const { return cfg_; }

private:
    PipelineConfig cfg_;
    Vocabulary vocab_;
    TfIdfIndex idf_;
};

}  // namespace hin
