#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hin/errors.hpp"
#include "hin/tensor.hpp"

namespace hin {

/// One record: a document, its user-written summary, and a gold rating
/// label in [1..K].
struct Sample {
    std::string document;
    std::string summary;
    int label = 0;
    std::size_t id = 0;    // position in the source corpus file
    bool noisy = false;    // set by the synthetic generator when the label was flipped
};

/// Reads line-delimited JSON records with fields text, summary, label.
/// Unknown fields are ignored; a "noisy" field, when present, is kept.
std::vector<Sample> load_corpus(const std::string& path);
void write_corpus(const std::string& path, const std::vector<Sample>& samples);

/// Largest label present; every label must be >= 1.
int infer_num_classes(const std::vector<Sample>& samples);

struct SplitSpec {
    enum class Kind { kReview, kNews };
    Kind kind = Kind::kNews;
    // review: leading val_count records for validation, next test_count for
    // testing, remainder for training.
    std::size_t val_count = 1000;
    std::size_t test_count = 1000;
    // news: seeded random 80/10/10.
    double train_ratio = 0.8;
    double val_ratio = 0.1;
};

/// Parses "review:<val>:<test>" or "news".
SplitSpec parse_split_spec(const std::string& text);
std::string split_spec_str(const SplitSpec& spec);

struct CorpusSplits {
    std::vector<Sample> train, val, test;
};

CorpusSplits split_corpus(const std::vector<Sample>& all, const SplitSpec& spec,
                          std::uint64_t seed);

/// FNV-1a over the records of one split, order sensitive.
std::uint64_t split_hash(const std::vector<Sample>& split);

struct SyntheticSpec {
    int num_samples = 200;
    int num_classes = 3;
    int segments = 3;           // segments per document, one of them subject-matched
    int num_subjects = 8;
    double distractor_rate = 1.0;  // chance a distractor segment carries a conflicting cue
    double noise_rate = 0.0;       // chance the gold label is flipped

    void validate() const;
};

/// Each document pairs its summary subject with a label-determining cue in
/// exactly one segment; other segments mention other subjects with cues of
/// other classes. Noise flips the stored label (noisy=true) without
/// touching the text.
std::vector<Sample> gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

}  // namespace hin
