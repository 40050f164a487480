#include "hin/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "hin/params.hpp"
#include "json.hpp"

namespace hin {

using nlohmann::json;

std::vector<Sample> load_corpus(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IngestError("cannot open corpus file: " + path);
    std::vector<Sample> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        if (line.empty()) continue;
        json j = json::parse(line, nullptr, /*allow_exceptions=*/false);
        if (j.is_discarded() || !j.is_object()) {
            throw IngestError("line " + std::to_string(lineno) + ": malformed record");
        }
        if (!j.contains("text") || !j["text"].is_string() || !j.contains("summary") ||
            !j["summary"].is_string() || !j.contains("label") ||
            !j["label"].is_number_integer()) {
            throw IngestError("line " + std::to_string(lineno) +
                              ": record needs string fields text, summary and an integer label");
        }
        Sample s;
        s.document = j["text"].get<std::string>();
        s.summary = j["summary"].get<std::string>();
        s.label = j["label"].get<int>();
        if (s.label < 1) {
            throw IngestError("line " + std::to_string(lineno) + ": label " +
                              std::to_string(s.label) + " outside [1..K]");
        }
        if (s.document.empty()) {
            throw IngestError("line " + std::to_string(lineno) + ": empty document");
        }
        if (j.contains("noisy") && j["noisy"].is_boolean()) s.noisy = j["noisy"].get<bool>();
        s.id = out.size();
        out.push_back(std::move(s));
    }
    return out;
}

void write_corpus(const std::string& path, const std::vector<Sample>& samples) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw IngestError("cannot open corpus file for writing: " + path);
    for (const auto& s : samples) {
        json j;
        j["text"] = s.document;
        j["summary"] = s.summary;
        j["label"] = s.label;
        if (s.noisy) j["noisy"] = true;
        os << j.dump() << '\n';
    }
}

int infer_num_classes(const std::vector<Sample>& samples) {
    int k = 0;
    for (const auto& s : samples) {
        if (s.label < 1) throw IngestError("label " + std::to_string(s.label) + " outside [1..K]");
        k = std::max(k, s.label);
    }
    if (k < 2) throw IngestError("corpus needs at least 2 distinct rating levels");
    return k;
}

SplitSpec parse_split_spec(const std::string& text) {
    SplitSpec spec;
    if (text == "news") {
        spec.kind = SplitSpec::Kind::kNews;
        return spec;
    }
    if (text.rfind("review", 0) == 0) {
        spec.kind = SplitSpec::Kind::kReview;
        if (text == "review") return spec;
        std::istringstream is(text.substr(6));
        char c1 = 0, c2 = 0;
        long long v = 0, t = 0;
        if (is >> c1 >> v >> c2 >> t && c1 == ':' && c2 == ':' && v > 0 && t > 0) {
            spec.val_count = static_cast<std::size_t>(v);
            spec.test_count = static_cast<std::size_t>(t);
            return spec;
        }
        throw ConfigError("bad review split spec '" + text + "', expected review:<val>:<test>");
    }
    throw ConfigError("unknown split spec '" + text + "', expected news or review:<val>:<test>");
}

std::string split_spec_str(const SplitSpec& spec) {
    if (spec.kind == SplitSpec::Kind::kNews) return "news";
    return "review:" + std::to_string(spec.val_count) + ":" + std::to_string(spec.test_count);
}

CorpusSplits split_corpus(const std::vector<Sample>& all, const SplitSpec& spec,
                          std::uint64_t seed) {
    CorpusSplits out;
    if (spec.kind == SplitSpec::Kind::kReview) {
        if (all.size() <= spec.val_count + spec.test_count) {
            throw ConfigError("review split needs more than " +
                              std::to_string(spec.val_count + spec.test_count) + " records, got " +
                              std::to_string(all.size()));
        }
        out.val.assign(all.begin(), all.begin() + spec.val_count);
        out.test.assign(all.begin() + spec.val_count,
                        all.begin() + spec.val_count + spec.test_count);
        out.train.assign(all.begin() + spec.val_count + spec.test_count, all.end());
    } else {
        std::vector<std::size_t> idx(all.size());
        std::iota(idx.begin(), idx.end(), 0);
        Rng rng(seed);
        std::shuffle(idx.begin(), idx.end(), rng);
        const std::size_t n_train = static_cast<std::size_t>(spec.train_ratio * all.size());
        const std::size_t n_val = static_cast<std::size_t>(spec.val_ratio * all.size());
        for (std::size_t i = 0; i < idx.size(); ++i) {
            const Sample& s = all[idx[i]];
            if (i < n_train)
                out.train.push_back(s);
            else if (i < n_train + n_val)
                out.val.push_back(s);
            else
                out.test.push_back(s);
        }
    }
    if (out.train.empty() || out.val.empty() || out.test.empty()) {
        throw ConfigError("split produced an empty train/val/test partition");
    }
    return out;
}

std::uint64_t split_hash(const std::vector<Sample>& split) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& s : split) {
        h = fnv1a64(s.document.data(), s.document.size(), h);
        h = fnv1a64(s.summary.data(), s.summary.size(), h);
        h = fnv1a64(&s.label, sizeof(s.label), h);
        h = fnv1a64(&s.id, sizeof(s.id), h);
    }
    return h;
}

namespace {

const char* kSubjects[] = {"camera",   "tripod",  "laptop",  "speaker",
                           "monitor",  "keyboard", "charger", "backpack",
                           "drone",    "printer",  "router",  "headset"};

// One cue set per rating level, lowest first.
const char* kCues[5][3] = {
    {"terrible", "awful", "dreadful"},
    {"poor", "weak", "flimsy"},
    {"average", "passable", "ordinary"},
    {"good", "solid", "pleasant"},
    {"excellent", "fantastic", "superb"},
};

const char* kFillers[] = {"really", "quite", "overall", "honestly", "definitely", "somewhat"};

}  // namespace

void SyntheticSpec::validate() const {
    if (num_samples < 1) throw ConfigError("synthetic: num_samples must be >= 1");
    if (num_classes < 2 || num_classes > 5) throw ConfigError("synthetic: num_classes must be in [2..5]");
    if (segments < 1) throw ConfigError("synthetic: segments must be >= 1");
    if (num_subjects < 2 || num_subjects > 12) throw ConfigError("synthetic: num_subjects must be in [2..12]");
    if (distractor_rate < 0.0 || distractor_rate > 1.0) throw ConfigError("synthetic: distractor_rate outside [0,1]");
    if (noise_rate < 0.0 || noise_rate > 1.0) throw ConfigError("synthetic: noise_rate outside [0,1]");
}

std::vector<Sample> gen_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
    spec.validate();
    Rng rng(seed);
    std::uniform_int_distribution<int> pick_subject(0, spec.num_subjects - 1);
    std::uniform_int_distribution<int> pick_class(1, spec.num_classes);
    std::uniform_int_distribution<int> pick_cue(0, 2);
    std::uniform_int_distribution<int> pick_filler(0, 5);
    std::uniform_int_distribution<int> pick_slot(0, spec.segments - 1);
    std::uniform_real_distribution<double> uni(0.0, 1.0);

    auto segment_text = [&](int subject, int cue_class) {
        std::string s = "the ";
        s += kSubjects[subject];
        s += " was ";
        s += kFillers[pick_filler(rng)];
        s += ' ';
        if (cue_class > 0) {
            s += kCues[cue_class - 1][pick_cue(rng)];
        } else {
            s += "there";
        }
        s += " .";
        return s;
    };

    std::vector<Sample> out;
    out.reserve(spec.num_samples);
    for (int i = 0; i < spec.num_samples; ++i) {
        const int subject = pick_subject(rng);
        const int label = pick_class(rng);
        const int key_slot = pick_slot(rng);

        std::vector<std::string> segs(spec.segments);
        for (int j = 0; j < spec.segments; ++j) {
            if (j == key_slot) {
                segs[j] = segment_text(subject, label);
                continue;
            }
            // a different subject, with a conflicting cue at distractor_rate
            int other = pick_subject(rng);
            while (other == subject) other = pick_subject(rng);
            int cue_class = 0;
            if (uni(rng) < spec.distractor_rate && spec.num_classes >= 2) {
                cue_class = pick_class(rng);
                while (cue_class == label) cue_class = pick_class(rng);
            }
            segs[j] = segment_text(other, cue_class);
        }

        Sample s;
        for (std::size_t j = 0; j < segs.size(); ++j) {
            if (j) s.document += ' ';
            s.document += segs[j];
        }
        s.summary = std::string("thoughts on the ") + kSubjects[subject];
        s.label = label;
        if (uni(rng) < spec.noise_rate) {
            int flipped = pick_class(rng);
            while (flipped == label) flipped = pick_class(rng);
            s.label = flipped;
            s.noisy = true;
        }
        s.id = out.size();
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace hin
