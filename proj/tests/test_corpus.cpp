#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <set>

#include "helpers.hpp"
#include "hin/corpus.hpp"
#include "hin/text.hpp"

using namespace hin;

namespace {

std::vector<Sample> numbered_corpus(std::size_t n, int num_classes = 3) {
    std::vector<Sample> out;
    for (std::size_t i = 0; i < n; ++i) {
        Sample s;
        s.document = "record number " + std::to_string(i) + " body.";
        s.summary = "record " + std::to_string(i);
        s.label = static_cast<int>(i % num_classes) + 1;
        s.id = i;
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

TEST_CASE("corpus round-trip through JSONL keeps fields and ids") {
    testutil::TempDir tmp("corpus_rt");
    std::vector<Sample> samples = numbered_corpus(25);
    samples[3].noisy = true;
    write_corpus(tmp.file("c.jsonl"), samples);
    std::vector<Sample> back = load_corpus(tmp.file("c.jsonl"));
    REQUIRE(back.size() == samples.size());
    for (std::size_t i = 0; i < back.size(); ++i) {
        CHECK(back[i].document == samples[i].document);
        CHECK(back[i].summary == samples[i].summary);
        CHECK(back[i].label == samples[i].label);
        CHECK(back[i].noisy == samples[i].noisy);
        CHECK(back[i].id == i);
    }
}

TEST_CASE("ingest errors carry line numbers") {
    testutil::TempDir tmp("corpus_err");
    {
        std::ofstream os(tmp.file("bad.jsonl"));
        os << R"({"text":"fine.","summary":"ok","label":1})" << "\n";
        os << "this is not json\n";
    }
    try {
        load_corpus(tmp.file("bad.jsonl"));
        FAIL("expected IngestError");
    } catch (const IngestError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }

    {
        std::ofstream os(tmp.file("badlabel.jsonl"));
        os << R"({"text":"fine.","summary":"ok","label":0})" << "\n";
    }
    CHECK_THROWS_AS(load_corpus(tmp.file("badlabel.jsonl")), IngestError);

    {
        std::ofstream os(tmp.file("missing.jsonl"));
        os << R"({"text":"fine.","label":2})" << "\n";
    }
    CHECK_THROWS_AS(load_corpus(tmp.file("missing.jsonl")), IngestError);

    CHECK_THROWS_AS(load_corpus(tmp.file("nonexistent.jsonl")), IngestError);
}

TEST_CASE("review split: leading validation and test blocks") {
    std::vector<Sample> all = numbered_corpus(3000);
    SplitSpec spec = parse_split_spec("review:1000:1000");
    CorpusSplits s = split_corpus(all, spec, 1);
    CHECK(s.val.size() == 1000);
    CHECK(s.test.size() == 1000);
    CHECK(s.train.size() == 1000);
    CHECK(s.val.front().id == 0);
    CHECK(s.test.front().id == 1000);
    CHECK(s.train.front().id == 2000);

    CHECK_THROWS_AS(split_corpus(numbered_corpus(1500), spec, 1), ConfigError);
}

TEST_CASE("news split: 80/10/10 and seeded determinism") {
    std::vector<Sample> all = numbered_corpus(100);
    SplitSpec spec = parse_split_spec("news");
    CorpusSplits a = split_corpus(all, spec, 42);
    CHECK(a.train.size() == 80);
    CHECK(a.val.size() == 10);
    CHECK(a.test.size() == 10);

    CorpusSplits b = split_corpus(all, spec, 42);
    CHECK(split_hash(a.train) == split_hash(b.train));
    CHECK(split_hash(a.val) == split_hash(b.val));
    CHECK(split_hash(a.test) == split_hash(b.test));

    CorpusSplits c = split_corpus(all, spec, 43);
    CHECK(split_hash(a.train) != split_hash(c.train));

    // partition: every id in exactly one split
    std::set<std::size_t> seen;
    for (const auto& v : {a.train, a.val, a.test})
        for (const auto& s : v) CHECK(seen.insert(s.id).second);
    CHECK(seen.size() == 100);
}

TEST_CASE("split spec parsing") {
    CHECK(parse_split_spec("news").kind == SplitSpec::Kind::kNews);
    SplitSpec r = parse_split_spec("review:12:34");
    CHECK(r.kind == SplitSpec::Kind::kReview);
    CHECK(r.val_count == 12);
    CHECK(r.test_count == 34);
    CHECK(split_spec_str(r) == "review:12:34");
    CHECK_THROWS_AS(parse_split_spec("bogus"), ConfigError);
    CHECK_THROWS_AS(parse_split_spec("review:0:5"), ConfigError);
    CHECK_THROWS_AS(parse_split_spec("review:x"), ConfigError);
}

TEST_CASE("synthetic: zero noise keeps labels recoverable from the key segment") {
    SyntheticSpec spec;
    spec.num_samples = 60;
    spec.num_classes = 3;
    spec.noise_rate = 0.0;
    std::vector<Sample> samples = gen_synthetic(spec, 5);
    REQUIRE(samples.size() == 60);

    // cue tables: class -> cue tokens (mirrors the generator's wording)
    const std::map<std::string, int> cue_class = {
        {"terrible", 1}, {"awful", 1},   {"dreadful", 1}, {"poor", 2},      {"weak", 2},
        {"flimsy", 2},   {"average", 3}, {"passable", 3}, {"ordinary", 3}};

    for (const auto& s : samples) {
        CHECK_FALSE(s.noisy);
        // locate the subject named by the summary
        auto sum_toks = tokenize(s.summary);
        const std::string subject = sum_toks.back();
        auto segs = split_segments(s.document, 8);
        int found_label = 0;
        for (const auto& seg : segs) {
            bool has_subject = false;
            for (const auto& t : seg.tokens) has_subject |= (t == subject);
            if (!has_subject) continue;
            for (const auto& t : seg.tokens) {
                auto it = cue_class.find(t);
                if (it != cue_class.end()) found_label = it->second;
            }
        }
        CHECK(found_label == s.label);
    }
}

TEST_CASE("synthetic: full noise with K=2 flips every label") {
    SyntheticSpec spec;
    spec.num_samples = 40;
    spec.num_classes = 2;
    spec.noise_rate = 1.0;
    std::vector<Sample> samples = gen_synthetic(spec, 6);
    const std::map<std::string, int> cue_class = {{"terrible", 1}, {"awful", 1}, {"dreadful", 1},
                                                  {"poor", 2},     {"weak", 2},  {"flimsy", 2}};
    for (const auto& s : samples) {
        CHECK(s.noisy);
        auto sum_toks = tokenize(s.summary);
        const std::string subject = sum_toks.back();
        auto segs = split_segments(s.document, 8);
        int true_label = 0;
        for (const auto& seg : segs) {
            bool has_subject = false;
            for (const auto& t : seg.tokens) has_subject |= (t == subject);
            if (!has_subject) continue;
            for (const auto& t : seg.tokens) {
                auto it = cue_class.find(t);
                if (it != cue_class.end()) true_label = it->second;
            }
        }
        REQUIRE(true_label != 0);
        CHECK(s.label == 3 - true_label);  // the other class
    }
}

TEST_CASE("synthetic: corpus statistics match the request within sampling error") {
    SyntheticSpec spec;
    spec.num_samples = 3000;
    spec.num_classes = 3;
    spec.segments = 3;
    spec.noise_rate = 0.2;
    std::vector<Sample> samples = gen_synthetic(spec, 77);

    // class balance: uniform over 3 classes before noise, noise preserves
    // uniformity by symmetry
    std::map<int, int> counts;
    std::size_t noisy = 0;
    double mean_len = 0.0;
    for (const auto& s : samples) {
        ++counts[s.label];
        if (s.noisy) ++noisy;
        mean_len += static_cast<double>(tokenize(s.document).size());
    }
    mean_len /= static_cast<double>(samples.size());
    for (auto& [label, n] : counts) {
        CHECK(n > 3000 / 3 - 120);
        CHECK(n < 3000 / 3 + 120);
    }
    const double noise_frac = static_cast<double>(noisy) / 3000.0;
    CHECK(noise_frac > 0.17);
    CHECK(noise_frac < 0.23);
    // each of the 3 segments is "the X was F C ." = 6 tokens
    CHECK(mean_len == 18.0);

    CHECK(infer_num_classes(samples) == 3);

    SyntheticSpec bad = spec;
    bad.noise_rate = 1.5;
    CHECK_THROWS_AS(gen_synthetic(bad, 1), ConfigError);
    bad = spec;
    bad.num_classes = 9;
    CHECK_THROWS_AS(gen_synthetic(bad, 1), ConfigError);
}

TEST_CASE("synthetic generation is seed deterministic") {
    SyntheticSpec spec;
    spec.num_samples = 30;
    auto a = gen_synthetic(spec, 123);
    auto b = gen_synthetic(spec, 123);
    auto c = gen_synthetic(spec, 124);
    REQUIRE(a.size() == b.size());
    bool all_equal = true, any_diff = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        all_equal &= a[i].document == b[i].document && a[i].label == b[i].label;
        any_diff |= a[i].document != c[i].document;
    }
    CHECK(all_equal);
    CHECK(any_diff);
}
