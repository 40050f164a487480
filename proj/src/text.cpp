#include "hin/text.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hin {

namespace {

// Decodes one UTF-8 code point starting at i; advances i past it.
// Malformed bytes decode as single-byte code points.
char32_t next_codepoint(const std::string& s, std::size_t& i) {
    const unsigned char b0 = static_cast<unsigned char>(s[i]);
    std::size_t len = 1;
    char32_t cp = b0;
    if ((b0 & 0x80u) == 0) {
        len = 1;
    } else if ((b0 & 0xE0u) == 0xC0u) {
        len = 2;
        cp = b0 & 0x1Fu;
    } else if ((b0 & 0xF0u) == 0xE0u) {
        len = 3;
        cp = b0 & 0x0Fu;
    } else if ((b0 & 0xF8u) == 0xF0u) {
        len = 4;
        cp = b0 & 0x07u;
    }
    if (i + len > s.size()) len = 1, cp = b0;
    for (std::size_t k = 1; k < len; ++k) {
        const unsigned char b = static_cast<unsigned char>(s[i + k]);
        if ((b & 0xC0u) != 0x80u) {
            len = 1;
            cp = b0;
            break;
        }
        cp = (cp << 6) | (b & 0x3Fu);
    }
    i += len;
    return cp;
}

bool is_ascii_space(char32_t cp) {
    return cp == ' ' || cp == '\t' || cp == '\n' || cp == '\r' || cp == '\f' || cp == '\v';
}

bool is_word_char(char32_t cp) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
}

void append_codepoint(std::string& out, char32_t cp) {
    if (cp < 0x80) {
        out.push_back(static_cast<char>(cp));
    } else if (cp < 0x800) {
        out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else if (cp < 0x10000) {
        out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    } else {
        out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
        out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
    }
}

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
    std::vector<std::string> out;
    std::string word;
    auto flush = [&]() {
        if (!word.empty()) {
            out.push_back(word);
            word.clear();
        }
    };
    std::size_t i = 0;
    while (i < text.size()) {
        const char32_t cp = next_codepoint(text, i);
        if (is_word_char(cp)) {
            char32_t lc = cp;
            if (cp >= 'A' && cp <= 'Z') lc = cp - 'A' + 'a';
            word.push_back(static_cast<char>(lc));
        } else if (is_ascii_space(cp)) {
            flush();
        } else {
            // CJK characters, punctuation and other symbols become
            // single-character tokens
            flush();
            std::string tok;
            append_codepoint(tok, cp);
            out.push_back(std::move(tok));
        }
    }
    flush();
    return out;
}

Vocabulary Vocabulary::build(const std::vector<Sample>& corpus, int min_count) {
    std::unordered_map<std::string, std::size_t> freq;
    for (const auto& s : corpus) {
        for (auto& t : tokenize(s.document)) ++freq[t];
        for (auto& t : tokenize(s.summary)) ++freq[t];
    }
    std::vector<std::pair<std::string, std::size_t>> kept;
    kept.reserve(freq.size());
    for (auto& [tok, n] : freq) {
        if (n >= static_cast<std::size_t>(std::max(1, min_count))) kept.emplace_back(tok, n);
    }
    std::sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });

    Vocabulary v;
    v.tokens_ = {"[PAD]", "[UNK]", "[CLS]", "[SEP]"};
    for (auto& [tok, n] : kept) {
        v.index_[tok] = static_cast<int>(v.tokens_.size());
        v.tokens_.push_back(tok);
    }
    return v;
}

int Vocabulary::id(const std::string& token) const {
    auto it = index_.find(token);
    return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::ids(const std::vector<std::string>& tokens) const {
    std::vector<int> out;
    out.reserve(tokens.size());
    for (const auto& t : tokens) out.push_back(id(t));
    return out;
}

const std::string& Vocabulary::token(int id) const {
    if (id < 0 || id >= size()) throw UsageError("vocabulary id " + std::to_string(id) + " out of range");
    return tokens_[static_cast<std::size_t>(id)];
}

TfIdfIndex TfIdfIndex::build(const std::vector<Sample>& train) {
    std::unordered_map<std::string, std::size_t> df;
    for (const auto& s : train) {
        std::vector<std::string> toks = tokenize(s.document);
        std::sort(toks.begin(), toks.end());
        toks.erase(std::unique(toks.begin(), toks.end()), toks.end());
        for (auto& t : toks) ++df[t];
    }
    TfIdfIndex out;
    out.num_docs_ = train.size();
    const double d = 1.0 + static_cast<double>(train.size());
    out.default_idf_ = std::log(d) + 1.0;
    for (auto& [tok, n] : df) {
        out.idf_[tok] = std::log(d / (1.0 + static_cast<double>(n))) + 1.0;
    }
    return out;
}

double TfIdfIndex::idf(const std::string& token) const {
    auto it = idf_.find(token);
    return it == idf_.end() ? default_idf_ : it->second;
}

double TfIdfIndex::cosine(const std::vector<std::string>& a,
                          const std::vector<std::string>& b) const {
    std::unordered_map<std::string, double> va, vb;
    for (const auto& t : a) va[t] += 1.0;
    for (const auto& t : b) vb[t] += 1.0;
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (auto& [tok, tf] : va) {
        const double w = tf * idf(tok);
        na += w * w;
        auto it = vb.find(tok);
        if (it != vb.end()) dot += w * it->second * idf(tok);
    }
    for (auto& [tok, tf] : vb) {
        const double w = tf * idf(tok);
        nb += w * w;
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

std::vector<SegmentCandidate> split_segments(const std::string& document,
                                             int max_candidate_tokens) {
    const int cap = std::max(1, max_candidate_tokens);

    // sentence spans, delimiter attached
    std::vector<std::pair<std::size_t, std::size_t>> sentences;
    std::size_t start = 0;
    for (std::size_t i = 0; i < document.size(); ++i) {
        const char c = document[i];
        if (c == '.' || c == '!' || c == '?' || c == ';' || c == '\n') {
            sentences.emplace_back(start, i + 1);
            start = i + 1;
        }
    }
    if (start < document.size()) sentences.emplace_back(start, document.size());

    std::vector<SegmentCandidate> segments;
    SegmentCandidate cur;
    bool open = false;
    for (auto [b, e] : sentences) {
        std::vector<std::string> toks = tokenize(document.substr(b, e - b));
        if (toks.empty()) {
            if (open) cur.end = e;  // absorb trailing whitespace/punctuation-free span
            continue;
        }
        if (open && cur.tokens.size() + toks.size() > static_cast<std::size_t>(cap)) {
            segments.push_back(cur);
            open = false;
        }
        if (!open) {
            cur = SegmentCandidate{};
            cur.begin = b;
            open = true;
        }
        cur.end = e;
        cur.tokens.insert(cur.tokens.end(), toks.begin(), toks.end());
    }
    if (open) segments.push_back(cur);

    for (std::size_t i = 0; i < segments.size(); ++i) {
        segments[i].index = static_cast<int>(i);
        if (segments[i].tokens.size() > static_cast<std::size_t>(cap)) {
            segments[i].tokens.resize(static_cast<std::size_t>(cap));
        }
    }
    return segments;
}

std::vector<SegmentCandidate> extract_candidates(const Sample& sample, int T,
                                                 int max_candidate_tokens,
                                                 const TfIdfIndex& idf) {
    if (T < 1) throw ConfigError("extract_candidates: T must be >= 1");
    std::vector<SegmentCandidate> segments = split_segments(sample.document, max_candidate_tokens);
    if (segments.empty()) {
        throw IngestError("document tokenizes to nothing (sample id " + std::to_string(sample.id) + ")");
    }
    const std::vector<std::string> summary_tokens = tokenize(sample.summary);
    for (auto& seg : segments) seg.score = idf.cosine(seg.tokens, summary_tokens);

    std::vector<std::size_t> order(segments.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (segments[a].score != segments[b].score) return segments[a].score > segments[b].score;
        return a < b;  // ties to the earlier segment
    });
    order.resize(std::min<std::size_t>(order.size(), static_cast<std::size_t>(T)));
    std::sort(order.begin(), order.end());

    std::vector<SegmentCandidate> out;
    out.reserve(static_cast<std::size_t>(T));
    for (std::size_t i : order) out.push_back(segments[i]);
    while (out.size() < static_cast<std::size_t>(T)) out.push_back(out.back());
    return out;
}

PairSequence make_pair(const std::vector<std::string>& summary_tokens,
                       const std::vector<std::string>& candidate_tokens, int N,
                       const Vocabulary& vocab) {
    if (N < 8) throw ConfigError("pair length N must be >= 8, got " + std::to_string(N));

    // reserve [CLS], two [SEP], and at least one candidate slot
    std::size_t s_len = summary_tokens.size();
    if (s_len > static_cast<std::size_t>(N - 4)) s_len = static_cast<std::size_t>(N - 4);
    std::size_t c_len = candidate_tokens.size();
    const std::size_t c_budget = static_cast<std::size_t>(N - 3) - s_len;
    if (c_len > c_budget) c_len = c_budget;

    PairSequence p;
    p.ids.reserve(static_cast<std::size_t>(N));
    p.ids.push_back(Vocabulary::kCls);
    p.summary_begin = 1;
    for (std::size_t i = 0; i < s_len; ++i) p.ids.push_back(vocab.id(summary_tokens[i]));
    p.summary_end = static_cast<int>(p.ids.size());
    p.ids.push_back(Vocabulary::kSep);
    p.cand_begin = static_cast<int>(p.ids.size());
    for (std::size_t i = 0; i < c_len; ++i) p.ids.push_back(vocab.id(candidate_tokens[i]));
    p.cand_end = static_cast<int>(p.ids.size());
    p.ids.push_back(Vocabulary::kSep);

    p.mask.assign(p.ids.size(), 1);
    while (p.ids.size() < static_cast<std::size_t>(N)) {
        p.ids.push_back(Vocabulary::kPad);
        p.mask.push_back(0);
    }
    return p;
}

TextPipeline TextPipeline::fit(const std::vector<Sample>& train, const PipelineConfig& cfg) {
    if (train.empty()) throw ConfigError("text pipeline: empty training corpus");
    if (cfg.T < 1) throw ConfigError("text pipeline: T must be >= 1");
    if (cfg.max_len < 8) throw ConfigError("text pipeline: N must be >= 8");
    if (cfg.max_candidate_tokens < 1) throw ConfigError("text pipeline: max_candidate_tokens must be >= 1");
    TextPipeline p;
    p.cfg_ = cfg;
    p.vocab_ = Vocabulary::build(train, cfg.min_count);
    p.idf_ = TfIdfIndex::build(train);
    return p;
}

EncodedSample TextPipeline::transform(const Sample& sample) const {
    EncodedSample out;
    out.label = sample.label;
    out.id = sample.id;
    out.noisy = sample.noisy;

    const std::vector<std::string> summary_tokens = tokenize(sample.summary);
    const std::vector<std::string> doc_tokens = tokenize(sample.document);
    if (doc_tokens.empty()) {
        throw IngestError("document tokenizes to nothing (sample id " + std::to_string(sample.id) + ")");
    }
    out.doc_token_count = static_cast<int>(doc_tokens.size());
    out.summary_ids = vocab_.ids(summary_tokens);
    out.doc_ids = vocab_.ids(doc_tokens);

    out.candidates = extract_candidates(sample, cfg_.T, cfg_.max_candidate_tokens, idf_);
    out.pairs.reserve(out.candidates.size());
    for (const auto& cand : out.candidates) {
        out.pairs.push_back(make_pair(summary_tokens, cand.tokens, cfg_.max_len, vocab_));
    }
    return out;
}

std::vector<EncodedSample> TextPipeline::transform_all(const std::vector<Sample>& samples) const {
    std::vector<EncodedSample> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(transform(s));
    return out;
}

}  // namespace hin
