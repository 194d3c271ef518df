#pragma once

#include <cmath>
#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "bioqa/corpus.hpp"
#include "bioqa/textproc.hpp"

namespace bioqa {

enum class SimilarityKind { jaccard, dice, dice_bigram, tf_cosine, tfidf_cosine, combined };

/// Scoring function identifier. A kind is either a plain similarity or a
/// root-augmented wrapper that adds `root_weight` when the question and the
/// candidate share a dependency root token.
struct FeatureKind {
    SimilarityKind base = SimilarityKind::jaccard;
    bool root_augmented = false;
    double root_weight = 0.0;

    friend bool operator==(const FeatureKind&, const FeatureKind&) = default;

    bool needs_idf() const { return base == SimilarityKind::tfidf_cosine; }
    bool needs_parser() const { return root_augmented; }

    std::string id() const;
    static FeatureKind parse(std::string_view id);
};

namespace detail {

inline std::string_view base_feature_name(SimilarityKind k) {
    switch (k) {
        case SimilarityKind::jaccard: return "jaccard";
        case SimilarityKind::dice: return "dice";
        case SimilarityKind::dice_bigram: return "dice-bigram";
        case SimilarityKind::tf_cosine: return "tf";
        case SimilarityKind::tfidf_cosine: return "tfidf";
        case SimilarityKind::combined: return "combined";
    }
    return "?";
}

inline std::optional<SimilarityKind> base_feature_from(std::string_view s) {
    if (s == "jaccard") return SimilarityKind::jaccard;
    if (s == "dice") return SimilarityKind::dice;
    if (s == "dice-bigram") return SimilarityKind::dice_bigram;
    if (s == "tf") return SimilarityKind::tf_cosine;
    if (s == "tfidf") return SimilarityKind::tfidf_cosine;
    if (s == "combined") return SimilarityKind::combined;
    return std::nullopt;
}

inline std::string format_weight(double w) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", w);
    return buf;
}

}  // namespace detail

inline std::string FeatureKind::id() const {
    if (!root_augmented) return std::string(detail::base_feature_name(base));
    return "root:" + std::string(detail::base_feature_name(base)) + ":" + detail::format_weight(root_weight);
}

/// Parses `jaccard|dice|dice-bigram|tf|tfidf|combined|root:<base>:<weight>`.
inline FeatureKind FeatureKind::parse(std::string_view id) {
    FeatureKind kind;
    if (id.starts_with("root:")) {
        const std::string_view rest = id.substr(5);
        const std::size_t colon = rest.rfind(':');
        if (colon == std::string_view::npos) {
            throw std::invalid_argument("bad feature id \"" + std::string(id) +
                                        "\": expected root:<base>:<weight>");
        }
        const auto base = detail::base_feature_from(rest.substr(0, colon));
        if (!base) throw std::invalid_argument("unknown base feature in \"" + std::string(id) + "\"");
        kind.base = *base;
        kind.root_augmented = true;
        try {
            kind.root_weight = std::stod(std::string(rest.substr(colon + 1)));
        } catch (const std::exception&) {
            throw std::invalid_argument("bad root weight in \"" + std::string(id) + "\"");
        }
        if (!(kind.root_weight >= 0.0)) {
            throw std::invalid_argument("root weight must be non-negative in \"" + std::string(id) + "\"");
        }
        return kind;
    }
    const auto base = detail::base_feature_from(id);
    if (!base) throw std::invalid_argument("unknown feature \"" + std::string(id) + "\"");
    kind.base = *base;
    return kind;
}

/// Per-token document frequencies over a training corpus where each
/// candidate sentence counts as one document.
struct IdfTable {
    std::size_t doc_count = 0;
    std::unordered_map<std::string, std::size_t> df;

    /// Counts each distinct token of the document once.
    void add_document(std::span<const Token> tokens) {
        ++doc_count;
        std::map<std::string_view, bool> distinct;
        for (const Token& t : tokens) distinct.emplace(t.surface, true);
        for (const auto& [surface, _] : distinct) ++df[std::string(surface)];
    }

    /// Smoothed idf; unseen tokens behave as df = 0.
    double idf(const Token& t) const {
        const auto it = df.find(t.surface);
        const double d = it == df.end() ? 0.0 : static_cast<double>(it->second);
        return std::log((static_cast<double>(doc_count) + 1.0) / (d + 1.0)) + 1.0;
    }
};

namespace detail {

inline std::vector<std::string_view> token_set(std::span<const Token> tokens) {
    std::vector<std::string_view> set;
    set.reserve(tokens.size());
    for (const Token& t : tokens) set.push_back(t.surface);
    std::sort(set.begin(), set.end());
    set.erase(std::unique(set.begin(), set.end()), set.end());
    return set;
}

inline std::size_t intersection_size(const std::vector<std::string_view>& a,
                                     const std::vector<std::string_view>& b) {
    std::size_t count = 0;
    auto ia = a.begin();
    auto ib = b.begin();
    while (ia != a.end() && ib != b.end()) {
        if (*ia < *ib) {
            ++ia;
        } else if (*ib < *ia) {
            ++ib;
        } else {
            ++count;
            ++ia;
            ++ib;
        }
    }
    return count;
}

// Ordered so that accumulation order is deterministic.
inline std::map<std::string_view, double> term_counts(std::span<const Token> tokens) {
    std::map<std::string_view, double> counts;
    for (const Token& t : tokens) counts[t.surface] += 1.0;
    return counts;
}

inline double cosine(const std::map<std::string_view, double>& a, const std::map<std::string_view, double>& b) {
    double dot = 0.0;
    double norm_a = 0.0;
    double norm_b = 0.0;
    for (const auto& [term, w] : a) {
        norm_a += w * w;
        const auto it = b.find(term);
        if (it != b.end()) dot += w * it->second;
    }
    for (const auto& [term, w] : b) norm_b += w * w;
    if (norm_a == 0.0 || norm_b == 0.0) return 0.0;
    return dot / (std::sqrt(norm_a) * std::sqrt(norm_b));
}

inline std::map<std::pair<char, char>, double> byte_bigrams(const std::string& s) {
    std::map<std::pair<char, char>, double> grams;
    for (std::size_t i = 0; i + 1 < s.size(); ++i) grams[{s[i], s[i + 1]}] += 1.0;
    return grams;
}

}  // namespace detail

/// |A∩B| / |A∪B| over token sets; 0 when both sides are empty.
inline double jaccard(std::span<const Token> a, std::span<const Token> b) {
    const auto sa = detail::token_set(a);
    const auto sb = detail::token_set(b);
    const std::size_t inter = detail::intersection_size(sa, sb);
    const std::size_t uni = sa.size() + sb.size() - inter;
    if (uni == 0) return 0.0;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

/// 2|A∩B| / (|A|+|B|) over token sets; 0 when both sides are empty.
inline double dice(std::span<const Token> a, std::span<const Token> b) {
    const auto sa = detail::token_set(a);
    const auto sb = detail::token_set(b);
    const std::size_t denom = sa.size() + sb.size();
    if (denom == 0) return 0.0;
    return 2.0 * static_cast<double>(detail::intersection_size(sa, sb)) / static_cast<double>(denom);
}

/// Classical string Dice on character bigrams of the space-joined token
/// surfaces: 2·n_t / (n_x + n_y) with multiset bigram counts.
inline double dice_bigram(std::span<const Token> a, std::span<const Token> b) {
    const auto ga = detail::byte_bigrams(join_tokens(a));
    const auto gb = detail::byte_bigrams(join_tokens(b));
    double total = 0.0;
    double shared = 0.0;
    for (const auto& [gram, count] : ga) {
        total += count;
        const auto it = gb.find(gram);
        if (it != gb.end()) shared += std::min(count, it->second);
    }
    for (const auto& [gram, count] : gb) total += count;
    if (total == 0.0) return 0.0;
    return 2.0 * shared / total;
}

/// Cosine over raw term-frequency vectors; 0 when either vector is zero.
inline double tf_cosine(std::span<const Token> a, std::span<const Token> b) {
    return detail::cosine(detail::term_counts(a), detail::term_counts(b));
}

/// Cosine over tf·idf vectors under the given table.
inline double tfidf_cosine(std::span<const Token> a, std::span<const Token> b, const IdfTable& idf) {
    auto weigh = [&](std::map<std::string_view, double> counts) {
        for (auto& [term, w] : counts) w *= idf.idf(Token{std::string(term)});
        return counts;
    };
    return detail::cosine(weigh(detail::term_counts(a)), weigh(detail::term_counts(b)));
}

/// Supplies the dependency root of a tokenized sentence. The bundled
/// implementation is a heuristic; an external trained parser can be plugged
/// in behind this interface.
class ParseProvider {
  public:
    virtual ~ParseProvider() = default;

    /// Returns a member of `sentence`, or nullopt when no root can be named.
    virtual std::optional<Token> root_token(std::span<const Token> sentence) const = 0;
};

/// Picks the first token carrying a verb-like suffix, falling back to the
/// middle content token (3+ characters), then to the middle token.
class HeuristicParseProvider final : public ParseProvider {
  public:
    std::optional<Token> root_token(std::span<const Token> sentence) const override {
        if (sentence.empty()) return std::nullopt;
        static const std::vector<std::string> suffixes = {"ed",  "ing",  "ate", "ates", "ated",
                                                          "ize", "izes", "ized", "ify", "ifies"};
        for (const Token& t : sentence) {
            if (t.surface.size() < 4) continue;
            for (const std::string& suffix : suffixes) {
                if (t.surface.size() > suffix.size() && t.surface.ends_with(suffix)) return t;
            }
        }
        std::vector<const Token*> content;
        for (const Token& t : sentence) {
            if (t.surface.size() >= 3) content.push_back(&t);
        }
        if (!content.empty()) return *content[content.size() / 2];
        return sentence[sentence.size() / 2];
    }
};

/// Similarity of two token sequences under `kind`. Root augmentation adds
/// root_weight when both roots exist and coincide.
inline double similarity(std::span<const Token> a, std::span<const Token> b, const FeatureKind& kind,
                         const IdfTable* idf = nullptr, const ParseProvider* parser = nullptr) {
    if (kind.needs_idf() && !idf) throw std::invalid_argument("feature " + kind.id() + " needs an idf table");
    if (kind.needs_parser() && !parser) throw std::invalid_argument("feature " + kind.id() + " needs a parser");
    double score = 0.0;
    switch (kind.base) {
        case SimilarityKind::jaccard: score = jaccard(a, b); break;
        case SimilarityKind::dice: score = dice(a, b); break;
        case SimilarityKind::dice_bigram: score = dice_bigram(a, b); break;
        case SimilarityKind::tf_cosine: score = tf_cosine(a, b); break;
        case SimilarityKind::tfidf_cosine: score = tfidf_cosine(a, b, *idf); break;
        case SimilarityKind::combined: score = jaccard(a, b) + dice(a, b) + tf_cosine(a, b); break;
    }
    if (kind.root_augmented) {
        const auto root_a = parser->root_token(a);
        const auto root_b = parser->root_token(b);
        if (root_a && root_b && *root_a == *root_b) score += kind.root_weight;
    }
    return score;
}

/// A candidate sentence with its relevance score against the question.
struct ScoredCandidate {
    Sentence sentence;
    double score = 0.0;
    FeatureKind feature;
};

namespace detail {

inline std::vector<Token> filter_stopwords(std::span<const Token> tokens, const StopwordSet* stopwords) {
    std::vector<Token> out;
    out.reserve(tokens.size());
    for (const Token& t : tokens) {
        if (!stopwords || !stopwords->contains(t.surface)) out.push_back(t);
    }
    return out;
}

}  // namespace detail

/// Scores every pool sentence against the question body, preserving pool
/// order. A stopword set, when given, is applied to both sides before
/// scoring; sentences keep their full token lists.
inline std::vector<ScoredCandidate> score_pool(const Question& question, std::span<const Sentence> pool,
                                               const FeatureKind& kind, const IdfTable* idf = nullptr,
                                               const ParseProvider* parser = nullptr,
                                               const StopwordSet* stopwords = nullptr) {
    if (kind.needs_idf() && !idf) throw std::invalid_argument("feature " + kind.id() + " needs an idf table");
    if (kind.needs_parser() && !parser) throw std::invalid_argument("feature " + kind.id() + " needs a parser");
    const std::vector<Token> question_tokens = detail::filter_stopwords(tokenize(question.body), stopwords);
    std::vector<ScoredCandidate> scored;
    scored.reserve(pool.size());
    for (const Sentence& sentence : pool) {
        const std::vector<Token> candidate_tokens = detail::filter_stopwords(sentence.tokens, stopwords);
        ScoredCandidate sc;
        sc.sentence = sentence;
        sc.feature = kind;
        sc.score = similarity(question_tokens, candidate_tokens, kind, idf, parser);
        scored.push_back(std::move(sc));
    }
    return scored;
}

}  // namespace bioqa
