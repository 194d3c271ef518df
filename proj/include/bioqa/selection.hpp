#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "bioqa/features.hpp"

namespace bioqa {

enum class SelectorMethod { greedy, mmr };

/// One selection run: at most k sentences, greedy top-k or MMR re-ranking.
/// `redundancy_feature` (MMR only) defaults to the relevance feature when
/// unset.
struct SelectionConfig {
    std::size_t k = 5;
    SelectorMethod method = SelectorMethod::greedy;
    double lambda = 0.5;
    std::optional<FeatureKind> redundancy_feature;
};

struct SelectionStep {
    std::size_t index = 0;
    double marginal = 0.0;
};

/// Chosen pool indices in pick order plus the per-step marginal scores.
struct Selection {
    std::vector<std::size_t> chosen;
    std::vector<SelectionStep> trace;
};

/// Indices of the k highest-scoring candidates, score-descending, ties by
/// lower pool index.
inline Selection greedy_select(std::span<const ScoredCandidate> scored, std::size_t k) {
    if (scored.empty()) throw std::invalid_argument("greedy_select: empty pool");
    if (k == 0) throw std::invalid_argument("greedy_select: k must be positive");
    std::vector<std::size_t> order(scored.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        if (scored[a].score != scored[b].score) return scored[a].score > scored[b].score;
        return a < b;
    });
    Selection sel;
    const std::size_t take = std::min(k, scored.size());
    for (std::size_t i = 0; i < take; ++i) {
        sel.chosen.push_back(order[i]);
        sel.trace.push_back({order[i], scored[order[i]].score});
    }
    return sel;
}

using PairSimilarity = std::function<double(std::size_t, std::size_t)>;

/// MMR with an explicit candidate-pair similarity. The first pick is the
/// pure relevance argmax; later steps maximize
/// lambda*rel(i) - (1-lambda)*max_{j in chosen} sim(i, j). Ties break toward
/// the lower pool index.
inline Selection mmr_select(std::span<const ScoredCandidate> scored, std::size_t k, double lambda,
                            const PairSimilarity& pair_sim) {
    if (scored.empty()) throw std::invalid_argument("mmr_select: empty pool");
    if (k == 0) throw std::invalid_argument("mmr_select: k must be positive");
    if (!(lambda >= 0.0 && lambda <= 1.0)) throw std::invalid_argument("mmr_select: lambda must be in [0,1]");
    const std::size_t n = scored.size();
    std::vector<bool> taken(n, false);
    std::vector<double> max_sim(n, 0.0);
    Selection sel;
    const std::size_t take = std::min(k, n);
    while (sel.chosen.size() < take) {
        std::size_t best = n;
        double best_value = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            if (taken[i]) continue;
            const double value = sel.chosen.empty()
                                     ? scored[i].score
                                     : lambda * scored[i].score - (1.0 - lambda) * max_sim[i];
            if (value > best_value) {
                best_value = value;
                best = i;
            }
        }
        taken[best] = true;
        sel.chosen.push_back(best);
        sel.trace.push_back({best, best_value});
        for (std::size_t i = 0; i < n; ++i) {
            if (!taken[i]) max_sim[i] = std::max(max_sim[i], pair_sim(i, best));
        }
    }
    return sel;
}

/// MMR where candidate-pair similarity comes from cfg.redundancy_feature
/// (or, when unset, from the relevance feature the candidates were scored
/// with). The stopword set must match the one used for scoring.
inline Selection mmr_select(std::span<const ScoredCandidate> scored, std::span<const Sentence> pool,
                            const SelectionConfig& cfg, const IdfTable* idf = nullptr,
                            const ParseProvider* parser = nullptr, const StopwordSet* stopwords = nullptr) {
    if (scored.size() != pool.size())
        throw std::invalid_argument("mmr_select: scored and pool are not parallel");
    if (scored.empty()) throw std::invalid_argument("mmr_select: empty pool");
    const FeatureKind kind = cfg.redundancy_feature.value_or(scored.front().feature);
    std::vector<std::vector<Token>> tokens;
    tokens.reserve(pool.size());
    for (const Sentence& s : pool) tokens.push_back(detail::filter_stopwords(s.tokens, stopwords));
    const auto pair_sim = [&](std::size_t a, std::size_t b) {
        return similarity(tokens[a], tokens[b], kind, idf, parser);
    };
    return mmr_select(scored, cfg.k, cfg.lambda, pair_sim);
}

/// Runs the configured selector.
inline Selection select(std::span<const ScoredCandidate> scored, std::span<const Sentence> pool,
                        const SelectionConfig& cfg, const IdfTable* idf = nullptr,
                        const ParseProvider* parser = nullptr, const StopwordSet* stopwords = nullptr) {
    if (cfg.method == SelectorMethod::greedy) return greedy_select(scored, cfg.k);
    return mmr_select(scored, pool, cfg, idf, parser, stopwords);
}

}  // namespace bioqa
