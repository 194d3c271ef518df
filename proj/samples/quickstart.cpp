// Minimal end-to-end use of the library on one hardcoded question:
// tokenize snippets, score candidates, select with MMR, tile, evaluate.

#include <cstdio>

#include "bioqa/bioqa.hpp"

int main() {
    bioqa::Question q;
    q.id = "demo";
    q.qtype = bioqa::QuestionType::summary;
    q.body = "Is mitofusin 2 a receptor for parkin?";
    q.snippets = {
        "Mfn2 functions as a mitochondrial receptor for Parkin. It is required for "
        "quality control of cardiac mitochondria.",
        "A phosphorylated form of mitofusin 2 serves as a receptor for parkin recruitment "
        "to damaged mitochondria. Mitofusin 1 and mitofusin 2 are ubiquitinated upon mitophagy.",
    };
    q.ideal_answers = {"Yes, Mfn2 functions as a mitochondrial receptor for Parkin."};

    const auto pool = bioqa::candidate_pool(q);
    std::printf("candidate pool: %zu sentences\n", pool.size());

    const auto kind = bioqa::FeatureKind::parse("jaccard");
    const auto scored = bioqa::score_pool(q, pool, kind);
    for (std::size_t i = 0; i < scored.size(); ++i)
        std::printf("  [%zu] %.3f  %s\n", i, scored[i].score, scored[i].sentence.raw.c_str());

    bioqa::SelectionConfig cfg;
    cfg.method = bioqa::SelectorMethod::mmr;
    cfg.k = 2;
    cfg.lambda = 0.5;
    const auto selection = bioqa::select(scored, pool, cfg);
    const auto answer = bioqa::tile(selection, pool);
    std::printf("answer (%zu words): %s\n", answer.word_count, answer.text.c_str());

    const auto rouge = bioqa::rouge_l_best(q.ideal_answers, answer.text);
    std::printf("rouge-l: P=%.3f R=%.3f F1=%.3f\n", rouge.precision, rouge.recall, rouge.f1);
    return 0;
}
