#pragma once

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include <json.hpp>

#include "bioqa/textproc.hpp"

namespace bioqa {

enum class QuestionType { summary, yesno, factoid, list };

inline std::string_view to_string(QuestionType t) {
    switch (t) {
        case QuestionType::summary: return "summary";
        case QuestionType::yesno: return "yesno";
        case QuestionType::factoid: return "factoid";
        case QuestionType::list: return "list";
    }
    return "?";
}

inline std::optional<QuestionType> question_type_from(std::string_view s) {
    if (s == "summary") return QuestionType::summary;
    if (s == "yesno") return QuestionType::yesno;
    if (s == "factoid") return QuestionType::factoid;
    if (s == "list") return QuestionType::list;
    return std::nullopt;
}

/// Gold short answer as synonym groups. yes/no questions hold one group
/// ("yes" or "no"), factoids one group of synonyms, list questions one group
/// per required item. Summary questions have no groups.
struct ExactAnswer {
    std::vector<std::vector<std::string>> groups;

    friend bool operator==(const ExactAnswer&, const ExactAnswer&) = default;
};

struct Question {
    std::string id;
    QuestionType qtype = QuestionType::summary;
    std::string body;
    std::vector<std::string> snippets;
    std::vector<std::string> ideal_answers;
    ExactAnswer exact;

    friend bool operator==(const Question&, const Question&) = default;
};

struct DatasetSplit {
    std::vector<Question> train;
    std::vector<Question> dev;
    std::vector<Question> test;
    std::uint64_t seed = 0;
};

namespace detail {

inline std::vector<std::string> string_list(const nlohmann::json& j) {
    std::vector<std::string> out;
    if (j.is_string()) {
        out.push_back(j.get<std::string>());
    } else if (j.is_array()) {
        for (const auto& e : j) {
            if (e.is_string()) out.push_back(e.get<std::string>());
        }
    }
    return out;
}

inline std::string lower_ascii(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c + 32);
    }
    return s;
}

// Normalizes the raw BioASQ exact_answer shapes (string, list of strings,
// list of lists) into synonym groups for the given question type.
inline ExactAnswer parse_exact_answer(QuestionType qtype, const nlohmann::json& j, std::string& error) {
    ExactAnswer exact;
    switch (qtype) {
        case QuestionType::summary:
            return exact;  // ideal answer only
        case QuestionType::yesno: {
            std::string v;
            if (j.is_string()) {
                v = j.get<std::string>();
            } else if (j.is_array() && j.size() == 1 && j[0].is_string()) {
                v = j[0].get<std::string>();
            }
            v = lower_ascii(v);
            if (v != "yes" && v != "no") {
                error = "yesno exact_answer must be \"yes\" or \"no\"";
                return exact;
            }
            exact.groups.push_back({v});
            return exact;
        }
        case QuestionType::factoid: {
            std::vector<std::string> synonyms;
            if (j.is_array()) {
                for (const auto& e : j) {
                    auto part = string_list(e);
                    synonyms.insert(synonyms.end(), part.begin(), part.end());
                }
            } else {
                synonyms = string_list(j);
            }
            std::erase_if(synonyms, [](const std::string& s) { return s.empty(); });
            if (synonyms.empty()) {
                error = "factoid exact_answer has no synonym strings";
                return exact;
            }
            exact.groups.push_back(std::move(synonyms));
            return exact;
        }
        case QuestionType::list: {
            if (!j.is_array() || j.empty()) {
                error = "list exact_answer must be a non-empty array";
                return exact;
            }
            for (const auto& e : j) {
                std::vector<std::string> group = string_list(e);
                std::erase_if(group, [](const std::string& s) { return s.empty(); });
                if (group.empty()) {
                    error = "list exact_answer has an empty item group";
                    return {};
                }
                exact.groups.push_back(std::move(group));
            }
            return exact;
        }
    }
    error = "unknown question type";
    return exact;
}

}  // namespace detail

/// Parses one BioASQ question entry. Returns nullopt and sets `error` when a
/// required field for the entry's type is missing or malformed.
inline std::optional<Question> question_from_json(const nlohmann::json& entry, std::string& error) {
    error.clear();
    if (!entry.is_object()) {
        error = "entry is not an object";
        return std::nullopt;
    }
    Question q;
    if (!entry.contains("id") || !entry["id"].is_string() || entry["id"].get<std::string>().empty()) {
        error = "missing id";
        return std::nullopt;
    }
    q.id = entry["id"].get<std::string>();
    if (!entry.contains("type") || !entry["type"].is_string()) {
        error = "missing type";
        return std::nullopt;
    }
    const auto qtype = question_type_from(entry["type"].get<std::string>());
    if (!qtype) {
        error = "unknown type \"" + entry["type"].get<std::string>() + "\"";
        return std::nullopt;
    }
    q.qtype = *qtype;
    if (!entry.contains("body") || !entry["body"].is_string() || entry["body"].get<std::string>().empty()) {
        error = "missing or empty body";
        return std::nullopt;
    }
    q.body = entry["body"].get<std::string>();
    if (entry.contains("snippets")) {
        const auto& snips = entry["snippets"];
        if (snips.is_array()) {
            for (const auto& s : snips) {
                if (s.is_string()) {
                    q.snippets.push_back(s.get<std::string>());
                } else if (s.is_object() && s.contains("text") && s["text"].is_string()) {
                    q.snippets.push_back(s["text"].get<std::string>());
                }
            }
        }
    }
    if (entry.contains("ideal_answer")) q.ideal_answers = detail::string_list(entry["ideal_answer"]);
    std::erase_if(q.ideal_answers, [](const std::string& s) { return s.empty(); });
    if (q.ideal_answers.empty()) {
        error = "missing ideal_answer";
        return std::nullopt;
    }
    if (q.qtype != QuestionType::summary && !entry.contains("exact_answer")) {
        error = "missing exact_answer";
        return std::nullopt;
    }
    if (entry.contains("exact_answer")) {
        q.exact = detail::parse_exact_answer(q.qtype, entry["exact_answer"], error);
        if (!error.empty()) return std::nullopt;
    }
    return q;
}

inline nlohmann::json to_json(const Question& q) {
    nlohmann::json entry;
    entry["id"] = q.id;
    entry["type"] = std::string(to_string(q.qtype));
    entry["body"] = q.body;
    auto snippets = nlohmann::json::array();
    for (const std::string& s : q.snippets) snippets.push_back({{"text", s}});
    entry["snippets"] = std::move(snippets);
    entry["ideal_answer"] = q.ideal_answers;
    switch (q.qtype) {
        case QuestionType::summary: break;
        case QuestionType::yesno: entry["exact_answer"] = q.exact.groups.at(0).at(0); break;
        case QuestionType::factoid: entry["exact_answer"] = q.exact.groups.at(0); break;
        case QuestionType::list: entry["exact_answer"] = q.exact.groups; break;
    }
    return entry;
}

/// Loads a BioASQ-format training file (top-level "questions" array).
/// Entries that fail validation are dropped with a diagnostic appended to
/// `warnings`; the load only fails when nothing valid remains.
inline std::vector<Question> load_dataset(const std::filesystem::path& path,
                                          std::vector<std::string>* warnings = nullptr) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open dataset: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed JSON in " + path.string() + ": " + e.what());
    }
    if (!doc.is_object() || !doc.contains("questions") || !doc["questions"].is_array()) {
        throw std::runtime_error(path.string() + ": expected a top-level \"questions\" array");
    }
    std::vector<Question> questions;
    std::string error;
    std::size_t index = 0;
    for (const auto& entry : doc["questions"]) {
        auto q = question_from_json(entry, error);
        if (q) {
            questions.push_back(std::move(*q));
        } else if (warnings) {
            std::string id = entry.is_object() && entry.contains("id") && entry["id"].is_string()
                                 ? entry["id"].get<std::string>()
                                 : "#" + std::to_string(index);
            warnings->push_back("skipping question " + id + ": " + error);
        }
        ++index;
    }
    if (questions.empty()) throw std::runtime_error(path.string() + ": zero valid questions");
    return questions;
}

/// Deterministic 7:2:1 split: shuffle keyed by seed, then
/// train = floor(0.7n), dev = floor(0.2n), test = remainder.
inline DatasetSplit split_dataset(std::vector<Question> questions, std::uint64_t seed) {
    const std::size_t n = questions.size();
    if (n < 10) throw std::invalid_argument("split_dataset needs at least 10 questions");
    // Hand-rolled Fisher-Yates: std::shuffle is not bit-stable across
    // standard library implementations.
    std::mt19937_64 rng(seed);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j = static_cast<std::size_t>(rng() % (i + 1));
        std::swap(questions[i], questions[j]);
    }
    const std::size_t n_train = n * 7 / 10;
    const std::size_t n_dev = n * 2 / 10;
    DatasetSplit split;
    split.seed = seed;
    split.train.assign(questions.begin(), questions.begin() + n_train);
    split.dev.assign(questions.begin() + n_train, questions.begin() + n_train + n_dev);
    split.test.assign(questions.begin() + n_train + n_dev, questions.end());
    return split;
}

inline nlohmann::json split_manifest(const DatasetSplit& split) {
    auto ids = [](const std::vector<Question>& qs) {
        auto arr = nlohmann::json::array();
        for (const Question& q : qs) arr.push_back(q.id);
        return arr;
    };
    return nlohmann::json{{"seed", split.seed},
                          {"train", ids(split.train)},
                          {"dev", ids(split.dev)},
                          {"test", ids(split.test)}};
}

/// Segments all snippets of a question, in snippet order, into the candidate
/// pool. Exact duplicate raw texts keep their first occurrence. Throws when
/// nothing survives segmentation.
inline std::vector<Sentence> candidate_pool(const Question& q) {
    std::vector<Sentence> pool;
    std::unordered_set<std::string> seen;
    for (std::size_t i = 0; i < q.snippets.size(); ++i) {
        for (Sentence& s : split_sentences(q.snippets[i], i)) {
            if (seen.insert(s.raw).second) pool.push_back(std::move(s));
        }
    }
    if (pool.empty()) throw std::runtime_error("empty candidate pool for question " + q.id);
    return pool;
}

}  // namespace bioqa
