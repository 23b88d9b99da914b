#pragma once

#include "aisbench/answer.hpp"
#include "aisbench/catalog.hpp"
#include "aisbench/ingest.hpp"
#include "aisbench/transport.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace aisbench {

enum class Method { zsa1, zsa2, zsa3, nlidb };

inline constexpr Method kAllMethods[] = {Method::zsa1, Method::zsa2, Method::zsa3, Method::nlidb};

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view s);
/// Legend label used in report files: Raw, Compressed, Semantic, PostGIS.
std::string_view model_label(Method m);

struct SamplingConfig {
    double temperature = 0.5;
    std::size_t samples = 5;
    std::size_t max_context_tokens = 2'000'000;
    int max_retries = 3; ///< extra attempts after a transient failure
    std::size_t parallelism = 1;

    /// Throws ConfigError for out-of-range values.
    void validate() const;
};

struct Prompt {
    std::string system_preamble;
    std::vector<std::pair<std::string, std::string>> data_blocks; ///< (label, text)
    std::string question;
    std::size_t token_estimate = 0;

    /// The exact bytes sent to the model.
    [[nodiscard]] std::string text() const;
};

/// chars/4, rounded up.
std::size_t estimate_tokens(std::string_view s);

/// The data a ZSA prompt embeds. Compressed and raw bundles share the
/// three-CSV layout; the semantic variant swaps the dynamic CSV for text.
struct PromptData {
    std::string static_csv;
    std::string dynamic_csv; ///< empty for the semantic method
    std::string semantic_text;
    std::string ports_csv;

    static PromptData tabular(const DatasetBundle& bundle);
    static PromptData semantic(const DatasetBundle& bundle, std::string events_text);
};

/// The closing instruction that makes the reply parseable.
std::string answer_instruction(const QuerySpec& spec);

/// Throws ContextOverflowError when the estimate exceeds the budget.
Prompt build_prompt(Method method, const PromptData& data, const QueryInstance& instance,
                    std::size_t max_context_tokens);

/// One sample's outcome: the response text, or the error that exhausted
/// the retry budget.
struct SampleOutcome {
    std::optional<std::string> text;
    std::string error;
    std::string model_id;
    int attempts = 0;
};

/// One request with the retry policy below.
SampleOutcome sample_one(const std::string& prompt, const SamplingConfig& cfg, Transport& transport,
                         const RequestTag& tag, std::size_t index);

/// Exactly cfg.samples outcomes, in index order. Transient failures are
/// retried up to cfg.max_retries times; other TransportErrors propagate.
std::vector<SampleOutcome> sample(const std::string& prompt, const SamplingConfig& cfg, Transport& transport,
                                  const RequestTag& tag);

/// Reads one typed answer out of free text. Never invents a value.
Answer parse_answer(std::string_view text, AnswerKind kind, const std::string& unit, double tolerance = 0.0);
Answer parse_answer(std::string_view text, const QuerySpec& spec);

struct Aggregate {
    Answer answer;
    bool tie = false;
    std::size_t parseable = 0;
};

/// Median for numbers (mean of the middle pair when even), mode over
/// canonical keys otherwise. Mode ties go to the earliest sample.
Aggregate aggregate(const std::vector<Answer>& answers, AnswerKind kind, const std::string& unit = {},
                    double tolerance = 0.0);

} // namespace aisbench
