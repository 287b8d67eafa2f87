#pragma once

#include <span>
#include <string>
#include <string_view>

namespace entikit::prompts {

// System prompts for the generation pipeline. These are fixed protocol
// strings; generation quality and reproducibility depend on them being
// byte-stable, so do not reformat.
extern const std::string_view kEntityExtractionSystem;
extern const std::string_view kRelationPairSystem;
extern const std::string_view kRelationTripletSystem;
extern const std::string_view kRephraseEasySystem;
extern const std::string_view kRephraseMediumSystem;
extern const std::string_view kRephraseHardSystem;
extern const std::string_view kQaSftSystem;

/// Five-shot chain-of-thought preamble for multiple-choice QA; ends with the
/// "## Example 6" header that the question block completes.
extern const std::string_view kQaFiveShot;

// Claim-based summarization metric prompts (JSON wire contracts).
extern const std::string_view kClaimSplitSystem;
extern const std::string_view kClaimJudgeSystem;

/// Appended to the user message when a JSON response failed to parse.
extern const std::string_view kJsonRetrySuffix;

// User-message builders.
std::string entity_extraction_user(std::string_view document_text);
std::string relation_user(std::string_view document_text,
                          std::span<const std::string> entities);
std::string article_user(std::string_view title, int year,
                         std::string_view content);

// Summarization presets.
std::string summary_prompt_short(std::string_view title, std::string_view author);
std::string summary_prompt_long(std::string_view title, std::string_view author);

}  // namespace entikit::prompts
