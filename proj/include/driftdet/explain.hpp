#pragma once

// Per-sample drift explanations by deleting one token position at a time.

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "driftdet/detector.hpp"

namespace driftdet {

struct WordContribution {
  std::string token;
  std::size_t position = 0;
  double h = 0.0;          // s_masked - base_score
  double s_masked = 0.0;
  bool degenerate = false; // masking left nothing embeddable; s_masked = 0
};

struct SampleExplanation {
  std::string doc_id;
  double base_score = 0.0;
  // Descending h; equal h keeps position order.
  std::vector<WordContribution> contributions;
};

/// Masks every token position of the cleaned document; all masked variants
/// are embedded in one batch, so remote backends see batched requests.
SampleExplanation explain_sample(const TrainedPipeline& pipe, const Document& doc);
SampleExplanation explain_clean(const TrainedPipeline& pipe, const CleanDocument& doc);

/// `doc` with the token at `position` deleted.
CleanDocument mask_position(const CleanDocument& doc, std::size_t position);

struct Highlights {
  std::string ansi;                     // tokens in position order, contributors in bold red
  nlohmann::json marked;                // [{"token","position","h"}...]
  std::vector<std::size_t> positions;   // marked positions, by descending h
  std::optional<std::string> note;
};

/// Marks up to `top_k` tokens with positive h. Throws InvalidArgument for top_k 0.
Highlights render_highlights(const SampleExplanation& exp, std::size_t top_k);

nlohmann::json explanation_json(const SampleExplanation& exp);

}  // namespace driftdet
