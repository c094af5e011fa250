#include "driftdet/explain.hpp"

#include <algorithm>

namespace driftdet {

namespace {

constexpr const char* kMarkOn = "\x1b[1;31m";
constexpr const char* kMarkOff = "\x1b[0m";

std::string join(const std::vector<std::string>& tokens) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out += ' ';
    out += tokens[i];
  }
  return out;
}

}  // namespace

CleanDocument mask_position(const CleanDocument& doc, std::size_t position) {
  CleanDocument out{doc.id, doc.tokens, {}};
  out.tokens.erase(out.tokens.begin() + static_cast<std::ptrdiff_t>(position));
  out.sentence_text = join(out.tokens);
  return out;
}

SampleExplanation explain_clean(const TrainedPipeline& pipe, const CleanDocument& doc) {
  if (doc.tokens.empty()) throw Error(ErrorCode::EmptyAfterCleaning, "document '" + doc.id + "' has no tokens");
  std::vector<CleanDocument> batch;
  batch.reserve(doc.tokens.size() + 1);
  batch.push_back(doc);
  std::vector<std::size_t> scored_positions;
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    if (doc.tokens.size() == 1) break;
    batch.push_back(mask_position(doc, i));
    scored_positions.push_back(i);
  }
  const auto verdicts = score_clean(pipe, batch);

  SampleExplanation exp;
  exp.doc_id = doc.id;
  exp.base_score = verdicts[0].score.value;
  exp.contributions.resize(doc.tokens.size());
  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    auto& c = exp.contributions[i];
    c.token = doc.tokens[i];
    c.position = i;
    c.degenerate = true;
  }
  for (std::size_t j = 0; j < scored_positions.size(); ++j) {
    auto& c = exp.contributions[scored_positions[j]];
    const auto& v = verdicts[j + 1];
    c.degenerate = v.flag.has_value();
    c.s_masked = c.degenerate ? 0.0 : v.score.value;
  }
  for (auto& c : exp.contributions) c.h = c.s_masked - exp.base_score;
  std::stable_sort(exp.contributions.begin(), exp.contributions.end(),
                   [](const WordContribution& a, const WordContribution& b) { return a.h > b.h; });
  return exp;
}

SampleExplanation explain_sample(const TrainedPipeline& pipe, const Document& doc) {
  return explain_clean(pipe, pipe.clean(doc));
}

Highlights render_highlights(const SampleExplanation& exp, std::size_t top_k) {
  if (top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be at least 1");
  Highlights out;
  out.marked = nlohmann::json::array();
  for (const auto& c : exp.contributions) {
    if (out.positions.size() == top_k || !(c.h > 0.0)) break;
    out.positions.push_back(c.position);
    out.marked.push_back({{"token", c.token}, {"position", c.position}, {"h", c.h}});
  }
  if (out.positions.empty()) out.note = "no positive contributors";

  std::vector<const WordContribution*> by_position(exp.contributions.size());
  for (const auto& c : exp.contributions) {
    if (c.position < by_position.size()) by_position[c.position] = &c;
  }
  for (std::size_t i = 0; i < by_position.size(); ++i) {
    if (!by_position[i]) continue;
    if (i) out.ansi += ' ';
    const bool marked = std::find(out.positions.begin(), out.positions.end(), i) != out.positions.end();
    if (marked) out.ansi += kMarkOn;
    out.ansi += by_position[i]->token;
    if (marked) out.ansi += kMarkOff;
  }
  return out;
}

nlohmann::json explanation_json(const SampleExplanation& exp) {
  nlohmann::json contributions = nlohmann::json::array();
  for (const auto& c : exp.contributions) {
    nlohmann::json row = {{"token", c.token}, {"position", c.position}, {"h", c.h}, {"s_masked", c.s_masked}};
    if (c.degenerate) row["degenerate"] = true;
    contributions.push_back(std::move(row));
  }
  return {{"doc_id", exp.doc_id}, {"base_score", exp.base_score}, {"contributions", contributions}};
}

}  // namespace driftdet
