#include <CLI11.hpp>

#include <charconv>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "driftdet/cli.hpp"
#include "driftdet/eval.hpp"
#include "driftdet/explain.hpp"

namespace driftdet {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_score(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

struct Flags {
  std::optional<std::string> config;
  std::optional<std::string> corpus, payload, model_dir, out, backend, model, vector_file, endpoint;
  std::optional<std::string> format, text_column, label_column, id_column, payload_format, payload_text_column;
  std::optional<std::string> chunker, csv_out, json_out, pair, thresholds;
  std::optional<std::size_t> dim, top_k, top_patterns, epochs;
  std::optional<std::uint64_t> seed;
  std::optional<double> threshold, split, new_pattern, rule_train_max, rule_payload_min;
  bool json = false;
};

CorpusFormat parse_format(const std::string& f) {
  if (f == "plain") return CorpusFormat::PlainLines;
  if (f == "csv") return CorpusFormat::Csv;
  throw Error(ErrorCode::ConfigError, "format must be 'plain' or 'csv'");
}

std::vector<double> parse_thresholds(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    double v = 0.0;
    const auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
      throw Error(ErrorCode::ConfigError, "bad threshold '" + item + "'");
    }
    out.push_back(v);
  }
  return out;
}

std::optional<std::string> provider_url_override() {
  if (const char* url = std::getenv("DRIFTDET_PROVIDER_URL"); url && *url) return std::string(url);
  return std::nullopt;
}

// Config file first, then flags on top.
RunConfig resolve(const Flags& f) {
  RunConfig c = f.config ? load_run_config(*f.config) : RunConfig{};
  auto& p = c.pipeline;
  if (f.backend) p.backend.kind = backend_kind_from_string(*f.backend);
  if (f.model) p.model_kind = model_kind_from_string(*f.model);
  if (f.vector_file) p.vector_file = *f.vector_file;
  if (f.endpoint) p.backend.endpoint = *f.endpoint;
  if (auto url = provider_url_override(); url && p.backend.is_remote()) p.backend.endpoint = *url;
  if (f.dim) p.backend.dim = *f.dim;
  if (f.seed) p.seed = *f.seed;
  if (f.threshold) p.threshold = *f.threshold;
  if (f.epochs) {
    p.skipgram.epochs = *f.epochs;
    p.vae.epochs = *f.epochs;
  }
  if (f.corpus) c.train_corpus = *f.corpus;
  if (f.payload) c.payload_path = *f.payload;
  if (f.model_dir) c.model_dir = *f.model_dir;
  if (f.out) c.model_dir = *f.out;
  if (f.format) c.corpus.format = parse_format(*f.format);
  if (f.text_column) c.corpus.text_column = *f.text_column;
  if (f.label_column) c.corpus.label_column = *f.label_column;
  if (f.id_column) c.corpus.id_column = *f.id_column;
  if (f.payload_format) c.payload.format = parse_format(*f.payload_format);
  if (f.payload_text_column) c.payload.text_column = *f.payload_text_column;
  if (f.chunker) c.chunker = *f.chunker;
  if (f.csv_out) c.csv_out = *f.csv_out;
  if (f.json_out) c.json_out = *f.json_out;
  if (f.pair) c.pair = *f.pair;
  if (f.thresholds) c.thresholds = parse_thresholds(*f.thresholds);
  if (f.split) c.split_fraction = *f.split;
  if (f.new_pattern) c.stats.new_pattern = *f.new_pattern;
  if (f.rule_train_max) c.stats.rule_train_max = *f.rule_train_max;
  if (f.rule_payload_min) c.stats.rule_payload_min = *f.rule_payload_min;
  if (f.top_patterns) c.stats.top_patterns = *f.top_patterns;
  return c;
}

const fs::path& require(const std::optional<fs::path>& p, const char* what) {
  if (!p) throw Error(ErrorCode::ConfigError, std::string("missing ") + what);
  return *p;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  out << text;
}

json verdict_json(const DriftVerdict& v) {
  json j = {{"schema_version", 1},
            {"doc_id", v.doc_id},
            {"score", v.score.value},
            {"drifted", v.drifted},
            {"threshold", v.threshold}};
  if (v.flag) j["flag"] = to_string(*v.flag);
  return j;
}

std::string verdict_line(const DriftVerdict& v) {
  std::string line = v.doc_id + ": " + (v.drifted ? "Drifted, " : "Not drifted, ") + format_score(v.score.value);
  if (v.flag) line += " [" + std::string(to_string(*v.flag)) + "]";
  return line;
}

TrainedPipeline load_for_scoring(const RunConfig& c) {
  return load_pipeline(require(c.model_dir, "--model-dir"), c.provider, provider_url_override());
}

int cmd_train(const RunConfig& c, std::ostream& out) {
  const auto docs = load_corpus(require(c.train_corpus, "--corpus"), c.corpus);
  const auto t0 = std::chrono::steady_clock::now();
  const auto pipe = train_pipeline(docs, c.pipeline, c.provider);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto& dir = require(c.model_dir, "--out");
  save_pipeline(pipe, dir);
  const auto& m = pipe.metadata();
  out << "model: " << to_string(pipe.config().model_kind) << "\n"
      << "backend: " << to_string(pipe.config().backend.kind) << "\n"
      << "N: " << m.n_used << " (of " << m.n_documents << "; dropped " << m.dropped_cleaning << " empty, "
      << m.dropped_embedding << " unembeddable)\n"
      << "dim: " << m.dim << "\n"
      << "train_s: " << seconds << "\n"
      << "saved: " << dir.string() << "\n";
  return kExitOk;
}

int cmd_score(const RunConfig& c, bool as_json, std::ostream& out, std::ostream& err) {
  const auto pipe = load_for_scoring(c);
  const auto docs = load_corpus(require(c.payload_path, "--payload"), c.payload);
  const auto verdicts = score_payloads(pipe, docs);
  std::size_t drifted = 0;
  for (const auto& v : verdicts) {
    drifted += v.drifted;
    if (as_json) {
      out << verdict_json(v).dump() << "\n";
    } else {
      out << verdict_line(v) << "\n";
    }
  }
  std::ostream& summary = as_json ? err : out;
  summary << "drift rate: " << drifted << "/" << verdicts.size() << " ("
          << format_score(100.0 * static_cast<double>(drifted) / static_cast<double>(verdicts.size())) << "%)\n";
  return kExitOk;
}

int cmd_explain(const RunConfig& c, std::size_t top_k, bool as_json, std::ostream& out) {
  const auto pipe = load_for_scoring(c);
  const auto docs = load_corpus(require(c.payload_path, "--payload"), c.payload);
  const auto verdicts = score_payloads(pipe, docs);
  for (std::size_t i = 0; i < docs.size(); ++i) {
    const auto& v = verdicts[i];
    if (!v.drifted) {
      if (as_json) {
        out << json{{"schema_version", 1}, {"doc_id", v.doc_id}, {"drifted", false}, {"score", v.score.value},
                    {"note", "not drifted, no explanation"}}
                   .dump()
            << "\n";
      } else {
        out << v.doc_id << ": not drifted, no explanation (" << format_score(v.score.value) << ")\n";
      }
      continue;
    }
    if (v.flag == ErrorCode::EmptyAfterCleaning) {
      const std::string note = "no tokens left after cleaning";
      if (as_json) {
        out << json{{"schema_version", 1}, {"doc_id", v.doc_id}, {"drifted", true}, {"score", v.score.value},
                    {"note", note}}
                   .dump()
            << "\n";
      } else {
        out << verdict_line(v) << "\n  " << note << "\n";
      }
      continue;
    }
    const auto exp = explain_sample(pipe, docs[i]);
    const auto hl = render_highlights(exp, top_k);
    if (as_json) {
      json j = {{"schema_version", 1}, {"doc_id", v.doc_id},         {"drifted", true},
                {"score", v.score.value}, {"explanation", explanation_json(exp)}, {"highlights", hl.marked}};
      if (hl.note) j["note"] = *hl.note;
      out << j.dump() << "\n";
    } else {
      out << verdict_line(v) << "\n  " << hl.ansi << "\n  " << hl.marked.dump() << "\n";
      if (hl.note) out << "  note: " << *hl.note << "\n";
    }
  }
  return kExitOk;
}

int cmd_stats(const RunConfig& c, const std::string& train_path, const std::string& payload_path, bool as_json,
              std::ostream& out) {
  const auto train = load_annotated_corpus(train_path);
  const auto payload = load_annotated_corpus(payload_path);
  const auto rules = generate_sentence_rules();
  std::optional<BigramChunker> chunker;
  std::string chunker_note;
  if (c.chunker) {
    if (fs::is_regular_file(*c.chunker)) {
      chunker = train_bigram_chunker(*c.chunker);
    } else {
      chunker_note = "chunker file " + c.chunker->string() + " not found; chunk density skipped";
    }
  }
  const BigramChunker* ck = chunker ? &*chunker : nullptr;
  const auto train_stats = compute_stats(train, rules, ck);
  const auto payload_stats = compute_stats(payload, rules, ck);
  auto report = compare_stats(train_stats, payload_stats, rules, c.stats);
  if (!chunker_note.empty()) report.notes = {chunker_note};

  const json j = report_json(report);
  if (c.json_out) write_text_file(*c.json_out, j.dump(2) + "\n");
  if (as_json) {
    out << j.dump() << "\n";
  } else {
    out << report_text(report);
  }
  return kExitOk;
}

int cmd_eval(const RunConfig& c, bool as_json, std::ostream& out) {
  const auto iid = load_corpus(require(c.train_corpus, "--iid"), c.corpus);
  const auto ood = load_corpus(require(c.payload_path, "--ood"), c.payload);
  const auto result = run_benchmark(iid, ood, c.pipeline, c.thresholds, c.split_fraction, c.provider);
  const std::string csv = benchmark_csv(result, c.pair, c.pipeline);
  const json j = benchmark_json(result, c.pair, c.pipeline);
  if (c.csv_out) write_text_file(*c.csv_out, csv);
  if (c.json_out) write_text_file(*c.json_out, j.dump(2) + "\n");
  if (as_json) {
    out << j.dump() << "\n";
  } else {
    out << csv;
  }
  return kExitOk;
}

void add_pipeline_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  cmd->add_option("--backend", f.backend, "native-skipgram | vector-file | remote-sentence | remote-token-avg");
  cmd->add_option("--model", f.model, "gmm | vae | centroid");
  cmd->add_option("--vector-file", f.vector_file, "word2vec/GloVe text vectors");
  cmd->add_option("--endpoint", f.endpoint, "remote provider base URL");
  cmd->add_option("--dim", f.dim, "embedding dimension")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "random seed");
  cmd->add_option("--threshold", f.threshold, "drift threshold in (0, 1)");
  cmd->add_option("--epochs", f.epochs, "skip-gram / VAE epochs")->check(CLI::PositiveNumber);
}

void add_corpus_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--format", f.format, "training corpus format: plain | csv");
  cmd->add_option("--text-column", f.text_column, "CSV text column");
  cmd->add_option("--label-column", f.label_column, "CSV label column");
  cmd->add_option("--id-column", f.id_column, "CSV id column");
}

void add_payload_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--payload-format", f.payload_format, "payload format: plain | csv");
  cmd->add_option("--payload-text-column", f.payload_text_column, "payload CSV text column");
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Text drift detection against a training corpus", "driftdet"};
  app.require_subcommand(1);
  Flags f;
  std::size_t top_k = 3;
  std::string stats_train, stats_payload;

  auto* train = app.add_subcommand("train", "train and save a drift pipeline");
  add_pipeline_flags(train, f);
  add_corpus_flags(train, f);
  train->add_option("--corpus", f.corpus, "training corpus");
  train->add_option("--out", f.out, "model directory to write");

  auto* score = app.add_subcommand("score", "score payload documents");
  score->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  score->add_option("--model-dir", f.model_dir, "trained model directory");
  score->add_option("--payload", f.payload, "payload corpus");
  add_payload_flags(score, f);
  score->add_flag("--json", f.json, "one JSON object per document");

  auto* explain = app.add_subcommand("explain", "word-masking explanations for drifted documents");
  explain->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  explain->add_option("--model-dir", f.model_dir, "trained model directory");
  explain->add_option("--payload", f.payload, "payload corpus");
  add_payload_flags(explain, f);
  explain->add_option("--top-k", top_k, "words to highlight")->check(CLI::PositiveNumber);
  explain->add_flag("--json", f.json, "one JSON object per document");

  auto* stats = app.add_subcommand("stats", "syntactic drift statistics over CoNLL-U corpora");
  stats->add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile);
  stats->add_option("train", stats_train, "training CoNLL-U file")->required();
  stats->add_option("payload", stats_payload, "payload CoNLL-U file")->required();
  stats->add_option("--chunker", f.chunker, "CoNLL-2000 chunker training file");
  stats->add_option("--new-pattern-threshold", f.new_pattern, "train likelihood below which a pattern is new");
  stats->add_option("--rule-train-max", f.rule_train_max, "train probability below which a rule is new");
  stats->add_option("--rule-payload-min", f.rule_payload_min, "payload probability a new rule must reach");
  stats->add_option("--top-patterns", f.top_patterns, "rows in the side-by-side pattern table");
  stats->add_option("--json-out", f.json_out, "also write the JSON report here");
  stats->add_flag("--json", f.json, "emit the JSON report on stdout");

  auto* eval = app.add_subcommand("eval", "stratified in-distribution vs OOD benchmark");
  add_pipeline_flags(eval, f);
  add_corpus_flags(eval, f);
  add_payload_flags(eval, f);
  eval->add_option("--iid", f.corpus, "in-distribution corpus (split into train / held-out)");
  eval->add_option("--ood", f.payload, "out-of-distribution corpus");
  eval->add_option("--thresholds", f.thresholds, "comma-separated thresholds to report");
  eval->add_option("--split", f.split, "train fraction per class");
  eval->add_option("--pair", f.pair, "name for the CSV pair column");
  eval->add_option("--csv-out", f.csv_out, "write CSV here");
  eval->add_option("--json-out", f.json_out, "write JSON here");
  eval->add_flag("--json", f.json, "emit JSON on stdout instead of CSV");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    const RunConfig c = resolve(f);
    if (*train) return cmd_train(c, out);
    if (*score) return cmd_score(c, f.json, out, err);
    if (*explain) return cmd_explain(c, top_k, f.json, out);
    if (*stats) return cmd_stats(c, stats_train, stats_payload, f.json, out);
    if (*eval) return cmd_eval(c, f.json, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitUsage;
}

}  // namespace driftdet
