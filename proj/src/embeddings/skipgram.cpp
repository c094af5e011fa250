#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <random>
#include <unordered_map>

#include "driftdet/embeddings.hpp"

namespace driftdet {

namespace {

struct Vocabulary {
  std::vector<std::string> words;
  std::vector<std::uint64_t> counts;
  std::unordered_map<std::string, std::uint32_t> index;
  std::size_t min_count = 0;
};

Vocabulary build_vocabulary(std::span<const CleanDocument> docs, std::size_t min_count) {
  std::map<std::string, std::uint64_t> freq;
  for (const auto& d : docs) {
    for (const auto& t : d.tokens) ++freq[t];
  }
  if (freq.size() < 2) {
    throw Error(ErrorCode::DegenerateVocabulary,
                "corpus has " + std::to_string(freq.size()) + " distinct word(s); need at least 2");
  }

  std::vector<std::pair<std::string, std::uint64_t>> kept;
  auto collect = [&](std::size_t threshold) {
    kept.clear();
    for (const auto& [w, c] : freq) {
      if (c >= threshold) kept.emplace_back(w, c);
    }
  };
  collect(min_count);
  std::size_t used_min = min_count;
  if (kept.size() < 2) {
    collect(1);
    used_min = 1;
  }
  // Frequency-descending, then lexicographic: deterministic row order.
  std::stable_sort(kept.begin(), kept.end(), [](const auto& a, const auto& b) { return a.second > b.second; });

  Vocabulary v;
  v.min_count = used_min;
  for (auto& [w, c] : kept) {
    v.index.emplace(w, static_cast<std::uint32_t>(v.words.size()));
    v.words.push_back(w);
    v.counts.push_back(c);
  }
  return v;
}

class NegativeSampler {
 public:
  explicit NegativeSampler(const std::vector<std::uint64_t>& counts) {
    cumulative_.reserve(counts.size());
    double total = 0.0;
    for (auto c : counts) {
      total += std::pow(static_cast<double>(c), 0.75);
      cumulative_.push_back(total);
    }
    for (double& c : cumulative_) c /= total;
  }

  template <typename Rng>
  std::uint32_t operator()(Rng& rng) const {
    const double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
    const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
    return static_cast<std::uint32_t>(std::min(idx, cumulative_.size() - 1));
  }

 private:
  std::vector<double> cumulative_;
};

inline float dot(const float* a, const float* b, std::size_t n) {
  float s = 0.0f;
#pragma omp simd reduction(+ : s)
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// -log(sigmoid(x)), stable for large |x|.
inline double neg_log_sigmoid(double x) { return x >= 0 ? std::log1p(std::exp(-x)) : -x + std::log1p(std::exp(x)); }

struct ProbeTriple {
  std::uint32_t center;
  std::uint32_t context;
  std::vector<std::uint32_t> negatives;
};

double probe_loss(const std::vector<ProbeTriple>& probe, const std::vector<float>& in_vecs,
                  const std::vector<float>& out_vecs, std::size_t dim) {
  if (probe.empty()) return 0.0;
  std::vector<double> losses(probe.size());
  const auto n = static_cast<std::int64_t>(probe.size());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const auto& t = probe[static_cast<std::size_t>(i)];
    const float* v = in_vecs.data() + t.center * dim;
    double l = neg_log_sigmoid(dot(v, out_vecs.data() + t.context * dim, dim));
    for (auto neg : t.negatives) l += neg_log_sigmoid(-dot(v, out_vecs.data() + neg * dim, dim));
    losses[static_cast<std::size_t>(i)] = l;
  }
  double total = 0.0;
  for (double l : losses) total += l;
  return total / static_cast<double>(probe.size());
}

}  // namespace

WordVectorTable train_skipgram(std::span<const CleanDocument> docs, const SkipGramOptions& options,
                               SkipGramReport* report) {
  if (options.dim == 0) throw Error(ErrorCode::InvalidArgument, "skip-gram dimension must be positive");
  const bool has_usable = std::any_of(docs.begin(), docs.end(), [](const auto& d) { return d.tokens.size() >= 2; });
  if (docs.empty() || !has_usable) {
    throw Error(ErrorCode::EmptyCorpus, "skip-gram needs at least one document with two tokens");
  }

  const Vocabulary vocab = build_vocabulary(docs, options.min_count);
  const std::size_t dim = options.dim;
  const std::size_t vsize = vocab.words.size();

  std::vector<std::vector<std::uint32_t>> sentences;
  sentences.reserve(docs.size());
  std::uint64_t total_tokens = 0;
  for (const auto& d : docs) {
    std::vector<std::uint32_t> ids;
    for (const auto& t : d.tokens) {
      if (auto it = vocab.index.find(t); it != vocab.index.end()) ids.push_back(it->second);
    }
    total_tokens += ids.size();
    if (ids.size() >= 2) sentences.push_back(std::move(ids));
  }

  std::mt19937_64 rng(options.seed);
  std::vector<float> in_vecs(vsize * dim);
  std::vector<float> out_vecs(vsize * dim, 0.0f);
  {
    std::uniform_real_distribution<float> init(-0.5f / static_cast<float>(dim), 0.5f / static_cast<float>(dim));
    for (float& w : in_vecs) w = init(rng);
  }
  const NegativeSampler sampler(vocab.counts);

  // Fixed probe set, drawn from its own stream so training randomness is
  // unaffected by probe size.
  std::vector<ProbeTriple> probe;
  {
    std::mt19937_64 probe_rng(options.seed ^ 0x9E3779B97F4A7C15ULL);
    constexpr std::size_t kProbeSize = 5000;
    std::uniform_int_distribution<std::size_t> pick_sentence(0, sentences.empty() ? 0 : sentences.size() - 1);
    for (std::size_t i = 0; i < kProbeSize && !sentences.empty(); ++i) {
      const auto& s = sentences[pick_sentence(probe_rng)];
      const std::size_t c = std::uniform_int_distribution<std::size_t>(0, s.size() - 1)(probe_rng);
      const std::size_t lo = c >= options.window ? c - options.window : 0;
      const std::size_t hi = std::min(s.size() - 1, c + options.window);
      std::size_t o = c;
      while (o == c) o = std::uniform_int_distribution<std::size_t>(lo, hi)(probe_rng);
      ProbeTriple t{s[c], s[o], {}};
      for (std::size_t k = 0; k < options.negatives; ++k) t.negatives.push_back(sampler(probe_rng));
      probe.push_back(std::move(t));
    }
  }

  if (report) {
    report->initial_loss = probe_loss(probe, in_vecs, out_vecs, dim);
    report->epoch_loss.clear();
    report->vocabulary_size = vsize;
    report->min_count_used = vocab.min_count;
  }

  const double lr0 = options.initial_learning_rate;
  const double planned = static_cast<double>(std::max<std::uint64_t>(1, options.epochs * total_tokens));
  std::uint64_t processed = 0;
  std::vector<float> grad_in(dim);
  std::uniform_int_distribution<std::size_t> shrink(1, std::max<std::size_t>(1, options.window));

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    for (const auto& sent : sentences) {
      for (std::size_t c = 0; c < sent.size(); ++c, ++processed) {
        const double lr = lr0 * std::max(1e-4, 1.0 - static_cast<double>(processed) / planned);
        const std::size_t b = shrink(rng);
        const std::size_t lo = c >= b ? c - b : 0;
        const std::size_t hi = std::min(sent.size() - 1, c + b);
        float* v = in_vecs.data() + sent[c] * dim;
        for (std::size_t o = lo; o <= hi; ++o) {
          if (o == c) continue;
          std::fill(grad_in.begin(), grad_in.end(), 0.0f);
          for (std::size_t k = 0; k <= options.negatives; ++k) {
            std::uint32_t target;
            float label;
            if (k == 0) {
              target = sent[o];
              label = 1.0f;
            } else {
              target = sampler(rng);
              if (target == sent[o]) continue;
              label = 0.0f;
            }
            float* u = out_vecs.data() + target * dim;
            const double f = sigmoid(dot(v, u, dim));
            const auto g = static_cast<float>((label - f) * lr);
            for (std::size_t j = 0; j < dim; ++j) grad_in[j] += g * u[j];
            for (std::size_t j = 0; j < dim; ++j) u[j] += g * v[j];
          }
          for (std::size_t j = 0; j < dim; ++j) v[j] += grad_in[j];
        }
      }
    }
    if (report) report->epoch_loss.push_back(probe_loss(probe, in_vecs, out_vecs, dim));
  }

  return WordVectorTable(vocab.words, std::move(in_vecs), dim);
}

}  // namespace driftdet
