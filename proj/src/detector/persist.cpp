#include <openssl/evp.h>

#include <bit>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include "driftdet/config_json.hpp"
#include "driftdet/detector.hpp"

namespace driftdet {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kManifest = "manifest.json";
constexpr const char* kTensors = "tensors.bin";
constexpr const char* kVocab = "vocab.txt";

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1) {
    throw Error(ErrorCode::InvalidArgument, "SHA-256 computation failed");
  }
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(digest[i]);
  return out.str();
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::MissingFile, path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::FileNotFound, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::FileNotFound, "write failed: " + path.string());
}

// Little-endian float32 arrays, appended in index order.
class TensorWriter {
 public:
  template <typename Range>
  void add(const std::string& name, std::size_t rows, std::size_t cols, const Range& values) {
    index_.push_back({{"name", name}, {"rows", rows}, {"cols", cols}, {"offset", count_}});
    for (auto v : values) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(v));
      for (int b = 0; b < 4; ++b) bytes_.push_back(static_cast<char>((bits >> (8 * b)) & 0xFFu));
      ++count_;
    }
  }
  const std::string& bytes() const { return bytes_; }
  const json& index() const { return index_; }

 private:
  std::string bytes_;
  json index_ = json::array();
  std::size_t count_ = 0;
};

class TensorReader {
 public:
  TensorReader(std::string bytes, json index) : bytes_(std::move(bytes)), index_(std::move(index)) {
    if (bytes_.size() % 4 != 0) throw Error(ErrorCode::FormatError, "tensors.bin size is not a multiple of 4");
  }

  std::vector<double> get(const std::string& name, std::size_t rows, std::size_t cols) const {
    for (const auto& t : index_) {
      if (t.value("name", "") != name) continue;
      if (t.at("rows").get<std::size_t>() != rows || t.at("cols").get<std::size_t>() != cols) {
        throw Error(ErrorCode::FormatError, "tensor " + name + " has unexpected shape");
      }
      const auto offset = t.at("offset").get<std::size_t>();
      const std::size_t n = rows * cols;
      if ((offset + n) * 4 > bytes_.size()) throw Error(ErrorCode::FormatError, "tensor " + name + " out of range");
      std::vector<double> out(n);
      for (std::size_t i = 0; i < n; ++i) {
        std::uint32_t bits = 0;
        for (int b = 0; b < 4; ++b) {
          bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes_[(offset + i) * 4 + b])) << (8 * b);
        }
        out[i] = static_cast<double>(std::bit_cast<float>(bits));
      }
      return out;
    }
    throw Error(ErrorCode::FormatError, "tensor " + name + " missing from manifest");
  }

 private:
  std::string bytes_;
  json index_;
};

json metadata_json(const TrainingMetadata& m) {
  return {{"n_documents", m.n_documents},         {"n_used", m.n_used},
          {"dropped_cleaning", m.dropped_cleaning}, {"dropped_embedding", m.dropped_embedding},
          {"dim", m.dim},                          {"created_at", m.created_at}};
}

}  // namespace

void save_pipeline(const TrainedPipeline& pipe, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::FileNotFound, "cannot create " + dir.string() + ": " + ec.message());

  TensorWriter tensors;
  json files = json::object();
  if (const auto* wv = dynamic_cast<const WordVectorBackend*>(&pipe.backend())) {
    const auto& table = wv->table();
    std::string vocab;
    for (const auto& w : table.words()) vocab += w + "\n";
    write_file(dir / kVocab, vocab);
    files[kVocab] = sha256_hex(vocab);
    tensors.add("word_vectors", table.size(), table.dim(), table.matrix());
  }

  json model;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, GmmModel>) {
          model = {{"kind", "gmm"},         {"n_components", m.n_components}, {"dim", m.dim},
                   {"weights", m.weights},  {"train_min", m.train_min},       {"train_max", m.train_max}};
          tensors.add("gmm.means", m.means.rows(), m.means.cols(), m.means.data());
          tensors.add("gmm.variances", m.variances.rows(), m.variances.cols(), m.variances.data());
        } else if constexpr (std::is_same_v<T, VaeModel>) {
          model = {{"kind", "vae"}, {"dim", m.dim()}, {"hidden", m.hidden()}, {"latent", m.latent()}};
          tensors.add("vae.parameters", 1, m.parameters().size(), m.parameters());
        } else {
          model = {{"kind", "centroid"}, {"dim", m.dim()}};
          tensors.add("centroid", 1, m.dim(), m.centroid);
        }
      },
      pipe.model());

  write_file(dir / kTensors, tensors.bytes());
  files[kTensors] = sha256_hex(tensors.bytes());

  const json manifest = {
      {"format_version", kFormatVersion}, {"config", to_json(pipe.config())}, {"metadata", metadata_json(pipe.metadata())},
      {"model", model},                   {"tensors", tensors.index()},       {"files", files},
  };
  write_file(dir / kManifest, manifest.dump(2) + "\n");
}

TrainedPipeline load_pipeline(const fs::path& dir, const ProviderOptions& provider,
                              const std::optional<std::string>& endpoint_override) {
  if (!fs::is_regular_file(dir / kManifest)) throw Error(ErrorCode::MissingFile, (dir / kManifest).string());
  json manifest;
  try {
    manifest = json::parse(read_file(dir / kManifest));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("manifest.json: ") + e.what());
  }
  if (!manifest.is_object() || !manifest.contains("format_version") || !manifest["format_version"].is_number_integer()) {
    throw Error(ErrorCode::FormatError, "manifest.json lacks format_version");
  }
  if (const int v = manifest["format_version"].get<int>(); v != kFormatVersion) {
    throw Error(ErrorCode::VersionUnsupported, "format_version " + std::to_string(v) + " (supported: " +
                                                   std::to_string(kFormatVersion) + ")");
  }

  try {
    std::map<std::string, std::string> contents;
    for (const auto& [name, digest] : manifest.at("files").items()) {
      const fs::path p = dir / name;
      if (!fs::is_regular_file(p)) throw Error(ErrorCode::MissingFile, p.string());
      std::string bytes = read_file(p);
      if (sha256_hex(bytes) != digest.get<std::string>()) {
        throw Error(ErrorCode::ChecksumMismatch, name + " does not match its recorded SHA-256");
      }
      contents.emplace(name, std::move(bytes));
    }
    if (!contents.count(kTensors)) throw Error(ErrorCode::MissingFile, "manifest does not list tensors.bin");
    const TensorReader tensors(contents[kTensors], manifest.at("tensors"));

    PipelineConfig config = pipeline_config_from_json(manifest.at("config"));
    if (endpoint_override && config.backend.is_remote()) config.backend.endpoint = *endpoint_override;

    TrainingMetadata meta;
    const auto& mj = manifest.at("metadata");
    meta.n_documents = mj.at("n_documents").get<std::size_t>();
    meta.n_used = mj.at("n_used").get<std::size_t>();
    meta.dropped_cleaning = mj.at("dropped_cleaning").get<std::size_t>();
    meta.dropped_embedding = mj.at("dropped_embedding").get<std::size_t>();
    meta.dim = mj.at("dim").get<std::size_t>();
    meta.created_at = mj.at("created_at").get<std::string>();

    std::shared_ptr<const EmbeddingBackend> backend;
    if (config.backend.is_remote()) {
      backend = std::make_shared<RemoteBackend>(config.backend, provider);
    } else {
      if (!contents.count(kVocab)) throw Error(ErrorCode::MissingFile, "manifest does not list vocab.txt");
      std::vector<std::string> words;
      std::istringstream vs(contents[kVocab]);
      for (std::string w; std::getline(vs, w);) words.push_back(w);
      const auto values = tensors.get("word_vectors", words.size(), config.backend.dim);
      std::vector<float> matrix(values.begin(), values.end());
      backend = std::make_shared<WordVectorBackend>(
          config.backend.kind,
          std::make_shared<const WordVectorTable>(std::move(words), std::move(matrix), config.backend.dim));
    }

    const auto& model = manifest.at("model");
    const auto kind = model_kind_from_string(model.at("kind").get<std::string>());
    const auto dim = model.at("dim").get<std::size_t>();
    DensityModel density;
    switch (kind) {
      case ModelKind::Gmm: {
        GmmModel g;
        g.n_components = model.at("n_components").get<std::size_t>();
        g.dim = dim;
        g.weights = model.at("weights").get<std::vector<double>>();
        g.train_min = model.at("train_min").get<double>();
        g.train_max = model.at("train_max").get<double>();
        g.means = Matrix(g.n_components, dim, tensors.get("gmm.means", g.n_components, dim));
        g.variances = Matrix(g.n_components, dim, tensors.get("gmm.variances", g.n_components, dim));
        if (g.weights.size() != g.n_components) throw Error(ErrorCode::FormatError, "GMM weight count mismatch");
        density = std::move(g);
        break;
      }
      case ModelKind::Vae: {
        VaeModel v(dim, model.at("hidden").get<std::size_t>(), model.at("latent").get<std::size_t>());
        const auto params = tensors.get("vae.parameters", 1, v.parameters().size());
        std::copy(params.begin(), params.end(), v.parameters().begin());
        density = std::move(v);
        break;
      }
      case ModelKind::Centroid: density = CentroidModel{tensors.get("centroid", 1, dim)}; break;
    }
    if (model_dim(density) != backend->dim()) {
      throw Error(ErrorCode::DimensionMismatch, "model dim " + std::to_string(model_dim(density)) +
                                                    " != backend dim " + std::to_string(backend->dim()));
    }
    return TrainedPipeline(std::move(config), std::move(backend), std::move(density), std::move(meta));
  } catch (const json::exception& e) {
    throw Error(ErrorCode::FormatError, std::string("manifest.json: ") + e.what());
  }
}

}  // namespace driftdet
