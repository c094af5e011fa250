#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "driftdet/density.hpp"
#include "driftdet/error.hpp"
#include "driftdet/kernels.hpp"

namespace driftdet {

namespace k = kernels::omp;

VaeModel::VaeModel(std::size_t dim, std::size_t hidden, std::size_t latent)
    : dim_(dim), hidden_(hidden), latent_(latent) {
  if (dim == 0 || hidden == 0 || latent == 0) throw Error(ErrorCode::InvalidArgument, "VAE sizes must be positive");
  const std::size_t shapes[LayerCount][2] = {
      {hidden, dim}, {latent, hidden}, {latent, hidden}, {hidden, latent}, {dim, hidden}};
  std::size_t offset = 0;
  for (int id = 0; id < LayerCount; ++id) {
    auto& l = layers_[id];
    l.out = shapes[id][0];
    l.in = shapes[id][1];
    l.weight_offset = offset;
    offset += l.out * l.in;
    l.bias_offset = offset;
    offset += l.out;
  }
  params_.assign(offset, 0.0);
}

std::span<const double> VaeModel::weight(LayerId id) const {
  const auto& l = layers_[id];
  return std::span<const double>(params_).subspan(l.weight_offset, l.out * l.in);
}

std::span<const double> VaeModel::bias(LayerId id) const {
  const auto& l = layers_[id];
  return std::span<const double>(params_).subspan(l.bias_offset, l.out);
}

namespace {

using Id = VaeModel::LayerId;

struct Forward {
  Matrix a1, h1, mu, logvar, z, a2, h2, xhat;
  std::vector<double> recon, kl;
};

void relu(const Matrix& a, Matrix& h) {
  h = a;
  for (double& v : h.data()) v = std::max(v, 0.0);
}

Forward forward(const VaeModel& m, const Matrix& x, const Matrix* noise) {
  Forward f;
  k::affine(x, m.weight(Id::EncHidden), m.bias(Id::EncHidden), f.a1);
  relu(f.a1, f.h1);
  k::affine(f.h1, m.weight(Id::EncMu), m.bias(Id::EncMu), f.mu);
  k::affine(f.h1, m.weight(Id::EncLogvar), m.bias(Id::EncLogvar), f.logvar);
  f.z = f.mu;
  if (noise) {
    for (std::size_t i = 0; i < f.z.rows(); ++i) {
      for (std::size_t j = 0; j < f.z.cols(); ++j) f.z(i, j) += std::exp(0.5 * f.logvar(i, j)) * (*noise)(i, j);
    }
  }
  k::affine(f.z, m.weight(Id::DecHidden), m.bias(Id::DecHidden), f.a2);
  relu(f.a2, f.h2);
  k::affine(f.h2, m.weight(Id::DecOut), m.bias(Id::DecOut), f.xhat);

  const std::size_t n = x.rows();
  f.recon.assign(n, 0.0);
  f.kl.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    double r = 0.0;
    for (std::size_t j = 0; j < x.cols(); ++j) {
      const double diff = x(i, j) - f.xhat(i, j);
      r += diff * diff;
    }
    double kl = 0.0;
    for (std::size_t j = 0; j < f.mu.cols(); ++j) {
      const double lv = f.logvar(i, j), mu = f.mu(i, j);
      kl += std::exp(lv) + mu * mu - 1.0 - lv;
    }
    f.recon[i] = r;
    f.kl[i] = 0.5 * kl;
  }
  return f;
}

void check_dims(const VaeModel& m, std::size_t cols) {
  if (cols != m.dim()) {
    throw Error(ErrorCode::DimensionMismatch,
                "embedding width " + std::to_string(cols) + " != model dim " + std::to_string(m.dim()));
  }
}

std::span<double> slice(std::span<double> grad, std::size_t offset, std::size_t size) {
  return grad.subspan(offset, size);
}

}  // namespace

double vae_batch_loss(const VaeModel& model, const Matrix& x, const Matrix& noise, std::span<double> grad) {
  check_dims(model, x.cols());
  const std::size_t n = x.rows();
  if (n == 0) throw Error(ErrorCode::EmptyCorpus, "empty batch");
  const Forward f = forward(model, x, &noise);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) total += f.recon[i] + f.kl[i];
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad.empty()) return total * inv_n;

  std::fill(grad.begin(), grad.end(), 0.0);
  auto wgrad = [&](Id id) {
    const auto& l = model.layer(id);
    return slice(grad, l.weight_offset, l.out * l.in);
  };
  auto bgrad = [&](Id id) {
    const auto& l = model.layer(id);
    return slice(grad, l.bias_offset, l.out);
  };

  Matrix d_xhat(n, model.dim());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < model.dim(); ++j) d_xhat(i, j) = 2.0 * (f.xhat(i, j) - x(i, j)) * inv_n;
  }
  k::accumulate_weight_grad(d_xhat, f.h2, wgrad(Id::DecOut), bgrad(Id::DecOut));

  Matrix d_a2;
  k::affine_input_grad(d_xhat, model.weight(Id::DecOut), d_a2);
  for (std::size_t i = 0; i < d_a2.data().size(); ++i) {
    if (f.a2.data()[i] <= 0.0) d_a2.data()[i] = 0.0;
  }
  k::accumulate_weight_grad(d_a2, f.z, wgrad(Id::DecHidden), bgrad(Id::DecHidden));

  Matrix dz;
  k::affine_input_grad(d_a2, model.weight(Id::DecHidden), dz);
  Matrix d_mu(n, model.latent()), d_lv(n, model.latent());
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < model.latent(); ++j) {
      const double lv = f.logvar(i, j);
      d_mu(i, j) = dz(i, j) + f.mu(i, j) * inv_n;
      d_lv(i, j) = dz(i, j) * noise(i, j) * 0.5 * std::exp(0.5 * lv) + 0.5 * (std::exp(lv) - 1.0) * inv_n;
    }
  }
  k::accumulate_weight_grad(d_mu, f.h1, wgrad(Id::EncMu), bgrad(Id::EncMu));
  k::accumulate_weight_grad(d_lv, f.h1, wgrad(Id::EncLogvar), bgrad(Id::EncLogvar));

  Matrix dh_mu, dh_lv;
  k::affine_input_grad(d_mu, model.weight(Id::EncMu), dh_mu);
  k::affine_input_grad(d_lv, model.weight(Id::EncLogvar), dh_lv);
  Matrix d_a1 = dh_mu;
  for (std::size_t i = 0; i < d_a1.data().size(); ++i) {
    d_a1.data()[i] = f.a1.data()[i] > 0.0 ? d_a1.data()[i] + dh_lv.data()[i] : 0.0;
  }
  k::accumulate_weight_grad(d_a1, x, wgrad(Id::EncHidden), bgrad(Id::EncHidden));
  return total * inv_n;
}

VaeModel fit_vae(const Matrix& embeddings, const VaeOptions& options, VaeTrainReport* report) {
  const std::size_t n = embeddings.rows();
  if (n == 0) throw Error(ErrorCode::EmptyCorpus, "no embeddings to fit");
  if (options.batch == 0) throw Error(ErrorCode::InvalidArgument, "batch size must be positive");
  VaeModel model(embeddings.cols(), options.hidden, options.latent);

  std::mt19937_64 rng(options.seed);
  auto params = model.parameters();
  for (int id = 0; id < VaeModel::LayerCount; ++id) {
    const auto& l = model.layer(static_cast<Id>(id));
    const double bound = 1.0 / std::sqrt(static_cast<double>(l.in));
    std::uniform_real_distribution<double> init(-bound, bound);
    for (std::size_t i = 0; i < l.out * l.in; ++i) params[l.weight_offset + i] = init(rng);
  }

  constexpr double beta1 = 0.9, beta2 = 0.999, adam_eps = 1e-8;
  std::vector<double> grad(params.size()), m1(params.size(), 0.0), m2(params.size(), 0.0);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::size_t step = 0;
  if (report) report->epoch_mean_loss.clear();

  for (std::size_t epoch = 0; epoch < options.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_total = 0.0;
    for (std::size_t start = 0, batch_no = 0; start < n; start += options.batch, ++batch_no) {
      const std::size_t b = std::min(options.batch, n - start);
      Matrix xb(b, embeddings.cols()), noise(b, options.latent);
      for (std::size_t i = 0; i < b; ++i) {
        const auto src = embeddings.row(order[start + i]);
        std::copy(src.begin(), src.end(), xb.row(i).begin());
      }
      for (double& v : noise.data()) v = gauss(rng);

      const double loss = vae_batch_loss(model, xb, noise, grad);
      if (!std::isfinite(loss)) {
        throw Error(ErrorCode::NonFiniteLoss,
                    "loss " + std::to_string(loss) + " at epoch " + std::to_string(epoch + 1) + ", batch " +
                        std::to_string(batch_no + 1));
      }
      epoch_total += loss * static_cast<double>(b);

      ++step;
      const double c1 = 1.0 - std::pow(beta1, static_cast<double>(step));
      const double c2 = 1.0 - std::pow(beta2, static_cast<double>(step));
      for (std::size_t p = 0; p < params.size(); ++p) {
        m1[p] = beta1 * m1[p] + (1.0 - beta1) * grad[p];
        m2[p] = beta2 * m2[p] + (1.0 - beta2) * grad[p] * grad[p];
        params[p] -= options.learning_rate * (m1[p] / c1) / (std::sqrt(m2[p] / c2) + adam_eps);
      }
    }
    if (report) report->epoch_mean_loss.push_back(epoch_total / static_cast<double>(n));
  }
  round_to_float(params);
  return model;
}

VaeLoss vae_sample_loss(const VaeModel& model, std::span<const double> e) {
  check_dims(model, e.size());
  const Matrix x(1, e.size(), std::vector<double>(e.begin(), e.end()));
  const Forward f = forward(model, x, nullptr);
  return {f.recon[0], f.kl[0]};
}

double similarity_from_loss(double loss) { return std::clamp(std::exp(-loss), 0.0, 1.0); }

SimilarityScore score_vae(const VaeModel& model, std::span<const double> e) {
  const double loss = vae_sample_loss(model, e).total() / static_cast<double>(model.dim());
  if (std::isnan(loss)) return {0.0};
  return {similarity_from_loss(loss)};
}

}  // namespace driftdet
