#include "scplan/network.hpp"

#include <cmath>
#include <stdexcept>

#include "scplan/stochastic.hpp"

namespace scplan {

const char* activation_name(Activation a) { return a == Activation::tanh ? "tanh" : "relu"; }

Activation parse_activation(const std::string& name) {
  if (name == "tanh") return Activation::tanh;
  if (name == "relu") return Activation::relu;
  throw std::invalid_argument("unknown activation '" + name + "'");
}

Mlp::Mlp(std::vector<int> sizes, Activation activation)
    : sizes_(std::move(sizes)), activation_(activation) {
  if (sizes_.size() < 2) throw std::invalid_argument("a perceptron needs at least two layer sizes");
  Eigen::Index total = 0;
  for (std::size_t k = 0; k + 1 < sizes_.size(); ++k) {
    if (sizes_[k] < 1 || sizes_[k + 1] < 1) throw std::invalid_argument("layer sizes must be positive");
    offsets_.push_back(total);
    total += static_cast<Eigen::Index>(sizes_[k]) * sizes_[k + 1] + sizes_[k + 1];
  }
  params_ = Eigen::VectorXd::Zero(total);
}

void Mlp::initialize(std::uint64_t seed, double output_gain) {
  const RngStream rng(seed);
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t k = 0; k < layers; ++k) {
    const int in = sizes_[k];
    const int out = sizes_[k + 1];
    // Orthogonalize a Gaussian matrix of the larger shape, then cut to size.
    const int big = std::max(in, out);
    const int small = std::min(in, out);
    Eigen::MatrixXd gauss(big, small);
    for (int i = 0; i < big; ++i)
      for (int j = 0; j < small; ++j)
        gauss(i, j) = rng.normal(StreamPurpose::actor, k, static_cast<std::uint64_t>(i) * small + j);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(gauss);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(big, small);
    // Sign fix so the factorization is unique.
    const Eigen::MatrixXd r = qr.matrixQR().topRows(small).triangularView<Eigen::Upper>();
    for (int j = 0; j < small; ++j)
      if (r(j, j) < 0) q.col(j) *= -1.0;
    const double gain = k + 1 == layers ? output_gain : std::sqrt(2.0);
    Eigen::Map<Eigen::MatrixXd> w(params_.data() + offsets_[k], out, in);
    w = gain * (out >= in ? q : Eigen::MatrixXd(q.transpose()));
    params_.segment(offsets_[k] + static_cast<Eigen::Index>(in) * out, out).setZero();
  }
}

Eigen::MatrixXd Mlp::forward(const Eigen::MatrixXd& input, Cache* cache) const {
  if (input.rows() != sizes_.front()) throw std::invalid_argument("input has the wrong size");
  if (cache) cache->inputs.clear();
  Eigen::MatrixXd h = input;
  const std::size_t layers = sizes_.size() - 1;
  for (std::size_t k = 0; k < layers; ++k) {
    const int in = sizes_[k];
    const int out = sizes_[k + 1];
    const Eigen::Map<const Eigen::MatrixXd> w(params_.data() + offsets_[k], out, in);
    const Eigen::Map<const Eigen::VectorXd> b(params_.data() + offsets_[k] + static_cast<Eigen::Index>(in) * out, out);
    if (cache) cache->inputs.push_back(h);
    Eigen::MatrixXd z = w * h;
    z.colwise() += b;
    if (k + 1 < layers) {
      if (activation_ == Activation::tanh)
        z = z.array().tanh();
      else
        z = z.cwiseMax(0.0);
    }
    h = std::move(z);
  }
  return h;
}

void Mlp::backward(const Cache& cache, const Eigen::MatrixXd& grad_output,
                   Eigen::Ref<Eigen::VectorXd> grad) const {
  Eigen::MatrixXd g = grad_output;
  for (std::size_t k = sizes_.size() - 1; k-- > 0;) {
    const int in = sizes_[k];
    const int out = sizes_[k + 1];
    const Eigen::MatrixXd& x = cache.inputs[k];
    Eigen::Map<Eigen::MatrixXd> gw(grad.data() + offsets_[k], out, in);
    gw.noalias() += g * x.transpose();
    grad.segment(offsets_[k] + static_cast<Eigen::Index>(in) * out, out) += g.rowwise().sum();
    if (k == 0) break;
    const Eigen::Map<const Eigen::MatrixXd> w(params_.data() + offsets_[k], out, in);
    Eigen::MatrixXd back = w.transpose() * g;
    if (activation_ == Activation::tanh)
      back.array() *= 1.0 - x.array().square();
    else
      back.array() *= (x.array() > 0.0).cast<double>();
    g = std::move(back);
  }
}

}  // namespace scplan
