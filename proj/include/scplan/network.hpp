#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

namespace scplan {

enum class Activation { tanh, relu };
const char* activation_name(Activation a);
Activation parse_activation(const std::string& name);

/// Fully connected perceptron with a linear output layer. Parameters live in
/// one flat vector: per layer the weight matrix (column-major, out x in)
/// followed by the bias.
class Mlp {
 public:
  Mlp() = default;
  Mlp(std::vector<int> sizes, Activation activation);

  const std::vector<int>& sizes() const { return sizes_; }
  Activation activation() const { return activation_; }
  int input_size() const { return sizes_.front(); }
  int output_size() const { return sizes_.back(); }
  Eigen::Index num_parameters() const { return params_.size(); }
  Eigen::VectorXd& parameters() { return params_; }
  const Eigen::VectorXd& parameters() const { return params_; }

  /// Orthogonal weights with gain sqrt(2) on hidden layers and
  /// `output_gain` on the last layer; zero biases.
  void initialize(std::uint64_t seed, double output_gain);

  /// Pre-activation outputs kept for backward().
  struct Cache {
    std::vector<Eigen::MatrixXd> inputs;  // input of every layer
  };

  /// Columns of `input` are samples.
  Eigen::MatrixXd forward(const Eigen::MatrixXd& input, Cache* cache = nullptr) const;

  /// Adds d(loss)/d(params) to `grad`, given d(loss)/d(output).
  void backward(const Cache& cache, const Eigen::MatrixXd& grad_output,
                Eigen::Ref<Eigen::VectorXd> grad) const;

 private:
  std::vector<int> sizes_;
  Activation activation_ = Activation::tanh;
  Eigen::VectorXd params_;
  std::vector<Eigen::Index> offsets_;  // start of each layer's weights
};

}  // namespace scplan
