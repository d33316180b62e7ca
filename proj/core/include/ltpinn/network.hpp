#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ltpinn/ad.hpp"
#include "ltpinn/types.hpp"

namespace ltpinn {

/// Fully connected tanh network u_theta(x). The spatial input is always 2-D.
struct MlpConfig {
  int n_layers = 5;  ///< hidden layers
  int width = 64;    ///< neurons per hidden layer
  int in_dim = 2;
  int out_dim = 1;  ///< solution arity: elastic 2, Laplace 1, flow 3
  bool has_density_channel = false;

  int total_outputs() const { return out_dim + (has_density_channel ? 1 : 0); }
  /// Layer widths including input and output, e.g. {2, 64, ..., 64, 3}.
  std::vector<int> layer_sizes() const;
  std::size_t parameter_count() const;
  void validate() const;

  friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

/// Affine map from the ROI bounding box onto [-1, 1]^2, stored with the
/// model and applied identically in training and evaluation.
struct InputNormalizer {
  double cx = 0.0;
  double cy = 0.0;
  double sx = 1.0;
  double sy = 1.0;

  static InputNormalizer from_roi(const Roi& roi);
  Roi roi() const;

  friend bool operator==(const InputNormalizer&, const InputNormalizer&) = default;
};

class NonFiniteError : public NumericError {
 public:
  explicit NonFiniteError(int layer);
  int layer() const { return layer_; }

 private:
  int layer_;
};

/// Network parameters theta, stored flat: for each layer the weight matrix
/// (row-major, out x in) followed by the bias vector.
class MlpParams {
 public:
  using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  MlpParams() = default;
  explicit MlpParams(const MlpConfig& config);

  const MlpConfig& config() const { return config_; }
  std::span<double> flat() { return flat_; }
  std::span<const double> flat() const { return flat_; }
  std::size_t size() const { return flat_.size(); }
  /// Number of affine layers (hidden + output).
  std::size_t layer_count() const { return weight_offset_.size(); }

  Eigen::Map<const RowMatrix> weight(std::size_t layer) const;
  Eigen::Map<RowMatrix> weight(std::size_t layer);
  Eigen::Map<const Eigen::VectorXd> bias(std::size_t layer) const;
  Eigen::Map<Eigen::VectorXd> bias(std::size_t layer);

  std::size_t weight_offset(std::size_t layer) const { return weight_offset_[layer]; }
  std::size_t bias_offset(std::size_t layer) const { return bias_offset_[layer]; }

  bool all_finite() const;

  friend bool operator==(const MlpParams&, const MlpParams&) = default;

 private:
  MlpConfig config_;
  std::vector<int> sizes_;
  std::vector<std::size_t> weight_offset_;
  std::vector<std::size_t> bias_offset_;
  std::vector<double> flat_;
};

/// He initialisation: weights ~ N(0, 2 / fan_in), biases 0.
MlpParams he_init(const MlpConfig& config, std::uint64_t seed);

/// Pointwise forward pass over any scalar type. S is the activation type
/// (double, ad::Var, ad::Jet<double>, ad::Jet<ad::Var>); P is the parameter
/// type (double or ad::Var). Seed x and y as Jet::variable_x/variable_y to
/// obtain spatial derivatives of every output.
template <class S, class P>
std::vector<S> forward_flat(const MlpConfig& config, std::span<const P> theta,
                            const InputNormalizer& norm, const S& x, const S& y) {
  using ad::tanh;
  using ad::value_of;
  const std::vector<int> sizes = config.layer_sizes();
  std::vector<S> a{(x - norm.cx) * norm.sx, (y - norm.cy) * norm.sy};
  std::size_t offset = 0;
  const std::size_t n_affine = sizes.size() - 1;
  for (std::size_t l = 0; l < n_affine; ++l) {
    const int n_in = sizes[l];
    const int n_out = sizes[l + 1];
    const std::size_t b_off = offset + static_cast<std::size_t>(n_in) * n_out;
    std::vector<S> z;
    z.reserve(n_out);
    for (int i = 0; i < n_out; ++i) {
      S zi(theta[b_off + i]);
      for (int j = 0; j < n_in; ++j) zi = zi + a[j] * theta[offset + static_cast<std::size_t>(i) * n_in + j];
      if (l + 1 < n_affine) zi = tanh(zi);
      if (!std::isfinite(value_of(zi))) throw NonFiniteError(static_cast<int>(l));
      z.push_back(std::move(zi));
    }
    a = std::move(z);
    offset = b_off + n_out;
  }
  return a;
}

template <class S>
std::vector<S> forward(const MlpParams& params, const InputNormalizer& norm, const S& x, const S& y) {
  return forward_flat<S, double>(params.config(), params.flat(), norm, x, y);
}

/// Adapts a network to the field-source interface used by the residual and
/// loss operators: field(Jet x, Jet y) -> one jet per output.
struct NetworkField {
  const MlpParams* params = nullptr;
  InputNormalizer norm;

  template <class S>
  std::vector<ad::Jet<S>> operator()(const ad::Jet<S>& x, const ad::Jet<S>& y) const {
    return forward<ad::Jet<S>>(*params, norm, x, y);
  }
};

/// Spatial derivative orders supported by the batched evaluator.
enum class DerivOrder : int { Value = 0, Gradient = 1, Hessian = 2 };

/// Jet channel layout: 0 value, 1 d/dx, 2 d/dy, 3 d2/dx2, 4 d2/dxdy, 5 d2/dy2.
namespace channel {
inline constexpr int kV = 0;
inline constexpr int kX = 1;
inline constexpr int kY = 2;
inline constexpr int kXX = 3;
inline constexpr int kXY = 4;
inline constexpr int kYY = 5;
}  // namespace channel

constexpr int channel_count(DerivOrder order) {
  return order == DerivOrder::Value ? 1 : order == DerivOrder::Gradient ? 3 : 6;
}

/// Batched forward propagation of spatial jets through the network, with a
/// hand-derived reverse pass that maps adjoints of the output jets onto
/// gradients with respect to theta and to the input points.
///
/// Output matrices are (total_outputs x n_points), one per channel.
class BatchedJets {
 public:
  void forward(const MlpParams& params, const InputNormalizer& norm, std::span<const Vec2> points,
               DerivOrder order);

  std::size_t size() const { return n_; }
  DerivOrder order() const { return order_; }
  int channels() const { return channel_count(order_); }
  const Eigen::MatrixXd& output(int c) const { return out_[c]; }

  /// `output_adjoint[c]` has the shape of output(c). Adds d/dtheta into
  /// grad_theta; writes d/d(point) into grad_input when it is non-empty.
  /// `params` must be the parameters used by the preceding forward().
  void backward(const MlpParams& params, std::span<const Eigen::MatrixXd> output_adjoint,
                std::span<double> grad_theta, std::span<Vec2> grad_input) const;

 private:
  struct LayerCache {
    std::vector<Eigen::MatrixXd> input;  // per channel, (n_in x n)
    std::vector<Eigen::ArrayXXd> pre;    // derivative channels of z (index c-1)
    Eigen::ArrayXXd t, d1, d2;           // tanh(z) and its first two derivatives
  };

  std::vector<LayerCache> layers_;
  std::vector<Eigen::MatrixXd> out_;
  InputNormalizer norm_;
  DerivOrder order_ = DerivOrder::Value;
  std::size_t n_ = 0;
};

}  // namespace ltpinn
