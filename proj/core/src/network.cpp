#include "ltpinn/network.hpp"

#include <string>

#include "ltpinn/rng.hpp"

namespace ltpinn {

std::vector<int> MlpConfig::layer_sizes() const {
  std::vector<int> sizes;
  sizes.reserve(static_cast<std::size_t>(n_layers) + 2);
  sizes.push_back(in_dim);
  for (int i = 0; i < n_layers; ++i) sizes.push_back(width);
  sizes.push_back(total_outputs());
  return sizes;
}

std::size_t MlpConfig::parameter_count() const {
  const std::vector<int> s = layer_sizes();
  std::size_t n = 0;
  for (std::size_t l = 0; l + 1 < s.size(); ++l)
    n += static_cast<std::size_t>(s[l]) * s[l + 1] + s[l + 1];
  return n;
}

void MlpConfig::validate() const {
  if (n_layers < 1) throw ConfigError("network.layers must be >= 1");
  if (width < 1) throw ConfigError("network.width must be >= 1");
  if (in_dim != 2) throw ConfigError("network input dimension is fixed at 2");
  if (out_dim < 1) throw ConfigError("network output dimension must be >= 1");
}

InputNormalizer InputNormalizer::from_roi(const Roi& roi) {
  if (!roi.valid()) throw ConfigError("degenerate ROI for input normalisation");
  const Vec2 c = roi.center();
  return {c.x, c.y, 2.0 / roi.width(), 2.0 / roi.height()};
}

Roi InputNormalizer::roi() const {
  return {cx - 1.0 / sx, cx + 1.0 / sx, cy - 1.0 / sy, cy + 1.0 / sy};
}

NonFiniteError::NonFiniteError(int layer)
    : NumericError("non-finite activation in network layer " + std::to_string(layer)), layer_(layer) {}

MlpParams::MlpParams(const MlpConfig& config) : config_(config), sizes_(config.layer_sizes()) {
  config_.validate();
  std::size_t offset = 0;
  for (std::size_t l = 0; l + 1 < sizes_.size(); ++l) {
    weight_offset_.push_back(offset);
    offset += static_cast<std::size_t>(sizes_[l]) * sizes_[l + 1];
    bias_offset_.push_back(offset);
    offset += sizes_[l + 1];
  }
  flat_.assign(offset, 0.0);
}

Eigen::Map<const MlpParams::RowMatrix> MlpParams::weight(std::size_t l) const {
  return {flat_.data() + weight_offset_[l], sizes_[l + 1], sizes_[l]};
}
Eigen::Map<MlpParams::RowMatrix> MlpParams::weight(std::size_t l) {
  return {flat_.data() + weight_offset_[l], sizes_[l + 1], sizes_[l]};
}
Eigen::Map<const Eigen::VectorXd> MlpParams::bias(std::size_t l) const {
  return {flat_.data() + bias_offset_[l], sizes_[l + 1]};
}
Eigen::Map<Eigen::VectorXd> MlpParams::bias(std::size_t l) {
  return {flat_.data() + bias_offset_[l], sizes_[l + 1]};
}

bool MlpParams::all_finite() const {
  for (double v : flat_)
    if (!std::isfinite(v)) return false;
  return true;
}

MlpParams he_init(const MlpConfig& config, std::uint64_t seed) {
  MlpParams params(config);
  Rng rng = Rng::stream(seed, Stream::NetworkInit);
  for (std::size_t l = 0; l < params.layer_count(); ++l) {
    auto w = params.weight(l);
    const double sd = std::sqrt(2.0 / static_cast<double>(w.cols()));
    for (Eigen::Index i = 0; i < w.rows(); ++i)
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = sd * rng.normal();
  }
  return params;
}

// ---------------------------------------------------------------------------
// Batched jets.

void BatchedJets::forward(const MlpParams& params, const InputNormalizer& norm,
                          std::span<const Vec2> points, DerivOrder order) {
  using Eigen::ArrayXXd;
  using Eigen::MatrixXd;
  order_ = order;
  norm_ = norm;
  n_ = points.size();
  const int C = channel_count(order);
  const auto n = static_cast<Eigen::Index>(n_);
  const std::size_t n_hidden = params.layer_count() - 1;
  layers_.resize(params.layer_count());

  std::vector<MatrixXd> a(C);
  a[channel::kV].resize(2, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a[channel::kV](0, i) = (points[i].x - norm.cx) * norm.sx;
    a[channel::kV](1, i) = (points[i].y - norm.cy) * norm.sy;
  }
  if (C > 1) {
    a[channel::kX] = MatrixXd::Zero(2, n);
    a[channel::kX].row(0).setConstant(norm.sx);
    a[channel::kY] = MatrixXd::Zero(2, n);
    a[channel::kY].row(1).setConstant(norm.sy);
  }
  for (int c = 3; c < C; ++c) a[c] = MatrixXd::Zero(2, n);

  for (std::size_t l = 0; l < n_hidden; ++l) {
    LayerCache& cache = layers_[l];
    const auto w = params.weight(l);
    const auto b = params.bias(l);

    MatrixXd z0 = w * a[channel::kV];
    z0.colwise() += b;
    cache.t = z0.array().tanh();
    cache.d1 = 1.0 - cache.t.square();
    cache.d2 = -2.0 * cache.t * cache.d1;
    cache.pre.resize(C - 1);
    for (int c = 1; c < C; ++c) cache.pre[c - 1] = (w * a[c]).array();

    std::vector<MatrixXd> h(C);
    h[channel::kV] = cache.t.matrix();
    if (C > 1) {
      const ArrayXXd& zx = cache.pre[channel::kX - 1];
      const ArrayXXd& zy = cache.pre[channel::kY - 1];
      h[channel::kX] = (cache.d1 * zx).matrix();
      h[channel::kY] = (cache.d1 * zy).matrix();
      if (C > 3) {
        h[channel::kXX] = (cache.d2 * zx.square() + cache.d1 * cache.pre[channel::kXX - 1]).matrix();
        h[channel::kXY] = (cache.d2 * zx * zy + cache.d1 * cache.pre[channel::kXY - 1]).matrix();
        h[channel::kYY] = (cache.d2 * zy.square() + cache.d1 * cache.pre[channel::kYY - 1]).matrix();
      }
    }
    if (!h[channel::kV].allFinite()) throw NonFiniteError(static_cast<int>(l));
    cache.input = std::move(a);
    a = std::move(h);
  }

  LayerCache& last = layers_[n_hidden];
  const auto w = params.weight(n_hidden);
  out_.resize(C);
  for (int c = 0; c < C; ++c) out_[c] = w * a[c];
  out_[channel::kV].colwise() += params.bias(n_hidden);
  for (int c = 0; c < C; ++c)
    if (!out_[c].allFinite()) throw NonFiniteError(static_cast<int>(n_hidden));
  last.input = std::move(a);
}

void BatchedJets::backward(const MlpParams& params, std::span<const Eigen::MatrixXd> output_adjoint,
                           std::span<double> grad_theta, std::span<Vec2> grad_input) const {
  using Eigen::ArrayXXd;
  using Eigen::MatrixXd;
  using RowMap = Eigen::Map<MlpParams::RowMatrix>;
  using VecMap = Eigen::Map<Eigen::VectorXd>;
  const int C = channel_count(order_);
  const std::size_t n_hidden = params.layer_count() - 1;

  auto accumulate = [&](std::size_t l, const std::vector<MatrixXd>& zbar) {
    const auto w = params.weight(l);
    RowMap gw(grad_theta.data() + params.weight_offset(l), w.rows(), w.cols());
    VecMap gb(grad_theta.data() + params.bias_offset(l), w.rows());
    const std::vector<MatrixXd>& in = layers_[l].input;
    for (int c = 0; c < C; ++c) gw.noalias() += zbar[c] * in[c].transpose();
    gb += zbar[channel::kV].rowwise().sum();
  };

  std::vector<MatrixXd> zbar(output_adjoint.begin(), output_adjoint.end());
  accumulate(n_hidden, zbar);
  std::vector<MatrixXd> abar(C);
  {
    const auto w = params.weight(n_hidden);
    for (int c = 0; c < C; ++c) abar[c].noalias() = w.transpose() * zbar[c];
  }

  for (std::size_t l = n_hidden; l-- > 0;) {
    const LayerCache& cache = layers_[l];
    const ArrayXXd& d1 = cache.d1;
    const ArrayXXd& d2 = cache.d2;
    ArrayXXd z0bar = abar[channel::kV].array() * d1;
    if (C > 1) {
      const ArrayXXd& zx = cache.pre[channel::kX - 1];
      const ArrayXXd& zy = cache.pre[channel::kY - 1];
      const ArrayXXd hx = abar[channel::kX].array();
      const ArrayXXd hy = abar[channel::kY].array();
      z0bar += d2 * (hx * zx + hy * zy);
      ArrayXXd zxbar = hx * d1;
      ArrayXXd zybar = hy * d1;
      if (C > 3) {
        const ArrayXXd d3 = -2.0 * (d1.square() + cache.t * d2);
        const ArrayXXd hxx = abar[channel::kXX].array();
        const ArrayXXd hxy = abar[channel::kXY].array();
        const ArrayXXd hyy = abar[channel::kYY].array();
        const ArrayXXd& zxx = cache.pre[channel::kXX - 1];
        const ArrayXXd& zxy = cache.pre[channel::kXY - 1];
        const ArrayXXd& zyy = cache.pre[channel::kYY - 1];
        z0bar += hxx * (d3 * zx.square() + d2 * zxx) + hxy * (d3 * zx * zy + d2 * zxy) +
                 hyy * (d3 * zy.square() + d2 * zyy);
        zxbar += d2 * (2.0 * hxx * zx + hxy * zy);
        zybar += d2 * (2.0 * hyy * zy + hxy * zx);
        zbar[channel::kXX] = (hxx * d1).matrix();
        zbar[channel::kXY] = (hxy * d1).matrix();
        zbar[channel::kYY] = (hyy * d1).matrix();
      }
      zbar[channel::kX] = zxbar.matrix();
      zbar[channel::kY] = zybar.matrix();
    }
    zbar[channel::kV] = z0bar.matrix();
    accumulate(l, zbar);

    const auto w = params.weight(l);
    if (l > 0) {
      for (int c = 0; c < C; ++c) abar[c].noalias() = w.transpose() * zbar[c];
    } else if (!grad_input.empty()) {
      abar[channel::kV].noalias() = w.transpose() * zbar[channel::kV];
      for (std::size_t i = 0; i < n_; ++i) {
        const auto col = static_cast<Eigen::Index>(i);
        grad_input[i] = {norm_.sx * abar[channel::kV](0, col), norm_.sy * abar[channel::kV](1, col)};
      }
    }
  }
}

}  // namespace ltpinn
