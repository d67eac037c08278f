#pragma once

#include "tomo/solver.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace tomo {

inline constexpr const char* kWeightFormatTag = "tomo-unfolded-weights";
inline constexpr int kWeightFormatVersion = 1;

/// 1-D convolution with PyTorch semantics (cross-correlation, zero padding
/// (kernel-1)/2, stride 1). `weight` is [out][in][tap] flattened row-major.
struct Conv1dParams {
  int out_channels = 0;
  int in_channels = 0;
  int kernel = 0;
  std::vector<double> weight;
  std::vector<double> bias;

  [[nodiscard]] double w(int o, int i, int tap) const {
    return weight[(static_cast<std::size_t>(o) * in_channels + i) * kernel + tap];
  }
  void validate(const std::string& where) const;
};

/// `input` is channels x length; returns out_channels x length.
[[nodiscard]] RMatrix conv1d(const Conv1dParams& conv, const RMatrix& input);

struct UnfoldedLayer {
  Conv1dParams conv1;  ///< 2 -> C, followed by ReLU
  Conv1dParams conv2;  ///< C -> C, followed by ReLU
  Conv1dParams conv3;  ///< C -> 2
  double raw_rho = 0.0;            ///< rho_m = softplus(raw_rho)
  double raw_eig_threshold = -40;  ///< PSD eigenvalue floor = softplus(raw)

  [[nodiscard]] double rho() const { return softplus(raw_rho); }
  [[nodiscard]] double eig_floor() const { return softplus(raw_eig_threshold); }
};

/// Parameters of the fixed-depth unfolded network. This struct mirrors the
/// JSON weight interchange file one to one (see README).
struct UnfoldedModelWeights {
  int format_version = kWeightFormatVersion;
  int n_virtual = 32;
  double lag_spacing = 10.0;
  int n_layers = 12;
  int channels = 16;
  int kernel = 5;
  std::string activation = "relu";
  std::string padding = "zero";
  int dykstra_iters = 3;
  std::string psd_repair = "diagonal_loading";
  std::vector<UnfoldedLayer> layers;

  /// Shapes, tags and layer count; throws TomoError on any inconsistency.
  void validate() const;
};

[[nodiscard]] UnfoldedModelWeights parse_weights(const std::string& text);
[[nodiscard]] UnfoldedModelWeights load_weights(const std::filesystem::path& path);
void write_weights(const UnfoldedModelWeights& weights, std::ostream& out);
void save_weights(const UnfoldedModelWeights& weights, const std::filesystem::path& path);

/// All convolution weights and biases zero; F_theta is identically zero.
[[nodiscard]] UnfoldedModelWeights make_zero_weights(int n_virtual, double lag_spacing,
                                                     int n_layers, int channels, int kernel,
                                                     double raw_rho, double raw_eig_threshold,
                                                     int dykstra_iters = 3);

/// Zero weights plus i.i.d. N(0, scale^2) convolution parameters. Used for
/// throughput measurement and shape tests.
[[nodiscard]] UnfoldedModelWeights make_random_weights(int n_virtual, double lag_spacing,
                                                       int n_layers, int channels, int kernel,
                                                       double scale, std::uint64_t seed);

/// Forward pass bound to one embedding. Per-layer factorizations are cached
/// at construction; the object is immutable and shareable across threads.
class UnfoldedNetwork {
 public:
  /// Throws TomoError when the weights do not fit the embedding grid.
  UnfoldedNetwork(const LagEmbedding& embedding, UnfoldedModelWeights weights);

  [[nodiscard]] const UnfoldedModelWeights& weights() const noexcept { return weights_; }

  /// F_theta of one layer applied to a lag sequence (real/imag channels).
  [[nodiscard]] CVector learned_block(int layer, const CVector& u) const;

  [[nodiscard]] ToeplitzCovariance forward(const CVector& y,
                                           const IterationObserver& observer = {}) const;

 private:
  const LagEmbedding& embedding_;
  UnfoldedModelWeights weights_;
  std::vector<DataConsistency> factors_;
};

[[nodiscard]] ToeplitzCovariance unfolded_forward(const CVector& y, const LagEmbedding& embedding,
                                                  const UnfoldedModelWeights& weights);

}  // namespace tomo
