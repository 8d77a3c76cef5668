#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "blowbot/common.hpp"

namespace blowbot::nn {

/// One 3x3 convolution (padding 1), optionally preceded by a 2x bilinear
/// upsampling of its input and followed by a ReLU.
struct LayerSpec {
  int in_channels = 0;
  int out_channels = 0;
  int stride = 1;
  bool upsample_before = false;
  bool relu = true;

  friend bool operator==(const LayerSpec&, const LayerSpec&) = default;
};

struct Architecture {
  int input_channels = 4;
  std::vector<LayerSpec> layers;

  int output_channels() const { return layers.empty() ? input_channels : layers.back().out_channels; }
  /// Input spatial size must be a multiple of this.
  int size_multiple() const;
  std::string describe() const;

  /// Reduced reference net: widths w-2w-4w-4w-2w-A (w = 16 by default), two
  /// stride-2 stages and two bilinear upsampling stages, linear head.
  static Architecture reference(int actions, int input_channels = 4, int width = 16);
  /// Single linear 3x3 layer, used for exactness checks.
  static Architecture linear(int actions, int input_channels = 4);

  friend bool operator==(const Architecture&, const Architecture&) = default;
};

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Weight columns are ordered (ky * 3 + kx) * in_channels + c.
template <typename Scalar>
struct ConvParams {
  Matrix<Scalar> weight;
  Vector<Scalar> bias;
};

template <typename Scalar>
struct NetworkParams {
  Architecture arch;
  std::vector<ConvParams<Scalar>> layers;

  template <typename Other>
  NetworkParams<Other> cast() const {
    NetworkParams<Other> out;
    out.arch = arch;
    for (const auto& l : layers) out.layers.push_back({l.weight.template cast<Other>(), l.bias.template cast<Other>()});
    return out;
  }
  std::int64_t parameter_count() const;
  bool operator==(const NetworkParams& o) const;
};

template <typename Scalar>
using Gradients = std::vector<ConvParams<Scalar>>;

/// Batch of feature maps: `data` is C x (B * H * W), column b * H * W + y * W + x.
template <typename Scalar>
struct Tensor {
  int batch = 0;
  int height = 0;
  int width = 0;
  Matrix<Scalar> data;

  int channels() const { return static_cast<int>(data.rows()); }
  Eigen::Index plane() const { return static_cast<Eigen::Index>(height) * width; }
};

enum class Init {
  HeUniform,   // He-uniform everywhere, zero head
  Randomized,  // He-uniform everywhere including the head, small random biases
};

template <typename Scalar>
NetworkParams<Scalar> init_params(const Architecture& arch, Rng& rng, Init mode = Init::HeUniform);

/// Pure function of (params, input). Throws ConfigError on channel or size
/// mismatch.
template <typename Scalar>
Tensor<Scalar> forward(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input);

/// Selected action pixel of one sample: channel and flat crop position.
struct Selection {
  int channel = 0;
  int position = 0;
};

inline double huber(double x) { return std::abs(x) < 1.0 ? 0.5 * x * x : std::abs(x) - 0.5; }

/// Mean smooth-L1 loss of Q(s_i, a_i) - y_i over the batch, with the gradient of
/// every parameter written into `grads`.
template <typename Scalar>
Scalar loss_and_grad(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input,
                     std::span<const Selection> selections, std::span<const Scalar> targets, Gradients<Scalar>& grads);

/// Loss only (no gradient), same definition as loss_and_grad.
template <typename Scalar>
Scalar loss(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input, std::span<const Selection> selections,
            std::span<const Scalar> targets);

struct SgdConfig {
  double learning_rate = 0.01;
  double momentum = 0.9;
  double weight_decay = 0.0;
  double clip_norm = 100.0;
};

template <typename Scalar>
struct OptimizerState {
  SgdConfig config;
  Gradients<Scalar> velocity;

  static OptimizerState zeros_like(const NetworkParams<Scalar>& params, const SgdConfig& cfg);
};

template <typename Scalar>
Scalar global_norm(const Gradients<Scalar>& grads);

/// Clips the global gradient norm to config.clip_norm, then
/// v <- mu * v + g, p <- p - lr * v. Returns the pre-clip norm.
template <typename Scalar>
Scalar sgd_step(NetworkParams<Scalar>& params, OptimizerState<Scalar>& state, Gradients<Scalar> grads);

struct GradCheckOptions {
  /// Smaller steps are swamped by rounding in the loss difference.
  double eps = 1e-4;
  int samples = 200;
  /// Magnitudes below this are compared absolutely rather than relatively.
  double floor = 1e-6;
};

/// Largest relative error between analytic gradients (in Scalar) and central
/// finite differences of the loss evaluated in double precision, over
/// `samples` randomly chosen parameters.
template <typename Scalar>
double grad_check(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input,
                  std::span<const Selection> selections, std::span<const Scalar> targets, Rng& rng,
                  const GradCheckOptions& options = {});

// Checkpoint I/O: versioned header, then flat little-endian float32 values in
// declaration order (per layer: weight column-major, then bias).
inline constexpr char kCheckpointMagic[4] = {'B', 'B', 'Q', 'N'};
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  std::uint32_t level = 0;
  NetworkParams<float> params;
};

void save_checkpoint(const std::filesystem::path& path, const NetworkParams<float>& params, std::uint32_t level);
Checkpoint load_checkpoint(const std::filesystem::path& path);

/// Empty when compatible; otherwise a human-readable shape diff.
std::string architecture_diff(const Architecture& expected, const Architecture& found);

}  // namespace blowbot::nn
