#include "blowbot/qnetwork.hpp"

#include <algorithm>
#include <bit>
#include <fstream>
#include <sstream>

namespace blowbot::nn {
namespace {

struct UpsampleTap {
  int i0;
  int i1;
  double w0;
  double w1;
};

// Bilinear 2x with half-pixel centres and edge clamping.
std::vector<UpsampleTap> upsample_taps(int n) {
  std::vector<UpsampleTap> taps(static_cast<std::size_t>(2 * n));
  for (int o = 0; o < 2 * n; ++o) {
    const double src = std::max(0.0, (o + 0.5) * 0.5 - 0.5);
    const int i0 = std::min(static_cast<int>(std::floor(src)), n - 1);
    const int i1 = std::min(i0 + 1, n - 1);
    const double w1 = src - i0;
    taps[static_cast<std::size_t>(o)] = {i0, i1, 1.0 - w1, w1};
  }
  return taps;
}

template <typename Scalar>
Tensor<Scalar> upsample2x(const Tensor<Scalar>& in) {
  Tensor<Scalar> out{in.batch, 2 * in.height, 2 * in.width, Matrix<Scalar>(in.channels(), in.batch * 4 * in.plane())};
  const auto ty = upsample_taps(in.height);
  const auto tx = upsample_taps(in.width);
  for (int b = 0; b < in.batch; ++b) {
    const Eigen::Index ib = b * in.plane();
    const Eigen::Index ob = b * out.plane();
    for (int y = 0; y < out.height; ++y) {
      const UpsampleTap& vy = ty[static_cast<std::size_t>(y)];
      for (int x = 0; x < out.width; ++x) {
        const UpsampleTap& vx = tx[static_cast<std::size_t>(x)];
        const auto c00 = in.data.col(ib + vy.i0 * in.width + vx.i0);
        const auto c01 = in.data.col(ib + vy.i0 * in.width + vx.i1);
        const auto c10 = in.data.col(ib + vy.i1 * in.width + vx.i0);
        const auto c11 = in.data.col(ib + vy.i1 * in.width + vx.i1);
        out.data.col(ob + y * out.width + x) =
            Scalar(vy.w0 * vx.w0) * c00 + Scalar(vy.w0 * vx.w1) * c01 + Scalar(vy.w1 * vx.w0) * c10 +
            Scalar(vy.w1 * vx.w1) * c11;
      }
    }
  }
  return out;
}

template <typename Scalar>
Tensor<Scalar> upsample2x_backward(const Tensor<Scalar>& grad_out, int in_h, int in_w) {
  Tensor<Scalar> g{grad_out.batch, in_h, in_w, Matrix<Scalar>::Zero(grad_out.channels(), grad_out.batch * in_h * in_w)};
  const auto ty = upsample_taps(in_h);
  const auto tx = upsample_taps(in_w);
  for (int b = 0; b < grad_out.batch; ++b) {
    const Eigen::Index ib = b * g.plane();
    const Eigen::Index ob = b * grad_out.plane();
    for (int y = 0; y < grad_out.height; ++y) {
      const UpsampleTap& vy = ty[static_cast<std::size_t>(y)];
      for (int x = 0; x < grad_out.width; ++x) {
        const UpsampleTap& vx = tx[static_cast<std::size_t>(x)];
        const auto go = grad_out.data.col(ob + y * grad_out.width + x);
        g.data.col(ib + vy.i0 * in_w + vx.i0) += Scalar(vy.w0 * vx.w0) * go;
        g.data.col(ib + vy.i0 * in_w + vx.i1) += Scalar(vy.w0 * vx.w1) * go;
        g.data.col(ib + vy.i1 * in_w + vx.i0) += Scalar(vy.w1 * vx.w0) * go;
        g.data.col(ib + vy.i1 * in_w + vx.i1) += Scalar(vy.w1 * vx.w1) * go;
      }
    }
  }
  return g;
}

int conv_out(int n, int stride) { return (n - 1) / stride + 1; }

template <typename Scalar>
Matrix<Scalar> im2col(const Tensor<Scalar>& in, int stride, int out_h, int out_w) {
  const int c = in.channels();
  Matrix<Scalar> cols = Matrix<Scalar>::Zero(9 * c, static_cast<Eigen::Index>(in.batch) * out_h * out_w);
  for (int b = 0; b < in.batch; ++b) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        const Eigen::Index j = (static_cast<Eigen::Index>(b) * out_h + oy) * out_w + ox;
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= in.height) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int ix = ox * stride + kx - 1;
            if (ix < 0 || ix >= in.width) continue;
            cols.col(j).segment((ky * 3 + kx) * c, c) = in.data.col(b * in.plane() + iy * in.width + ix);
          }
        }
      }
    }
  }
  return cols;
}

template <typename Scalar>
void col2im(const Matrix<Scalar>& cols, Tensor<Scalar>& grad_in, int stride, int out_h, int out_w) {
  const int c = grad_in.channels();
  for (int b = 0; b < grad_in.batch; ++b) {
    for (int oy = 0; oy < out_h; ++oy) {
      for (int ox = 0; ox < out_w; ++ox) {
        const Eigen::Index j = (static_cast<Eigen::Index>(b) * out_h + oy) * out_w + ox;
        for (int ky = 0; ky < 3; ++ky) {
          const int iy = oy * stride + ky - 1;
          if (iy < 0 || iy >= grad_in.height) continue;
          for (int kx = 0; kx < 3; ++kx) {
            const int ix = ox * stride + kx - 1;
            if (ix < 0 || ix >= grad_in.width) continue;
            grad_in.data.col(b * grad_in.plane() + iy * grad_in.width + ix) += cols.col(j).segment((ky * 3 + kx) * c, c);
          }
        }
      }
    }
  }
}

template <typename Scalar>
struct LayerCache {
  int in_h = 0;  // before upsampling
  int in_w = 0;
  int conv_h = 0;  // convolution input size
  int conv_w = 0;
  Matrix<Scalar> cols;
  Tensor<Scalar> output;
};

template <typename Scalar>
void check_input(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input) {
  if (input.channels() != params.arch.input_channels)
    throw ConfigError("forward: expected " + std::to_string(params.arch.input_channels) + " input channels, got " +
                      std::to_string(input.channels()));
  const int m = params.arch.size_multiple();
  if (input.height % m != 0 || input.width % m != 0)
    throw ConfigError("forward: input size " + std::to_string(input.height) + "x" + std::to_string(input.width) +
                      " is not a multiple of " + std::to_string(m));
  if (input.data.cols() != static_cast<Eigen::Index>(input.batch) * input.plane())
    throw ConfigError("forward: tensor data does not match its declared shape");
}

template <typename Scalar>
Tensor<Scalar> run_forward(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input,
                           std::vector<LayerCache<Scalar>>* caches) {
  check_input(params, input);
  Tensor<Scalar> x = input;
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    const LayerSpec& spec = params.arch.layers[i];
    const ConvParams<Scalar>& p = params.layers[i];
    LayerCache<Scalar> cache;
    cache.in_h = x.height;
    cache.in_w = x.width;
    if (spec.upsample_before) x = upsample2x(x);
    cache.conv_h = x.height;
    cache.conv_w = x.width;
    const int oh = conv_out(x.height, spec.stride);
    const int ow = conv_out(x.width, spec.stride);
    Matrix<Scalar> cols = im2col(x, spec.stride, oh, ow);
    Tensor<Scalar> y{x.batch, oh, ow, Matrix<Scalar>(spec.out_channels, cols.cols())};
    y.data.noalias() = p.weight * cols;
    y.data.colwise() += p.bias;
    if (spec.relu) y.data = y.data.cwiseMax(Scalar(0));
    if (caches) {
      cache.cols = std::move(cols);
      cache.output = y;
      caches->push_back(std::move(cache));
    }
    x = std::move(y);
  }
  return x;
}

template <typename Scalar>
Scalar selected_loss(const Tensor<Scalar>& out, std::span<const Selection> selections, std::span<const Scalar> targets,
                     Matrix<Scalar>* grad_out) {
  if (selections.size() != targets.size() || static_cast<int>(selections.size()) != out.batch)
    throw ConfigError("loss: batch, selection and target counts differ");
  const Scalar inv_batch = Scalar(1) / Scalar(out.batch);
  Scalar total = 0;
  for (int b = 0; b < out.batch; ++b) {
    const Selection& s = selections[static_cast<std::size_t>(b)];
    const Eigen::Index col = b * out.plane() + s.position;
    const Scalar x = out.data(s.channel, col) - targets[static_cast<std::size_t>(b)];
    const Scalar ax = std::abs(x);
    total += ax < Scalar(1) ? Scalar(0.5) * x * x : ax - Scalar(0.5);
    if (grad_out) (*grad_out)(s.channel, col) += (ax < Scalar(1) ? x : (x > 0 ? Scalar(1) : Scalar(-1))) * inv_batch;
  }
  return total * inv_batch;
}

template <typename Scalar>
Scalar loss_at(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input, std::span<const Selection> sel,
               std::span<const Scalar> targets) {
  return selected_loss<Scalar>(run_forward<Scalar>(params, input, nullptr), sel, targets, nullptr);
}

// Reference to one scalar parameter by flat index in declaration order.
template <typename Scalar>
Scalar& parameter_at(NetworkParams<Scalar>& params, std::int64_t index) {
  for (auto& l : params.layers) {
    if (index < l.weight.size()) return l.weight.data()[index];
    index -= l.weight.size();
    if (index < l.bias.size()) return l.bias.data()[index];
    index -= l.bias.size();
  }
  fault("parameter index out of range");
}

template <typename Scalar>
Scalar parameter_at(const Gradients<Scalar>& grads, std::int64_t index) {
  for (const auto& l : grads) {
    if (index < l.weight.size()) return l.weight.data()[index];
    index -= l.weight.size();
    if (index < l.bias.size()) return l.bias.data()[index];
    index -= l.bias.size();
  }
  fault("parameter index out of range");
}

void write_u32(std::ostream& os, std::uint32_t v) {
  const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                              static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
  os.write(reinterpret_cast<const char*>(b), 4);
}

std::uint32_t read_u32(std::istream& is) {
  unsigned char b[4];
  if (!is.read(reinterpret_cast<char*>(b), 4)) throw ConfigError("checkpoint: truncated file");
  return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
         (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

}  // namespace

int Architecture::size_multiple() const {
  int m = 1;
  int down = 1;
  for (const LayerSpec& l : layers) {
    if (l.upsample_before) down /= 2;
    down *= l.stride;
    m = std::max(m, down);
  }
  return m;
}

std::string Architecture::describe() const {
  std::ostringstream os;
  os << "in=" << input_channels;
  for (const LayerSpec& l : layers) {
    os << " |" << (l.upsample_before ? " up2" : "") << " conv3x3 " << l.in_channels << "->" << l.out_channels
       << " s" << l.stride << (l.relu ? " relu" : "");
  }
  return os.str();
}

Architecture Architecture::reference(int actions, int input_channels, int width) {
  if (width < 1) throw ConfigError("network width must be positive");
  Architecture a;
  a.input_channels = input_channels;
  a.layers = {
      {input_channels, width, 1, false, true},
      {width, 2 * width, 2, false, true},
      {2 * width, 4 * width, 2, false, true},
      {4 * width, 4 * width, 1, false, true},
      {4 * width, 2 * width, 1, true, true},
      {2 * width, actions, 1, true, false},
  };
  return a;
}

Architecture Architecture::linear(int actions, int input_channels) {
  Architecture a;
  a.input_channels = input_channels;
  a.layers = {{input_channels, actions, 1, false, false}};
  return a;
}

template <typename Scalar>
std::int64_t NetworkParams<Scalar>::parameter_count() const {
  std::int64_t n = 0;
  for (const auto& l : layers) n += l.weight.size() + l.bias.size();
  return n;
}

template <typename Scalar>
bool NetworkParams<Scalar>::operator==(const NetworkParams& o) const {
  if (!(arch == o.arch) || layers.size() != o.layers.size()) return false;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    if (layers[i].weight != o.layers[i].weight || layers[i].bias != o.layers[i].bias) return false;
  }
  return true;
}

template <typename Scalar>
NetworkParams<Scalar> init_params(const Architecture& arch, Rng& rng, Init mode) {
  NetworkParams<Scalar> p;
  p.arch = arch;
  int channels = arch.input_channels;
  for (std::size_t i = 0; i < arch.layers.size(); ++i) {
    const LayerSpec& l = arch.layers[i];
    if (l.in_channels != channels) throw ConfigError("architecture: layer channel mismatch");
    channels = l.out_channels;
    ConvParams<Scalar> c{Matrix<Scalar>::Zero(l.out_channels, 9 * l.in_channels), Vector<Scalar>::Zero(l.out_channels)};
    const bool head = i + 1 == arch.layers.size();
    if (!head || mode == Init::Randomized) {
      const double bound = std::sqrt(6.0 / (9.0 * l.in_channels));
      std::uniform_real_distribution<double> u(-bound, bound);
      for (Eigen::Index k = 0; k < c.weight.size(); ++k) c.weight.data()[k] = static_cast<Scalar>(u(rng));
      if (mode == Init::Randomized) {
        std::uniform_real_distribution<double> ub(-0.1, 0.1);
        for (Eigen::Index k = 0; k < c.bias.size(); ++k) c.bias[k] = static_cast<Scalar>(ub(rng));
      }
    }
    p.layers.push_back(std::move(c));
  }
  return p;
}

template <typename Scalar>
Tensor<Scalar> forward(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input) {
  return run_forward<Scalar>(params, input, nullptr);
}

template <typename Scalar>
Scalar loss(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input, std::span<const Selection> selections,
            std::span<const Scalar> targets) {
  return loss_at<Scalar>(params, input, selections, targets);
}

template <typename Scalar>
Scalar loss_and_grad(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input,
                     std::span<const Selection> selections, std::span<const Scalar> targets, Gradients<Scalar>& grads) {
  std::vector<LayerCache<Scalar>> caches;
  caches.reserve(params.layers.size());
  const Tensor<Scalar> out = run_forward<Scalar>(params, input, &caches);
  Matrix<Scalar> grad = Matrix<Scalar>::Zero(out.data.rows(), out.data.cols());
  const Scalar value = selected_loss<Scalar>(out, selections, targets, &grad);

  grads.assign(params.layers.size(), ConvParams<Scalar>{});
  for (std::size_t k = params.layers.size(); k-- > 0;) {
    const LayerSpec& spec = params.arch.layers[k];
    const ConvParams<Scalar>& p = params.layers[k];
    LayerCache<Scalar>& cache = caches[k];
    if (spec.relu) grad = (cache.output.data.array() > Scalar(0)).select(grad, Scalar(0));
    grads[k].weight.noalias() = grad * cache.cols.transpose();
    grads[k].bias = grad.rowwise().sum();
    if (k == 0) break;

    const Matrix<Scalar> dcols = p.weight.transpose() * grad;
    Tensor<Scalar> dx{input.batch, cache.conv_h, cache.conv_w,
                      Matrix<Scalar>::Zero(spec.in_channels, static_cast<Eigen::Index>(input.batch) * cache.conv_h * cache.conv_w)};
    col2im<Scalar>(dcols, dx, spec.stride, cache.output.height, cache.output.width);
    if (spec.upsample_before) dx = upsample2x_backward<Scalar>(dx, cache.in_h, cache.in_w);
    grad = std::move(dx.data);
  }
  return value;
}

template <typename Scalar>
OptimizerState<Scalar> OptimizerState<Scalar>::zeros_like(const NetworkParams<Scalar>& params, const SgdConfig& cfg) {
  OptimizerState s;
  s.config = cfg;
  for (const auto& l : params.layers) {
    s.velocity.push_back({Matrix<Scalar>::Zero(l.weight.rows(), l.weight.cols()), Vector<Scalar>::Zero(l.bias.size())});
  }
  return s;
}

template <typename Scalar>
Scalar global_norm(const Gradients<Scalar>& grads) {
  double sq = 0.0;
  for (const auto& g : grads) {
    sq += g.weight.template cast<double>().squaredNorm();
    sq += g.bias.template cast<double>().squaredNorm();
  }
  return static_cast<Scalar>(std::sqrt(sq));
}

template <typename Scalar>
Scalar sgd_step(NetworkParams<Scalar>& params, OptimizerState<Scalar>& state, Gradients<Scalar> grads) {
  if (grads.size() != params.layers.size() || state.velocity.size() != params.layers.size())
    throw ConfigError("sgd_step: gradient/parameter shape mismatch");
  const SgdConfig& cfg = state.config;
  const Scalar norm = global_norm(grads);
  if (norm > Scalar(cfg.clip_norm)) {
    const Scalar scale = Scalar(cfg.clip_norm) / norm;
    for (auto& g : grads) {
      g.weight *= scale;
      g.bias *= scale;
    }
  }
  const Scalar mu = static_cast<Scalar>(cfg.momentum);
  const Scalar lr = static_cast<Scalar>(cfg.learning_rate);
  const Scalar wd = static_cast<Scalar>(cfg.weight_decay);
  for (std::size_t i = 0; i < params.layers.size(); ++i) {
    auto& p = params.layers[i];
    auto& v = state.velocity[i];
    auto& g = grads[i];
    if (g.weight.rows() != p.weight.rows() || g.weight.cols() != p.weight.cols() || g.bias.size() != p.bias.size())
      throw ConfigError("sgd_step: gradient/parameter shape mismatch");
    if (wd != Scalar(0)) g.weight += wd * p.weight;
    v.weight = mu * v.weight + g.weight;
    v.bias = mu * v.bias + g.bias;
    p.weight -= lr * v.weight;
    p.bias -= lr * v.bias;
  }
  return norm;
}

template <typename Scalar>
double grad_check(const NetworkParams<Scalar>& params, const Tensor<Scalar>& input,
                  std::span<const Selection> selections, std::span<const Scalar> targets, Rng& rng,
                  const GradCheckOptions& options) {
  Gradients<Scalar> analytic;
  loss_and_grad<Scalar>(params, input, selections, targets, analytic);

  NetworkParams<double> probe = params.template cast<double>();
  const Tensor<double> input64{input.batch, input.height, input.width, input.data.template cast<double>()};
  std::vector<double> targets64(targets.begin(), targets.end());

  std::uniform_int_distribution<std::int64_t> pick(0, params.parameter_count() - 1);
  double worst = 0.0;
  for (int s = 0; s < options.samples; ++s) {
    const std::int64_t index = pick(rng);
    double& w = parameter_at(probe, index);
    const double original = w;
    w = original + options.eps;
    const double up = loss_at<double>(probe, input64, selections, targets64);
    w = original - options.eps;
    const double down = loss_at<double>(probe, input64, selections, targets64);
    w = original;
    const double numeric = (up - down) / (2.0 * options.eps);
    const double exact = static_cast<double>(parameter_at(analytic, index));
    const double denom = std::max({std::abs(numeric), std::abs(exact), options.floor});
    worst = std::max(worst, std::abs(numeric - exact) / denom);
  }
  return worst;
}

void save_checkpoint(const std::filesystem::path& path, const NetworkParams<float>& params, std::uint32_t level) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("checkpoint: cannot open " + path.string() + " for writing");
  os.write(kCheckpointMagic, 4);
  write_u32(os, kCheckpointVersion);
  write_u32(os, level);
  write_u32(os, static_cast<std::uint32_t>(params.arch.input_channels));
  write_u32(os, static_cast<std::uint32_t>(params.arch.layers.size()));
  for (const LayerSpec& l : params.arch.layers) {
    write_u32(os, static_cast<std::uint32_t>(l.in_channels));
    write_u32(os, static_cast<std::uint32_t>(l.out_channels));
    write_u32(os, static_cast<std::uint32_t>(l.stride));
    write_u32(os, l.upsample_before ? 1u : 0u);
    write_u32(os, l.relu ? 1u : 0u);
  }
  for (const auto& l : params.layers) {
    write_u32(os, static_cast<std::uint32_t>(l.weight.rows()));
    write_u32(os, static_cast<std::uint32_t>(l.weight.cols()));
    write_u32(os, static_cast<std::uint32_t>(l.bias.size()));
  }
  auto put = [&](float f) { write_u32(os, std::bit_cast<std::uint32_t>(f)); };
  for (const auto& l : params.layers) {
    for (Eigen::Index k = 0; k < l.weight.size(); ++k) put(l.weight.data()[k]);
    for (Eigen::Index k = 0; k < l.bias.size(); ++k) put(l.bias[k]);
  }
  if (!os) throw ConfigError("checkpoint: write failed for " + path.string());
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("checkpoint: cannot open " + path.string());
  char magic[4];
  if (!is.read(magic, 4) || !std::equal(magic, magic + 4, kCheckpointMagic))
    throw ConfigError("checkpoint: bad magic in " + path.string());
  const std::uint32_t version = read_u32(is);
  if (version != kCheckpointVersion)
    throw ConfigError("checkpoint: unsupported version " + std::to_string(version));
  Checkpoint ck;
  ck.level = read_u32(is);
  ck.params.arch.input_channels = static_cast<int>(read_u32(is));
  const std::uint32_t n = read_u32(is);
  if (n > 1024) throw ConfigError("checkpoint: implausible layer count");
  for (std::uint32_t i = 0; i < n; ++i) {
    LayerSpec l;
    l.in_channels = static_cast<int>(read_u32(is));
    l.out_channels = static_cast<int>(read_u32(is));
    l.stride = static_cast<int>(read_u32(is));
    l.upsample_before = read_u32(is) != 0;
    l.relu = read_u32(is) != 0;
    ck.params.arch.layers.push_back(l);
  }
  for (std::uint32_t i = 0; i < n; ++i) {
    const auto rows = read_u32(is);
    const auto cols = read_u32(is);
    const auto bias = read_u32(is);
    const LayerSpec& l = ck.params.arch.layers[i];
    if (rows != static_cast<std::uint32_t>(l.out_channels) || cols != static_cast<std::uint32_t>(9 * l.in_channels) ||
        bias != rows)
      throw ConfigError("checkpoint: layer " + std::to_string(i) + " shape disagrees with its descriptor");
    ck.params.layers.push_back({Matrix<float>(rows, cols), Vector<float>(bias)});
  }
  for (auto& l : ck.params.layers) {
    for (Eigen::Index k = 0; k < l.weight.size(); ++k) l.weight.data()[k] = std::bit_cast<float>(read_u32(is));
    for (Eigen::Index k = 0; k < l.bias.size(); ++k) l.bias[k] = std::bit_cast<float>(read_u32(is));
  }
  return ck;
}

std::string architecture_diff(const Architecture& expected, const Architecture& found) {
  if (expected == found) return {};
  std::ostringstream os;
  os << "expected: " << expected.describe() << "\n   found: " << found.describe();
  return os.str();
}

#define BLOWBOT_INSTANTIATE(S)                                                                                   \
  template struct NetworkParams<S>;                                                                              \
  template struct OptimizerState<S>;                                                                             \
  template NetworkParams<S> init_params<S>(const Architecture&, Rng&, Init);                                     \
  template Tensor<S> forward<S>(const NetworkParams<S>&, const Tensor<S>&);                                      \
  template S loss<S>(const NetworkParams<S>&, const Tensor<S>&, std::span<const Selection>, std::span<const S>); \
  template S loss_and_grad<S>(const NetworkParams<S>&, const Tensor<S>&, std::span<const Selection>,             \
                              std::span<const S>, Gradients<S>&);                                                \
  template S global_norm<S>(const Gradients<S>&);                                                                \
  template S sgd_step<S>(NetworkParams<S>&, OptimizerState<S>&, Gradients<S>);                                   \
  template double grad_check<S>(const NetworkParams<S>&, const Tensor<S>&, std::span<const Selection>,           \
                                std::span<const S>, Rng&, const GradCheckOptions&);

BLOWBOT_INSTANTIATE(float)
BLOWBOT_INSTANTIATE(double)

}  // namespace blowbot::nn
