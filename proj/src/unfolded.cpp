#include "tomo/unfolded.hpp"

#include "json_util.hpp"
#include "tomo/scene_config.hpp"

#include <cmath>
#include <fstream>
#include <ostream>

namespace tomo {

void Conv1dParams::validate(const std::string& where) const {
  if (out_channels < 1 || in_channels < 1 || kernel < 1) {
    throw TomoError(where + ": convolution shape must be positive");
  }
  if (kernel % 2 == 0) throw TomoError(where + ": kernel size must be odd for zero padding");
  const auto expected = static_cast<std::size_t>(out_channels) * in_channels * kernel;
  if (weight.size() != expected) {
    throw TomoError(where + ": weight has " + std::to_string(weight.size()) +
                    " values, shape needs " + std::to_string(expected));
  }
  if (bias.size() != static_cast<std::size_t>(out_channels)) {
    throw TomoError(where + ": bias length does not match out_channels");
  }
  for (double x : weight) {
    if (!std::isfinite(x)) throw TomoError(where + ": non-finite weight");
  }
  for (double x : bias) {
    if (!std::isfinite(x)) throw TomoError(where + ": non-finite bias");
  }
}

RMatrix conv1d(const Conv1dParams& conv, const RMatrix& input) {
  if (input.rows() != conv.in_channels) throw TomoError("conv1d input channel mismatch");
  const int len = static_cast<int>(input.cols());
  const int pad = (conv.kernel - 1) / 2;
  RMatrix out(conv.out_channels, len);
  for (int o = 0; o < conv.out_channels; ++o) {
    for (int t = 0; t < len; ++t) {
      double acc = conv.bias[static_cast<std::size_t>(o)];
      for (int i = 0; i < conv.in_channels; ++i) {
        for (int k = 0; k < conv.kernel; ++k) {
          const int src = t + k - pad;
          if (src >= 0 && src < len) acc += conv.w(o, i, k) * input(i, src);
        }
      }
      out(o, t) = acc;
    }
  }
  return out;
}

void UnfoldedModelWeights::validate() const {
  if (format_version != kWeightFormatVersion) {
    throw TomoError("unsupported weight format_version " + std::to_string(format_version) +
                    " (this build reads version " + std::to_string(kWeightFormatVersion) + ")");
  }
  if (n_virtual < 2) throw TomoError("weights: n_virtual must be >= 2");
  if (!(lag_spacing > 0.0)) throw TomoError("weights: lag_spacing must be positive");
  if (n_layers < 1) throw TomoError("weights: n_layers must be >= 1");
  if (channels < 1) throw TomoError("weights: channels must be >= 1");
  if (kernel < 1 || kernel % 2 == 0) throw TomoError("weights: kernel must be odd and positive");
  if (activation != "relu") throw TomoError("weights: unsupported activation '" + activation + "'");
  if (padding != "zero") throw TomoError("weights: unsupported padding '" + padding + "'");
  if (dykstra_iters < 1) throw TomoError("weights: dykstra_iters must be >= 1");
  if (psd_repair != "diagonal_loading") {
    throw TomoError("weights: unsupported psd_repair '" + psd_repair + "'");
  }
  if (layers.size() != static_cast<std::size_t>(n_layers)) {
    throw TomoError("weights: header declares " + std::to_string(n_layers) + " layers, file has " +
                    std::to_string(layers.size()));
  }
  for (std::size_t m = 0; m < layers.size(); ++m) {
    const auto& l = layers[m];
    const std::string where = "weights layer " + std::to_string(m);
    l.conv1.validate(where + " conv1");
    l.conv2.validate(where + " conv2");
    l.conv3.validate(where + " conv3");
    const auto shape_ok = [&](const Conv1dParams& c, int out, int in) {
      return c.out_channels == out && c.in_channels == in && c.kernel == kernel;
    };
    if (!shape_ok(l.conv1, channels, 2) || !shape_ok(l.conv2, channels, channels) ||
        !shape_ok(l.conv3, 2, channels)) {
      throw TomoError(where + ": convolution shapes do not match the header");
    }
    if (!std::isfinite(l.raw_rho) || !std::isfinite(l.raw_eig_threshold)) {
      throw TomoError(where + ": non-finite raw parameter");
    }
  }
}

namespace {

Conv1dParams parse_conv(const json& j, const std::string& where) {
  jsonu::reject_unknown_keys(j, {"shape", "weight", "bias"}, where);
  if (!j.contains("shape") || !j.contains("weight") || !j.contains("bias")) {
    throw TomoError(where + ": needs shape, weight and bias");
  }
  const auto shape = jsonu::int_array(j.at("shape"), "shape");
  if (shape.size() != 3) throw TomoError(where + ": shape must be [out, in, kernel]");
  Conv1dParams c;
  c.out_channels = shape[0];
  c.in_channels = shape[1];
  c.kernel = shape[2];
  c.weight = jsonu::number_array(j.at("weight"), "weight");
  c.bias = jsonu::number_array(j.at("bias"), "bias");
  return c;
}

json conv_to_json(const Conv1dParams& c) {
  return json{{"shape", {c.out_channels, c.in_channels, c.kernel}},
              {"weight", c.weight},
              {"bias", c.bias}};
}

Conv1dParams zero_conv(int out, int in, int kernel) {
  Conv1dParams c;
  c.out_channels = out;
  c.in_channels = in;
  c.kernel = kernel;
  c.weight.assign(static_cast<std::size_t>(out) * in * kernel, 0.0);
  c.bias.assign(static_cast<std::size_t>(out), 0.0);
  return c;
}

}  // namespace

UnfoldedModelWeights parse_weights(const std::string& text) {
  const json j = jsonu::parse(text, "weight file");
  jsonu::reject_unknown_keys(j,
                             {"format", "format_version", "n_virtual", "lag_spacing", "n_layers",
                              "channels", "kernel", "activation", "padding", "dykstra_iters",
                              "psd_repair", "layers"},
                             "weight file");
  const std::string where = "weight file";
  if (!j.contains("format") || jsonu::get_string(j.at("format"), "format") != kWeightFormatTag) {
    throw TomoError("weight file: missing or wrong 'format' tag (expected \"" +
                    std::string(kWeightFormatTag) + "\")");
  }
  UnfoldedModelWeights w;
  w.format_version = jsonu::required_int(j, "format_version", where);
  if (w.format_version != kWeightFormatVersion) {
    throw TomoError("unsupported weight format_version " + std::to_string(w.format_version) +
                    " (this build reads version " + std::to_string(kWeightFormatVersion) + ")");
  }
  w.n_virtual = jsonu::required_int(j, "n_virtual", where);
  w.lag_spacing = jsonu::required_number(j, "lag_spacing", where);
  w.n_layers = jsonu::required_int(j, "n_layers", where);
  w.channels = jsonu::required_int(j, "channels", where);
  w.kernel = jsonu::required_int(j, "kernel", where);
  if (j.contains("activation")) w.activation = jsonu::get_string(j.at("activation"), "activation");
  if (j.contains("padding")) w.padding = jsonu::get_string(j.at("padding"), "padding");
  w.dykstra_iters = jsonu::optional_int(j, "dykstra_iters", w.dykstra_iters);
  if (j.contains("psd_repair")) w.psd_repair = jsonu::get_string(j.at("psd_repair"), "psd_repair");
  if (!j.contains("layers") || !j.at("layers").is_array()) {
    throw TomoError("weight file: missing required key 'layers'");
  }
  for (std::size_t m = 0; m < j.at("layers").size(); ++m) {
    const json& lj = j.at("layers")[m];
    const std::string lw = "weight file layer " + std::to_string(m);
    jsonu::reject_unknown_keys(lj, {"conv1", "conv2", "conv3", "raw_rho", "raw_eig_threshold"},
                               lw);
    UnfoldedLayer layer;
    for (const char* key : {"conv1", "conv2", "conv3"}) {
      if (!lj.contains(key)) throw TomoError(lw + ": missing required key '" + key + "'");
    }
    layer.conv1 = parse_conv(lj.at("conv1"), lw + " conv1");
    layer.conv2 = parse_conv(lj.at("conv2"), lw + " conv2");
    layer.conv3 = parse_conv(lj.at("conv3"), lw + " conv3");
    layer.raw_rho = jsonu::required_number(lj, "raw_rho", lw);
    layer.raw_eig_threshold = jsonu::required_number(lj, "raw_eig_threshold", lw);
    w.layers.push_back(std::move(layer));
  }
  w.validate();
  return w;
}

UnfoldedModelWeights load_weights(const std::filesystem::path& path) {
  return parse_weights(read_text_file(path));
}

void write_weights(const UnfoldedModelWeights& weights, std::ostream& out) {
  weights.validate();
  json j;
  j["format"] = kWeightFormatTag;
  j["format_version"] = weights.format_version;
  j["n_virtual"] = weights.n_virtual;
  j["lag_spacing"] = weights.lag_spacing;
  j["n_layers"] = weights.n_layers;
  j["channels"] = weights.channels;
  j["kernel"] = weights.kernel;
  j["activation"] = weights.activation;
  j["padding"] = weights.padding;
  j["dykstra_iters"] = weights.dykstra_iters;
  j["psd_repair"] = weights.psd_repair;
  json layers = json::array();
  for (const auto& l : weights.layers) {
    layers.push_back(json{{"conv1", conv_to_json(l.conv1)},
                          {"conv2", conv_to_json(l.conv2)},
                          {"conv3", conv_to_json(l.conv3)},
                          {"raw_rho", l.raw_rho},
                          {"raw_eig_threshold", l.raw_eig_threshold}});
  }
  j["layers"] = std::move(layers);
  out << j.dump(1) << '\n';
}

void save_weights(const UnfoldedModelWeights& weights, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw TomoError("cannot open '" + path.string() + "' for writing");
  write_weights(weights, out);
  if (!out) throw TomoError("failed writing '" + path.string() + "'");
}

UnfoldedModelWeights make_zero_weights(int n_virtual, double lag_spacing, int n_layers,
                                       int channels, int kernel, double raw_rho,
                                       double raw_eig_threshold, int dykstra_iters) {
  UnfoldedModelWeights w;
  w.n_virtual = n_virtual;
  w.lag_spacing = lag_spacing;
  w.n_layers = n_layers;
  w.channels = channels;
  w.kernel = kernel;
  w.dykstra_iters = dykstra_iters;
  for (int m = 0; m < n_layers; ++m) {
    UnfoldedLayer l;
    l.conv1 = zero_conv(channels, 2, kernel);
    l.conv2 = zero_conv(channels, channels, kernel);
    l.conv3 = zero_conv(2, channels, kernel);
    l.raw_rho = raw_rho;
    l.raw_eig_threshold = raw_eig_threshold;
    w.layers.push_back(std::move(l));
  }
  w.validate();
  return w;
}

UnfoldedModelWeights make_random_weights(int n_virtual, double lag_spacing, int n_layers,
                                         int channels, int kernel, double scale,
                                         std::uint64_t seed) {
  auto w = make_zero_weights(n_virtual, lag_spacing, n_layers, channels, kernel, 0.0, -10.0);
  Rng rng(seed);
  std::normal_distribution<double> normal(0.0, scale);
  for (auto& l : w.layers) {
    for (Conv1dParams* c : {&l.conv1, &l.conv2, &l.conv3}) {
      for (double& x : c->weight) x = normal(rng);
      for (double& x : c->bias) x = normal(rng);
    }
  }
  return w;
}

UnfoldedNetwork::UnfoldedNetwork(const LagEmbedding& embedding, UnfoldedModelWeights weights)
    : embedding_(embedding), weights_(std::move(weights)) {
  weights_.validate();
  if (weights_.n_virtual != embedding_.n_virtual()) {
    throw TomoError("weights were built for N_v = " + std::to_string(weights_.n_virtual) +
                    " but the embedding uses N_v = " + std::to_string(embedding_.n_virtual()) +
                    "; the coverage condition (N_v-1)*spacing >= baseline span must hold for "
                    "the grid the model was trained on");
  }
  if (std::abs(weights_.lag_spacing - embedding_.grid().spacing) >
      1e-12 * std::max(1.0, weights_.lag_spacing)) {
    throw TomoError("weights were built for lag spacing " + std::to_string(weights_.lag_spacing) +
                    " m but the embedding uses " + std::to_string(embedding_.grid().spacing) +
                    " m");
  }
  factors_.reserve(weights_.layers.size());
  for (const auto& l : weights_.layers) factors_.emplace_back(embedding_, l.rho());
}

CVector UnfoldedNetwork::learned_block(int layer, const CVector& u) const {
  const auto& l = weights_.layers.at(static_cast<std::size_t>(layer));
  const Eigen::Index n = u.size();
  RMatrix x(2, n);
  x.row(0) = u.real().transpose();
  x.row(1) = u.imag().transpose();
  RMatrix h = conv1d(l.conv1, x).cwiseMax(0.0);
  h = conv1d(l.conv2, h).cwiseMax(0.0);
  const RMatrix o = conv1d(l.conv3, h);
  CVector out(n);
  out.real() = o.row(0).transpose();
  out.imag() = o.row(1).transpose();
  return out;
}

ToeplitzCovariance UnfoldedNetwork::forward(const CVector& y,
                                            const IterationObserver& observer) const {
  if (y.size() != embedding_.n_pairs()) {
    throw TomoError("pairwise vector length does not match the embedding");
  }
  require_finite(y, "pairwise products");
  const CVector psi_h_y = embedding_.adjoint(y);
  CVector u = psi_h_y;
  ToeplitzCovariance t{CVector::Zero(embedding_.n_virtual())};
  for (int m = 0; m < weights_.n_layers; ++m) {
    CVector v = u + learned_block(m, u);
    v(0) = cdouble(v(0).real(), 0.0);
    const CVector c = factors_[static_cast<std::size_t>(m)].solve(psi_h_y, v);
    const auto& layer = weights_.layers[static_cast<std::size_t>(m)];
    t = dykstra_project(toeplitz_from_lags(c), weights_.dykstra_iters, layer.eig_floor());
    if (!t.lags.allFinite()) {
      throw TomoError("unfolded forward pass produced non-finite values at layer " +
                      std::to_string(m));
    }
    u = t.lags;
    if (observer) observer(m, t);
  }
  return t;
}

ToeplitzCovariance unfolded_forward(const CVector& y, const LagEmbedding& embedding,
                                    const UnfoldedModelWeights& weights) {
  return UnfoldedNetwork(embedding, weights).forward(y);
}

}  // namespace tomo
