#include "scalelaw/accounting.hpp"

#include <stdexcept>

namespace scalelaw {

std::string to_string(SizeScheme scheme) {
  switch (scheme) {
    case SizeScheme::Linear: return "linear";
    case SizeScheme::Effective: return "effective";
    case SizeScheme::KaplanNoHead: return "kaplan";
  }
  return "linear";
}

SizeScheme parse_size_scheme(const std::string& name) {
  if (name == "linear") return SizeScheme::Linear;
  if (name == "effective" || name == "eff") return SizeScheme::Effective;
  if (name == "kaplan" || name == "kaplan-no-head") {
    return SizeScheme::KaplanNoHead;
  }
  throw std::invalid_argument("unknown size scheme: " + name);
}

std::int64_t ffn_dim(std::int64_t d) {
  if (d < 1) throw std::invalid_argument("ffn_dim: width must be positive");
  return 256 * ((255 + (8 * d) / 3) / 256);
}

static void check_arch(const ModelArch& a) {
  if (a.depth < 1 || a.width < 1 || a.vocab < 1 || a.seq_len < 1 ||
      a.heads < 1) {
    throw std::invalid_argument("model_size: all dimensions must be positive");
  }
  if (a.width % a.heads != 0) {
    throw std::invalid_argument("model_size: width not divisible by heads");
  }
}

double model_size(const ModelArch& arch, SizeScheme scheme) {
  check_arch(arch);
  const double d = arch.width;
  const double l = arch.depth;
  const double v = arch.vocab;
  const double n_ctx = arch.seq_len;
  const double d_ff = double(ffn_dim(arch.width));
  const double linear = (3.0 * d_ff + 4.0 * d) * d * l + d * v;
  switch (scheme) {
    case SizeScheme::Linear:
      return linear;
    case SizeScheme::Effective:
      return linear + n_ctx * d * l;
    case SizeScheme::KaplanNoHead: {
      double r = linear - d * v;
      if (r <= 0.0) {
        throw std::domain_error(
            "model_size: degenerate architecture, KaplanNoHead size <= 0");
      }
      return r;
    }
  }
  return linear;
}

double train_flops(double n_params, double tokens) {
  return 6.0 * n_params * tokens;
}

double tokens_for_budget(double n_params, double flops) {
  return flops / (6.0 * n_params);
}

std::vector<ModelArch> canonical_model_grid() {
  static constexpr int kDims[16][2] = {
      {3, 96},    {4, 128},   {5, 160},   {6, 224},  {8, 288},  {9, 320},
      {10, 384},  {12, 480},  {14, 576},  {15, 640}, {18, 704}, {21, 832},
      {23, 1024}, {26, 1120}, {26, 1312}, {30, 1504}};
  std::vector<ModelArch> grid;
  grid.reserve(16);
  for (const auto& [depth, width] : kDims) {
    grid.push_back(ModelArch{.depth = depth, .width = width});
  }
  return grid;
}

}  // namespace scalelaw
