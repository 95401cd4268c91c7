#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "scalelaw/run.hpp"

namespace scalelaw {

/// The three model-size accounting schemes.
///  - Linear: parameters of all linear layers, head included.
///  - Effective: Linear plus the attention-operation equivalent n*d*l,
///    so 6*N_eff*D also covers attention FLOPs.
///  - KaplanNoHead: Linear minus the head's d*v parameters.
enum class SizeScheme { Linear, Effective, KaplanNoHead };

std::string to_string(SizeScheme scheme);
SizeScheme parse_size_scheme(const std::string& name);

/// SwiGLU feedforward width: 256 * floor((255 + floor(8d/3)) / 256).
std::int64_t ffn_dim(std::int64_t d);

/// Parameter count under the chosen scheme, returned as a real so that
/// interpolated off-grid sizes compose downstream. Throws if the
/// KaplanNoHead count is not positive.
double model_size(const ModelArch& arch, SizeScheme scheme);

/// FLOPs ~ 6*N*D.
double train_flops(double n_params, double tokens);

/// Inverse of train_flops in D: tokens = C / (6N).
double tokens_for_budget(double n_params, double flops);

/// The 16 (depth, width) configurations of the experiment grid,
/// v=50432, n=2048, 4 heads, sizes 5.17M..901.7M.
std::vector<ModelArch> canonical_model_grid();

}  // namespace scalelaw
