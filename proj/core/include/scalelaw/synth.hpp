#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "scalelaw/estimator.hpp"
#include "scalelaw/planner.hpp"
#include "scalelaw/run.hpp"

namespace scalelaw {

/// Parametric loss surface L(N, D) = E + A * N^-alpha + B * D^-beta
/// with a closed-form compute-optimal allocation; the test oracle for
/// the whole pipeline.
struct SynthSpec {
  double irreducible = 0.0;   // E
  double size_coeff = 0.0;    // A
  double size_exp = 0.0;      // alpha
  double data_coeff = 0.0;    // B
  double data_exp = 0.0;      // beta
  // Multiplicative warmup excess: loss *= 1 + m * max(0, 1 - D/W).
  std::optional<double> warmup_penalty;
  std::optional<NoiseProfile> noise;
  std::uint64_t seed = 0;
};

double surface_loss(const SynthSpec& spec, double n, double d);

struct AnalyticOptimum {
  double n_star = 0.0;
  double d_star = 0.0;
  double a_true = 0.0;       // beta / (alpha + beta)
  double coeff_true = 0.0;   // (alpha*A / (beta*B*6^beta))^(1/(alpha+beta))
};

/// Closed-form minimizer of the clean surface under D = C/(6N).
AnalyticOptimum analytic_optimum(const SynthSpec& spec, double flops);

struct GenConfig {
  int batch_size_seqs = 128;
  int log_interval = 20;
  double learning_rate = 3e-3;
  double beta2 = 0.95;
  std::string dataset = "synthetic";
};

/// Samples the plan's runs from the surface: step losses are interval
/// averages of the surface at the tokens seen, validation records land
/// on the plan's FLOP-grid crossings. Deterministic per (seed, run_id).
std::vector<TrainingRun> generate_runs(const SynthSpec& spec,
                                       const ExperimentPlan& plan,
                                       const GenConfig& config = {});

}  // namespace scalelaw
