#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "scalelaw/accounting.hpp"
#include "scalelaw/lawfit.hpp"
#include "scalelaw/run.hpp"

namespace scalelaw {

struct FlopGrid {
  double base = 1.25e16;
  double factor = 2.0;
  int count = 12;

  double value(int k) const;              // base * factor^k, no drift
  std::vector<double> values() const;
};

enum class ScheduleStyle { ConstantReuse, CosinePerBudget };

struct PlannedRun {
  ModelArch arch;
  Schedule schedule;
  std::vector<double> target_flops;  // CosinePerBudget: exactly one entry
};

struct ExperimentPlan {
  FlopGrid grid;
  ScheduleStyle style = ScheduleStyle::ConstantReuse;
  SizeScheme scheme = SizeScheme::Linear;
  std::vector<PlannedRun> runs;
};

/// Models whose token-to-parameter ratio rho = C/(6 N^2) falls in
/// rho_range, at most `count` of them, preferring those closest in
/// ln(rho) to the geometric center of the range. Sorted by size.
std::vector<ModelArch> select_isoflop_models(
    double flops, std::span<const ModelArch> grid_models, SizeScheme scheme,
    std::pair<double, double> rho_range = {1.0, 100.0}, int count = 7);

enum class WarmupStyle { MatchModelSize, KaplanFixed, CosineCapped };

/// MatchModelSize -> N; KaplanFixed -> 3000 * 2^19; CosineCapped ->
/// min(N, 0.2 * budget_tokens).
double warmup_tokens(double n, WarmupStyle style,
                     std::optional<double> budget_tokens = std::nullopt);

/// CosinePerBudget charges every run its single target budget;
/// ConstantReuse charges each run only its largest target.
double experiment_cost(const ExperimentPlan& plan);

struct AccuracyPoint {
  double budget = 0.0;       // cumulative experiment cost up to C_K'
  double exponent = 0.0;
  std::pair<double, double> ci{0.0, 0.0};
  double ci_width = 0.0;
  double rms_rel_err = 0.0;  // of N*(C) predictions vs the reference fit
};

/// Truncation study: refits on the first 2..K curves, reporting how the
/// exponent, its CI and prediction error evolve with spent compute.
std::vector<AccuracyPoint> accuracy_vs_compute(
    const std::vector<IsoFlopCurve>& curves, const PowerLawFit& reference,
    int bootstrap, std::uint64_t seed);

/// Learning-rate multiplier in [0,1]: linear ramp over warmup, then for
/// Cosine schedules f + (1-f)/2 * (1 + cos(pi * t)) down to the final
/// fraction f; Constant schedules stay at 1.
double cosine_lr(const Schedule& schedule, double tokens_seen);

/// The experiment configurations behind the panel progression.
enum class PlanStyle { Kaplan, WarmupFixed, Cosine, TunedConstant };

PlanStyle parse_plan_style(const std::string& name);
std::string to_string(PlanStyle style);

/// Builds a full plan over the canonical grid (or a caller-provided
/// model set) for the given configuration style.
ExperimentPlan make_plan(PlanStyle style, const FlopGrid& grid,
                         std::span<const ModelArch> models);

/// Run-exclusion heuristic for cost summaries: drops runs training past
/// 100 tokens per parameter.
bool plan_run_excluded(const PlannedRun& run, SizeScheme scheme);

}  // namespace scalelaw
