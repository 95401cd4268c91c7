#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "scalelaw/estimator.hpp"
#include "scalelaw/lawfit.hpp"
#include "scalelaw/planner.hpp"
#include "scalelaw/synth.hpp"

namespace scalelaw {

/// Pipeline failure carrying the stage name for machine-readable
/// error reporting.
class StageError : public std::runtime_error {
 public:
  StageError(std::string stage, const std::string& message, int exit_code = 1)
      : std::runtime_error(message), stage_(std::move(stage)),
        exit_code_(exit_code) {}
  const std::string& stage() const { return stage_; }
  int exit_code() const { return exit_code_; }

 private:
  std::string stage_;
  int exit_code_;
};

struct ReportSpec {
  std::filesystem::path output_dir;
  std::set<std::string> formats{"csv", "json", "svg"};
  double reference_flops = kChinchillaFlops;
  bool deterministic = false;  // drop the generator comment from SVGs
};

struct PipelineConfig {
  // Input: either a directory of run manifests or a synthetic spec.
  std::optional<std::filesystem::path> runs_dir;
  std::optional<SynthSpec> synth_spec;
  PlanStyle plan_style = PlanStyle::TunedConstant;
  FlopGrid grid;
  SizeScheme scheme = SizeScheme::Linear;
  LossSource source = LossSource::Validation;
  NoiseProfile profile;
  int bootstrap = 500;
  std::uint64_t seed = 0;
  ReportSpec report;
};

PipelineConfig load_pipeline_config(const std::filesystem::path& path);

struct PipelineResult {
  std::vector<IsoFlopCurve> curves;
  std::vector<NStarEstimate> estimates;
  PowerLawFit fit;
  std::vector<LossStarEstimate> opt_loss;
  std::optional<SaturatingFit> saturating;
  std::vector<std::filesystem::path> artifacts;
};

/// End-to-end: ingest (or synthesize), estimate N*(C) per budget, fit
/// the power law with CIs, extract the optimal-loss curve and its
/// saturating fit, and write the requested report artifacts.
PipelineResult run_pipeline(const PipelineConfig& config);

/// Report-only entry points (no recomputation in the rendering layer).
std::string render_isoflop_svg(const std::vector<IsoFlopCurve>& curves,
                               const std::vector<NStarEstimate>& estimates,
                               bool deterministic);
std::string render_nstar_fit_svg(const std::vector<NStarEstimate>& estimates,
                                 const PowerLawFit& fit, bool deterministic);
std::string render_opt_loss_svg(const std::vector<LossStarEstimate>& losses,
                                const std::optional<SaturatingFit>& fit,
                                bool deterministic);
std::string render_hparam_fit_svg(
    const std::vector<std::array<double, 3>>& optima_n_bs_lr,
    const struct HParamLaws& laws, bool deterministic);
std::string render_accuracy_svg(const std::vector<AccuracyPoint>& points,
                                bool deterministic);

}  // namespace scalelaw
