#pragma once

#include <optional>
#include <vector>

#include "scalelaw/accounting.hpp"
#include "scalelaw/run.hpp"

namespace scalelaw {

struct LossEntry {
  double step = 0.0;    // may be fractional after lag compensation
  double tokens = 0.0;
  double loss = 0.0;
};

struct LossSeries {
  std::vector<LossEntry> entries;
  bool smoothed = false;
};

/// Raw training-loss series of a run.
LossSeries series_from_steps(const TrainingRun& run);

/// Variable-width smoothing: entry i becomes the mean of raw losses at
/// indices i - floor(p*i) .. i + floor(p*i), clamped at the series
/// bounds. Every coordinate is shifted back by k/2 steps' worth of
/// tokens to undo the lag of interval-averaged logging.
LossSeries smooth_loss(const LossSeries& series, double window_fraction,
                       int log_interval, double tokens_per_step);

enum class LossSource { Validation, SmoothedTrain };

/// Log-space linear interpolation of loss between the two samples
/// closest to the target step s*. Exposed separately so its algebra is
/// testable apart from the proximity gate.
double interpolate_log_loss(double s_target, double s0, double loss0,
                            double s1, double loss1);

/// Loss of `run` at compute C under `scheme`: interpolates log-loss at
/// the two samples nearest s* = C / (6 * N_scheme * B). Returns nullopt
/// when the nearest sample is further than 10% (relative) from s*.
/// Throws if the run has no samples of the requested source.
std::optional<double> loss_at_flops(const TrainingRun& run, double flops,
                                    SizeScheme scheme, LossSource source,
                                    double window_fraction = 0.05);

}  // namespace scalelaw
