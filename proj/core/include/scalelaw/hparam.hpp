#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "scalelaw/estimator.hpp"
#include "scalelaw/lawfit.hpp"

namespace scalelaw {

struct SweepPoint {
  double n = 0.0;               // model size
  double batch_size_seqs = 0.0;
  double lr = 0.0;
  double beta2 = 0.0;
  double final_loss = 0.0;
};

struct LrOptimum {
  double lr_star = 0.0;
  double loss_star = 0.0;
  bool at_edge = false;
};

/// Stage 1: for one (model size, batch size) slice, reduce over beta2 by
/// pointwise minimum, Akima-fit loss vs learning rate in log-log space
/// and minimize. Edge minima are returned flagged, not rejected.
LrOptimum optimal_lr_per_batch(std::span<const SweepPoint> sweep, double n,
                               double batch);

struct HParamOptimum {
  double bs_star = 0.0;
  double lr_star = 0.0;
  double loss_star = 0.0;
  bool at_edge = false;
};

/// Stage 2: Akima over (batch size, stage-1 loss) gives the optimal
/// batch size; the optimal learning rate is the (batch, stage-1 lr)
/// interpolant evaluated there.
HParamOptimum optimal_hparams(std::span<const SweepPoint> sweep, double n);

struct PowerLaw1D {
  double coeff = 0.0;
  double exponent = 0.0;
  double eval(double n) const;
};

struct HParamLaws {
  PowerLaw1D bs_law;   // exponent > 0
  PowerLaw1D lr_law;   // exponent < 0
};

struct HParamOptimumRow {
  double n = 0.0;
  double bs_star = 0.0;
  double lr_star = 0.0;
};

/// Unweighted log-space regression of the per-size optima.
HParamLaws fit_hparam_laws(const std::vector<HParamOptimumRow>& optima);

struct RoundedHParams {
  double batch_size_seqs = 0.0;  // nearest positive multiple of gpu_count
  double lr = 0.0;               // two significant digits
};

RoundedHParams round_hparams(double bs, double lr, int gpu_count);

/// 0.99 below 256 sequences, 0.95 from 256 up.
double select_beta2(double batch_size_seqs);

/// A sweep observation resolved to a token-to-parameter ratio, used by
/// the ideal-tuning adjustment.
struct RhoSweepRecord {
  double n = 0.0;
  double rho = 0.0;
  double batch_size_seqs = 0.0;
  double lr = 0.0;
  double beta2 = 0.0;
  double loss = 0.0;
};

struct IdealTuningResult {
  std::vector<IsoFlopCurve> adjusted;
  std::vector<NStarEstimate> estimates;
  PowerLawFit refit;
};

/// Ideal-tuning adjustment: per (N, rho) the excess loss of the chosen
/// hyperparameters over the sweep optimum is median-filtered over
/// rho' in [rho-1, rho+1], interpolated across ln N for sizes absent
/// from the sweep, mirrored around rho=20 for rho in (20, 30], and
/// subtracted from the curve losses. The law is then refit on budgets
/// 1.25e16 * 2^k, k = 0..7, keeping points with rho in [2, 30].
IdealTuningResult ideal_tuning_adjust(
    const std::vector<RhoSweepRecord>& sweep,
    const std::vector<IsoFlopCurve>& curves, const HParamLaws& chosen,
    int bootstrap, std::uint64_t seed);

}  // namespace scalelaw
