#pragma once

#include <cstdint>
#include <vector>

#include "scalelaw/run.hpp"
#include "scalelaw/signal.hpp"

namespace scalelaw {

/// Piecewise exp-linear loss-to-sigma map: sigma_lo below loss_lo,
/// sigma_hi above loss_hi, log-linear in loss in between.
struct NoiseProfile {
  double loss_lo = 3.0;
  double sigma_lo = 0.002;
  double loss_hi = 7.0;
  double sigma_hi = 0.05;
};

NoiseProfile refinedweb_profile();     // 3 -> 0.002, 7 -> 0.05
NoiseProfile openwebtext2_profile();   // 3 -> 0.01,  6 -> 0.1
NoiseProfile noise_profile_by_name(const std::string& name);

double noise_sigma(double loss, const NoiseProfile& profile);

/// Fits a noise profile from groups of runs identical up to seed:
/// cross-seed std of the smoothed loss is regressed log-linearly
/// against the mean loss over the post-warmup region. Sigmas are
/// floored at sigma_min before taking logs.
NoiseProfile calibrate_noise(
    const std::vector<std::vector<TrainingRun>>& seed_groups,
    double sigma_min = 1e-4);

struct LossPoint {
  double n = 0.0;       // size under the active scheme
  double flops = 0.0;
  double loss = 0.0;
  double sigma = 0.0;
};

/// Loss-vs-size observations at one compute budget, sorted by n.
struct IsoFlopCurve {
  double flops = 0.0;
  std::vector<LossPoint> points;
};

struct NStarEstimate {
  double flops = 0.0;
  double n_star = 0.0;           // median of non-edge bootstrap argmins
  double log_std = 0.0;          // floored and edge-inflated, see below
  double loss_star = 0.0;        // median of non-edge bootstrap minima
  double omitted_fraction = 0.0;
  bool valid = false;            // false iff omitted_fraction > 1/2
  std::vector<double> samples;       // all B argmin samples (natural N)
  std::vector<double> loss_samples;  // all B interpolant minima
  std::vector<std::uint8_t> at_edge; // per-replicate edge flag
};

/// Minimum log_std: one third of the grid's average log-spacing,
/// quoted for the sqrt(2) ladder.
inline constexpr double kLogStdFloor = 0.11552453009332421;  // ln(sqrt 2)/3

/// Noise-and-interpolate bootstrap: B replicates of Gaussian loss
/// perturbation, log-space Akima fit over (N, loss) and interpolant
/// minimization. Deterministic given (curve, B, seed) regardless of
/// worker threads. Sigma values are taken from the curve and held
/// fixed across replicates.
NStarEstimate estimate_nstar(const IsoFlopCurve& curve, int bootstrap,
                             std::uint64_t seed);

struct LossStarEstimate {
  double flops = 0.0;
  double loss_star = 0.0;
  double log_std = 0.0;
  double omitted_fraction = 0.0;
  bool valid = false;
  std::vector<double> samples;
};

/// Same bootstrap, returning the loss-coordinate population.
LossStarEstimate min_loss_at(const IsoFlopCurve& curve, int bootstrap,
                             std::uint64_t seed);

/// Assembles IsoFLOP curves from a run set: for each budget, fetch each
/// run's loss via loss_at_flops and tag it with the profile's sigma.
/// Budgets with fewer than 3 observations are dropped.
std::vector<IsoFlopCurve> build_isoflop_curves(
    const std::vector<TrainingRun>& runs, const std::vector<double>& budgets,
    SizeScheme scheme, LossSource source, const NoiseProfile& profile);

/// Stable per-curve bootstrap substream id.
std::uint64_t curve_substream(double flops);

}  // namespace scalelaw
