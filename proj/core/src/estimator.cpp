#include "scalelaw/estimator.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>

#include "scalelaw/interp.hpp"
#include "scalelaw/parallel.hpp"
#include "scalelaw/rng.hpp"

namespace scalelaw {

NoiseProfile refinedweb_profile() { return {3.0, 0.002, 7.0, 0.05}; }
NoiseProfile openwebtext2_profile() { return {3.0, 0.01, 6.0, 0.1}; }

NoiseProfile noise_profile_by_name(const std::string& name) {
  if (name == "refinedweb") return refinedweb_profile();
  if (name == "openwebtext2" || name == "owt2") return openwebtext2_profile();
  throw std::invalid_argument("unknown noise profile: " + name);
}

double noise_sigma(double loss, const NoiseProfile& profile) {
  if (!std::isfinite(loss)) {
    throw std::invalid_argument("noise_sigma: loss must be finite");
  }
  if (loss <= profile.loss_lo) return profile.sigma_lo;
  if (loss >= profile.loss_hi) return profile.sigma_hi;
  double t = (loss - profile.loss_lo) / (profile.loss_hi - profile.loss_lo);
  return std::exp(std::log(profile.sigma_lo) +
                  t * (std::log(profile.sigma_hi) - std::log(profile.sigma_lo)));
}

NoiseProfile calibrate_noise(
    const std::vector<std::vector<TrainingRun>>& seed_groups,
    double sigma_min) {
  if (seed_groups.size() < 2) {
    throw std::invalid_argument(
        "calibrate_noise: need >= 2 seed groups to span a loss range");
  }

  // (mean smoothed loss, cross-seed std) per matched post-warmup record.
  std::vector<std::pair<double, double>> obs;
  for (const auto& group : seed_groups) {
    if (group.size() < 2) {
      throw std::invalid_argument(
          "calibrate_noise: every group needs >= 2 runs");
    }
    std::vector<LossSeries> smoothed;
    std::size_t len = group.front().steps.size();
    for (const auto& run : group) {
      smoothed.push_back(smooth_loss(series_from_steps(run), 0.05,
                                     run.log_interval,
                                     double(run.batch_tokens())));
      len = std::min(len, smoothed.back().entries.size());
    }
    const double warmup = double(group.front().schedule.warmup_tokens);
    bool any = false;
    for (std::size_t i = 0; i < len; ++i) {
      if (smoothed.front().entries[i].tokens < warmup) continue;
      double mean = 0.0;
      for (const auto& s : smoothed) mean += s.entries[i].loss;
      mean /= double(smoothed.size());
      double var = 0.0;
      for (const auto& s : smoothed) {
        double d = s.entries[i].loss - mean;
        var += d * d;
      }
      var /= double(smoothed.size() - 1);
      obs.emplace_back(mean, std::max(std::sqrt(var), sigma_min));
      any = true;
    }
    if (!any) {
      throw std::invalid_argument(
          "calibrate_noise: group has no post-warmup overlap");
    }
  }

  // Least squares of ln(sigma) on mean loss.
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [loss, sigma] : obs) {
    double y = std::log(sigma);
    sx += loss;
    sy += y;
    sxx += loss * loss;
    sxy += loss * y;
  }
  const double m = double(obs.size());
  const double denom = m * sxx - sx * sx;
  double slope = 0.0, intercept = sy / m;
  if (denom > 0.0) {
    slope = (m * sxy - sx * sy) / denom;
    intercept = (sy - slope * sx) / m;
  }

  auto minmax = std::minmax_element(
      obs.begin(), obs.end(),
      [](const auto& a, const auto& b) { return a.first < b.first; });
  NoiseProfile profile;
  profile.loss_lo = minmax.first->first;
  profile.loss_hi = minmax.second->first;
  if (profile.loss_hi <= profile.loss_lo) profile.loss_hi = profile.loss_lo + 1e-9;
  profile.sigma_lo =
      std::max(std::exp(intercept + slope * profile.loss_lo), sigma_min);
  profile.sigma_hi =
      std::max(std::exp(intercept + slope * profile.loss_hi), sigma_min);
  if (profile.sigma_hi < profile.sigma_lo) {
    std::swap(profile.sigma_lo, profile.sigma_hi);
  }
  return profile;
}

std::uint64_t curve_substream(double flops) {
  return rng::splitmix64(std::bit_cast<std::uint64_t>(flops));
}

namespace {

struct BootstrapOutput {
  std::vector<double> argmins;
  std::vector<double> minima;
  std::vector<std::uint8_t> at_edge;
  double omitted_fraction = 0.0;
  bool valid = false;
};

int scan_resolution(const IsoFlopCurve& curve) {
  const double decades =
      std::log10(curve.points.back().n / curve.points.front().n);
  return std::max(64, int(512.0 * decades) + 1);
}

BootstrapOutput run_bootstrap(const IsoFlopCurve& curve, int bootstrap,
                              std::uint64_t seed) {
  if (curve.points.size() < 3) {
    throw std::invalid_argument("bootstrap: curve needs >= 3 points");
  }
  if (bootstrap < 100) {
    throw std::invalid_argument("bootstrap: need >= 100 replicates");
  }
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    if (curve.points[i].sigma <= 0.0) {
      throw std::invalid_argument("bootstrap: sigma missing on point " +
                                  std::to_string(i));
    }
    if (i > 0 && curve.points[i].n <= curve.points[i - 1].n) {
      throw std::invalid_argument("bootstrap: sizes must be increasing");
    }
  }

  const std::size_t m = curve.points.size();
  const int resolution = scan_resolution(curve);
  const rng::Stream stream(seed, curve_substream(curve.flops));

  BootstrapOutput out;
  out.argmins.resize(std::size_t(bootstrap));
  out.minima.resize(std::size_t(bootstrap));
  out.at_edge.resize(std::size_t(bootstrap));

  parallel_for(std::size_t(bootstrap), [&](std::size_t b) {
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) {
      xs[i] = curve.points[i].n;
      double noise =
          curve.points[i].sigma * stream.normal(b * 1024 + i);
      // Keep the noised loss positive for the log-space fit.
      ys[i] = std::max(curve.points[i].loss + noise,
                       1e-6 * curve.points[i].loss);
    }
    AkimaSpline spline(xs, ys, InterpMode::LogXLogY);
    MinimizeResult r = minimize_interpolant(spline, resolution);
    out.argmins[b] = r.x;
    out.minima[b] = r.value;
    out.at_edge[b] = r.at_edge ? 1 : 0;
  });

  std::size_t edge_count = 0;
  for (auto flag : out.at_edge) edge_count += flag;
  out.omitted_fraction = double(edge_count) / double(bootstrap);
  out.valid = out.omitted_fraction <= 0.5;
  if (edge_count == std::size_t(bootstrap)) out.valid = false;
  return out;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  std::sort(values.begin(), values.end());
  std::size_t n = values.size();
  return n % 2 ? values[n / 2]
               : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

NStarEstimate estimate_nstar(const IsoFlopCurve& curve, int bootstrap,
                             std::uint64_t seed) {
  BootstrapOutput boot = run_bootstrap(curve, bootstrap, seed);

  std::vector<double> kept, kept_loss, kept_log;
  for (std::size_t b = 0; b < boot.argmins.size(); ++b) {
    if (boot.at_edge[b]) continue;
    kept.push_back(boot.argmins[b]);
    kept_loss.push_back(boot.minima[b]);
    kept_log.push_back(std::log(boot.argmins[b]));
  }
  if (kept.empty()) {
    throw std::runtime_error("estimate_nstar: all bootstrap samples at edge");
  }

  NStarEstimate est;
  est.flops = curve.flops;
  est.samples = std::move(boot.argmins);
  est.loss_samples = std::move(boot.minima);
  est.at_edge = std::move(boot.at_edge);
  est.omitted_fraction = boot.omitted_fraction;
  est.valid = boot.valid;
  est.n_star = median(kept);
  est.loss_star = median(kept_loss);

  double log_std = 0.0;
  if (kept_log.size() > 1) {
    double mean = 0.0;
    for (double v : kept_log) mean += v;
    mean /= double(kept_log.size());
    double var = 0.0;
    for (double v : kept_log) var += (v - mean) * (v - mean);
    log_std = std::sqrt(var / double(kept_log.size() - 1));
  }
  log_std = std::max(log_std, kLogStdFloor);
  est.log_std = log_std / (1.0 - est.omitted_fraction);
  return est;
}

LossStarEstimate min_loss_at(const IsoFlopCurve& curve, int bootstrap,
                             std::uint64_t seed) {
  NStarEstimate est = estimate_nstar(curve, bootstrap, seed);

  std::vector<double> kept_log;
  LossStarEstimate out;
  out.flops = est.flops;
  out.loss_star = est.loss_star;
  out.omitted_fraction = est.omitted_fraction;
  out.valid = est.valid;
  for (std::size_t b = 0; b < est.loss_samples.size(); ++b) {
    if (est.at_edge[b]) continue;
    out.samples.push_back(est.loss_samples[b]);
    kept_log.push_back(std::log(est.loss_samples[b]));
  }
  double log_std = 0.0;
  if (kept_log.size() > 1) {
    double mean = 0.0;
    for (double v : kept_log) mean += v;
    mean /= double(kept_log.size());
    double var = 0.0;
    for (double v : kept_log) var += (v - mean) * (v - mean);
    log_std = std::sqrt(var / double(kept_log.size() - 1));
  }
  out.log_std = log_std / (1.0 - out.omitted_fraction);
  return out;
}

std::vector<IsoFlopCurve> build_isoflop_curves(
    const std::vector<TrainingRun>& runs, const std::vector<double>& budgets,
    SizeScheme scheme, LossSource source, const NoiseProfile& profile) {
  std::vector<IsoFlopCurve> curves;
  for (double flops : budgets) {
    IsoFlopCurve curve;
    curve.flops = flops;
    for (const auto& run : runs) {
      std::optional<double> loss;
      try {
        loss = loss_at_flops(run, flops, scheme, source);
      } catch (const std::runtime_error&) {
        continue;  // run has no samples of this source
      }
      if (!loss) continue;
      LossPoint point;
      point.n = model_size(run.arch, scheme);
      point.flops = flops;
      point.loss = *loss;
      point.sigma = noise_sigma(*loss, profile);
      curve.points.push_back(point);
    }
    std::sort(curve.points.begin(), curve.points.end(),
              [](const LossPoint& a, const LossPoint& b) { return a.n < b.n; });
    // Duplicate sizes (several runs of one arch) collapse to their best.
    std::vector<LossPoint> dedup;
    for (const auto& p : curve.points) {
      if (!dedup.empty() && dedup.back().n == p.n) {
        if (p.loss < dedup.back().loss) dedup.back() = p;
      } else {
        dedup.push_back(p);
      }
    }
    curve.points = std::move(dedup);
    if (curve.points.size() >= 3) curves.push_back(std::move(curve));
  }
  return curves;
}

}  // namespace scalelaw
