#include "scalelaw/hparam.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <stdexcept>

#include "scalelaw/interp.hpp"
#include "scalelaw/planner.hpp"

namespace scalelaw {

namespace {

constexpr double kRelTol = 1e-9;

bool close(double a, double b) {
  return std::abs(a - b) <= kRelTol * std::max(std::abs(a), std::abs(b));
}

// (lr, loss) pairs for one (n, batch) slice, reduced over beta2 by
// pointwise minimum.
std::vector<std::pair<double, double>> beta2_reduced_slice(
    std::span<const SweepPoint> sweep, double n, double batch) {
  std::map<double, double> by_lr;
  for (const auto& p : sweep) {
    if (!close(p.n, n) || !close(p.batch_size_seqs, batch)) continue;
    auto [it, inserted] = by_lr.try_emplace(p.lr, p.final_loss);
    if (!inserted) it->second = std::min(it->second, p.final_loss);
  }
  return {by_lr.begin(), by_lr.end()};
}

int lr_scan_resolution(double lo, double hi) {
  return std::max(64, int(512.0 * std::log10(hi / lo)) + 1);
}

}  // namespace

LrOptimum optimal_lr_per_batch(std::span<const SweepPoint> sweep, double n,
                               double batch) {
  auto slice = beta2_reduced_slice(sweep, n, batch);
  if (slice.size() < 3) {
    throw std::invalid_argument(
        "optimal_lr_per_batch: need >= 3 learning rates for the slice");
  }
  AkimaSpline spline = AkimaSpline::from_points(slice, InterpMode::LogXLogY);
  MinimizeResult r = minimize_interpolant(
      spline, lr_scan_resolution(slice.front().first, slice.back().first));
  return {r.x, r.value, r.at_edge};
}

HParamOptimum optimal_hparams(std::span<const SweepPoint> sweep, double n) {
  std::set<double> batches;
  for (const auto& p : sweep) {
    if (close(p.n, n)) batches.insert(p.batch_size_seqs);
  }
  if (batches.size() < 3) {
    throw std::invalid_argument("optimal_hparams: need >= 3 batch sizes");
  }

  std::vector<std::pair<double, double>> bs_loss;   // stage-2 curve
  std::vector<std::pair<double, double>> bs_lr;     // lr at per-batch optimum
  bool stage1_edge = false;
  for (double batch : batches) {
    LrOptimum opt = optimal_lr_per_batch(sweep, n, batch);
    stage1_edge = stage1_edge || opt.at_edge;
    bs_loss.emplace_back(batch, opt.loss_star);
    bs_lr.emplace_back(batch, opt.lr_star);
  }

  AkimaSpline loss_curve =
      AkimaSpline::from_points(bs_loss, InterpMode::LogXLogY);
  MinimizeResult r = minimize_interpolant(
      loss_curve,
      lr_scan_resolution(bs_loss.front().first, bs_loss.back().first));

  AkimaSpline lr_curve = AkimaSpline::from_points(bs_lr, InterpMode::LogXLogY);
  HParamOptimum out;
  out.bs_star = r.x;
  out.loss_star = r.value;
  out.lr_star = lr_curve(r.x);
  out.at_edge = r.at_edge || stage1_edge;
  return out;
}

double PowerLaw1D::eval(double n) const {
  return coeff * std::pow(n, exponent);
}

namespace {

PowerLaw1D log_fit(const std::vector<std::pair<double, double>>& pts) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& [xv, yv] : pts) {
    double x = std::log(xv), y = std::log(yv);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double n = double(pts.size());
  const double denom = n * sxx - sx * sx;
  if (denom <= 0.0) {
    throw std::invalid_argument("hparam law fit: degenerate abscissae");
  }
  PowerLaw1D law;
  law.exponent = (n * sxy - sx * sy) / denom;
  law.coeff = std::exp((sy - law.exponent * sx) / n);
  return law;
}

}  // namespace

HParamLaws fit_hparam_laws(const std::vector<HParamOptimumRow>& optima) {
  if (optima.size() < 3) {
    throw std::invalid_argument("fit_hparam_laws: need >= 3 model sizes");
  }
  std::vector<std::pair<double, double>> bs_pts, lr_pts;
  for (const auto& row : optima) {
    bs_pts.emplace_back(row.n, row.bs_star);
    lr_pts.emplace_back(row.n, row.lr_star);
  }
  return {log_fit(bs_pts), log_fit(lr_pts)};
}

RoundedHParams round_hparams(double bs, double lr, int gpu_count) {
  if (bs <= 0.0 || lr <= 0.0 || gpu_count < 1) {
    throw std::invalid_argument("round_hparams: positive inputs required");
  }
  // Nearest positive multiple, ties up.
  double mult = std::floor(bs / gpu_count + 0.5);
  if (bs / gpu_count - std::floor(bs / gpu_count) == 0.5) {
    mult = std::floor(bs / gpu_count) + 1.0;
  }
  mult = std::max(mult, 1.0);

  const double mag = std::pow(10.0, std::floor(std::log10(lr)));
  double rounded_lr = std::round(lr / mag * 10.0) / 10.0 * mag;

  return {mult * double(gpu_count), rounded_lr};
}

double select_beta2(double batch_size_seqs) {
  if (batch_size_seqs < 1.0) {
    throw std::invalid_argument("select_beta2: batch >= 1");
  }
  return batch_size_seqs < 256.0 ? 0.99 : 0.95;
}

namespace {

// Delta(N, rho) lookup assembled from the sweep: median-filtered over
// rho, linear in ln(rho) between samples, linear in ln(N) between sweep
// sizes, mirrored around rho=20 for rho in (20, 30].
class ExcessLossTable {
 public:
  ExcessLossTable(std::vector<double> ns, std::vector<double> rhos,
                  std::vector<std::vector<double>> delta)
      : ns_(std::move(ns)), rhos_(std::move(rhos)), delta_(std::move(delta)) {}

  double lookup(double n, double rho) const {
    if (rho < 2.0) return 0.0;
    if (rho > 30.0) return 0.0;
    if (rho > 20.0) rho = 40.0 - rho;  // mirror around rho = 20
    rho = std::clamp(rho, rhos_.front(), rhos_.back());
    n = std::clamp(n, ns_.front(), ns_.back());

    auto frac = [](const std::vector<double>& grid, double v,
                   std::size_t& idx) {
      auto it = std::upper_bound(grid.begin(), grid.end(), v);
      std::size_t hi = std::size_t(std::distance(grid.begin(), it));
      hi = std::clamp<std::size_t>(hi, 1, grid.size() - 1);
      idx = hi - 1;
      double span = std::log(grid[hi]) - std::log(grid[idx]);
      return span > 0.0 ? (std::log(v) - std::log(grid[idx])) / span : 0.0;
    };

    std::size_t i, j;
    double tn = frac(ns_, n, i);
    double tr = frac(rhos_, rho, j);
    double d00 = delta_[i][j], d01 = delta_[i][j + 1];
    double d10 = delta_[i + 1][j], d11 = delta_[i + 1][j + 1];
    return (1 - tn) * ((1 - tr) * d00 + tr * d01) +
           tn * ((1 - tr) * d10 + tr * d11);
  }

 private:
  std::vector<double> ns_;
  std::vector<double> rhos_;
  std::vector<std::vector<double>> delta_;  // [n][rho]
};

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// Loss of the chosen hyperparameters on one (n, rho) slice, via the same
// two-stage interpolation used for the optimum.
double chosen_loss(const std::vector<RhoSweepRecord>& slice, double bs_chosen,
                   double lr_chosen) {
  std::set<double> batches;
  for (const auto& r : slice) batches.insert(r.batch_size_seqs);

  std::vector<std::pair<double, double>> bs_loss;
  for (double batch : batches) {
    std::map<double, double> by_lr;
    for (const auto& r : slice) {
      if (!close(r.batch_size_seqs, batch)) continue;
      auto [it, inserted] = by_lr.try_emplace(r.lr, r.loss);
      if (!inserted) it->second = std::min(it->second, r.loss);
    }
    if (by_lr.size() < 2) continue;
    std::vector<std::pair<double, double>> lr_loss(by_lr.begin(), by_lr.end());
    AkimaSpline s = AkimaSpline::from_points(lr_loss, InterpMode::LogXLogY);
    double lr_eval = std::clamp(lr_chosen, s.x_min(), s.x_max());
    bs_loss.emplace_back(batch, s(lr_eval));
  }
  if (bs_loss.size() < 2) {
    throw std::invalid_argument("ideal_tuning_adjust: insufficient batch grid");
  }
  AkimaSpline s = AkimaSpline::from_points(bs_loss, InterpMode::LogXLogY);
  return s(std::clamp(bs_chosen, s.x_min(), s.x_max()));
}

}  // namespace

IdealTuningResult ideal_tuning_adjust(
    const std::vector<RhoSweepRecord>& sweep,
    const std::vector<IsoFlopCurve>& curves, const HParamLaws& chosen,
    int bootstrap, std::uint64_t seed) {
  std::set<double> n_set, rho_set;
  for (const auto& r : sweep) {
    if (r.rho < 2.0 || r.rho > 20.0) continue;
    n_set.insert(r.n);
    rho_set.insert(r.rho);
  }
  if (n_set.empty() || rho_set.size() < 2) {
    throw std::invalid_argument(
        "ideal_tuning_adjust: sweep must cover rho in [2, 20]");
  }
  std::vector<double> ns(n_set.begin(), n_set.end());
  std::vector<double> rhos(rho_set.begin(), rho_set.end());

  // Raw excess loss per (n, rho).
  std::vector<std::vector<double>> raw(ns.size(),
                                       std::vector<double>(rhos.size(), 0.0));
  for (std::size_t i = 0; i < ns.size(); ++i) {
    const double bs_chosen = chosen.bs_law.eval(ns[i]);
    const double lr_chosen = chosen.lr_law.eval(ns[i]);
    for (std::size_t j = 0; j < rhos.size(); ++j) {
      std::vector<RhoSweepRecord> slice;
      std::vector<SweepPoint> pts;
      for (const auto& r : sweep) {
        if (!close(r.n, ns[i]) || !close(r.rho, rhos[j])) continue;
        slice.push_back(r);
        pts.push_back({r.n, r.batch_size_seqs, r.lr, r.beta2, r.loss});
      }
      if (slice.empty()) continue;
      HParamOptimum opt = optimal_hparams(pts, ns[i]);
      double l_chosen = chosen_loss(slice, bs_chosen, lr_chosen);
      raw[i][j] = std::max(0.0, l_chosen - opt.loss_star);
    }
  }

  // Median filter of width 2: at each rho, the median over samples with
  // rho' in [rho-1, rho+1].
  std::vector<std::vector<double>> filtered = raw;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    for (std::size_t j = 0; j < rhos.size(); ++j) {
      std::vector<double> window;
      for (std::size_t j2 = 0; j2 < rhos.size(); ++j2) {
        if (std::abs(rhos[j2] - rhos[j]) <= 1.0) window.push_back(raw[i][j2]);
      }
      filtered[i][j] = median_of(std::move(window));
    }
  }
  // Degenerate single-size sweeps still need a 2-row table for bilinear
  // lookup.
  if (ns.size() == 1) {
    ns.push_back(ns[0] * (1.0 + 1e-9));
    filtered.push_back(filtered[0]);
  }
  ExcessLossTable table(ns, rhos, std::move(filtered));

  // Adjust curves on the supported budget range only.
  const FlopGrid supported{.base = 1.25e16, .factor = 2.0, .count = 8};
  auto supported_budget = [&](double c) {
    for (double v : supported.values()) {
      if (std::abs(c - v) <= 1e-6 * v) return true;
    }
    return false;
  };

  IdealTuningResult result;
  for (const auto& curve : curves) {
    if (!supported_budget(curve.flops)) continue;
    IsoFlopCurve adjusted;
    adjusted.flops = curve.flops;
    for (const auto& p : curve.points) {
      double rho = curve.flops / (6.0 * p.n * p.n);
      if (rho < 2.0 || rho > 30.0) continue;
      LossPoint q = p;
      q.loss -= table.lookup(p.n, rho);
      adjusted.points.push_back(q);
    }
    if (adjusted.points.size() >= 3) result.adjusted.push_back(adjusted);
  }
  if (result.adjusted.size() < 2) {
    throw std::invalid_argument(
        "ideal_tuning_adjust: too few adjustable curves");
  }

  for (const auto& curve : result.adjusted) {
    result.estimates.push_back(estimate_nstar(curve, bootstrap, seed));
  }
  result.refit = fit_power_law_ci(result.estimates);
  return result;
}

}  // namespace scalelaw
