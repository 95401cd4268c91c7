#include "scalelaw/lawfit.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace scalelaw {

double PowerLawFit::predict(double flops) const {
  return coeff * std::pow(flops, exponent);
}

double quantile(std::vector<double> samples, double q) {
  if (samples.empty()) throw std::invalid_argument("quantile of empty set");
  std::sort(samples.begin(), samples.end());
  if (q <= 0.0) return samples.front();
  if (q >= 1.0) return samples.back();
  double pos = q * double(samples.size() - 1);
  std::size_t lo = std::size_t(pos);
  double frac = pos - double(lo);
  if (lo + 1 >= samples.size()) return samples.back();
  return samples[lo] * (1.0 - frac) + samples[lo + 1] * frac;
}

namespace {

struct WlsResult {
  double intercept = 0.0;
  double slope = 0.0;
  double r2_weighted = 0.0;
  double r2_unweighted = 0.0;
};

WlsResult weighted_log_fit(const std::vector<double>& x,
                           const std::vector<double>& y,
                           const std::vector<double>& w) {
  const std::size_t n = x.size();
  double sw = 0, swx = 0, swy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sw += w[i];
    swx += w[i] * x[i];
    swy += w[i] * y[i];
  }
  const double xbar = swx / sw;
  const double ybar = swy / sw;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += w[i] * (x[i] - xbar) * (x[i] - xbar);
    sxy += w[i] * (x[i] - xbar) * (y[i] - ybar);
  }
  if (sxx == 0.0) {
    throw std::invalid_argument("power-law fit: all abscissae identical");
  }
  WlsResult r;
  r.slope = sxy / sxx;
  r.intercept = ybar - r.slope * xbar;

  double sse_w = 0, sst_w = 0, sse_u = 0, sst_u = 0;
  double ybar_u = 0;
  for (double yi : y) ybar_u += yi;
  ybar_u /= double(n);
  for (std::size_t i = 0; i < n; ++i) {
    double resid = y[i] - (r.intercept + r.slope * x[i]);
    sse_w += w[i] * resid * resid;
    sst_w += w[i] * (y[i] - ybar) * (y[i] - ybar);
    sse_u += resid * resid;
    sst_u += (y[i] - ybar_u) * (y[i] - ybar_u);
  }
  r.r2_weighted = sst_w > 0.0 ? 1.0 - sse_w / sst_w : 1.0;
  r.r2_unweighted = sst_u > 0.0 ? 1.0 - sse_u / sst_u : 1.0;
  return r;
}

}  // namespace

PowerLawFit fit_power_law(const std::vector<NStarEstimate>& estimates) {
  std::vector<double> x, y, w;
  for (const auto& e : estimates) {
    if (!e.valid) continue;
    x.push_back(std::log(e.flops));
    y.push_back(std::log(e.n_star));
    w.push_back(1.0 / (e.log_std * e.log_std));
  }
  if (x.size() < 2) {
    throw std::invalid_argument("power-law fit: need >= 2 valid estimates");
  }
  WlsResult r = weighted_log_fit(x, y, w);

  PowerLawFit fit;
  fit.coeff = std::exp(r.intercept);
  fit.exponent = r.slope;
  fit.r_squared = r.r2_weighted;
  fit.r_squared_unweighted = r.r2_unweighted;
  return fit;
}

PowerLawFit fit_power_law_ci(const std::vector<NStarEstimate>& estimates,
                             double reference_flops) {
  PowerLawFit fit = fit_power_law(estimates);
  fit.reference_flops = reference_flops;

  std::vector<const NStarEstimate*> valid;
  std::size_t replicates = std::numeric_limits<std::size_t>::max();
  for (const auto& e : estimates) {
    if (!e.valid) continue;
    valid.push_back(&e);
    replicates = std::min(replicates, e.samples.size());
  }
  if (valid.size() < 2 || replicates == 0 ||
      replicates == std::numeric_limits<std::size_t>::max()) {
    return fit;
  }

  std::vector<double> a_samples, ref_samples;
  for (std::size_t b = 0; b < replicates; ++b) {
    std::vector<double> x, y, w;
    for (const auto* e : valid) {
      if (e->at_edge.size() > b && e->at_edge[b]) continue;
      x.push_back(std::log(e->flops));
      y.push_back(std::log(e->samples[b]));
      w.push_back(1.0 / (e->log_std * e->log_std));
    }
    if (x.size() < 2) continue;
    WlsResult r;
    try {
      r = weighted_log_fit(x, y, w);
    } catch (const std::invalid_argument&) {
      continue;
    }
    double n0 = std::exp(r.intercept);
    a_samples.push_back(r.slope);
    ref_samples.push_back(n0 * std::pow(reference_flops, r.slope));
    fit.bootstrap_params.emplace_back(n0, r.slope);
  }
  if (!a_samples.empty()) {
    fit.ci_exponent = {quantile(a_samples, 0.025), quantile(a_samples, 0.975)};
    fit.ci_at_reference = {quantile(ref_samples, 0.025),
                           quantile(ref_samples, 0.975)};
  }
  return fit;
}

PowerLawFit fit_power_law_ci(const std::vector<IsoFlopCurve>& curves,
                             int bootstrap, std::uint64_t seed,
                             double reference_flops) {
  std::vector<NStarEstimate> estimates;
  estimates.reserve(curves.size());
  for (const auto& curve : curves) {
    estimates.push_back(estimate_nstar(curve, bootstrap, seed));
  }
  return fit_power_law_ci(estimates, reference_flops);
}

DerivedLaw derive_token_law(const PowerLawFit& fit) {
  return {1.0 / (6.0 * fit.coeff), 1.0 - fit.exponent};
}

DerivedLaw derive_ratio_law(const PowerLawFit& fit) {
  return {1.0 / (6.0 * fit.coeff * fit.coeff), 1.0 - 2.0 * fit.exponent};
}

double SaturatingFit::predict(double flops) const {
  return irreducible + coeff * std::pow(flops, -exponent);
}

namespace {

double huber(double r, double delta) {
  double a = std::abs(r);
  return a <= delta ? 0.5 * r * r : delta * (a - 0.5 * delta);
}

double saturating_objective(
    const std::vector<std::pair<double, double>>& points, double log_e,
    double log_l0, double ell, double delta) {
  if (ell <= 0.0) return std::numeric_limits<double>::infinity();
  double total = 0.0;
  const double e = std::exp(log_e);
  const double l0 = std::exp(log_l0);
  for (const auto& [c, loss] : points) {
    double pred = e + l0 * std::pow(c, -ell);
    if (!(pred > 0.0) || !std::isfinite(pred)) {
      return std::numeric_limits<double>::infinity();
    }
    total += huber(std::log(loss) - std::log(pred), delta);
  }
  return total;
}

struct Simplex3 {
  std::array<std::array<double, 3>, 4> pts;
  std::array<double, 4> vals;
};

// Nelder-Mead over (ln E, ln L0, ell).
std::pair<std::array<double, 3>, double> nelder_mead(
    const std::vector<std::pair<double, double>>& points,
    std::array<double, 3> start, double delta, int max_iter = 4000) {
  auto eval = [&](const std::array<double, 3>& p) {
    return saturating_objective(points, p[0], p[1], p[2], delta);
  };

  Simplex3 s;
  s.pts[0] = start;
  for (int i = 0; i < 3; ++i) {
    s.pts[i + 1] = start;
    s.pts[i + 1][i] += (i == 2) ? 0.05 : 0.2;
  }
  for (int i = 0; i < 4; ++i) s.vals[i] = eval(s.pts[i]);

  auto order = [&] {
    std::array<int, 4> idx{0, 1, 2, 3};
    std::sort(idx.begin(), idx.end(),
              [&](int a, int b) { return s.vals[a] < s.vals[b]; });
    Simplex3 t;
    for (int i = 0; i < 4; ++i) {
      t.pts[i] = s.pts[idx[i]];
      t.vals[i] = s.vals[idx[i]];
    }
    s = t;
  };

  for (int it = 0; it < max_iter; ++it) {
    order();
    if (std::abs(s.vals[3] - s.vals[0]) <
        1e-15 * (1.0 + std::abs(s.vals[0]))) {
      break;
    }
    std::array<double, 3> centroid{};
    for (int i = 0; i < 3; ++i) {
      for (int d = 0; d < 3; ++d) centroid[d] += s.pts[i][d] / 3.0;
    }
    auto blend = [&](double t) {
      std::array<double, 3> p;
      for (int d = 0; d < 3; ++d) {
        p[d] = centroid[d] + t * (centroid[d] - s.pts[3][d]);
      }
      return p;
    };
    auto reflect = blend(1.0);
    double fr = eval(reflect);
    if (fr < s.vals[0]) {
      auto expand = blend(2.0);
      double fe = eval(expand);
      if (fe < fr) {
        s.pts[3] = expand;
        s.vals[3] = fe;
      } else {
        s.pts[3] = reflect;
        s.vals[3] = fr;
      }
    } else if (fr < s.vals[2]) {
      s.pts[3] = reflect;
      s.vals[3] = fr;
    } else {
      auto contract = blend(fr < s.vals[3] ? 0.5 : -0.5);
      double fc = eval(contract);
      if (fc < std::min(fr, s.vals[3])) {
        s.pts[3] = contract;
        s.vals[3] = fc;
      } else {
        for (int i = 1; i < 4; ++i) {
          for (int d = 0; d < 3; ++d) {
            s.pts[i][d] = 0.5 * (s.pts[i][d] + s.pts[0][d]);
          }
          s.vals[i] = eval(s.pts[i]);
        }
      }
    }
  }
  order();
  return {s.pts[0], s.vals[0]};
}

}  // namespace

SaturatingFit fit_saturating(
    const std::vector<std::pair<double, double>>& points, double huber_delta) {
  if (points.size() < 4) {
    throw std::invalid_argument("fit_saturating: need >= 4 points");
  }
  double min_loss = std::numeric_limits<double>::infinity();
  double max_loss = 0.0;
  double min_c = std::numeric_limits<double>::infinity();
  for (const auto& [c, loss] : points) {
    if (!(loss > 0.0) || !(c > 0.0)) {
      throw std::invalid_argument("fit_saturating: values must be positive");
    }
    min_loss = std::min(min_loss, loss);
    max_loss = std::max(max_loss, loss);
    min_c = std::min(min_c, c);
  }
  if (max_loss - min_loss < 1e-12 * max_loss) {
    throw std::invalid_argument(
        "fit_saturating: constant losses, decay exponent unidentifiable");
  }
  double loss_at_min_c = 0.0;
  for (const auto& [c, loss] : points) {
    if (c == min_c) loss_at_min_c = loss;
  }

  std::array<double, 3> best_p{};
  double best_v = std::numeric_limits<double>::infinity();
  const double ell_starts[] = {0.05, 0.1, 0.2, 0.4};
  const double e_fracs[] = {0.25, 0.45, 0.5, 0.9, 1.0, 1.8};
  for (double ell0 : ell_starts) {
    for (double ef : e_fracs) {
      double e0 = ef * min_loss;
      double l0 = (loss_at_min_c - e0) * std::pow(min_c, ell0);
      if (!(l0 > 0.0)) continue;
      auto [p, v] = nelder_mead(
          points, {std::log(e0), std::log(l0), ell0}, huber_delta);
      if (v < best_v) {
        best_v = v;
        best_p = p;
      }
    }
  }
  if (!std::isfinite(best_v)) {
    throw std::runtime_error("fit_saturating: no start converged");
  }
  // Polish the winner.
  auto [p, v] = nelder_mead(points, best_p, huber_delta);
  if (v < best_v) {
    best_v = v;
    best_p = p;
  }

  SaturatingFit fit;
  fit.irreducible = std::exp(best_p[0]);
  fit.coeff = std::exp(best_p[1]);
  fit.exponent = best_p[2];
  fit.objective = best_v;
  return fit;
}

}  // namespace scalelaw
