#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "scalelaw/estimator.hpp"

namespace scalelaw {

/// Chinchilla's training budget, the reference extrapolation point.
inline constexpr double kChinchillaFlops = 5.88e23;

struct PowerLawFit {
  double coeff = 0.0;      // N0 in N*(C) = N0 * C^a
  double exponent = 0.0;   // a
  double r_squared = 0.0;            // weighted
  double r_squared_unweighted = 0.0;
  double reference_flops = kChinchillaFlops;
  std::pair<double, double> ci_exponent{0.0, 0.0};       // 95%, quantile
  std::pair<double, double> ci_at_reference{0.0, 0.0};   // N*(C_ref)
  std::vector<std::pair<double, double>> bootstrap_params;  // (N0, a)

  double predict(double flops) const;
};

/// Weighted least squares of ln(n_star) on ln(C), weights 1/log_std^2.
/// Invalid estimates are excluded. No confidence intervals.
PowerLawFit fit_power_law(const std::vector<NStarEstimate>& estimates);

/// Point fit plus quantile CIs from per-replicate fits over the
/// estimates' aligned bootstrap samples (replicates where a curve sat
/// at the grid edge skip that curve).
PowerLawFit fit_power_law_ci(const std::vector<NStarEstimate>& estimates,
                             double reference_flops = kChinchillaFlops);

/// Runs estimate_nstar on every curve, then fits with CIs.
PowerLawFit fit_power_law_ci(const std::vector<IsoFlopCurve>& curves,
                             int bootstrap, std::uint64_t seed,
                             double reference_flops = kChinchillaFlops);

struct DerivedLaw {
  double coeff = 0.0;
  double exponent = 0.0;
};

/// D*(C) = C/(6 N*(C))  =>  D0 = 1/(6 N0), b = 1 - a.
DerivedLaw derive_token_law(const PowerLawFit& fit);
/// rho*(C) = C/(6 N*(C)^2)  =>  rho0 = 1/(6 N0^2), r = 1 - 2a.
DerivedLaw derive_ratio_law(const PowerLawFit& fit);

struct SaturatingFit {
  double irreducible = 0.0;   // E
  double coeff = 0.0;         // L0
  double exponent = 0.0;      // ell, in L(C) = E + L0 * C^(-ell)
  double objective = 0.0;     // Huber objective at the optimum

  double predict(double flops) const;
};

/// Huber fit (delta = 1e-3 on ln-loss residuals) of E + L0*C^-ell via
/// multi-start Nelder-Mead over (ln E, ln L0, ell). Throws on fewer
/// than 4 points or constant losses.
SaturatingFit fit_saturating(
    const std::vector<std::pair<double, double>>& points,
    double huber_delta = 1e-3);

/// Linear-interpolation quantile (q in [0,1]) of an unsorted sample.
double quantile(std::vector<double> samples, double q);

}  // namespace scalelaw
