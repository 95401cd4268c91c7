#include "scalelaw/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace scalelaw {

double FlopGrid::value(int k) const {
  return base * std::pow(factor, double(k));
}

std::vector<double> FlopGrid::values() const {
  std::vector<double> out;
  out.reserve(std::size_t(count));
  for (int k = 0; k < count; ++k) out.push_back(value(k));
  return out;
}

std::vector<ModelArch> select_isoflop_models(
    double flops, std::span<const ModelArch> grid_models, SizeScheme scheme,
    std::pair<double, double> rho_range, int count) {
  if (grid_models.empty()) {
    throw std::invalid_argument("select_isoflop_models: empty model grid");
  }
  struct Candidate {
    ModelArch arch;
    double n;
    double rho;
  };
  std::vector<Candidate> qualified;
  for (const auto& arch : grid_models) {
    double n = model_size(arch, scheme);
    double rho = flops / (6.0 * n * n);
    if (rho >= rho_range.first && rho <= rho_range.second) {
      qualified.push_back({arch, n, rho});
    }
  }
  if (qualified.empty()) {
    throw std::runtime_error(
        "select_isoflop_models: no model has rho in range for this budget");
  }
  if (int(qualified.size()) > count) {
    const double center =
        0.5 * (std::log(rho_range.first) + std::log(rho_range.second));
    std::stable_sort(qualified.begin(), qualified.end(),
                     [&](const Candidate& a, const Candidate& b) {
                       return std::abs(std::log(a.rho) - center) <
                              std::abs(std::log(b.rho) - center);
                     });
    qualified.resize(std::size_t(count));
  }
  std::sort(qualified.begin(), qualified.end(),
            [](const Candidate& a, const Candidate& b) { return a.n < b.n; });
  std::vector<ModelArch> out;
  out.reserve(qualified.size());
  for (const auto& c : qualified) out.push_back(c.arch);
  return out;
}

double warmup_tokens(double n, WarmupStyle style,
                     std::optional<double> budget_tokens) {
  if (n <= 0.0) throw std::invalid_argument("warmup_tokens: n > 0 required");
  switch (style) {
    case WarmupStyle::MatchModelSize:
      return n;
    case WarmupStyle::KaplanFixed:
      return 3000.0 * 524288.0;  // 3000 * 2^19 = 1,572,864,000
    case WarmupStyle::CosineCapped:
      if (!budget_tokens) {
        throw std::invalid_argument(
            "warmup_tokens: CosineCapped requires a token budget");
      }
      return std::min(n, 0.2 * *budget_tokens);
  }
  return n;
}

double experiment_cost(const ExperimentPlan& plan) {
  double total = 0.0;
  for (const auto& run : plan.runs) {
    if (run.target_flops.empty()) continue;
    if (plan.style == ScheduleStyle::CosinePerBudget) {
      if (run.target_flops.size() != 1) {
        throw std::invalid_argument(
            "experiment_cost: cosine runs carry exactly one target budget");
      }
      total += run.target_flops.front();
    } else {
      total += *std::max_element(run.target_flops.begin(),
                                 run.target_flops.end());
    }
  }
  return total;
}

std::vector<AccuracyPoint> accuracy_vs_compute(
    const std::vector<IsoFlopCurve>& curves, const PowerLawFit& reference,
    int bootstrap, std::uint64_t seed) {
  if (curves.size() < 3) {
    throw std::invalid_argument("accuracy_vs_compute: need >= 3 curves");
  }
  std::vector<IsoFlopCurve> sorted = curves;
  std::sort(sorted.begin(), sorted.end(),
            [](const IsoFlopCurve& a, const IsoFlopCurve& b) {
              return a.flops < b.flops;
            });

  std::vector<AccuracyPoint> out;
  double budget = double(sorted[0].points.size()) * sorted[0].flops +
                  double(sorted[1].points.size()) * sorted[1].flops;
  for (std::size_t k = 2; k <= sorted.size(); ++k) {
    if (k > 2) {
      budget +=
          double(sorted[k - 1].points.size()) * sorted[k - 1].flops;
    }
    std::vector<IsoFlopCurve> prefix(sorted.begin(), sorted.begin() + k);
    PowerLawFit fit;
    try {
      fit = fit_power_law_ci(prefix, bootstrap, seed,
                             reference.reference_flops);
    } catch (const std::exception&) {
      continue;  // too few valid curves at this truncation
    }
    AccuracyPoint point;
    point.budget = budget;
    point.exponent = fit.exponent;
    point.ci = fit.ci_exponent;
    point.ci_width = fit.ci_exponent.second - fit.ci_exponent.first;
    double sq = 0.0;
    for (const auto& c : sorted) {
      double rel = fit.predict(c.flops) / reference.predict(c.flops) - 1.0;
      sq += rel * rel;
    }
    point.rms_rel_err = std::sqrt(sq / double(sorted.size()));
    out.push_back(point);
  }
  return out;
}

double cosine_lr(const Schedule& schedule, double tokens_seen) {
  if (tokens_seen < 0.0) {
    throw std::invalid_argument("cosine_lr: tokens_seen >= 0");
  }
  const double warmup = double(schedule.warmup_tokens);
  if (tokens_seen < warmup) return warmup > 0.0 ? tokens_seen / warmup : 1.0;
  if (schedule.kind == ScheduleKind::Constant) return 1.0;

  const double decay_end = double(schedule.decay_end_tokens);
  const double f = schedule.final_lr_fraction;
  if (tokens_seen >= decay_end) return f;
  const double t = (tokens_seen - warmup) / (decay_end - warmup);
  return f + (1.0 - f) * 0.5 * (1.0 + std::cos(std::numbers::pi * t));
}

PlanStyle parse_plan_style(const std::string& name) {
  if (name == "kaplan") return PlanStyle::Kaplan;
  if (name == "warmup-fixed") return PlanStyle::WarmupFixed;
  if (name == "cosine") return PlanStyle::Cosine;
  if (name == "tuned-constant") return PlanStyle::TunedConstant;
  throw std::invalid_argument("unknown plan style: " + name);
}

std::string to_string(PlanStyle style) {
  switch (style) {
    case PlanStyle::Kaplan: return "kaplan";
    case PlanStyle::WarmupFixed: return "warmup-fixed";
    case PlanStyle::Cosine: return "cosine";
    case PlanStyle::TunedConstant: return "tuned-constant";
  }
  return "tuned-constant";
}

ExperimentPlan make_plan(PlanStyle style, const FlopGrid& grid,
                         std::span<const ModelArch> models) {
  ExperimentPlan plan;
  plan.grid = grid;
  plan.scheme =
      style == PlanStyle::Kaplan ? SizeScheme::KaplanNoHead : SizeScheme::Linear;
  plan.style = style == PlanStyle::Cosine ? ScheduleStyle::CosinePerBudget
                                          : ScheduleStyle::ConstantReuse;

  const auto budgets = grid.values();

  if (plan.style == ScheduleStyle::CosinePerBudget) {
    // One run per (model, budget) pair.
    for (double c : budgets) {
      auto selected = select_isoflop_models(c, models, plan.scheme);
      for (const auto& arch : selected) {
        double n = model_size(arch, plan.scheme);
        double budget_tokens = tokens_for_budget(n, c);
        PlannedRun run;
        run.arch = arch;
        run.schedule.kind = ScheduleKind::Cosine;
        run.schedule.warmup_tokens = std::int64_t(
            warmup_tokens(n, WarmupStyle::CosineCapped, budget_tokens));
        run.schedule.decay_end_tokens = std::int64_t(budget_tokens);
        run.schedule.final_lr_fraction = 0.01;
        run.target_flops = {c};
        plan.runs.push_back(std::move(run));
      }
    }
    return plan;
  }

  // Constant-reuse styles: one run per model, serving every budget at
  // which it is selected.
  for (const auto& arch : models) {
    double n = model_size(arch, plan.scheme);
    std::vector<double> targets;
    for (double c : budgets) {
      double rho = c / (6.0 * n * n);
      if (rho >= 1.0 && rho <= 100.0) targets.push_back(c);
    }
    if (targets.empty()) continue;

    PlannedRun run;
    run.arch = arch;
    run.target_flops = std::move(targets);
    if (style == PlanStyle::Kaplan) {
      // Fixed long warmup and a fixed-length cosine decay.
      run.schedule.kind = ScheduleKind::Cosine;
      run.schedule.warmup_tokens =
          std::int64_t(warmup_tokens(n, WarmupStyle::KaplanFixed));
      run.schedule.decay_end_tokens = std::int64_t(2.5e5 * 524288.0);
      run.schedule.final_lr_fraction = 0.0;
    } else {
      run.schedule.kind = ScheduleKind::Constant;
      run.schedule.warmup_tokens =
          std::int64_t(warmup_tokens(n, WarmupStyle::MatchModelSize));
    }
    plan.runs.push_back(std::move(run));
  }
  return plan;
}

bool plan_run_excluded(const PlannedRun& run, SizeScheme scheme) {
  if (run.target_flops.empty()) return true;
  double n = model_size(run.arch, scheme);
  double max_c =
      *std::max_element(run.target_flops.begin(), run.target_flops.end());
  return tokens_for_budget(n, max_c) > 100.0 * n;
}

}  // namespace scalelaw
