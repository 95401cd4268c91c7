#include "scalelaw/pipeline.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "scalelaw/csv.hpp"
#include "scalelaw/hparam.hpp"
#include "scalelaw/ingest.hpp"
#include "scalelaw/svg.hpp"

namespace scalelaw {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                          "#bcbd22", "#17becf"};

std::string flops_label(double c) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.3g", c);
  return buf;
}

LossSource parse_loss_source(const std::string& name) {
  if (name == "validation" || name == "val" || name == "v") {
    return LossSource::Validation;
  }
  if (name == "train" || name == "smoothed-train" || name == "t") {
    return LossSource::SmoothedTrain;
  }
  throw std::invalid_argument("unknown loss source: " + name);
}

NoiseProfile parse_profile(const json& j) {
  if (j.is_string()) return noise_profile_by_name(j.get<std::string>());
  NoiseProfile p;
  p.loss_lo = j.at("loss_lo").get<double>();
  p.sigma_lo = j.at("sigma_lo").get<double>();
  p.loss_hi = j.at("loss_hi").get<double>();
  p.sigma_hi = j.at("sigma_hi").get<double>();
  return p;
}

SynthSpec parse_synth_spec(const json& j) {
  SynthSpec spec;
  spec.irreducible = j.at("irreducible").get<double>();
  spec.size_coeff = j.at("size_coeff").get<double>();
  spec.size_exp = j.at("size_exp").get<double>();
  spec.data_coeff = j.at("data_coeff").get<double>();
  spec.data_exp = j.at("data_exp").get<double>();
  if (j.contains("warmup_penalty") && !j["warmup_penalty"].is_null()) {
    spec.warmup_penalty = j["warmup_penalty"].get<double>();
  }
  if (j.contains("noise") && !j["noise"].is_null()) {
    spec.noise = parse_profile(j["noise"]);
  }
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  return spec;
}

void apply_config_keys(PipelineConfig& config, const json& j) {
  if (j.contains("runs_dir")) {
    config.runs_dir = fs::path(j["runs_dir"].get<std::string>());
  }
  if (j.contains("synth")) config.synth_spec = parse_synth_spec(j["synth"]);
  if (j.contains("plan_style")) {
    config.plan_style = parse_plan_style(j["plan_style"].get<std::string>());
  }
  if (j.contains("grid")) {
    const auto& g = j["grid"];
    if (g.contains("base")) config.grid.base = g["base"].get<double>();
    if (g.contains("factor")) config.grid.factor = g["factor"].get<double>();
    if (g.contains("count")) config.grid.count = g["count"].get<int>();
  }
  if (j.contains("scheme")) {
    config.scheme = parse_size_scheme(j["scheme"].get<std::string>());
  }
  if (j.contains("source")) {
    config.source = parse_loss_source(j["source"].get<std::string>());
  }
  if (j.contains("profile")) config.profile = parse_profile(j["profile"]);
  if (j.contains("bootstrap")) config.bootstrap = j["bootstrap"].get<int>();
  if (j.contains("seed")) config.seed = j["seed"].get<std::uint64_t>();
  if (j.contains("report")) {
    const auto& r = j["report"];
    if (r.contains("output_dir")) {
      config.report.output_dir = fs::path(r["output_dir"].get<std::string>());
    }
    if (r.contains("formats")) {
      config.report.formats.clear();
      for (const auto& f : r["formats"]) {
        config.report.formats.insert(f.get<std::string>());
      }
    }
    if (r.contains("reference_flops")) {
      config.report.reference_flops = r["reference_flops"].get<double>();
    }
    if (r.contains("deterministic")) {
      config.report.deterministic = r["deterministic"].get<bool>();
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw StageError("report", "cannot open " + path.string() + " for write");
  }
  out << text;
}

std::string fit_json_text(const PowerLawFit& fit,
                          const std::optional<SaturatingFit>& saturating) {
  const DerivedLaw tokens = derive_token_law(fit);
  const DerivedLaw ratio = derive_ratio_law(fit);
  json j;
  j["N0"] = fit.coeff;
  j["a"] = fit.exponent;
  j["r2"] = fit.r_squared;
  j["r2_unweighted"] = fit.r_squared_unweighted;
  j["ci_a"] = {fit.ci_exponent.first, fit.ci_exponent.second};
  j["reference_flops"] = fit.reference_flops;
  j["n_star_at_reference"] = fit.predict(fit.reference_flops);
  j["ci_ref"] = {fit.ci_at_reference.first, fit.ci_at_reference.second};
  j["D0"] = tokens.coeff;
  j["b"] = tokens.exponent;
  j["rho0"] = ratio.coeff;
  j["r"] = ratio.exponent;
  if (saturating) {
    j["saturating"] = {{"E", saturating->irreducible},
                       {"L0", saturating->coeff},
                       {"ell", saturating->exponent},
                       {"objective", saturating->objective}};
  }
  return j.dump(2) + "\n";
}

std::string ci_text(const char* name, double value,
                    std::pair<double, double> ci) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%s = %.3f (%.2f, %.2f)", name, value,
                ci.first, ci.second);
  return buf;
}

}  // namespace

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw StageError("config", "cannot read config file " + path.string(), 2);
  }
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw StageError("config", std::string("config parse error: ") + e.what());
  }

  PipelineConfig config;
  try {
    apply_config_keys(config, j);
    // Per-stage one-line overrides; later entries win, iteration is in
    // key order so overrides are reproducible.
    if (j.contains("stage_overrides")) {
      for (const auto& [stage, patch] : j["stage_overrides"].items()) {
        (void)stage;
        apply_config_keys(config, patch);
      }
    }
  } catch (const json::exception& e) {
    throw StageError("config", std::string("bad config value: ") + e.what());
  }
  if (!config.runs_dir && !config.synth_spec) {
    throw StageError("config", "config needs either runs_dir or synth");
  }
  if (config.report.formats.empty()) {
    throw StageError("config", "report.formats must not be empty");
  }
  return config;
}

std::string render_isoflop_svg(const std::vector<IsoFlopCurve>& curves,
                               const std::vector<NStarEstimate>& estimates,
                               bool deterministic) {
  if (curves.empty()) {
    throw std::invalid_argument("render_isoflop_svg: empty data table");
  }
  svg::Chart chart;
  chart.title = "IsoFLOP curves";
  chart.x_label = "model size N";
  chart.y_label = "loss";
  chart.log_y = false;
  std::size_t i = 0;
  for (const auto& curve : curves) {
    svg::Series s;
    s.label = flops_label(curve.flops) + std::string(" FLOPs");
    s.color = kPalette[i++ % 10];
    for (const auto& p : curve.points) {
      s.points.push_back({p.n, p.loss, p.sigma, p.sigma});
    }
    chart.series.push_back(std::move(s));
  }
  // Minimum markers from the estimates, no recomputation here.
  svg::Series minima;
  minima.label = "bootstrap minima";
  minima.color = "#000000";
  minima.line = false;
  for (const auto& e : estimates) {
    if (!e.valid) continue;
    minima.points.push_back({e.n_star, e.loss_star, 0.0, 0.0});
  }
  if (!minima.points.empty()) chart.series.push_back(std::move(minima));
  return chart.render(!deterministic);
}

std::string render_nstar_fit_svg(const std::vector<NStarEstimate>& estimates,
                                 const PowerLawFit& fit, bool deterministic) {
  if (estimates.empty()) {
    throw std::invalid_argument("render_nstar_fit_svg: empty data table");
  }
  svg::Chart chart;
  chart.title = "Compute-optimal model size";
  chart.x_label = "compute C [FLOPs]";
  chart.y_label = "N* [params]";

  svg::Series pts;
  pts.label = "bootstrap estimates";
  pts.line = false;
  svg::Series line;
  line.label = ci_text("a", fit.exponent, fit.ci_exponent);
  line.color = "#d62728";
  line.markers = false;
  line.dashed = true;
  for (const auto& e : estimates) {
    if (!e.valid) continue;
    double spread = std::expm1(e.log_std) * e.n_star;
    pts.points.push_back({e.flops, e.n_star, spread, spread});
    line.points.push_back({e.flops, fit.predict(e.flops), 0.0, 0.0});
  }
  if (pts.points.empty()) {
    throw std::invalid_argument("render_nstar_fit_svg: no valid estimates");
  }
  chart.series.push_back(std::move(pts));
  if (line.points.size() > 1) chart.series.push_back(std::move(line));
  chart.annotations.push_back(
      ci_text("N*(C_ref)", fit.predict(fit.reference_flops),
              fit.ci_at_reference));
  return chart.render(!deterministic);
}

std::string render_opt_loss_svg(const std::vector<LossStarEstimate>& losses,
                                const std::optional<SaturatingFit>& fit,
                                bool deterministic) {
  if (losses.empty()) {
    throw std::invalid_argument("render_opt_loss_svg: empty data table");
  }
  svg::Chart chart;
  chart.title = "Optimal loss vs compute";
  chart.x_label = "compute C [FLOPs]";
  chart.y_label = "loss at N*";
  chart.log_y = false;

  svg::Series pts;
  pts.label = "bootstrap minima";
  pts.line = false;
  for (const auto& e : losses) {
    if (!e.valid) continue;
    double spread = std::expm1(e.log_std) * e.loss_star;
    pts.points.push_back({e.flops, e.loss_star, spread, spread});
  }
  if (pts.points.empty()) {
    throw std::invalid_argument("render_opt_loss_svg: no valid estimates");
  }
  if (fit) {
    svg::Series line;
    char buf[96];
    std::snprintf(buf, sizeof(buf), "E + L0*C^-ell, ell = %.3f",
                  fit->exponent);
    line.label = buf;
    line.color = "#d62728";
    line.markers = false;
    line.dashed = true;
    for (const auto& e : losses) {
      if (e.valid) line.points.push_back({e.flops, fit->predict(e.flops)});
    }
    if (line.points.size() > 1) chart.series.push_back(std::move(line));
  }
  chart.series.push_back(std::move(pts));
  return chart.render(!deterministic);
}

std::string render_hparam_fit_svg(
    const std::vector<std::array<double, 3>>& optima_n_bs_lr,
    const HParamLaws& laws, bool deterministic) {
  if (optima_n_bs_lr.empty()) {
    throw std::invalid_argument("render_hparam_fit_svg: empty data table");
  }
  svg::Chart chart;
  chart.title = "Hyperparameter scaling";
  chart.x_label = "model size N";
  chart.y_label = "optimal value";

  svg::Series bs_pts, lr_pts, bs_line, lr_line;
  bs_pts.label = "batch size [seqs]";
  bs_pts.line = false;
  lr_pts.label = "learning rate";
  lr_pts.color = "#ff7f0e";
  lr_pts.line = false;
  bs_line.markers = false;
  bs_line.dashed = true;
  lr_line.color = "#ff7f0e";
  lr_line.markers = false;
  lr_line.dashed = true;
  char buf[96];
  std::snprintf(buf, sizeof(buf), "bs ~ N^%.3f", laws.bs_law.exponent);
  bs_line.label = buf;
  std::snprintf(buf, sizeof(buf), "lr ~ N^%.3f", laws.lr_law.exponent);
  lr_line.label = buf;
  for (const auto& row : optima_n_bs_lr) {
    bs_pts.points.push_back({row[0], row[1]});
    lr_pts.points.push_back({row[0], row[2]});
    bs_line.points.push_back({row[0], laws.bs_law.eval(row[0])});
    lr_line.points.push_back({row[0], laws.lr_law.eval(row[0])});
  }
  chart.series = {std::move(bs_pts), std::move(lr_pts)};
  if (optima_n_bs_lr.size() > 1) {
    chart.series.push_back(std::move(bs_line));
    chart.series.push_back(std::move(lr_line));
  }
  return chart.render(!deterministic);
}

std::string render_accuracy_svg(const std::vector<AccuracyPoint>& points,
                                bool deterministic) {
  if (points.empty()) {
    throw std::invalid_argument("render_accuracy_svg: empty data table");
  }
  svg::Chart chart;
  chart.title = "Fit accuracy vs experiment compute";
  chart.x_label = "cumulative compute [FLOPs]";
  chart.y_label = "exponent a";
  chart.log_y = false;
  svg::Series s;
  s.label = "fitted a with 95% CI";
  for (const auto& p : points) {
    s.points.push_back({p.budget, p.exponent, p.exponent - p.ci.first,
                        p.ci.second - p.exponent});
  }
  chart.series.push_back(std::move(s));
  return chart.render(!deterministic);
}

PipelineResult run_pipeline(const PipelineConfig& config) {
  // Stage: ingest (or synthesize).
  std::vector<TrainingRun> runs;
  if (config.runs_dir) {
    if (!fs::is_directory(*config.runs_dir)) {
      throw StageError(
          "ingest", "input directory not found: " + config.runs_dir->string(),
          2);
    }
    try {
      runs = load_sweep(*config.runs_dir);
    } catch (const std::exception& e) {
      throw StageError("ingest", e.what());
    }
  } else if (config.synth_spec) {
    try {
      auto models = canonical_model_grid();
      auto plan = make_plan(config.plan_style, config.grid, models);
      runs = generate_runs(*config.synth_spec, plan);
    } catch (const std::exception& e) {
      throw StageError("synth", e.what());
    }
  } else {
    throw StageError("config", "no input source configured");
  }

  // Stage: estimate.
  PipelineResult result;
  try {
    result.curves = build_isoflop_curves(runs, config.grid.values(),
                                         config.scheme, config.source,
                                         config.profile);
    if (result.curves.empty()) {
      throw std::runtime_error("no budget produced an isoflop curve");
    }
    for (const auto& curve : result.curves) {
      result.estimates.push_back(
          estimate_nstar(curve, config.bootstrap, config.seed));
      result.opt_loss.push_back(
          min_loss_at(curve, config.bootstrap, config.seed));
    }
  } catch (const std::exception& e) {
    throw StageError("estimate", e.what());
  }

  // Stage: fit.
  try {
    result.fit =
        fit_power_law_ci(result.estimates, config.report.reference_flops);
    std::vector<std::pair<double, double>> loss_points;
    for (const auto& e : result.opt_loss) {
      if (e.valid) loss_points.emplace_back(e.flops, e.loss_star);
    }
    if (loss_points.size() >= 4) {
      try {
        result.saturating = fit_saturating(loss_points);
      } catch (const std::exception&) {
        result.saturating.reset();  // optional curve; the N* fit stands
      }
    }
  } catch (const std::exception& e) {
    throw StageError("fit", e.what());
  }

  // Stage: report.
  const auto& rep = config.report;
  std::error_code ec;
  fs::create_directories(rep.output_dir, ec);
  if (ec || !fs::is_directory(rep.output_dir)) {
    throw StageError("report",
                     "cannot create output dir " + rep.output_dir.string());
  }
  auto emit = [&](const fs::path& name, const std::string& text) {
    fs::path path = rep.output_dir / name;
    write_text(path, text);
    result.artifacts.push_back(path);
  };

  if (rep.formats.count("csv")) {
    csv::Table est;
    est.header = {"C", "n_star", "log_std", "loss_star", "valid",
                  "omitted_fraction"};
    for (const auto& e : result.estimates) {
      est.rows.push_back({csv::num(e.flops), csv::num(e.n_star),
                          csv::num(e.log_std), csv::num(e.loss_star),
                          e.valid ? "1" : "0", csv::num(e.omitted_fraction)});
    }
    emit("estimates.csv", csv::format(est));

    csv::Table opt;
    opt.header = {"C", "loss_star", "log_std", "valid"};
    for (const auto& e : result.opt_loss) {
      opt.rows.push_back({csv::num(e.flops), csv::num(e.loss_star),
                          csv::num(e.log_std), e.valid ? "1" : "0"});
    }
    emit("opt_loss.csv", csv::format(opt));
  }
  if (rep.formats.count("json")) {
    emit("fit.json", fit_json_text(result.fit, result.saturating));
  }
  if (rep.formats.count("svg")) {
    emit("isoflop.svg", render_isoflop_svg(result.curves, result.estimates,
                                           rep.deterministic));
    emit("nstar_fit.svg", render_nstar_fit_svg(result.estimates, result.fit,
                                               rep.deterministic));
    emit("opt_loss.svg", render_opt_loss_svg(result.opt_loss,
                                             result.saturating,
                                             rep.deterministic));
  }
  return result;
}

}  // namespace scalelaw
