// Command-line front end: every subcommand is a thin shell around the
// library, emitting CSV/JSON to stdout (or files) and SVG figures.

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "scalelaw/csv.hpp"
#include "scalelaw/hparam.hpp"
#include "scalelaw/ingest.hpp"
#include "scalelaw/pipeline.hpp"
#include "scalelaw/rng.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace scalelaw;

namespace {

struct GlobalOpts {
  std::uint64_t seed = 0;
  int bootstrap = 500;
  std::string scheme = "linear";
  std::string profile = "refinedweb";
  bool deterministic = false;
};

SizeScheme scheme_of(const GlobalOpts& g) { return parse_size_scheme(g.scheme); }

NoiseProfile profile_of(const GlobalOpts& g) {
  if (fs::exists(g.profile)) {
    std::ifstream in(g.profile);
    json j;
    in >> j;
    NoiseProfile p;
    p.loss_lo = j.at("loss_lo").get<double>();
    p.sigma_lo = j.at("sigma_lo").get<double>();
    p.loss_hi = j.at("loss_hi").get<double>();
    p.sigma_hi = j.at("sigma_hi").get<double>();
    return p;
  }
  return noise_profile_by_name(g.profile);
}

LossSource source_of(const std::string& name) {
  if (name == "v" || name == "validation" || name == "val") {
    return LossSource::Validation;
  }
  if (name == "t" || name == "train" || name == "smoothed-train") {
    return LossSource::SmoothedTrain;
  }
  throw CLI::ValidationError("--source", "expected v|t");
}

FlopGrid parse_grid(const std::string& text) {
  FlopGrid grid;
  std::istringstream in(text);
  char c1 = 0, c2 = 0;
  if (!(in >> grid.base >> c1 >> grid.factor >> c2 >> grid.count) ||
      c1 != ',' || c2 != ',' || grid.count < 1) {
    throw CLI::ValidationError("--grid", "expected base,factor,count");
  }
  return grid;
}

void write_or_print(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + out_path);
  out << text;
}

json plan_to_json(const ExperimentPlan& plan) {
  json j;
  j["style"] = plan.style == ScheduleStyle::CosinePerBudget ? "cosine-per-budget"
                                                            : "constant-reuse";
  j["scheme"] = to_string(plan.scheme);
  j["grid"] = {{"base", plan.grid.base},
               {"factor", plan.grid.factor},
               {"count", plan.grid.count}};
  j["runs"] = json::array();
  for (const auto& run : plan.runs) {
    json r;
    r["arch"] = {{"depth", run.arch.depth},
                 {"width", run.arch.width},
                 {"vocab", run.arch.vocab},
                 {"seq_len", run.arch.seq_len},
                 {"heads", run.arch.heads}};
    r["schedule"] = {
        {"kind",
         run.schedule.kind == ScheduleKind::Cosine ? "cosine" : "constant"},
        {"warmup_tokens", run.schedule.warmup_tokens},
        {"decay_end_tokens", run.schedule.decay_end_tokens},
        {"final_lr_fraction", run.schedule.final_lr_fraction}};
    r["target_flops"] = run.target_flops;
    j["runs"].push_back(std::move(r));
  }
  return j;
}

ExperimentPlan plan_from_json(const json& j) {
  ExperimentPlan plan;
  plan.style = j.at("style").get<std::string>() == "cosine-per-budget"
                   ? ScheduleStyle::CosinePerBudget
                   : ScheduleStyle::ConstantReuse;
  if (j.contains("scheme")) {
    plan.scheme = parse_size_scheme(j["scheme"].get<std::string>());
  }
  if (j.contains("grid")) {
    plan.grid.base = j["grid"].at("base").get<double>();
    plan.grid.factor = j["grid"].at("factor").get<double>();
    plan.grid.count = j["grid"].at("count").get<int>();
  }
  for (const auto& r : j.at("runs")) {
    PlannedRun run;
    const auto& a = r.at("arch");
    run.arch.depth = a.at("depth").get<int>();
    run.arch.width = a.at("width").get<int>();
    if (a.contains("vocab")) run.arch.vocab = a["vocab"].get<int>();
    if (a.contains("seq_len")) run.arch.seq_len = a["seq_len"].get<int>();
    if (a.contains("heads")) run.arch.heads = a["heads"].get<int>();
    const auto& s = r.at("schedule");
    run.schedule.kind = s.at("kind").get<std::string>() == "cosine"
                            ? ScheduleKind::Cosine
                            : ScheduleKind::Constant;
    run.schedule.warmup_tokens = s.at("warmup_tokens").get<std::int64_t>();
    run.schedule.decay_end_tokens =
        s.value("decay_end_tokens", std::int64_t(0));
    run.schedule.final_lr_fraction = s.value("final_lr_fraction", 0.0);
    run.target_flops = r.at("target_flops").get<std::vector<double>>();
    plan.runs.push_back(std::move(run));
  }
  return plan;
}

SynthSpec synth_spec_from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read spec " + path);
  json j;
  in >> j;
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
    if (j["noise"].is_string()) {
      spec.noise = noise_profile_by_name(j["noise"].get<std::string>());
    } else {
      NoiseProfile p;
      p.loss_lo = j["noise"].at("loss_lo").get<double>();
      p.sigma_lo = j["noise"].at("sigma_lo").get<double>();
      p.loss_hi = j["noise"].at("loss_hi").get<double>();
      p.sigma_hi = j["noise"].at("sigma_hi").get<double>();
      spec.noise = p;
    }
  }
  if (j.contains("seed")) spec.seed = j["seed"].get<std::uint64_t>();
  return spec;
}

std::string estimates_csv(const std::vector<NStarEstimate>& estimates) {
  csv::Table t;
  t.header = {"C", "n_star", "log_std", "loss_star", "valid",
              "omitted_fraction"};
  for (const auto& e : estimates) {
    t.rows.push_back({csv::num(e.flops), csv::num(e.n_star),
                      csv::num(e.log_std), csv::num(e.loss_star),
                      e.valid ? "1" : "0", csv::num(e.omitted_fraction)});
  }
  return csv::format(t);
}

std::vector<NStarEstimate> estimates_from_csv(const std::string& path) {
  csv::Table t = csv::read_file(path);
  int ic = t.column("C"), in = t.column("n_star"), is = t.column("log_std");
  if (ic < 0 || in < 0 || is < 0) {
    throw std::runtime_error("estimates CSV needs columns C,n_star,log_std");
  }
  int il = t.column("loss_star"), iv = t.column("valid");
  std::vector<NStarEstimate> out;
  for (const auto& row : t.rows) {
    NStarEstimate e;
    e.flops = std::stod(row[std::size_t(ic)]);
    e.n_star = std::stod(row[std::size_t(in)]);
    e.log_std = std::stod(row[std::size_t(is)]);
    if (il >= 0) e.loss_star = std::stod(row[std::size_t(il)]);
    e.valid = iv < 0 || row[std::size_t(iv)] != "0";
    out.push_back(std::move(e));
  }
  return out;
}

std::string fit_to_json(const PowerLawFit& fit) {
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
  return j.dump(2) + "\n";
}

// Reduces a hyperparameter-sweep run to one observation: the loss is
// the last validation record when present, else the last smoothed
// train loss.
SweepPoint sweep_point_of(const TrainingRun& run) {
  SweepPoint p;
  p.n = model_size(run.arch, SizeScheme::Linear);
  p.batch_size_seqs = double(run.hparams.batch_size_seqs);
  p.lr = run.hparams.learning_rate;
  p.beta2 = run.hparams.beta2;
  if (!run.vals.empty()) {
    p.final_loss = run.vals.back().loss;
  } else {
    LossSeries smoothed =
        smooth_loss(series_from_steps(run), 0.05, run.log_interval,
                    double(run.batch_tokens()));
    p.final_loss = smoothed.entries.back().loss;
  }
  return p;
}

int run_cli(int argc, char** argv) {
  CLI::App app{"Compute-optimal scaling-law analysis"};
  app.require_subcommand(1);
  GlobalOpts g;
  app.add_option("--seed", g.seed, "RNG seed");
  app.add_option("--bootstrap", g.bootstrap, "bootstrap replicates");
  app.add_option("--scheme", g.scheme, "size scheme: linear|effective|kaplan");
  app.add_option("--profile", g.profile, "noise profile name or JSON file");
  app.add_flag("--deterministic", g.deterministic,
               "omit timestamps from SVG output");

  // grid
  auto* cmd_grid = app.add_subcommand("grid", "print the canonical model grid");
  cmd_grid->callback([&] {
    csv::Table t;
    t.header = {"depth", "width", "N_linear", "N_eff", "N_kaplan"};
    for (const auto& arch : canonical_model_grid()) {
      t.rows.push_back({std::to_string(arch.depth), std::to_string(arch.width),
                        csv::num(model_size(arch, SizeScheme::Linear)),
                        csv::num(model_size(arch, SizeScheme::Effective)),
                        csv::num(model_size(arch, SizeScheme::KaplanNoHead))});
    }
    std::cout << csv::format(t);
  });

  // plan
  auto* cmd_plan = app.add_subcommand("plan", "emit run manifest skeletons");
  std::string plan_style = "tuned-constant";
  std::string plan_grid = "1.25e16,2,12";
  std::string plan_out;
  cmd_plan->add_option("--style", plan_style,
                       "kaplan|warmup-fixed|cosine|tuned-constant");
  cmd_plan->add_option("--grid", plan_grid, "base,factor,count");
  cmd_plan->add_option("--out", plan_out, "output file (default stdout)");
  cmd_plan->callback([&] {
    auto models = canonical_model_grid();
    auto plan =
        make_plan(parse_plan_style(plan_style), parse_grid(plan_grid), models);
    write_or_print(plan_to_json(plan).dump(2) + "\n", plan_out);
  });

  // synth
  auto* cmd_synth =
      app.add_subcommand("synth", "generate runs from a loss surface");
  std::string synth_spec_path, synth_plan_path, synth_out;
  cmd_synth->add_option("--spec", synth_spec_path, "surface spec JSON")
      ->required();
  cmd_synth->add_option("--plan", synth_plan_path, "experiment plan JSON")
      ->required();
  cmd_synth->add_option("--out", synth_out, "output directory")->required();
  cmd_synth->callback([&] {
    SynthSpec spec = synth_spec_from_file(synth_spec_path);
    std::ifstream in(synth_plan_path);
    if (!in) throw std::runtime_error("cannot read plan " + synth_plan_path);
    json j;
    in >> j;
    ExperimentPlan plan = plan_from_json(j);
    fs::create_directories(synth_out);
    for (const auto& run : generate_runs(spec, plan)) {
      write_run(run, synth_out);
    }
  });

  // isoflop
  auto* cmd_iso =
      app.add_subcommand("isoflop", "estimate N*(C) over a FLOP grid");
  std::string iso_runs, iso_grid = "1.25e16,2,12", iso_source = "v";
  std::string iso_out, iso_curves_out;
  cmd_iso->add_option("--runs", iso_runs, "run manifest directory")
      ->required();
  cmd_iso->add_option("--grid", iso_grid, "base,factor,count");
  cmd_iso->add_option("--source", iso_source, "loss source: v|t");
  cmd_iso->add_option("--out", iso_out, "estimates CSV (default stdout)");
  cmd_iso->add_option("--curves-out", iso_curves_out,
                      "also write the raw curve points CSV");
  cmd_iso->callback([&] {
    auto runs = load_sweep(iso_runs);
    auto curves =
        build_isoflop_curves(runs, parse_grid(iso_grid).values(), scheme_of(g),
                             source_of(iso_source), profile_of(g));
    std::vector<NStarEstimate> estimates;
    for (const auto& c : curves) {
      estimates.push_back(estimate_nstar(c, g.bootstrap, g.seed));
    }
    write_or_print(estimates_csv(estimates), iso_out);
    if (!iso_curves_out.empty()) {
      csv::Table t;
      t.header = {"C", "n", "loss", "sigma"};
      for (const auto& c : curves) {
        for (const auto& p : c.points) {
          t.rows.push_back({csv::num(c.flops), csv::num(p.n),
                            csv::num(p.loss), csv::num(p.sigma)});
        }
      }
      csv::write_file(iso_curves_out, t);
    }
  });

  // fit
  auto* cmd_fit =
      app.add_subcommand("fit", "fit the N*(C) power law from estimates");
  std::string fit_estimates;
  double fit_ref = kChinchillaFlops;
  cmd_fit->add_option("--estimates", fit_estimates, "estimates CSV")
      ->required();
  cmd_fit->add_option("--reference-flops", fit_ref, "CI reference budget");
  cmd_fit->callback([&] {
    auto estimates = estimates_from_csv(fit_estimates);
    // The CSV carries only summary statistics, so CI replicates are
    // regenerated parametrically: lognormal around n_star with the
    // quoted log_std.
    for (auto& e : estimates) {
      rng::Stream stream(g.seed, curve_substream(e.flops));
      e.samples.resize(std::size_t(g.bootstrap));
      for (int b = 0; b < g.bootstrap; ++b) {
        e.samples[std::size_t(b)] =
            e.n_star * std::exp(e.log_std * stream.normal(std::uint64_t(b)));
      }
    }
    std::cout << fit_to_json(fit_power_law_ci(estimates, fit_ref));
  });

  // loss-fit
  auto* cmd_lossfit =
      app.add_subcommand("loss-fit", "saturating fit of optimal loss vs C");
  std::string lossfit_points;
  cmd_lossfit->add_option("--points", lossfit_points, "CSV with columns C,loss")
      ->required();
  cmd_lossfit->callback([&] {
    csv::Table t = csv::read_file(lossfit_points);
    int ic = t.column("C"), il = t.column("loss");
    if (il < 0) il = t.column("loss_star");
    if (ic < 0 || il < 0) {
      throw std::runtime_error("points CSV needs columns C,loss");
    }
    std::vector<std::pair<double, double>> points;
    for (const auto& row : t.rows) {
      points.emplace_back(std::stod(row[std::size_t(ic)]),
                          std::stod(row[std::size_t(il)]));
    }
    SaturatingFit fit = fit_saturating(points);
    json j{{"E", fit.irreducible},
           {"L0", fit.coeff},
           {"ell", fit.exponent},
           {"objective", fit.objective}};
    std::cout << j.dump(2) << "\n";
  });

  // loss-at
  auto* cmd_lossat =
      app.add_subcommand("loss-at", "per-run loss at a compute budget");
  std::string lossat_runs, lossat_source = "v";
  double lossat_flops = 0.0;
  cmd_lossat->add_option("--runs", lossat_runs, "run manifest directory")
      ->required();
  cmd_lossat->add_option("--flops", lossat_flops, "compute budget")
      ->required();
  cmd_lossat->add_option("--source", lossat_source, "loss source: v|t");
  cmd_lossat->callback([&] {
    csv::Table t;
    t.header = {"run_id", "N", "loss"};
    for (const auto& run : load_sweep(lossat_runs)) {
      auto loss = loss_at_flops(run, lossat_flops, scheme_of(g),
                                source_of(lossat_source));
      if (!loss) continue;
      t.rows.push_back({run.run_id,
                        csv::num(model_size(run.arch, scheme_of(g))),
                        csv::num(*loss)});
    }
    std::cout << csv::format(t);
  });

  // hparams
  auto* cmd_hp = app.add_subcommand(
      "hparams", "sweep analysis / tuned-table application");
  std::string hp_sweep, hp_apply, hp_laws_out;
  bool hp_arch_grid = false;
  int hp_gpus = 8;
  cmd_hp->add_option("--sweep", hp_sweep, "sweep run directory");
  cmd_hp->add_option("--apply", hp_apply, "laws JSON to apply");
  cmd_hp->add_flag("--arch-grid", hp_arch_grid,
                   "apply over the canonical model grid");
  cmd_hp->add_option("--laws-out", hp_laws_out,
                     "write fitted laws JSON here (default stdout)");
  cmd_hp->add_option("--gpus", hp_gpus, "batch-size rounding multiple");
  cmd_hp->callback([&] {
    if (!hp_apply.empty()) {
      if (!hp_arch_grid) {
        throw std::runtime_error("hparams --apply requires --arch-grid");
      }
      std::ifstream in(hp_apply);
      if (!in) throw std::runtime_error("cannot read laws " + hp_apply);
      json j;
      in >> j;
      HParamLaws laws;
      laws.bs_law = {j.at("bs").at("coeff").get<double>(),
                     j.at("bs").at("exponent").get<double>()};
      laws.lr_law = {j.at("lr").at("coeff").get<double>(),
                     j.at("lr").at("exponent").get<double>()};
      csv::Table t;
      t.header = {"N", "lr", "bs", "beta2"};
      for (const auto& arch : canonical_model_grid()) {
        double n = model_size(arch, SizeScheme::Linear);
        RoundedHParams r =
            round_hparams(laws.bs_law.eval(n), laws.lr_law.eval(n), hp_gpus);
        t.rows.push_back({csv::num(n), csv::num(r.lr),
                          csv::num(r.batch_size_seqs),
                          csv::num(select_beta2(r.batch_size_seqs))});
      }
      std::cout << csv::format(t);
      return;
    }
    if (hp_sweep.empty()) {
      throw std::runtime_error("hparams needs --sweep or --apply");
    }
    std::vector<SweepPoint> sweep;
    for (const auto& run : load_sweep(hp_sweep)) {
      sweep.push_back(sweep_point_of(run));
    }
    std::vector<double> sizes;
    for (const auto& p : sweep) sizes.push_back(p.n);
    std::sort(sizes.begin(), sizes.end());
    sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

    csv::Table t;
    t.header = {"N", "bs_star", "lr_star", "loss_star", "at_edge"};
    std::vector<HParamOptimumRow> rows;
    for (double n : sizes) {
      HParamOptimum opt = optimal_hparams(sweep, n);
      t.rows.push_back({csv::num(n), csv::num(opt.bs_star),
                        csv::num(opt.lr_star), csv::num(opt.loss_star),
                        opt.at_edge ? "1" : "0"});
      rows.push_back({n, opt.bs_star, opt.lr_star});
    }
    std::cout << csv::format(t);
    HParamLaws laws = fit_hparam_laws(rows);
    json j{{"bs",
            {{"coeff", laws.bs_law.coeff}, {"exponent", laws.bs_law.exponent}}},
           {"lr",
            {{"coeff", laws.lr_law.coeff},
             {"exponent", laws.lr_law.exponent}}}};
    write_or_print(j.dump(2) + "\n", hp_laws_out);
  });

  // cost
  auto* cmd_cost = app.add_subcommand("cost", "total FLOPs of a plan");
  std::string cost_plan;
  cmd_cost->add_option("--plan", cost_plan, "plan JSON")->required();
  cmd_cost->callback([&] {
    std::ifstream in(cost_plan);
    if (!in) throw std::runtime_error("cannot read plan " + cost_plan);
    json j;
    in >> j;
    std::cout << csv::num(experiment_cost(plan_from_json(j))) << "\n";
  });

  // accuracy
  auto* cmd_acc =
      app.add_subcommand("accuracy", "fit accuracy vs experiment compute");
  std::string acc_runs, acc_grid = "1.25e16,2,12", acc_source = "v";
  cmd_acc->add_option("--runs", acc_runs, "run manifest directory")
      ->required();
  cmd_acc->add_option("--grid", acc_grid, "base,factor,count");
  cmd_acc->add_option("--source", acc_source, "loss source: v|t");
  cmd_acc->callback([&] {
    auto runs = load_sweep(acc_runs);
    auto curves =
        build_isoflop_curves(runs, parse_grid(acc_grid).values(), scheme_of(g),
                             source_of(acc_source), profile_of(g));
    PowerLawFit reference =
        fit_power_law_ci(curves, g.bootstrap, g.seed, kChinchillaFlops);
    csv::Table t;
    t.header = {"budget", "a", "ci_lo", "ci_hi", "ci_width", "rms_rel_err"};
    for (const auto& p :
         accuracy_vs_compute(curves, reference, g.bootstrap, g.seed)) {
      t.rows.push_back({csv::num(p.budget), csv::num(p.exponent),
                        csv::num(p.ci.first), csv::num(p.ci.second),
                        csv::num(p.ci_width), csv::num(p.rms_rel_err)});
    }
    std::cout << csv::format(t);
  });

  // report
  auto* cmd_report =
      app.add_subcommand("report", "render an SVG figure from stage outputs");
  std::string rep_figure, rep_estimates, rep_fit, rep_curves, rep_opt_loss,
      rep_optima, rep_laws, rep_accuracy, rep_out;
  cmd_report
      ->add_option("--figure", rep_figure,
                   "isoflop|nstar_fit|opt_loss|hparam_fit|accuracy")
      ->required();
  cmd_report->add_option("--estimates", rep_estimates, "estimates CSV");
  cmd_report->add_option("--fit", rep_fit, "fit JSON");
  cmd_report->add_option("--curves", rep_curves, "curve points CSV");
  cmd_report->add_option("--opt-loss", rep_opt_loss, "optimal-loss CSV");
  cmd_report->add_option("--optima", rep_optima, "hparam optima CSV");
  cmd_report->add_option("--laws", rep_laws, "hparam laws JSON");
  cmd_report->add_option("--accuracy", rep_accuracy, "accuracy CSV");
  cmd_report->add_option("--out", rep_out, "output SVG (default stdout)");
  cmd_report->callback([&] {
    auto need = [](const std::string& value, const char* flag) {
      if (value.empty()) {
        throw std::runtime_error(std::string("report: missing ") + flag);
      }
    };
    std::string svg;
    if (rep_figure == "isoflop") {
      need(rep_curves, "--curves");
      csv::Table t = csv::read_file(rep_curves);
      int ic = t.column("C"), in = t.column("n"), il = t.column("loss");
      int is = t.column("sigma");
      if (ic < 0 || in < 0 || il < 0) {
        throw std::runtime_error("curves CSV needs columns C,n,loss");
      }
      std::vector<IsoFlopCurve> curves;
      for (const auto& row : t.rows) {
        double c = std::stod(row[std::size_t(ic)]);
        if (curves.empty() || curves.back().flops != c) {
          curves.push_back({c, {}});
        }
        LossPoint p;
        p.n = std::stod(row[std::size_t(in)]);
        p.flops = c;
        p.loss = std::stod(row[std::size_t(il)]);
        if (is >= 0) p.sigma = std::stod(row[std::size_t(is)]);
        curves.back().points.push_back(p);
      }
      std::vector<NStarEstimate> estimates;
      if (!rep_estimates.empty()) {
        estimates = estimates_from_csv(rep_estimates);
      }
      svg = render_isoflop_svg(curves, estimates, g.deterministic);
    } else if (rep_figure == "nstar_fit") {
      need(rep_estimates, "--estimates");
      need(rep_fit, "--fit");
      auto estimates = estimates_from_csv(rep_estimates);
      std::ifstream in(rep_fit);
      if (!in) throw std::runtime_error("cannot read fit " + rep_fit);
      json j;
      in >> j;
      PowerLawFit fit;
      fit.coeff = j.at("N0").get<double>();
      fit.exponent = j.at("a").get<double>();
      fit.reference_flops = j.value("reference_flops", kChinchillaFlops);
      if (j.contains("ci_a")) {
        fit.ci_exponent = {j["ci_a"][0].get<double>(),
                           j["ci_a"][1].get<double>()};
      }
      if (j.contains("ci_ref")) {
        fit.ci_at_reference = {j["ci_ref"][0].get<double>(),
                               j["ci_ref"][1].get<double>()};
      }
      svg = render_nstar_fit_svg(estimates, fit, g.deterministic);
    } else if (rep_figure == "opt_loss") {
      need(rep_opt_loss, "--opt-loss");
      csv::Table t = csv::read_file(rep_opt_loss);
      int ic = t.column("C"), il = t.column("loss_star");
      int is = t.column("log_std"), iv = t.column("valid");
      if (ic < 0 || il < 0) {
        throw std::runtime_error("opt-loss CSV needs columns C,loss_star");
      }
      std::vector<LossStarEstimate> losses;
      for (const auto& row : t.rows) {
        LossStarEstimate e;
        e.flops = std::stod(row[std::size_t(ic)]);
        e.loss_star = std::stod(row[std::size_t(il)]);
        if (is >= 0) e.log_std = std::stod(row[std::size_t(is)]);
        e.valid = iv < 0 || row[std::size_t(iv)] != "0";
        losses.push_back(std::move(e));
      }
      std::optional<SaturatingFit> fit;
      if (!rep_fit.empty()) {
        std::ifstream in(rep_fit);
        if (!in) throw std::runtime_error("cannot read fit " + rep_fit);
        json j;
        in >> j;
        const json& s = j.contains("saturating") ? j["saturating"] : j;
        SaturatingFit sf;
        sf.irreducible = s.at("E").get<double>();
        sf.coeff = s.at("L0").get<double>();
        sf.exponent = s.at("ell").get<double>();
        fit = sf;
      }
      svg = render_opt_loss_svg(losses, fit, g.deterministic);
    } else if (rep_figure == "hparam_fit") {
      need(rep_optima, "--optima");
      need(rep_laws, "--laws");
      csv::Table t = csv::read_file(rep_optima);
      int in = t.column("N"), ib = t.column("bs_star"),
          il = t.column("lr_star");
      if (in < 0 || ib < 0 || il < 0) {
        throw std::runtime_error(
            "optima CSV needs columns N,bs_star,lr_star");
      }
      std::vector<std::array<double, 3>> optima;
      for (const auto& row : t.rows) {
        optima.push_back({std::stod(row[std::size_t(in)]),
                          std::stod(row[std::size_t(ib)]),
                          std::stod(row[std::size_t(il)])});
      }
      std::ifstream in_laws(rep_laws);
      if (!in_laws) throw std::runtime_error("cannot read laws " + rep_laws);
      json j;
      in_laws >> j;
      HParamLaws laws;
      laws.bs_law = {j.at("bs").at("coeff").get<double>(),
                     j.at("bs").at("exponent").get<double>()};
      laws.lr_law = {j.at("lr").at("coeff").get<double>(),
                     j.at("lr").at("exponent").get<double>()};
      svg = render_hparam_fit_svg(optima, laws, g.deterministic);
    } else if (rep_figure == "accuracy") {
      need(rep_accuracy, "--accuracy");
      csv::Table t = csv::read_file(rep_accuracy);
      int ib = t.column("budget"), ia = t.column("a");
      int ilo = t.column("ci_lo"), ihi = t.column("ci_hi");
      if (ib < 0 || ia < 0) {
        throw std::runtime_error("accuracy CSV needs columns budget,a");
      }
      std::vector<AccuracyPoint> points;
      for (const auto& row : t.rows) {
        AccuracyPoint p;
        p.budget = std::stod(row[std::size_t(ib)]);
        p.exponent = std::stod(row[std::size_t(ia)]);
        p.ci = {ilo >= 0 ? std::stod(row[std::size_t(ilo)]) : p.exponent,
                ihi >= 0 ? std::stod(row[std::size_t(ihi)]) : p.exponent};
        p.ci_width = p.ci.second - p.ci.first;
        points.push_back(p);
      }
      svg = render_accuracy_svg(points, g.deterministic);
    } else {
      throw std::runtime_error("unknown figure: " + rep_figure);
    }
    write_or_print(svg, rep_out);
  });

  // pipeline
  auto* cmd_pipe = app.add_subcommand("pipeline", "run the full pipeline");
  std::string pipe_config;
  cmd_pipe->add_option("--config", pipe_config, "pipeline config JSON")
      ->required();
  cmd_pipe->callback([&] {
    PipelineConfig config = load_pipeline_config(pipe_config);
    // CLI flags override the config file when explicitly set.
    if (app.count("--seed")) config.seed = g.seed;
    if (app.count("--bootstrap")) config.bootstrap = g.bootstrap;
    if (app.count("--scheme")) config.scheme = scheme_of(g);
    if (app.count("--profile")) config.profile = profile_of(g);
    if (g.deterministic) config.report.deterministic = true;
    PipelineResult result = run_pipeline(config);
    for (const auto& path : result.artifacts) {
      std::cout << path.string() << "\n";
    }
  });

  CLI11_PARSE(app, argc, argv);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run_cli(argc, argv);
  } catch (const StageError& e) {
    json j{{"stage", e.stage()}, {"error", e.what()}};
    std::cerr << j.dump() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    json j{{"error", e.what()}};
    std::cerr << j.dump() << "\n";
    return 1;
  }
}
