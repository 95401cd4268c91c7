#include "scalelaw/ingest.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <set>
#include <stdexcept>

#include "json.hpp"
#include "scalelaw/csv.hpp"

namespace scalelaw {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void warn_unknown_keys(const json& obj, const std::set<std::string>& known,
                       const std::string& context) {
  for (const auto& [key, _] : obj.items()) {
    if (!known.contains(key)) {
      std::cerr << "warning: ignoring unknown manifest key '" << context << key
                << "'\n";
    }
  }
}

ScheduleKind parse_kind(const std::string& kind) {
  if (kind == "constant") return ScheduleKind::Constant;
  if (kind == "cosine") return ScheduleKind::Cosine;
  throw std::runtime_error("unknown schedule kind: " + kind);
}

std::string kind_name(ScheduleKind kind) {
  return kind == ScheduleKind::Cosine ? "cosine" : "constant";
}

double cell_to_double(const std::string& cell, const fs::path& file,
                      std::size_t row) {
  try {
    return std::stod(cell);
  } catch (const std::exception&) {
    throw std::runtime_error("bad numeric value '" + cell + "' in " +
                             file.string() + " at record " +
                             std::to_string(row));
  }
}

}  // namespace

TrainingRun load_run(const fs::path& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) {
    throw std::runtime_error("cannot open manifest: " + manifest_path.string());
  }
  json m;
  try {
    in >> m;
  } catch (const json::exception& e) {
    throw std::runtime_error("malformed manifest " + manifest_path.string() +
                             ": " + e.what());
  }

  warn_unknown_keys(m,
                    {"run_id", "dataset", "arch", "hparams", "schedule",
                     "log_interval", "steps_file", "vals_file"},
                    "");

  TrainingRun run;
  try {
    run.run_id = m.at("run_id").get<std::string>();
    run.dataset = m.value("dataset", std::string{});

    const json& arch = m.at("arch");
    warn_unknown_keys(arch, {"depth", "width", "vocab", "seq_len", "heads"},
                      "arch.");
    run.arch.depth = arch.at("depth").get<int>();
    run.arch.width = arch.at("width").get<int>();
    run.arch.vocab = arch.value("vocab", 50432);
    run.arch.seq_len = arch.value("seq_len", 2048);
    run.arch.heads = arch.value("heads", 4);

    const json& hp = m.at("hparams");
    warn_unknown_keys(hp, {"lr", "batch_size_seqs", "beta2", "seed"},
                      "hparams.");
    run.hparams.learning_rate = hp.at("lr").get<double>();
    run.hparams.batch_size_seqs = hp.at("batch_size_seqs").get<int>();
    run.hparams.beta2 = hp.value("beta2", 0.95);
    run.hparams.seed = hp.value("seed", std::int64_t{0});

    const json& sched = m.at("schedule");
    warn_unknown_keys(
        sched, {"kind", "warmup_tokens", "decay_end_tokens",
                "final_lr_fraction"},
        "schedule.");
    run.schedule.kind = parse_kind(sched.at("kind").get<std::string>());
    run.schedule.warmup_tokens = sched.value("warmup_tokens", std::int64_t{0});
    run.schedule.decay_end_tokens =
        sched.value("decay_end_tokens", std::int64_t{0});
    run.schedule.final_lr_fraction = sched.value("final_lr_fraction", 0.0);

    run.log_interval = m.value("log_interval", 20);
  } catch (const json::exception& e) {
    throw std::runtime_error("manifest " + manifest_path.string() +
                             " missing or mistyped field: " + e.what());
  }

  const fs::path dir = manifest_path.parent_path();
  const fs::path steps_path = dir / m.at("steps_file").get<std::string>();
  const csv::Table steps = csv::read_file(steps_path);
  int c_step = steps.column("step");
  int c_tokens = steps.column("tokens");
  int c_loss = steps.column("train_loss");
  if (c_step < 0 || c_tokens < 0 || c_loss < 0) {
    throw std::runtime_error("steps file " + steps_path.string() +
                             " must have header step,tokens,train_loss");
  }
  run.steps.reserve(steps.rows.size());
  for (std::size_t i = 0; i < steps.rows.size(); ++i) {
    const auto& row = steps.rows[i];
    StepRecord rec;
    rec.step = std::int64_t(cell_to_double(row[c_step], steps_path, i));
    rec.tokens = std::int64_t(cell_to_double(row[c_tokens], steps_path, i));
    rec.train_loss = cell_to_double(row[c_loss], steps_path, i);
    run.steps.push_back(rec);
  }

  if (m.contains("vals_file") && !m.at("vals_file").get<std::string>().empty()) {
    const fs::path vals_path = dir / m.at("vals_file").get<std::string>();
    const csv::Table vals = csv::read_file(vals_path);
    int v_tokens = vals.column("tokens");
    int v_loss = vals.column("loss");
    int v_std = vals.column("subsample_std");
    if (v_tokens < 0 || v_loss < 0) {
      throw std::runtime_error("vals file " + vals_path.string() +
                               " must have header tokens,loss,subsample_std");
    }
    run.vals.reserve(vals.rows.size());
    for (std::size_t i = 0; i < vals.rows.size(); ++i) {
      const auto& row = vals.rows[i];
      ValRecord rec;
      rec.tokens = std::int64_t(cell_to_double(row[v_tokens], vals_path, i));
      rec.loss = cell_to_double(row[v_loss], vals_path, i);
      if (v_std >= 0 && std::size_t(v_std) < row.size() &&
          !row[v_std].empty()) {
        rec.subsample_std = cell_to_double(row[v_std], vals_path, i);
      }
      run.vals.push_back(rec);
    }
  }

  validate_run(run);
  return run;
}

std::vector<TrainingRun> load_sweep(const fs::path& dir_path) {
  if (!fs::is_directory(dir_path)) {
    throw std::runtime_error("not a directory: " + dir_path.string());
  }
  std::vector<fs::path> manifests;
  for (const auto& entry : fs::directory_iterator(dir_path)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") {
      manifests.push_back(entry.path());
    }
  }
  if (manifests.empty()) {
    throw std::runtime_error("no manifests found in " + dir_path.string());
  }
  std::sort(manifests.begin(), manifests.end());

  std::vector<TrainingRun> runs;
  std::set<std::string> seen;
  runs.reserve(manifests.size());
  for (const auto& path : manifests) {
    TrainingRun run = load_run(path);
    if (!seen.insert(run.run_id).second) {
      throw std::runtime_error("duplicate run_id '" + run.run_id + "' in " +
                               path.string());
    }
    runs.push_back(std::move(run));
  }
  return runs;
}

fs::path write_run(const TrainingRun& run, const fs::path& dir) {
  validate_run(run);
  fs::create_directories(dir);

  const std::string steps_name = run.run_id + ".steps.csv";
  const std::string vals_name = run.run_id + ".vals.csv";

  json m;
  m["run_id"] = run.run_id;
  m["dataset"] = run.dataset;
  m["arch"] = {{"depth", run.arch.depth},
               {"width", run.arch.width},
               {"vocab", run.arch.vocab},
               {"seq_len", run.arch.seq_len},
               {"heads", run.arch.heads}};
  m["hparams"] = {{"lr", run.hparams.learning_rate},
                  {"batch_size_seqs", run.hparams.batch_size_seqs},
                  {"beta2", run.hparams.beta2},
                  {"seed", run.hparams.seed}};
  m["schedule"] = {{"kind", kind_name(run.schedule.kind)},
                   {"warmup_tokens", run.schedule.warmup_tokens},
                   {"decay_end_tokens", run.schedule.decay_end_tokens},
                   {"final_lr_fraction", run.schedule.final_lr_fraction}};
  m["log_interval"] = run.log_interval;
  m["steps_file"] = steps_name;
  m["vals_file"] = run.vals.empty() ? std::string{} : vals_name;

  const fs::path manifest_path = dir / (run.run_id + ".json");
  {
    std::ofstream out(manifest_path);
    out << m.dump(2) << '\n';
  }

  csv::Table steps;
  steps.header = {"step", "tokens", "train_loss"};
  for (const auto& s : run.steps) {
    steps.rows.push_back({std::to_string(s.step), std::to_string(s.tokens),
                          csv::num(s.train_loss)});
  }
  csv::write_file(dir / steps_name, steps);

  if (!run.vals.empty()) {
    csv::Table vals;
    vals.header = {"tokens", "loss", "subsample_std"};
    for (const auto& v : run.vals) {
      vals.rows.push_back(
          {std::to_string(v.tokens), csv::num(v.loss),
           v.has_subsample_std() ? csv::num(v.subsample_std) : std::string{}});
    }
    csv::write_file(dir / vals_name, vals);
  }
  return manifest_path;
}

}  // namespace scalelaw
