#pragma once

#include <filesystem>
#include <vector>

#include "scalelaw/run.hpp"

namespace scalelaw {

/// Parses a run manifest (JSON header plus sibling step/validation CSVs)
/// and returns a fully validated TrainingRun. Unknown manifest keys are
/// ignored with a warning on stderr. Throws std::runtime_error on parse
/// or validation failure, naming the offending record index.
TrainingRun load_run(const std::filesystem::path& manifest_path);

/// Loads every *.json manifest in the directory. Throws on an empty
/// directory or on duplicate run_ids (the error names the id).
std::vector<TrainingRun> load_sweep(const std::filesystem::path& dir_path);

/// Writes manifest + step/val CSVs under `dir`, using <run_id>.json,
/// <run_id>.steps.csv and <run_id>.vals.csv. Returns the manifest path.
std::filesystem::path write_run(const TrainingRun& run,
                                const std::filesystem::path& dir);

}  // namespace scalelaw
