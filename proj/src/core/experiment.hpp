#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace pctv::experiment {

/// Subcommand names, in documentation order.
const std::vector<std::string>& names();

/// Files produced by one experiment run.
struct Artifacts {
    std::string csv;           // per-run rows
    std::string summary_json;  // resolved config, version, medians, trends
    std::string svg;           // empty when the experiment has no plot
};

/// Parses and validates `config_json` (Config errors carry a JSON pointer),
/// runs all (eps, n, seed) jobs on at most `threads` workers (0: see
/// worker_count) and collects the results in config order.
Artifacts run(std::string_view name, std::string_view config_json, unsigned threads = 0);

/// Writes <out_dir>/<name>.csv, .json and .svg; creates out_dir. Io on failure.
void write_artifacts(std::string_view name, const Artifacts& artifacts, const std::string& out_dir);

/// min(hardware threads, PCTV_THREADS if set and positive), at least 1.
unsigned worker_count();

const char* version();

}  // namespace pctv::experiment
