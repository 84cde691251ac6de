#pragma once

#include "dsvgd/config.hpp"
#include "dsvgd/federation.hpp"

#include <string>
#include <vector>

namespace dsvgd {

struct ExperimentResult {
  std::vector<RoundRecord> rows;
  std::string status = "ok";  // ok | error
  std::string error;
};

// Runs the configured protocol end to end. When the config carries an `out`
// directory, writes results.csv, manifest.json and any requested particle
// snapshots there; a failed run still leaves a manifest with the error.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Canned 1-D toy demo: runs the protocol on the two-agent mixture problem
// and emits per-round KDE curves (kde_round_<i>.csv) next to results.csv.
ExperimentResult run_toy_demo(const std::string& protocol, const std::string& out_dir,
                              std::uint64_t seed, long particles, long rounds, long steps);

void write_results_csv(const std::string& path, const std::vector<RoundRecord>& rows);

struct SnapshotData {
  Matrix particles;
  int round = 0;
  std::string protocol;
};

// One header line "N d round protocol", then N whitespace-separated rows
// with 17 significant digits; read_snapshot round-trips bit-exactly.
void write_snapshot(const std::string& path, const Matrix& particles, int round,
                    const std::string& protocol);
SnapshotData read_snapshot(const std::string& path);

std::string format_double(double v);  // %.17g

}  // namespace dsvgd
