#pragma once

#include "dsvgd/common.hpp"

#include <string>
#include <variant>
#include <vector>

namespace dsvgd {

enum class TaskKind { binary, multiclass, regression };

// Supervised dataset, one row per example. Binary labels are -1/+1,
// multiclass labels are 0-based class indices stored as doubles.
struct Dataset {
  Matrix x;
  Vector y;
  TaskKind task = TaskKind::binary;

  Index rows() const { return x.rows(); }
  Index features() const { return x.cols(); }
  int num_classes() const;
};

struct NormStats {
  std::string mode = "none";  // none | standardize | pixel
  Vector x_mean;
  Vector x_std;
  double y_mean = 0.0;
  double y_std = 1.0;
};

struct LoadSpec {
  std::variant<int, std::string> label_col = 0;
  std::string normalization = "none";
  std::string task = "auto";  // auto | binary | multiclass | regression
  double train_fraction = 1.0;
  std::uint64_t seed = 0;
  long max_rows = 0;  // 0 = no cap
};

struct LoadedData {
  Dataset train;
  Dataset test;
  NormStats stats;
};

// Reads a CSV file (header optional; auto-detected), splits train/test with
// a seeded shuffle, and applies normalization with statistics computed on
// the train split only. Parse failures name the 1-based line number.
LoadedData load_dataset(const std::string& path, const LoadSpec& spec);

// Applies an already-fitted normalization to raw rows (for loaders that
// bypass load_dataset).
void apply_normalization(Dataset& d, const NormStats& stats);

// Random permutation followed by contiguous splits; sizes differ by at most
// one, with the remainder handed out one per shard from the first shard on.
std::vector<Dataset> partition_dataset(const Dataset& d, int num_shards, std::uint64_t seed);

// Synthetic generators (deterministic in the seed).
Dataset make_separable_2d(long rows, std::uint64_t seed);
Dataset make_covertype_like(long rows, std::uint64_t seed);
Dataset make_sine_regression(long rows, std::uint64_t seed);

}  // namespace dsvgd
