#include "dsvgd/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace dsvgd {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::stringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  if (!line.empty() && line.back() == ',') cells.push_back("");
  return cells;
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  std::size_t pos = 0;
  try {
    out = std::stod(s, &pos);
  } catch (...) {
    return false;
  }
  return pos == s.size();
}

TaskKind infer_task(const Vector& y) {
  bool all_pm1 = true;
  bool all_small_ints = true;
  for (Index i = 0; i < y.size(); ++i) {
    const double v = y[i];
    if (v != -1.0 && v != 1.0) all_pm1 = false;
    if (v != std::floor(v) || v < 0.0 || v > 4096.0) all_small_ints = false;
  }
  if (all_pm1) return TaskKind::binary;
  if (all_small_ints) return TaskKind::multiclass;
  return TaskKind::regression;
}

TaskKind parse_task(const std::string& name, const Vector& y) {
  if (name == "auto") return infer_task(y);
  if (name == "binary") return TaskKind::binary;
  if (name == "multiclass") return TaskKind::multiclass;
  if (name == "regression") return TaskKind::regression;
  throw std::invalid_argument("load_dataset: unknown task '" + name + "'");
}

}  // namespace

int Dataset::num_classes() const {
  if (task == TaskKind::binary) return 2;
  if (task == TaskKind::regression) return 0;
  return static_cast<int>(y.maxCoeff()) + 1;
}

LoadedData load_dataset(const std::string& path, const LoadSpec& spec) {
  std::ifstream in(path);
  if (!in) {
    throw std::invalid_argument("load_dataset: cannot open '" + path + "'");
  }

  std::string line;
  long line_no = 0;
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto cells = split_csv_line(line);
    std::vector<double> vals(cells.size());
    bool numeric = true;
    for (std::size_t c = 0; c < cells.size(); ++c) {
      if (!parse_double(cells[c], vals[c])) {
        numeric = false;
        break;
      }
    }
    if (!numeric) {
      if (rows.empty() && header.empty()) {
        header = cells;
        continue;
      }
      throw std::invalid_argument("load_dataset: line " + std::to_string(line_no) +
                                  " of '" + path + "' is not numeric");
    }
    if (!rows.empty() && vals.size() != rows.front().size()) {
      throw std::invalid_argument("load_dataset: line " + std::to_string(line_no) +
                                  " has " + std::to_string(vals.size()) + " columns, expected " +
                                  std::to_string(rows.front().size()));
    }
    rows.push_back(std::move(vals));
    if (spec.max_rows > 0 && static_cast<long>(rows.size()) >= spec.max_rows) break;
  }

  if (rows.empty()) {
    throw std::invalid_argument("load_dataset: '" + path + "' has no data rows");
  }

  const int ncols = static_cast<int>(rows.front().size());
  int label_idx = 0;
  if (std::holds_alternative<int>(spec.label_col)) {
    label_idx = std::get<int>(spec.label_col);
  } else {
    const std::string& name = std::get<std::string>(spec.label_col);
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw std::invalid_argument("load_dataset: label column '" + name + "' not in header");
    }
    label_idx = static_cast<int>(it - header.begin());
  }
  if (label_idx < 0 || label_idx >= ncols) {
    throw std::invalid_argument("load_dataset: label column index " + std::to_string(label_idx) +
                                " out of range for " + std::to_string(ncols) + " columns");
  }

  const long m = static_cast<long>(rows.size());
  Matrix x(m, ncols - 1);
  Vector y(m);
  for (long i = 0; i < m; ++i) {
    int k = 0;
    for (int c = 0; c < ncols; ++c) {
      if (c == label_idx) {
        y[i] = rows[i][c];
      } else {
        x(i, k++) = rows[i][c];
      }
    }
  }

  const TaskKind task = parse_task(spec.task, y);

  // Seeded shuffle, then a contiguous train/test split.
  std::vector<long> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = Rng::derive(spec.seed, Stream::split);
  for (long i = m - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  }

  if (!(spec.train_fraction > 0.0) || spec.train_fraction > 1.0) {
    throw std::invalid_argument("load_dataset: train_fraction must lie in (0, 1]");
  }
  const long m_train = std::max<long>(1, static_cast<long>(std::floor(spec.train_fraction * m)));

  LoadedData out;
  out.train.task = out.test.task = task;
  out.train.x.resize(m_train, ncols - 1);
  out.train.y.resize(m_train);
  out.test.x.resize(m - m_train, ncols - 1);
  out.test.y.resize(m - m_train);
  for (long i = 0; i < m; ++i) {
    if (i < m_train) {
      out.train.x.row(i) = x.row(perm[i]);
      out.train.y[i] = y[perm[i]];
    } else {
      out.test.x.row(i - m_train) = x.row(perm[i]);
      out.test.y[i - m_train] = y[perm[i]];
    }
  }

  out.stats.mode = spec.normalization;
  if (spec.normalization == "standardize") {
    out.stats.x_mean = out.train.x.colwise().mean();
    Vector var = (out.train.x.rowwise() - out.stats.x_mean.transpose())
                     .array()
                     .square()
                     .colwise()
                     .mean();
    out.stats.x_std = var.array().sqrt().max(1e-12);
    if (task == TaskKind::regression) {
      out.stats.y_mean = out.train.y.mean();
      const double yv = (out.train.y.array() - out.stats.y_mean).square().mean();
      out.stats.y_std = std::max(std::sqrt(yv), 1e-12);
    }
  } else if (spec.normalization != "none" && spec.normalization != "pixel") {
    throw std::invalid_argument("load_dataset: unknown normalization '" + spec.normalization + "'");
  }
  apply_normalization(out.train, out.stats);
  apply_normalization(out.test, out.stats);
  return out;
}

void apply_normalization(Dataset& d, const NormStats& stats) {
  if (stats.mode == "none") return;
  if (d.rows() == 0) return;
  if (stats.mode == "pixel") {
    d.x = (d.x.array() * (0.99 / 255.0) + 0.01).matrix();
    return;
  }
  if (stats.mode == "standardize") {
    d.x = ((d.x.rowwise() - stats.x_mean.transpose()).array().rowwise() /
           stats.x_std.transpose().array())
              .matrix();
    if (d.task == TaskKind::regression) {
      d.y = ((d.y.array() - stats.y_mean) / stats.y_std).matrix();
    }
    return;
  }
  throw std::invalid_argument("apply_normalization: unknown mode '" + stats.mode + "'");
}

std::vector<Dataset> partition_dataset(const Dataset& d, int num_shards, std::uint64_t seed) {
  if (num_shards < 1) {
    throw std::invalid_argument("partition_dataset: num_shards must be >= 1");
  }
  const long m = d.rows();
  if (m < num_shards) {
    throw std::invalid_argument("partition_dataset: fewer rows (" + std::to_string(m) +
                                ") than shards (" + std::to_string(num_shards) + ")");
  }

  std::vector<long> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  Rng rng = Rng::derive(seed, Stream::partition);
  for (long i = m - 1; i > 0; --i) {
    std::swap(perm[i], perm[rng.below(static_cast<std::uint64_t>(i) + 1)]);
  }

  const long base = m / num_shards;
  const long rem = m % num_shards;
  std::vector<Dataset> shards(num_shards);
  long offset = 0;
  for (int k = 0; k < num_shards; ++k) {
    const long size = base + (k < rem ? 1 : 0);
    Dataset& s = shards[k];
    s.task = d.task;
    s.x.resize(size, d.features());
    s.y.resize(size);
    for (long i = 0; i < size; ++i) {
      s.x.row(i) = d.x.row(perm[offset + i]);
      s.y[i] = d.y[perm[offset + i]];
    }
    offset += size;
  }
  return shards;
}

Dataset make_separable_2d(long rows, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, Stream::synth, 1);
  Dataset d;
  d.task = TaskKind::binary;
  d.x.resize(rows, 2);
  d.y.resize(rows);
  // Two tight blobs at +/- (2, 2); separable through the origin.
  for (long i = 0; i < rows; ++i) {
    const double label = (i % 2 == 0) ? 1.0 : -1.0;
    d.x(i, 0) = 2.0 * label + 0.5 * rng.normal();
    d.x(i, 1) = 2.0 * label + 0.5 * rng.normal();
    d.y[i] = label;
  }
  return d;
}

Dataset make_covertype_like(long rows, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, Stream::synth, 2);
  const int dim = 54;
  // Fixed ground-truth direction with a handful of strong coordinates.
  Vector w(dim);
  Rng wrng = Rng::derive(seed, Stream::synth, 3);
  for (int j = 0; j < dim; ++j) w[j] = 0.3 * wrng.normal();
  for (int j = 0; j < 6; ++j) w[j] += (j % 2 == 0 ? 1.0 : -1.0) * 1.2;

  Dataset d;
  d.task = TaskKind::binary;
  d.x.resize(rows, dim);
  d.y.resize(rows);
  for (long i = 0; i < rows; ++i) {
    // First ten columns mimic continuous terrain features, the rest sparse
    // binary indicators.
    for (int j = 0; j < 10; ++j) d.x(i, j) = rng.normal();
    for (int j = 10; j < dim; ++j) d.x(i, j) = (rng.uniform() < 0.1) ? 1.0 : 0.0;
    const double logits = 0.8 * d.x.row(i).dot(w) + 0.9 * rng.normal();
    d.y[i] = logits > 0.0 ? 1.0 : -1.0;
  }
  return d;
}

Dataset make_sine_regression(long rows, std::uint64_t seed) {
  Rng rng = Rng::derive(seed, Stream::synth, 4);
  Dataset d;
  d.task = TaskKind::regression;
  d.x.resize(rows, 1);
  d.y.resize(rows);
  for (long i = 0; i < rows; ++i) {
    const double x = rng.uniform(-3.0, 3.0);
    d.x(i, 0) = x;
    d.y[i] = std::sin(2.0 * x) + 0.1 * rng.normal();
  }
  return d;
}

}  // namespace dsvgd
