#include "cmawiz/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <sstream>

#include "cmawiz/common.hpp"
#include "cmawiz/error.hpp"

namespace cmawiz {

namespace {

constexpr const char* kMatrixHeader = "# cmawizard score-matrix v1";
constexpr const char* kCurvesHeader = "# cmawizard curves v1";

using RunKey = std::pair<std::string, std::uint64_t>;

/// algorithm -> (instance key, seed) -> record, plus the union of keys.
struct Collection {
  std::vector<std::string> algorithms;
  std::map<RunKey, InstanceSpec> keys;
  std::map<std::string, std::map<RunKey, const RunRecord*>> runs;
};

Collection collect(std::span<const RunRecord> records) {
  if (records.empty()) throw Error(ErrorKind::MissingRecords, "no run records to compare");
  Collection c;
  for (const auto& r : records) {
    if (!c.runs.count(r.algorithm)) c.algorithms.push_back(r.algorithm);
    const RunKey key{instance_key(r.instance), r.seed};
    c.keys.emplace(key, r.instance);
    c.runs[r.algorithm][key] = &r;
  }
  std::sort(c.algorithms.begin(), c.algorithms.end());

  std::vector<std::string> gaps;
  for (const auto& a : c.algorithms)
    for (const auto& [key, spec] : c.keys)
      if (!c.runs[a].count(key)) gaps.push_back(a + " @ " + key.first + " seed " + std::to_string(key.second));
  if (!gaps.empty()) {
    std::ostringstream os;
    os << gaps.size() << " missing record(s): ";
    for (std::size_t i = 0; i < gaps.size() && i < 5; ++i) os << (i ? "; " : "") << gaps[i];
    if (gaps.size() > 5) os << "; ...";
    throw Error(ErrorKind::MissingRecords, os.str());
  }
  return c;
}

double loss_at(const RunRecord& r, double fraction) {
  return best_loss_at(r.history, checkpoint_evaluations(fraction, r.instance.budget));
}

std::string percent(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.1f", 100.0 * v);
  return buf;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(line);
  while (std::getline(in, cur, '\t')) out.push_back(cur);
  return out;
}

}  // namespace

long checkpoint_evaluations(double fraction, long budget) {
  return std::max(1L, static_cast<long>(std::floor(fraction * static_cast<double>(budget) + 1e-9)));
}

std::size_t ScoreMatrix::index_of(const std::string& algorithm) const {
  const auto it = std::find(algorithms.begin(), algorithms.end(), algorithm);
  if (it == algorithms.end()) throw Error(ErrorKind::UnknownName, "algorithm '" + algorithm + "' not in matrix");
  return static_cast<std::size_t>(it - algorithms.begin());
}

ScoreMatrix score_matrix(std::span<const RunRecord> records, const std::vector<double>& checkpoints) {
  if (checkpoints.empty()) throw Error(ErrorKind::InvalidConfig, "no checkpoints");
  const Collection c = collect(records);
  const std::size_t n = c.algorithms.size();

  std::vector<std::vector<double>> wins(n, std::vector<double>(n, 0.0));
  // Per-setting mean win rate against all opponents, for the standard error.
  std::vector<std::vector<double>> per_setting(n);
  std::size_t settings = 0;
  std::vector<double> losses(n);
  for (const auto& [key, spec] : c.keys) {
    for (double fraction : checkpoints) {
      for (std::size_t a = 0; a < n; ++a) losses[a] = loss_at(*c.runs.at(c.algorithms[a]).at(key), fraction);
      for (std::size_t a = 0; a < n; ++a) {
        double row = 0.0;
        for (std::size_t b = 0; b < n; ++b) {
          const double w = losses[a] < losses[b] ? 1.0 : (losses[a] == losses[b] ? 0.5 : 0.0);
          wins[a][b] += w;
          if (b != a) row += w;
        }
        per_setting[a].push_back(n > 1 ? row / static_cast<double>(n - 1) : 0.5);
      }
      ++settings;
    }
  }
  for (auto& row : wins)
    for (auto& w : row) w /= static_cast<double>(settings);
  for (std::size_t a = 0; a < n; ++a) wins[a][a] = 0.5;

  std::vector<double> score(n), se(n);
  for (std::size_t a = 0; a < n; ++a) {
    double s = 0.0;
    for (std::size_t b = 0; b < n; ++b)
      if (b != a) s += wins[a][b];
    score[a] = n > 1 ? s / static_cast<double>(n - 1) : 0.5;
    const auto& v = per_setting[a];
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    se[a] = v.size() > 1 ? std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()))
                         : 0.0;
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });

  ScoreMatrix m;
  m.settings = settings;
  for (std::size_t i : order) {
    m.algorithms.push_back(c.algorithms[i]);
    m.global_score.push_back(score[i]);
    m.standard_error.push_back(se[i]);
    std::vector<double> row;
    for (std::size_t j : order) row.push_back(wins[i][j]);
    m.wins.push_back(std::move(row));
  }
  return m;
}

std::vector<ConvergenceCurve> convergence_curves(std::span<const RunRecord> records,
                                                 const std::vector<double>& checkpoints) {
  if (checkpoints.empty()) throw Error(ErrorKind::InvalidConfig, "no checkpoints");
  const Collection c = collect(records);
  const std::size_t n = c.algorithms.size();

  // Group runs by instance; seeds of the same instance share one rescaling.
  std::map<std::string, std::vector<RunKey>> by_instance;
  for (const auto& [key, spec] : c.keys) by_instance[key.first].push_back(key);

  std::vector<std::vector<double>> sums(n, std::vector<double>(checkpoints.size(), 0.0));
  std::size_t samples = 0;
  for (const auto& [instance, keys] : by_instance) {
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
      std::vector<std::vector<double>> losses(n);
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < n; ++a) {
        for (const auto& key : keys) {
          const double v = loss_at(*c.runs.at(c.algorithms[a]).at(key), checkpoints[k]);
          losses[a].push_back(v);
          if (std::isfinite(v)) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
          }
        }
      }
      for (std::size_t a = 0; a < n; ++a) {
        for (double v : losses[a]) {
          double norm = 0.0;
          if (!std::isfinite(v)) {
            norm = hi >= lo ? 1.0 : 0.0;
          } else if (hi > lo) {
            norm = (v - lo) / (hi - lo);
          }
          sums[a][k] += norm;
        }
      }
    }
    samples += keys.size();
  }

  std::vector<std::size_t> by_fraction(checkpoints.size());
  std::iota(by_fraction.begin(), by_fraction.end(), 0);
  std::stable_sort(by_fraction.begin(), by_fraction.end(),
                   [&](std::size_t a, std::size_t b) { return checkpoints[a] < checkpoints[b]; });

  std::vector<ConvergenceCurve> curves;
  for (std::size_t a = 0; a < n; ++a) {
    ConvergenceCurve curve;
    curve.algorithm = c.algorithms[a];
    for (std::size_t k : by_fraction)
      curve.points.emplace_back(checkpoints[k], sums[a][k] / static_cast<double>(samples));
    curve.final_loss_label = curve.points.back().second;
    curve.second_final_loss_label =
        curve.points.size() > 1 ? curve.points[curve.points.size() - 2].second : curve.points.back().second;
    curves.push_back(std::move(curve));
  }
  return curves;
}

std::string format_rank_label(const ScoreMatrix& matrix, const std::string& algorithm) {
  const std::size_t i = matrix.index_of(algorithm);
  return std::to_string(i + 1) + "/" + std::to_string(matrix.algorithms.size()) + ":" +
         percent(matrix.global_score[i]) + "% +- " + percent(matrix.standard_error[i]);
}

std::string write_score_matrix(const ScoreMatrix& m) {
  std::ostringstream os;
  os << kMatrixHeader << "\n";
  os << "algorithm\tlabel\tscore\tstandard_error\tsettings";
  for (const auto& a : m.algorithms) os << "\t" << a;
  os << "\n";
  for (std::size_t i = 0; i < m.algorithms.size(); ++i) {
    os << m.algorithms[i] << "\t" << format_rank_label(m, m.algorithms[i]) << "\t" << format_real(m.global_score[i])
       << "\t" << format_real(m.standard_error[i]) << "\t" << m.settings;
    for (double w : m.wins[i]) os << "\t" << format_real(w);
    os << "\n";
  }
  return os.str();
}

ScoreMatrix parse_score_matrix(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kMatrixHeader) throw Error(ErrorKind::Parse, "score matrix: bad header");
  if (!std::getline(in, line)) throw Error(ErrorKind::Parse, "score matrix: missing column row");
  const auto columns = split_tabs(line);
  if (columns.size() < 5) throw Error(ErrorKind::Parse, "score matrix: bad column row");
  ScoreMatrix m;
  m.algorithms.assign(columns.begin() + 5, columns.end());
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_tabs(line);
    if (cells.size() != columns.size()) throw Error(ErrorKind::Parse, "score matrix: ragged row");
    m.global_score.push_back(parse_real(cells[2]));
    m.standard_error.push_back(parse_real(cells[3]));
    m.settings = std::stoul(cells[4]);
    std::vector<double> row;
    for (std::size_t j = 5; j < cells.size(); ++j) row.push_back(parse_real(cells[j]));
    m.wins.push_back(std::move(row));
  }
  if (m.wins.size() != m.algorithms.size()) throw Error(ErrorKind::Parse, "score matrix: row count mismatch");
  return m;
}

std::string write_curves(const std::vector<ConvergenceCurve>& curves) {
  std::ostringstream os;
  os << kCurvesHeader << "\n";
  os << "algorithm\tcheckpoint\tnormalized_loss\n";
  for (const auto& c : curves)
    for (const auto& [x, y] : c.points) os << c.algorithm << "\t" << format_real(x) << "\t" << format_real(y) << "\n";
  return os.str();
}

std::vector<ConvergenceCurve> parse_curves(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCurvesHeader) throw Error(ErrorKind::Parse, "curves: bad header");
  std::getline(in, line);
  std::vector<ConvergenceCurve> curves;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_tabs(line);
    if (cells.size() != 3) throw Error(ErrorKind::Parse, "curves: expected 3 columns");
    if (curves.empty() || curves.back().algorithm != cells[0]) curves.push_back({cells[0], {}, 0.0, 0.0});
    curves.back().points.emplace_back(parse_real(cells[1]), parse_real(cells[2]));
  }
  for (auto& c : curves) {
    c.final_loss_label = c.points.back().second;
    c.second_final_loss_label = c.points.size() > 1 ? c.points[c.points.size() - 2].second : c.points.back().second;
  }
  return curves;
}

std::string render_score_table(const ScoreMatrix& m, std::size_t max_rows) {
  std::size_t width = 9;
  for (const auto& a : m.algorithms) width = std::max(width, a.size());
  std::ostringstream os;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(width), "");
  os << buf;
  for (const auto& a : m.algorithms) {
    std::snprintf(buf, sizeof(buf), " %*s", static_cast<int>(std::max<std::size_t>(a.size(), 6)), a.c_str());
    os << buf;
  }
  os << "\n";
  for (std::size_t i = 0; i < m.algorithms.size() && i < max_rows; ++i) {
    std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(width), m.algorithms[i].c_str());
    os << buf;
    for (std::size_t j = 0; j < m.algorithms.size(); ++j) {
      std::snprintf(buf, sizeof(buf), " %*.3f", static_cast<int>(std::max<std::size_t>(m.algorithms[j].size(), 6)),
                    m.wins[i][j]);
      os << buf;
    }
    os << "\n";
  }
  os << "\n";
  for (const auto& a : m.algorithms) os << a << "  " << format_rank_label(m, a) << "\n";
  return os.str();
}

std::string render_curves(const std::vector<ConvergenceCurve>& curves) {
  std::ostringstream os;
  char buf[96];
  for (const auto& c : curves) {
    std::snprintf(buf, sizeof(buf), "%s (%.3f, %.3f):", c.algorithm.c_str(), c.final_loss_label,
                  c.second_final_loss_label);
    os << buf;
    for (const auto& [x, y] : c.points) {
      std::snprintf(buf, sizeof(buf), "  %g%%=%.3f", 100.0 * x, y);
      os << buf;
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace cmawiz
