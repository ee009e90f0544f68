#include "tomo/success_grid.hpp"

#include <algorithm>
#include <cmath>

#include "tomo/error.hpp"

namespace tomo {

std::string metric_name(Metric m) {
  return m == Metric::loss ? "loss" : "accuracy";
}

bool run_succeeds(const RunResult& r, Metric m, double threshold) {
  if (m == Metric::loss) return r.best_loss <= threshold;
  return r.has_acc && r.best_acc >= threshold;
}

SuccessGrid::SuccessGrid(std::vector<int> t_values, std::vector<std::size_t> d_values,
                         std::vector<double> loss_thresholds,
                         std::vector<double> acc_thresholds)
    : t_values_(std::move(t_values)),
      d_values_(std::move(d_values)),
      loss_thresholds_(std::move(loss_thresholds)),
      acc_thresholds_(std::move(acc_thresholds)),
      cells_(t_values_.size() * d_values_.size()) {
  if (t_values_.empty() || d_values_.empty()) {
    throw Error(Error::Kind::invalid_argument, "SuccessGrid: empty axes");
  }
  if (!std::is_sorted(d_values_.begin(), d_values_.end())) {
    throw Error(Error::Kind::invalid_argument, "SuccessGrid: d axis must be sorted");
  }
}

const std::vector<double>& SuccessGrid::thresholds(Metric m) const {
  return m == Metric::loss ? loss_thresholds_ : acc_thresholds_;
}

std::size_t SuccessGrid::index(int t, std::size_t d) const {
  const auto ti = std::find(t_values_.begin(), t_values_.end(), t);
  const auto di = std::find(d_values_.begin(), d_values_.end(), d);
  if (ti == t_values_.end() || di == d_values_.end()) {
    throw Error(Error::Kind::invalid_argument, "SuccessGrid: cell not on the lattice");
  }
  return static_cast<std::size_t>(ti - t_values_.begin()) * d_values_.size() +
         static_cast<std::size_t>(di - d_values_.begin());
}

void SuccessGrid::set_cell(int t, std::size_t d, std::vector<RunResult> results) {
  cells_[index(t, d)] = std::move(results);
}

const std::vector<RunResult>& SuccessGrid::cell(int t, std::size_t d) const {
  return cells_[index(t, d)];
}

std::size_t SuccessGrid::cell_runs(int t, std::size_t d) const {
  return cell(t, d).size();
}

std::size_t SuccessGrid::cell_successes(int t, std::size_t d, Metric m,
                                        double threshold) const {
  std::size_t n = 0;
  for (const RunResult& r : cell(t, d)) n += run_succeeds(r, m, threshold);
  return n;
}

double SuccessGrid::p_success(int t, std::size_t d, Metric m, double threshold) const {
  const std::size_t runs = cell_runs(t, d);
  if (runs == 0) {
    throw Error(Error::Kind::invalid_argument, "SuccessGrid: empty cell");
  }
  return static_cast<double>(cell_successes(t, d, m, threshold)) /
         static_cast<double>(runs);
}

ThresholdCurve extract_threshold(const SuccessGrid& grid, double delta, int t,
                                 Metric metric) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw Error(Error::Kind::invalid_argument, "extract_threshold: delta in (0,1)");
  }
  ThresholdCurve curve;
  curve.metric = metric;
  curve.t = t;
  curve.delta = delta;
  for (double thr : grid.thresholds(metric)) {
    ThresholdPoint pt;
    pt.threshold = thr;
    for (std::size_t d : grid.d_values()) {
      if (grid.p_success(t, d, metric, thr) >= 1.0 - delta) {
        pt.d_star = d;
        break;
      }
    }
    curve.points.push_back(pt);
  }
  return curve;
}

ComparisonReport compare_methods(std::span<const LabeledCurve> curves) {
  if (curves.empty()) {
    throw Error(Error::Kind::invalid_argument, "compare_methods: no curves");
  }
  const auto& ref = curves[0].curve;
  for (const LabeledCurve& lc : curves) {
    if (lc.curve.points.size() != ref.points.size() || lc.curve.metric != ref.metric) {
      throw Error(Error::Kind::invalid_argument, "compare_methods: threshold axes differ");
    }
    for (std::size_t i = 0; i < ref.points.size(); ++i) {
      if (lc.curve.points[i].threshold != ref.points[i].threshold) {
        throw Error(Error::Kind::invalid_argument, "compare_methods: threshold axes differ");
      }
    }
  }

  ComparisonReport report;
  for (std::size_t i = 0; i < ref.points.size(); ++i) {
    ComparisonRow row;
    row.threshold = ref.points[i].threshold;
    for (const LabeledCurve& lc : curves) {
      row.ranking.emplace_back(lc.label, lc.curve.points[i].d_star);
    }
    std::stable_sort(row.ranking.begin(), row.ranking.end(),
                     [](const auto& a, const auto& b) {
                       if (a.second.has_value() != b.second.has_value()) {
                         return a.second.has_value();
                       }
                       if (!a.second) return false;
                       return *a.second < *b.second;
                     });

    // More burn-in is expected to need no more dimensions (paper trend).
    for (const LabeledCurve& lo : curves) {
      for (const LabeledCurve& hi : curves) {
        if (hi.t <= lo.t) continue;
        const auto& d_lo = lo.curve.points[i].d_star;
        const auto& d_hi = hi.curve.points[i].d_star;
        if (d_lo && d_hi && *d_hi > *d_lo) {
          report.burn_in_violations.push_back(
              "threshold " + std::to_string(row.threshold) + ": " + hi.label +
              " (d*=" + std::to_string(*d_hi) + ") above " + lo.label +
              " (d*=" + std::to_string(*d_lo) + ")");
        }
      }
    }
    report.rows.push_back(std::move(row));
  }
  return report;
}

}  // namespace tomo
