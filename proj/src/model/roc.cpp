#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "fairex/error.hpp"
#include "fairex/logit.hpp"

namespace fairex {

RocCurve Roc(std::span<const double> scores, std::span<const std::uint8_t> labels) {
  if (scores.size() != labels.size()) {
    throw DataError("roc: " + std::to_string(scores.size()) + " scores for " +
                    std::to_string(labels.size()) + " labels");
  }
  RocCurve curve;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (std::isnan(scores[i])) throw DataError("roc: score " + std::to_string(i) + " is NaN");
    (labels[i] ? curve.positives : curve.negatives) += 1;
  }
  if (curve.positives == 0 || curve.negatives == 0) {
    throw DataError("roc: both classes must be present");
  }

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });

  const double p = static_cast<double>(curve.positives);
  const double q = static_cast<double>(curve.negatives);
  curve.points.push_back({0.0, 0.0, std::numeric_limits<double>::infinity(), 0, 0});
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t k = 0; k < order.size();) {
    const double cutoff = scores[order[k]];
    while (k < order.size() && scores[order[k]] == cutoff) {
      (labels[order[k]] ? tp : fp) += 1;
      ++k;
    }
    curve.points.push_back({fp / q, tp / p, cutoff, tp, fp});
  }
  return curve;
}

double AreaUnderCurve(const RocCurve& curve) {
  if (curve.points.size() < 2) throw DataError("roc curve needs at least two points");
  if (curve.positives > 0 && curve.negatives > 0) {
    // Twice the area in units of (1/P) x (1/N), exact in integers.
    unsigned long long twice_area = 0;
    for (std::size_t k = 1; k < curve.points.size(); ++k) {
      const auto& a = curve.points[k - 1];
      const auto& b = curve.points[k];
      twice_area += static_cast<unsigned long long>(b.false_positives - a.false_positives) *
                    (a.true_positives + b.true_positives);
    }
    return static_cast<double>(twice_area) /
           (2.0 * static_cast<double>(curve.positives) * static_cast<double>(curve.negatives));
  }
  double area = 0.0;
  for (std::size_t k = 1; k < curve.points.size(); ++k) {
    const auto& a = curve.points[k - 1];
    const auto& b = curve.points[k];
    area += (b.fpr - a.fpr) * (a.tpr + b.tpr) * 0.5;
  }
  return area;
}

ErChoice SelectErPoint(const RocCurve& curve) {
  bool found = false;
  ErChoice best;
  double best_d2 = 0.0;
  for (std::size_t k = 0; k < curve.points.size(); ++k) {
    const auto& pt = curve.points[k];
    if (!std::isfinite(pt.cutoff)) continue;
    const double d2 = pt.fpr * pt.fpr + (1.0 - pt.tpr) * (1.0 - pt.tpr);
    const auto& incumbent = curve.points[best.index];
    const bool better =
        !found || d2 < best_d2 ||
        (d2 == best_d2 && (pt.fpr < incumbent.fpr ||
                           (pt.fpr == incumbent.fpr && pt.cutoff > incumbent.cutoff)));
    if (better) {
      found = true;
      best_d2 = d2;
      best.index = k;
    }
  }
  if (!found) throw DataError("roc curve has no finite cutoff");
  best.cutoff = curve.points[best.index].cutoff;
  best.distance = std::sqrt(best_d2);
  return best;
}

double SelectThresholdEr(const RocCurve& curve) { return SelectErPoint(curve).cutoff; }

}  // namespace fairex
