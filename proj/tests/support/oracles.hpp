#pragma once
// Independent reference computations. Nothing here calls into the library
// code it is used to check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

using Wide = boost::multiprecision::cpp_bin_float_50;

inline double WideSigmoid(double s) {
  const Wide w = 1 / (1 + exp(-Wide(s)));
  return static_cast<double>(w);
}

// P(s+ > s-) + 0.5 P(s+ = s-) over all positive/negative pairs.
inline double PairwiseAuroc(const std::vector<double>& scores,
                            const std::vector<std::uint8_t>& labels) {
  double wins = 0.0;
  std::size_t pairs = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (!labels[i]) continue;
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[j]) continue;
      ++pairs;
      if (scores[i] > scores[j]) {
        wins += 1.0;
      } else if (scores[i] == scores[j]) {
        wins += 0.5;
      }
    }
  }
  return wins / static_cast<double>(pairs);
}

struct ScanPoint {
  double cutoff;
  double fpr;
  double tpr;
};

// Every distinct score as a cutoff, tallied from scratch.
inline std::vector<ScanPoint> ScanCutoffs(const std::vector<double>& scores,
                                          const std::vector<std::uint8_t>& labels) {
  std::vector<double> cutoffs = scores;
  std::sort(cutoffs.begin(), cutoffs.end());
  cutoffs.erase(std::unique(cutoffs.begin(), cutoffs.end()), cutoffs.end());
  std::vector<ScanPoint> out;
  for (double c : cutoffs) {
    std::size_t tp = 0, fp = 0, p = 0, n = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
      if (labels[i]) {
        ++p;
        tp += scores[i] >= c;
      } else {
        ++n;
        fp += scores[i] >= c;
      }
    }
    out.push_back({c, double(fp) / double(n), double(tp) / double(p)});
  }
  return out;
}

// Exhaustive closest-to-(0,1) cutoff with the same tie rule. Squared
// distances are compared so that rounding in sqrt cannot create ties.
inline double ExhaustiveErCutoff(const std::vector<double>& scores,
                                 const std::vector<std::uint8_t>& labels) {
  const auto points = ScanCutoffs(scores, labels);
  double best_d = std::numeric_limits<double>::infinity();
  double best_fpr = 0.0;
  double best_c = 0.0;
  for (const auto& p : points) {
    const double d = p.fpr * p.fpr + (1 - p.tpr) * (1 - p.tpr);
    const bool better = d < best_d || (d == best_d && (p.fpr < best_fpr ||
                                                       (p.fpr == best_fpr && p.cutoff > best_c)));
    if (better) {
      best_d = d;
      best_fpr = p.fpr;
      best_c = p.cutoff;
    }
  }
  return best_c;
}

// Row-major design used by the oracles below.
struct Design {
  std::vector<std::vector<double>> rows;
  std::vector<std::uint8_t> labels;
  std::vector<std::uint8_t> group;
};

inline double Dot(const std::vector<double>& w, const std::vector<double>& x) {
  double s = 0.0;
  for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j];
  return s;
}

// Mean cross-entropy written directly from probabilities in 50-digit floats.
inline double CrossEntropy(const Design& d, const std::vector<double>& w, double b) {
  Wide total = 0;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const Wide p = 1 / (1 + exp(-Wide(Dot(w, d.rows[i]) + b)));
    total -= d.labels[i] ? log(p) : log(1 - p);
  }
  return static_cast<double>(total / Wide(d.rows.size()));
}

// Same quantity in long double, cheap enough for grid scans.
inline long double CrossEntropyFast(const Design& d, const std::vector<double>& w, double b) {
  long double total = 0;
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    long double s = b;
    for (std::size_t j = 0; j < w.size(); ++j) s += (long double)w[j] * d.rows[i][j];
    const long double p = 1 / (1 + std::exp(-s));
    total -= d.labels[i] ? std::log(p) : std::log1p(-p);
  }
  return total / d.rows.size();
}

// Soft equalized-odds disparity from per-cell probability means.
inline double SoftEod(const Design& d, const std::vector<double>& w, double b) {
  Wide sum[2][2] = {{0, 0}, {0, 0}};
  double count[2][2] = {{0, 0}, {0, 0}};
  for (std::size_t i = 0; i < d.rows.size(); ++i) {
    const Wide p = 1 / (1 + exp(-Wide(Dot(w, d.rows[i]) + b)));
    sum[d.group[i]][d.labels[i]] += p;
    count[d.group[i]][d.labels[i]] += 1;
  }
  const Wide tpr = sum[0][1] / count[0][1] - sum[1][1] / count[1][1];
  const Wide fpr = sum[0][0] / count[0][0] - sum[1][0] / count[1][0];
  return static_cast<double>(tpr * tpr + fpr * fpr);
}

// Central differences of f over (w, b); the last entry is d/db.
inline std::vector<double> CentralDifference(
    const std::function<double(const std::vector<double>&, double)>& f,
    const std::vector<double>& w, double b, double h) {
  std::vector<double> g(w.size() + 1);
  for (std::size_t j = 0; j < w.size(); ++j) {
    auto up = w, down = w;
    up[j] += h;
    down[j] -= h;
    g[j] = (f(up, b) - f(down, b)) / (2 * h);
  }
  g.back() = (f(w, b + h) - f(w, b - h)) / (2 * h);
  return g;
}

// Shapley value of feature j for value function v over subsets (bitmasks),
// summing marginal contributions over all orderings of m players.
inline double ShapleyByPermutations(const std::function<double(unsigned)>& v,
                                    std::size_t m, std::size_t j) {
  std::vector<std::size_t> order(m);
  for (std::size_t k = 0; k < m; ++k) order[k] = k;
  double total = 0.0;
  std::size_t count = 0;
  do {
    unsigned mask = 0;
    for (std::size_t k : order) {
      if (k == j) {
        total += v(mask | (1u << j)) - v(mask);
        break;
      }
      mask |= 1u << k;
    }
    ++count;
  } while (std::next_permutation(order.begin(), order.end()));
  return total / static_cast<double>(count);
}

}  // namespace oracle
