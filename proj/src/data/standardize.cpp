#include <cmath>

#include "fairex/dataset.hpp"
#include "fairex/kernels.hpp"

namespace fairex {

Standardizer Standardizer::Fit(const Matrix& x) {
  Standardizer s;
  s.means.resize(x.cols());
  s.scales.resize(x.cols());
  const double n = static_cast<double>(x.rows());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto column = x.col(j);
    const double mean = kernels::Sum(column) / n;
    double ss = 0.0;
    for (double v : column) ss += (v - mean) * (v - mean);
    const double sd = std::sqrt(ss / n);
    s.means[j] = mean;
    s.scales[j] = sd > 0.0 ? sd : 1.0;
  }
  return s;
}

Matrix Standardizer::Apply(const Matrix& x) const {
  Matrix out(x.rows(), x.cols());
  for (std::size_t j = 0; j < x.cols(); ++j) {
    const auto source = x.col(j);
    auto target = out.col(j);
    const double inv = 1.0 / scales[j];
    for (std::size_t i = 0; i < x.rows(); ++i) target[i] = (source[i] - means[j]) * inv;
  }
  return out;
}

}  // namespace fairex
