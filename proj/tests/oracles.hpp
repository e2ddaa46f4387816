#pragma once

// Straightforward reference computations used to check the optimized code.
// They share no code with the library beyond its public data types.

#include <Eigen/Core>
#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <vector>

#include "vsl/features.hpp"
#include "vsl/rng.hpp"

namespace oracle {

/// Histogram by enumerating every start position and every tuple value
/// combination explicitly.
inline std::vector<std::int64_t> cooccurrence(const vsl::IntRaster& q, const vsl::Region& region,
                                              vsl::TupleDirection direction, int T) {
  const int L = 2 * T + 1;
  std::vector<std::int64_t> hist(static_cast<std::size_t>(L * L * L * L), 0);
  const bool along_rows = direction == vsl::TupleDirection::AlongRows;
  for (Eigen::Index i = region.row; i < region.row + region.height; ++i)
    for (Eigen::Index j = region.col; j < region.col + region.width; ++j) {
      const Eigen::Index di = along_rows ? 0 : 1;
      const Eigen::Index dj = along_rows ? 1 : 0;
      if (i + 3 * di >= region.row + region.height || j + 3 * dj >= region.col + region.width)
        continue;
      for (int k0 = -T; k0 <= T; ++k0)
        for (int k1 = -T; k1 <= T; ++k1)
          for (int k2 = -T; k2 <= T; ++k2)
            for (int k3 = -T; k3 <= T; ++k3) {
              if (q(i, j) == k0 && q(i + di, j + dj) == k1 && q(i + 2 * di, j + 2 * dj) == k2 &&
                  q(i + 3 * di, j + 3 * dj) == k3)
                ++hist[static_cast<std::size_t>((((k0 + T) * L + (k1 + T)) * L + (k2 + T)) * L +
                                                (k3 + T))];
            }
    }
  return hist;
}

/// Orbits of the group generated by the chosen maps, as sets of tuples.
inline std::set<std::set<std::array<int, 4>>> orbits(vsl::Symmetry symmetry, int T) {
  const bool sign = symmetry == vsl::Symmetry::Sign || symmetry == vsl::Symmetry::SignReversal;
  const bool rev = symmetry == vsl::Symmetry::Reversal || symmetry == vsl::Symmetry::SignReversal;
  std::set<std::set<std::array<int, 4>>> result;
  for (int a = -T; a <= T; ++a)
    for (int b = -T; b <= T; ++b)
      for (int c = -T; c <= T; ++c)
        for (int d = -T; d <= T; ++d) {
          std::set<std::array<int, 4>> orbit{{a, b, c, d}};
          if (sign) orbit.insert({-a, -b, -c, -d});
          if (rev) orbit.insert({d, c, b, a});
          if (sign && rev) orbit.insert({-d, -c, -b, -a});
          result.insert(orbit);
        }
  return result;
}

/// Mean of covering patch scores and coverage count per pixel, by visiting
/// every pixel of every patch footprint.
struct Footprint {
  Eigen::ArrayXXd mean;
  Eigen::ArrayXXi count;
};

inline Footprint footprint(const Eigen::ArrayXXd& scores, Eigen::Index height, Eigen::Index width,
                           Eigen::Index patch, Eigen::Index stride) {
  Eigen::ArrayXXd sum = Eigen::ArrayXXd::Zero(height, width);
  Eigen::ArrayXXi count = Eigen::ArrayXXi::Zero(height, width);
  for (Eigen::Index r = 0; r < scores.rows(); ++r)
    for (Eigen::Index c = 0; c < scores.cols(); ++c)
      for (Eigen::Index i = r * stride; i < r * stride + patch; ++i)
        for (Eigen::Index j = c * stride; j < c * stride + patch; ++j) {
          sum(i, j) += scores(r, c);
          ++count(i, j);
        }
  Footprint f{Eigen::ArrayXXd::Zero(height, width), count};
  for (Eigen::Index i = 0; i < height; ++i)
    for (Eigen::Index j = 0; j < width; ++j)
      if (count(i, j) > 0) f.mean(i, j) = sum(i, j) / count(i, j);
  return f;
}

/// Probability that a random positive outscores a random negative, ties
/// counting one half.
inline double mann_whitney(const std::vector<double>& pos, const std::vector<double>& neg) {
  double wins = 0.0;
  for (double p : pos)
    for (double n : neg) wins += p > n ? 1.0 : (p == n ? 0.5 : 0.0);
  return wins / (static_cast<double>(pos.size()) * static_cast<double>(neg.size()));
}

/// Area under a piecewise-linear curve by Simpson's rule on each segment
/// (exact for linear pieces), accumulated in extended precision.
inline double area(const std::vector<std::pair<double, double>>& xy) {
  long double total = 0.0L;
  for (std::size_t k = 1; k < xy.size(); ++k) {
    const long double x0 = xy[k - 1].first, x1 = xy[k].first;
    const long double y0 = xy[k - 1].second, y1 = xy[k].second;
    const long double ym = (y0 + y1) / 2.0L;
    total += (x1 - x0) / 6.0L * (y0 + 4.0L * ym + y1);
  }
  return static_cast<double>(total);
}

inline vsl::IntRaster random_quantized(vsl::Rng& rng, Eigen::Index rows, Eigen::Index cols, int T) {
  vsl::IntRaster q(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j)
      q(i, j) = static_cast<std::int32_t>(rng.below(static_cast<std::uint64_t>(2 * T + 1))) - T;
  return q;
}

inline vsl::Frame random_frame(vsl::Rng& rng, Eigen::Index rows, Eigen::Index cols) {
  vsl::Frame f(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i)
    for (Eigen::Index j = 0; j < cols; ++j) f.luma(i, j) = static_cast<std::uint8_t>(rng.below(256));
  return f;
}

}  // namespace oracle
