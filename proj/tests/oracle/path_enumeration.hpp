#pragma once

// Exhaustive up-right path enumeration, independent of the library DPs.

#include <cmath>
#include <functional>
#include <set>
#include <utility>
#include <vector>

namespace oracle {

using Point = std::pair<int, int>;
using Path = std::vector<Point>;

// All up-right paths from `from` to `to` (first coordinate = row i, second =
// column j; a step increments exactly one coordinate) whose sites satisfy `ok`.
inline std::vector<Path> enumerate_paths(Point from, Point to, const std::function<bool(int, int)>& ok) {
  std::vector<Path> out;
  Path cur;
  std::function<void(int, int)> walk = [&](int i, int j) {
    if (!ok(i, j)) return;
    cur.emplace_back(i, j);
    if (i == to.first && j == to.second) {
      out.push_back(cur);
    } else {
      if (i < to.first) walk(i + 1, j);
      if (j < to.second) walk(i, j + 1);
    }
    cur.pop_back();
  };
  if (from.first <= to.first && from.second <= to.second) walk(from.first, from.second);
  return out;
}

inline double log_path_sum(const std::vector<Path>& paths, const std::function<double(int, int)>& log_w) {
  double total = 0.0;
  for (const auto& p : paths) {
    double lw = 0.0;
    for (auto [i, j] : p) lw += log_w(i, j);
    total += std::exp(lw);
  }
  return std::log(total);
}

// Sum over r-tuples of pairwise vertex-disjoint paths, path k running from
// starts[k] to ends[k], of exp(sum of log_w over all visited sites).
inline double log_multi_path_sum(const std::vector<Point>& starts, const std::vector<Point>& ends,
                                 const std::function<double(int, int)>& log_w) {
  const auto any = [](int, int) { return true; };
  std::vector<std::vector<Path>> options;
  for (std::size_t k = 0; k < starts.size(); ++k) options.push_back(enumerate_paths(starts[k], ends[k], any));
  double total = 0.0;
  std::vector<const Path*> chosen(starts.size());
  std::function<void(std::size_t)> pick = [&](std::size_t k) {
    if (k == starts.size()) {
      std::set<Point> seen;
      double lw = 0.0;
      for (const Path* p : chosen) {
        for (const auto& pt : *p) {
          if (!seen.insert(pt).second) return;
          lw += log_w(pt.first, pt.second);
        }
      }
      total += std::exp(lw);
      return;
    }
    for (const auto& p : options[k]) {
      chosen[k] = &p;
      pick(k + 1);
    }
  };
  pick(0);
  return std::log(total);
}

}  // namespace oracle
