#pragma once

// Reference values computed with mpmath (50-digit precision) and scipy
// before the library existed, plus brute-force enumerators for the exact
// rank tests.

#include <array>
#include <cstdint>
#include <cstdlib>
#include <vector>

namespace iecsi::oracle {

struct TRow {
  double t;
  double df;
  double p;
};

inline constexpr std::array<TRow, 20> kTGrid{{
    {0.0, 1.0, 1.0},
    {0.5, 1.0, 0.70483276469913345165},
    {1.0, 1.0, 0.5},
    {2.0, 1.0, 0.29516723530086654835},
    {12.706204736174707, 1.0, 0.049999999999999992413},
    {0.25, 2.0, 0.82592234404430216182},
    {1.5, 2.0, 0.27239312489100107944},
    {4.302652729749464, 2.0, 0.050000000000000003989},
    {1.0, 3.0, 0.39100221895577064191},
    {3.0, 5.0, 0.030099247897462573847},
    {2.228, 10.0, 0.050011771817111365362},
    {0.1, 11.0, 0.92214359277714621181},
    {2.2, 11.0, 0.050086110981804242295},
    {5.0, 11.0, 0.0004025298181245196114},
    {1.96, 30.0, 0.059342312896050476315},
    {3.5, 30.0, 0.0014768074376442530632},
    {2.0, 100.0, 0.048212178731133679601},
    {2.1, 7.5, 0.071237071458078159808},
    {10.0, 4.0, 0.00056200362271599115571},
    {-2.5, 20.0, 0.021233545439132396905},
}};

inline const std::vector<double> kD1{5, 6, 4, 7, 5, 6, 6, 5, 3, 6, 5, 7, 6, 4, 5};
inline const std::vector<double> kD2{4, 5, 5, 5, 4, 6, 5, 3, 3, 4, 5, 6, 4, 4, 4};

inline const std::vector<double> kWelchSample{5, 6, 4, 7, 5, 6, 6, 5};

inline const std::vector<double> kMwX{4, 5, 5, 6, 3, 4, 5, 7, 6, 5, 4, 4, 5, 6, 2, 5, 5, 6, 4, 3};
inline const std::vector<double> kMwY{3, 4, 4, 5, 3, 4, 2, 5, 4, 4, 3, 5, 4, 4, 3, 6, 4, 3, 2, 4,
                                      5, 3};

// Two-sided exact p of the signed-rank test for tie-free, nonzero
// differences d, by enumerating all 2^n sign vectors.
inline double brute_wilcoxon_p(const std::vector<double>& d) {
  const std::size_t n = d.size();
  std::vector<int> rank(n);
  for (std::size_t i = 0; i < n; ++i) {
    int r = 1;
    for (std::size_t j = 0; j < n; ++j) {
      if (std::abs(d[j]) < std::abs(d[i])) ++r;
    }
    rank[i] = r;
  }
  const int total = static_cast<int>(n * (n + 1) / 2);
  int observed = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (d[i] > 0) observed += rank[i];
  }
  const int obs_dev = std::abs(2 * observed - total);
  std::uint64_t extreme = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    int w = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (mask >> i & 1) w += rank[i];
    }
    if (std::abs(2 * w - total) >= obs_dev) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(std::uint64_t{1} << n);
}

// Two-sided exact p of the rank-sum test for tie-free samples, by
// enumerating every assignment of the pooled values to x.
inline double brute_mann_whitney_p(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> pool(x);
  pool.insert(pool.end(), y.begin(), y.end());
  const std::size_t n = pool.size(), nx = x.size();
  const auto u_of = [&](std::uint64_t mask) {
    int u = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (!(mask >> j & 1) && pool[i] > pool[j]) ++u;
      }
    }
    return u;
  };
  const int nxny = static_cast<int>(nx * y.size());
  const int obs_dev = std::abs(2 * u_of((std::uint64_t{1} << nx) - 1) - nxny);
  std::uint64_t extreme = 0, total = 0;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcountll(mask)) != nx) continue;
    ++total;
    if (std::abs(2 * u_of(mask) - nxny) >= obs_dev) ++extreme;
  }
  return static_cast<double>(extreme) / static_cast<double>(total);
}

}  // namespace iecsi::oracle
