#pragma once

#include <array>
#include <cstdint>
#include <utility>

namespace oica {

// Packed symmetric storage uses colexicographic order of sorted index tuples.
// Pairs (i,j) with 0 <= i <= j < I appear as (0,0),(0,1),(1,1),(0,2),(1,2),(2,2),...
// Quadruples (i,j,k,l) with i <= j <= k <= l are ranked by the combinatorial
// number system applied to the strictly increasing tuple (i, j+1, k+2, l+3).

constexpr long long binom(long long n, long long k) {
  if (k < 0 || k > n) return 0;
  long long r = 1;
  for (long long t = 1; t <= k; ++t) r = r * (n - k + t) / t;
  return r;
}

constexpr int pair_count(int dim) { return dim * (dim + 1) / 2; }

constexpr int pair_index(int i, int j) {  // requires 0 <= i <= j
  return j * (j + 1) / 2 + i;
}

inline std::pair<int, int> pair_unindex(int idx) {
  int j = 0;
  while (pair_index(0, j + 1) <= idx) ++j;
  return {idx - pair_index(0, j), j};
}

constexpr long long quad_count(int dim) { return binom(dim + 3, 4); }

constexpr long long quad_index(int i, int j, int k, int l) {  // requires i<=j<=k<=l
  return i + binom(j + 1, 2) + binom(k + 2, 3) + binom(l + 3, 4);
}

inline std::array<int, 4> sorted4(int a, int b, int c, int d) {
  std::array<int, 4> v{a, b, c, d};
  if (v[0] > v[1]) std::swap(v[0], v[1]);
  if (v[2] > v[3]) std::swap(v[2], v[3]);
  if (v[0] > v[2]) std::swap(v[0], v[2]);
  if (v[1] > v[3]) std::swap(v[1], v[3]);
  if (v[1] > v[2]) std::swap(v[1], v[2]);
  return v;
}

// Number of distinct permutations of the sorted tuple (i,j,k,l).
constexpr int quad_multiplicity(int i, int j, int k, int l) {
  int runs[4] = {1, 0, 0, 0};
  int r = 0;
  int prev = i;
  const int idx[3] = {j, k, l};
  for (int t = 0; t < 3; ++t) {
    if (idx[t] == prev) {
      ++runs[r];
    } else {
      prev = idx[t];
      ++runs[++r];
    }
  }
  constexpr int fact[5] = {1, 1, 2, 6, 24};
  return 24 / (fact[runs[0]] * fact[runs[1]] * fact[runs[2]] * fact[runs[3]]);
}

// Visits packed quadruple indices in storage order.
template <typename F>
void for_each_quad(int dim, F&& fn) {
  long long idx = 0;
  for (int l = 0; l < dim; ++l)
    for (int k = 0; k <= l; ++k)
      for (int j = 0; j <= k; ++j)
        for (int i = 0; i <= j; ++i) fn(i, j, k, l, idx++);
}

// Visits packed pair indices in storage order.
template <typename F>
void for_each_pair(int dim, F&& fn) {
  int idx = 0;
  for (int j = 0; j < dim; ++j)
    for (int i = 0; i <= j; ++i) fn(i, j, idx++);
}

}  // namespace oica
