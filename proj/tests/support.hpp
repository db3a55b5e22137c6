#pragma once

// Test oracles: every quantity recomputed by direct loops over cell
// coordinates, sharing no code with the library beyond GridFunction::at().

#include <algorithm>
#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "pjn/dyadic_cube.hpp"
#include "pjn/grid_function.hpp"
#include "pjn/scalar.hpp"

namespace pjn::testing {

// A cube as (level, coords) with coords[n-1] the time index.
struct NCube {
  int k = 0;
  std::vector<std::int64_t> x;

  bool operator==(const NCube&) const = default;
  bool operator<(const NCube& o) const { return k != o.k ? k < o.k : x < o.x; }

  NCube fwd() const {
    NCube c = *this;
    ++c.x.back();
    return c;
  }
  DyadicCube cube() const {
    std::vector<std::int64_t> sp(x.begin(), x.end() - 1);
    return DyadicCube(static_cast<int>(x.size()), k, sp, x.back());
  }
};

inline NCube ncube(const DyadicCube& c) {
  NCube out{c.level(), {}};
  for (int a = 0; a < c.dim(); ++a) out.x.push_back(c.coord(a));
  return out;
}

inline std::int64_t linear(const GridShape& s, const std::vector<std::int64_t>& cell) {
  std::int64_t idx = 0;
  for (int a = 0; a < s.n; ++a) {
    const std::int64_t ext = (a == s.n - 1) ? 3 * (std::int64_t{1} << s.level) : (std::int64_t{1} << s.level);
    idx = idx * ext + cell[static_cast<std::size_t>(a)];
  }
  return idx;
}

// Leaf cells of a cube, by coordinate recursion.
inline std::vector<std::vector<std::int64_t>> leaf_cells(const GridShape& s, const NCube& q) {
  const std::int64_t w = std::int64_t{1} << (s.level - q.k);
  std::vector<std::vector<std::int64_t>> out{{}};
  for (int a = 0; a < s.n; ++a) {
    std::vector<std::vector<std::int64_t>> next;
    for (const auto& partial : out) {
      for (std::int64_t i = 0; i < w; ++i) {
        auto c = partial;
        c.push_back(q.x[static_cast<std::size_t>(a)] * w + i);
        next.push_back(std::move(c));
      }
    }
    out = std::move(next);
  }
  return out;
}

template <class S>
S naive_mean(const GridFunction<S>& f, const NCube& q) {
  S sum = 0;
  const auto cells = leaf_cells(f.shape(), q);
  for (const auto& c : cells) sum += f.at(linear(f.shape(), c));
  return sum / S(static_cast<long>(cells.size()));
}

// Mean over the cubes in `parts` (equal sizes) of (f - c)^+.
template <class S>
S naive_pos_mean(const GridFunction<S>& f, const std::vector<NCube>& parts, const S& c) {
  S sum = 0;
  long count = 0;
  for (const NCube& q : parts) {
    for (const auto& cell : leaf_cells(f.shape(), q)) {
      const S v = f.at(linear(f.shape(), cell)) - c;
      if (v > 0) sum += v;
      ++count;
    }
  }
  return sum / S(count);
}

// mean_{Q u Q+} (f - f_{Q^{+,2}})^+.
template <class S>
S naive_forward_osc(const GridFunction<S>& f, const NCube& q) {
  return naive_pos_mean(f, {q, q.fwd()}, naive_mean(f, q.fwd().fwd()));
}

template <class S>
S naive_volume(int n, int k) {
  S v = 1;
  for (int i = 0; i < n * k; ++i) v /= 2;
  return v;
}

// All dyadic subcubes of Q0 at levels 0..L.
inline std::vector<NCube> all_cubes(int n, int level) {
  std::vector<NCube> out;
  for (int k = 0; k <= level; ++k) {
    const std::int64_t side = std::int64_t{1} << k;
    std::int64_t total = 1;
    for (int a = 0; a < n; ++a) total *= side;
    for (std::int64_t i = 0; i < total; ++i) {
      NCube c{k, std::vector<std::int64_t>(static_cast<std::size_t>(n))};
      std::int64_t r = i;
      for (int a = n - 1; a >= 0; --a) {
        c.x[static_cast<std::size_t>(a)] = r % side;
        r /= side;
      }
      out.push_back(std::move(c));
    }
  }
  return out;
}

inline NCube ancestor(const NCube& q, int k) {
  NCube a{k, q.x};
  for (auto& v : a.x) v >>= (q.k - k);
  return a;
}

// Grid maximal function at the leaf cell of Q0 with coordinates `cell`.
template <class S>
S naive_maximal(const GridFunction<S>& f, const std::vector<std::int64_t>& cell, bool augmented) {
  const int level = f.level();
  NCube leaf{level, cell};
  S best = naive_mean(f, ancestor(leaf, 0).fwd());
  for (int k = 1; k <= level; ++k) best = std::max(best, naive_mean(f, ancestor(leaf, k).fwd()));
  if (augmented) best = std::max(best, f.at(linear(f.shape(), cell)));
  return best;
}

// Maximal cubes Q of Q0 with mean_{Q+} f > lambda.
template <class S>
std::vector<NCube> naive_stopping(const GridFunction<S>& f, const S& lambda) {
  std::vector<NCube> out;
  for (const NCube& q : all_cubes(f.dim(), f.level())) {
    if (!(naive_mean(f, q.fwd()) > lambda)) continue;
    bool ancestor_stops = false;
    for (int k = 0; k < q.k; ++k) ancestor_stops = ancestor_stops || naive_mean(f, ancestor(q, k).fwd()) > lambda;
    if (!ancestor_stops) out.push_back(q);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// Leaf cells of Q0, as coordinates.
inline std::vector<std::vector<std::int64_t>> root_cells(const GridShape& s) {
  return leaf_cells(s, NCube{0, std::vector<std::int64_t>(static_cast<std::size_t>(s.n), 0)});
}

// Random fixed-mode grid with numerators in [lo, hi] over `denom`.
inline GridFunction<Rational> random_fixed(int n, int level, std::uint64_t seed, std::int64_t lo = 0,
                                           std::int64_t hi = 8, std::int64_t denom = 4) {
  std::mt19937_64 rng(seed);
  const GridShape shape{n, level};
  std::vector<Rational> v(static_cast<std::size_t>(shape.cell_count()));
  for (auto& x : v) x = Rational(lo + static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(hi - lo + 1)), denom);
  return GridFunction<Rational>(shape, std::move(v), denom);
}

inline GridFunction<double> to_f64(const GridFunction<Rational>& f) {
  std::vector<double> v;
  for (const Rational& x : f.values()) v.push_back(to_double(x));
  return GridFunction<double>(f.shape(), std::move(v));
}

// The 1D L=2 worked example: (0,0,0,4) on Q0, zero afterwards.
inline GridFunction<Rational> example_1d() {
  std::vector<Rational> v(12, Rational(0));
  v[3] = 4;
  return GridFunction<Rational>(GridShape{1, 2}, std::move(v), 1);
}

inline GridFunction<Rational> constant_grid(int n, int level, const Rational& c) {
  const GridShape shape{n, level};
  return GridFunction<Rational>(shape, std::vector<Rational>(static_cast<std::size_t>(shape.cell_count()), c));
}

}  // namespace pjn::testing
