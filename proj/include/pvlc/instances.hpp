#pragma once

// Bundled worked instances and seeded random generators used by the tests,
// the selftest suites and the CLI. Random draws avoid std::*_distribution so
// the generated instance streams do not depend on the standard library
// implementation.

#include <array>
#include <bit>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pvlc/errors.hpp"
#include "pvlc/pmf.hpp"
#include "pvlc/separation.hpp"

namespace pvlc {
namespace detail {

inline double unit_double(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline std::size_t pick(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

}  // namespace detail

// Uniform n-bit source with its bit-count as the private variable. The
// private symbol is a deterministic function of the source, which makes the
// tighter cardinality and fixed-length bounds applicable.
inline JointDistribution example1_joint(unsigned n) {
  if (n < 1 || n > 16) fail(Errc::DomainError, "bit count must be in [1, 16]");
  const std::size_t ny = std::size_t{1} << n;
  const std::size_t nx = n + 1;
  std::vector<std::string> xl, yl;
  for (std::size_t x = 0; x < nx; ++x) xl.push_back(std::to_string(x));
  yl.reserve(ny);
  for (std::size_t y = 0; y < ny; ++y) {
    std::string s(n, '0');
    for (unsigned b = 0; b < n; ++b)
      if (y & (std::size_t{1} << (n - 1 - b))) s[b] = '1';
    yl.push_back(std::move(s));
  }
  std::vector<std::vector<double>> pmf(nx, std::vector<double>(ny, 0.0));
  const double py = 1.0 / static_cast<double>(ny);
  for (std::size_t y = 0; y < ny; ++y)
    pmf[static_cast<std::size_t>(std::popcount(static_cast<unsigned>(y)))][y] = py;
  return validate_joint(pmf, xl, yl);
}

// Twelve-symbol private source, ten light symbols (0.005) and two heavy
// ones (0.475), observed through a completely noisy binary channel, so the
// source to compress is a fair bit independent of X. The widely circulated
// statement of this instance prints the light masses as 0.05, which cannot
// sum to one; 0.005 is the value consistent with its own derived entropies.
inline JointDistribution example2_joint() {
  std::vector<std::string> xl, yl{"0", "1"};
  std::vector<double> px;
  for (int i = 1; i <= 12; ++i) xl.push_back("x" + std::to_string(i));
  for (int i = 0; i < 10; ++i) px.push_back(0.005);
  px.push_back(0.475);
  px.push_back(0.475);
  std::vector<std::vector<double>> pmf(12, std::vector<double>(2, 0.0));
  for (std::size_t x = 0; x < 12; ++x) pmf[x][0] = pmf[x][1] = px[x] * 0.5;
  return validate_joint(pmf, xl, yl);
}

// The entropy-minimizing (6, 2) grid for the twelve-symbol instance: the two
// heavy symbols share a row, the light symbols pair up.
inline Separation example2_separation() {
  Separation s;
  s.n_rows = 6;
  s.n_cols = 2;
  s.grid = {{10, 11}, {0, 1}, {2, 3}, {4, 5}, {6, 7}, {8, 9}};
  validate_separation(s, 12);
  return s;
}

inline Pmf random_pmf(std::mt19937_64& rng, std::size_t n, bool allow_zero = false) {
  Pmf p;
  p.probs.assign(n, 0.0);
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (allow_zero && detail::unit_double(rng) < 0.2) continue;
    p.probs[i] = 1e-3 + detail::unit_double(rng);
    total += p.probs[i];
  }
  if (total == 0.0) {
    p.probs[detail::pick(rng, 0, n - 1)] = 1.0;
    total = 1.0;
  }
  for (double& v : p.probs) v /= total;
  for (std::size_t i = 0; i < n; ++i) p.labels.push_back("s" + std::to_string(i));
  return p;
}

// Random joint with every x-row carrying mass; individual entries may be
// zeroed to exercise partial supports.
inline JointDistribution random_joint(std::mt19937_64& rng, std::size_t nx, std::size_t ny,
                                      double zero_frac = 0.15) {
  std::vector<std::vector<double>> pmf(nx, std::vector<double>(ny, 0.0));
  double total = 0.0;
  for (std::size_t x = 0; x < nx; ++x) {
    double row = 0.0;
    for (std::size_t y = 0; y < ny; ++y) {
      if (detail::unit_double(rng) < zero_frac) continue;
      pmf[x][y] = 1e-3 + detail::unit_double(rng);
      row += pmf[x][y];
    }
    if (row == 0.0) {
      std::size_t y = detail::pick(rng, 0, ny - 1);
      pmf[x][y] = 0.5;
      row = 0.5;
    }
    total += row;
  }
  std::vector<std::string> xl, yl;
  for (std::size_t x = 0; x < nx; ++x) {
    for (std::size_t y = 0; y < ny; ++y) pmf[x][y] /= total;
    xl.push_back("x" + std::to_string(x));
  }
  for (std::size_t y = 0; y < ny; ++y) yl.push_back("y" + std::to_string(y));
  return validate_joint(pmf, xl, yl);
}

// Random joint in which X is a deterministic function of Y, surjective onto
// the x alphabet (requires ny >= nx).
inline JointDistribution random_functional_joint(std::mt19937_64& rng, std::size_t nx,
                                                 std::size_t ny) {
  if (ny < nx) fail(Errc::DomainError, "functional instance needs ny >= nx");
  std::vector<std::size_t> cls(ny);
  for (std::size_t y = 0; y < ny; ++y) cls[y] = y < nx ? y : detail::pick(rng, 0, nx - 1);
  for (std::size_t y = ny; y > 1; --y) std::swap(cls[y - 1], cls[rng() % y]);
  Pmf py = random_pmf(rng, ny, false);
  std::vector<std::vector<double>> pmf(nx, std::vector<double>(ny, 0.0));
  for (std::size_t y = 0; y < ny; ++y) pmf[cls[y]][y] = py.probs[y];
  std::vector<std::string> xl, yl;
  for (std::size_t x = 0; x < nx; ++x) xl.push_back("x" + std::to_string(x));
  for (std::size_t y = 0; y < ny; ++y) yl.push_back("y" + std::to_string(y));
  return validate_joint(pmf, xl, yl);
}

struct GridInstance {
  JointDistribution joint;
  Separation sep;
};

// Random split instance: the x alphabet is an r-by-c grid (every cell
// positive), paired with a small y alphabet.
inline GridInstance random_split_instance(std::mt19937_64& rng) {
  std::size_t r = detail::pick(rng, 2, 3);
  std::size_t c = detail::pick(rng, 2, 3);
  std::size_t n = r * c;
  std::size_t ny = detail::pick(rng, 2, 4);
  GridInstance g;
  g.joint = random_joint(rng, n, ny, 0.0);
  g.sep.n_rows = r;
  g.sep.n_cols = c;
  std::vector<std::size_t> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = i;
  for (std::size_t i = n; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
  g.sep.grid.assign(r, std::vector<std::size_t>(c, kPadCell));
  for (std::size_t i = 0; i < n; ++i) g.sep.grid[i / c][i % c] = perm[i];
  validate_separation(g.sep, n);
  return g;
}

// Random functional instance: one positive symbol per grid row, the rest of
// the grid filled with zero-mass symbols, so the column coordinate is a
// function of the row coordinate.
inline GridInstance random_functional_instance(std::mt19937_64& rng) {
  std::size_t r = detail::pick(rng, 2, 3);
  std::size_t c = detail::pick(rng, 2, 3);
  std::size_t n = r * c;
  std::size_t ny = detail::pick(rng, 2, 4);
  GridInstance g;
  g.sep.n_rows = r;
  g.sep.n_cols = c;
  g.sep.grid.assign(r, std::vector<std::size_t>(c, kPadCell));
  for (std::size_t i = 0; i < n; ++i) g.sep.grid[i / c][i % c] = i;
  std::vector<std::size_t> live;
  for (std::size_t row = 0; row < r; ++row)
    live.push_back(row * c + detail::pick(rng, 0, c - 1));
  Pmf rowmass = random_pmf(rng, r, false);
  std::vector<std::vector<double>> pmf(n, std::vector<double>(ny, 0.0));
  for (std::size_t row = 0; row < r; ++row) {
    Pmf cond = random_pmf(rng, ny, false);
    for (std::size_t y = 0; y < ny; ++y) pmf[live[row]][y] = rowmass.probs[row] * cond.probs[y];
  }
  std::vector<std::string> xl, yl;
  for (std::size_t x = 0; x < n; ++x) xl.push_back("x" + std::to_string(x));
  for (std::size_t y = 0; y < ny; ++y) yl.push_back("y" + std::to_string(y));
  g.joint = validate_joint(pmf, xl, yl);
  validate_separation(g.sep, n);
  return g;
}

inline FourWayJoint random_fourway(std::mt19937_64& rng, std::size_t max_dim = 3) {
  std::array<std::size_t, 4> dims;
  for (auto& d : dims) d = detail::pick(rng, 2, max_dim);
  std::size_t total = dims[0] * dims[1] * dims[2] * dims[3];
  std::vector<double> p(total);
  double sum = 0.0;
  for (double& v : p) {
    v = 1e-3 + detail::unit_double(rng);
    sum += v;
  }
  for (double& v : p) v /= sum;
  return make_fourway(dims, p);
}

}  // namespace pvlc
