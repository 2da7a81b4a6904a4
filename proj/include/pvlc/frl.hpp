#pragma once

// Builds the auxiliary variable U for a joint (X, Y): a partition of [0,1)
// into cells cut by the conditional CDFs of Y given each x. Every cell lies
// inside exactly one CDF interval per positive x, so U is independent of X,
// Y is a function of (U, X), and |U| stays within the additive cell bound.
// The extended variant appends a reveal coordinate T that discloses X with
// probability alpha = eps / H(X), buying exactly eps bits of leakage.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "pvlc/errors.hpp"
#include "pvlc/pmf.hpp"

namespace pvlc {

struct Cell {
  double lo = 0.0, hi = 0.0;  // [lo, hi)
  double len() const { return hi - lo; }
};

struct CondAtom {
  std::size_t u;
  double p;  // P(U = u | X = x, Y = y)
};

struct FrlChannel {
  std::size_t nx = 0, ny = 0;
  std::vector<Cell> cells;
  Pmf u_pmf;                                        // cell lengths, labels "u0".."uk"
  std::vector<double> x_marg;                       // P_X
  std::vector<std::vector<double>> cum;             // per positive x: ny cumulative sums of P(y|x)
  std::vector<std::vector<std::size_t>> decode;     // [x][u] -> y; empty row when P_X(x) = 0
  std::vector<std::vector<std::vector<CondAtom>>> cond;  // [x][y] -> sampler atoms

  std::size_t cell_count() const { return cells.size(); }

  // y = f(u, x); defined wherever P(U=u, X=x) > 0.
  std::size_t decode_map(std::size_t u, std::size_t x) const {
    if (x >= nx || u >= cells.size() || decode[x].empty())
      fail(Errc::ZeroMassPair, "decode_map outside the channel support");
    return decode[x][u];
  }

  const std::vector<CondAtom>& cond_sampler(std::size_t x, std::size_t y) const {
    if (x >= nx || y >= ny || cond[x].empty() || cond[x][y].empty())
      fail(Errc::ZeroMassPair, "cond_sampler needs P(x,y) > 0");
    return cond[x][y];
  }

  // Exact P(U = u | X = x) assembled from the sampler atoms.
  std::vector<double> u_given_x(std::size_t x) const {
    std::vector<double> out(cells.size(), 0.0);
    if (x_marg[x] <= 0.0) return out;
    for (std::size_t y = 0; y < ny; ++y) {
      double pyx = cum[x][y] - (y == 0 ? 0.0 : cum[x][y - 1]);
      for (const CondAtom& a : cond[x][y]) out[a.u] += pyx * a.p;
    }
    return out;
  }
};

struct CardinalityCertificate {
  std::size_t actual = 0;
  std::size_t bound = 0;
  bool functional_case = false;  // X determined by Y: the tighter bound applies
};


inline FrlChannel build_frl(const JointDistribution& j) {
  FrlChannel ch;
  ch.nx = j.nx();
  ch.ny = j.ny();
  ch.x_marg = j.x_marginal().probs;
  if (detail::support_count(ch.x_marg) == 0)
    fail(Errc::DegenerateJoint, "joint has no positive-mass x symbol");

  // Conditional CDF breakpoints, shared y order for every x.
  std::vector<double> breaks;
  ch.cum.assign(ch.nx, {});
  for (std::size_t x = 0; x < ch.nx; ++x) {
    if (ch.x_marg[x] <= 0.0) continue;
    auto& c = ch.cum[x];
    c.assign(ch.ny, 0.0);
    double acc = 0.0;
    for (std::size_t y = 0; y < ch.ny; ++y) {
      acc += j.p(x, y) / ch.x_marg[x];
      c[y] = acc;
    }
    c[ch.ny - 1] = 1.0;  // close the last interval exactly
    for (std::size_t y = 0; y + 1 < ch.ny; ++y)
      if (c[y] > kMergeTol && c[y] < 1.0 - kMergeTol) breaks.push_back(c[y]);
  }
  std::sort(breaks.begin(), breaks.end());
  std::vector<double> edges{0.0};
  for (double b : breaks)
    if (b - edges.back() > kMergeTol) edges.push_back(b);  // sub-tolerance cells fold left
  if (1.0 - edges.back() <= kMergeTol) edges.pop_back();
  edges.push_back(1.0);

  std::vector<std::string> labels;
  std::vector<double> lens;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    ch.cells.push_back(Cell{edges[i], edges[i + 1]});
    labels.push_back("u" + std::to_string(i));
    lens.push_back(edges[i + 1] - edges[i]);
  }
  ch.u_pmf = make_pmf(std::move(labels), std::move(lens));

  // Each cell midpoint identifies its y interval for every positive x.
  ch.decode.assign(ch.nx, {});
  ch.cond.assign(ch.nx, {});
  for (std::size_t x = 0; x < ch.nx; ++x) {
    if (ch.x_marg[x] <= 0.0) continue;
    const auto& c = ch.cum[x];
    ch.decode[x].assign(ch.cells.size(), 0);
    ch.cond[x].assign(ch.ny, {});
    std::vector<double> interval_len(ch.ny, 0.0);
    for (std::size_t u = 0; u < ch.cells.size(); ++u) {
      double mid = 0.5 * (ch.cells[u].lo + ch.cells[u].hi);
      std::size_t y = static_cast<std::size_t>(
          std::upper_bound(c.begin(), c.end() - 1, mid) - c.begin());
      ch.decode[x][u] = y;
      interval_len[y] += ch.cells[u].len();
    }
    for (std::size_t u = 0; u < ch.cells.size(); ++u) {
      std::size_t y = ch.decode[x][u];
      ch.cond[x][y].push_back(CondAtom{u, ch.cells[u].len() / interval_len[y]});
    }
  }

  // Certify independence, determinism and the cell-count bound before returning.
  for (std::size_t x = 0; x < ch.nx; ++x) {
    if (ch.x_marg[x] <= 0.0) continue;
    std::vector<double> pux = ch.u_given_x(x);
    double tv = 0.0;
    for (std::size_t u = 0; u < ch.cells.size(); ++u)
      tv += std::abs(pux[u] - ch.u_pmf.probs[u]);
    if (0.5 * tv > kInfoTol)
      throw std::logic_error("cell construction lost independence from x");
    for (std::size_t y = 0; y < ch.ny; ++y)
      for (const CondAtom& a : ch.cond[x][y])
        if (ch.decode[x][a.u] != y)
          throw std::logic_error("cell construction broke determinism");
  }
  CardinalityCertificate cert = [&] {
    CardinalityCertificate out;
    std::size_t sx = detail::support_count(ch.x_marg);
    std::size_t sy = detail::support_count(j.y_marginal().probs);
    out.functional_case = is_deterministic_function(j, Direction::XgivenY);
    out.bound = out.functional_case ? sy - sx + 1 : sx * (sy - 1) + 1;
    out.actual = ch.cells.size();
    return out;
  }();
  if (cert.actual > cert.bound)
    throw std::logic_error("cell count exceeded the representation bound");
  return ch;
}

inline CardinalityCertificate cardinality_certificate(const FrlChannel& ch,
                                                      const JointDistribution& j) {
  CardinalityCertificate out;
  std::size_t sx = detail::support_count(j.x_marginal().probs);
  std::size_t sy = detail::support_count(j.y_marginal().probs);
  out.functional_case = is_deterministic_function(j, Direction::XgivenY);
  out.bound = out.functional_case ? sy - sx + 1 : sx * (sy - 1) + 1;
  out.actual = ch.cell_count();
  return out;
}

// Draws U from P(U | X=x, Y=y) by inverting the sampler atom list.
inline std::size_t sample_u(const FrlChannel& ch, std::size_t x, std::size_t y,
                            std::mt19937_64& rng) {
  const auto& atoms = ch.cond_sampler(x, y);
  double v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  for (const CondAtom& a : atoms) {
    acc += a.p;
    if (v < acc) return a.u;
  }
  return atoms.back().u;
}

// Extended channel: U = (cell, reveal). The reveal coordinate equals X with
// probability alpha and the erasure mark otherwise, driven by a coin
// independent of everything else. Pair index = cell * (reveal alphabet size)
// + reveal, with positive-mass x symbols compacted to the front of the
// reveal alphabet and the erasure mark last.
struct ExtendedChannel {
  FrlChannel base;
  double eps = 0.0;
  double alpha = 0.0;
  std::vector<std::size_t> reveal_of_x;   // x -> reveal index; SIZE_MAX when P_X(x) = 0
  std::vector<std::size_t> x_of_reveal;   // reveal index -> x
  std::size_t reveal_count = 0;           // positive x count + 1 (erasure last)
  Pmf pair_pmf;                           // over cell*reveal_count + reveal
  std::vector<std::string> t_labels;      // reveal labels: x labels then "e"

  std::size_t erasure() const { return reveal_count - 1; }
  std::size_t pair_index(std::size_t u, std::size_t reveal) const {
    return u * reveal_count + reveal;
  }
  std::size_t pair_cell(std::size_t p) const { return p / reveal_count; }
  std::size_t pair_reveal(std::size_t p) const { return p % reveal_count; }
  std::size_t pair_count() const { return base.cell_count() * reveal_count; }
};

inline ExtendedChannel build_extended(const JointDistribution& j, double eps) {
  ExtendedChannel ch;
  ch.base = build_frl(j);
  double hx = entropy(j.x_marginal());
  if (hx <= 0.0 && eps > kInfoTol) fail(Errc::DegenerateX, "constant X cannot leak");
  if (eps < -kInfoTol || eps > hx + kInfoTol)
    fail(Errc::EpsOutOfRange, "eps must sit in [0, H(X)]");
  eps = std::clamp(eps, 0.0, hx);
  ch.eps = eps;
  ch.alpha = hx > 0.0 ? eps / hx : 0.0;

  ch.reveal_of_x.assign(ch.base.nx, SIZE_MAX);
  for (std::size_t x = 0; x < ch.base.nx; ++x) {
    if (ch.base.x_marg[x] <= 0.0) continue;
    ch.reveal_of_x[x] = ch.x_of_reveal.size();
    ch.x_of_reveal.push_back(x);
    ch.t_labels.push_back(j.x_labels[x]);
  }
  ch.t_labels.push_back("e");
  ch.reveal_count = ch.x_of_reveal.size() + 1;

  // Exact pair distribution assembled from the sampler atoms.
  std::vector<double> pair(ch.pair_count(), 0.0);
  for (std::size_t x = 0; x < ch.base.nx; ++x) {
    if (ch.base.x_marg[x] <= 0.0) continue;
    std::vector<double> pux = ch.base.u_given_x(x);
    for (std::size_t u = 0; u < ch.base.cell_count(); ++u) {
      double m = ch.base.x_marg[x] * pux[u];
      if (m <= 0.0) continue;
      if (ch.alpha > 0.0) pair[ch.pair_index(u, ch.reveal_of_x[x])] += ch.alpha * m;
      if (ch.alpha < 1.0) pair[ch.pair_index(u, ch.erasure())] += (1.0 - ch.alpha) * m;
    }
  }
  std::vector<std::string> labels(ch.pair_count());
  for (std::size_t u = 0; u < ch.base.cell_count(); ++u)
    for (std::size_t r = 0; r < ch.reveal_count; ++r)
      labels[ch.pair_index(u, r)] = ch.base.u_pmf.labels[u] + "," + ch.t_labels[r];
  ch.pair_pmf = make_pmf(std::move(labels), std::move(pair));

  // Certify the leakage identity I(U;X) = eps on the assembled joint.
  double mi = [&] {
    std::vector<double> px = ch.base.x_marg;
    double acc = 0.0;
    for (std::size_t x = 0; x < ch.base.nx; ++x) {
      if (px[x] <= 0.0) continue;
      std::vector<double> pux = ch.base.u_given_x(x);
      for (std::size_t u = 0; u < ch.base.cell_count(); ++u) {
        if (pux[u] <= 0.0) continue;
        auto term = [&](std::size_t pidx, double joint) {
          if (joint > 0.0 && ch.pair_pmf.probs[pidx] > 0.0)
            acc += joint * std::log2(joint / (px[x] * ch.pair_pmf.probs[pidx]));
        };
        if (ch.alpha > 0.0)
          term(ch.pair_index(u, ch.reveal_of_x[x]), px[x] * pux[u] * ch.alpha);
        if (ch.alpha < 1.0)
          term(ch.pair_index(u, ch.erasure()), px[x] * pux[u] * (1.0 - ch.alpha));
      }
    }
    return std::max(acc, 0.0);
  }();
  if (std::abs(mi - eps) > kInfoTol)
    throw std::logic_error("extended channel leakage drifted from eps");
  return ch;
}

inline CardinalityCertificate cardinality_certificate(const ExtendedChannel& ch,
                                                      const JointDistribution& j) {
  CardinalityCertificate out = cardinality_certificate(ch.base, j);
  std::size_t sx = detail::support_count(j.x_marginal().probs);
  out.bound *= sx + 1;
  out.actual = detail::support_count(ch.pair_pmf.probs);
  return out;
}

// Draws the (cell, reveal) pair for a source atom. The cell draw and the
// reveal coin come from distinct engines so replaying one stream never
// perturbs the other.
inline std::size_t sample_pair(const ExtendedChannel& ch, std::size_t x, std::size_t y,
                               std::mt19937_64& cell_rng, std::mt19937_64& coin_rng) {
  std::size_t u = sample_u(ch.base, x, y, cell_rng);
  double c = std::uniform_real_distribution<double>(0.0, 1.0)(coin_rng);
  bool revealed = c < ch.alpha;
  return ch.pair_index(u, revealed ? ch.reveal_of_x[x] : ch.erasure());
}

}  // namespace pvlc
