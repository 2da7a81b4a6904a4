#pragma once

// Exact algebra over finite labeled distributions: validation, entropies,
// mutual information, and the four-variable information identity the codec
// audits lean on. All information quantities are in bits; 0*log(0) == 0.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "pvlc/errors.hpp"

namespace pvlc {

inline constexpr double kMassTol = 1e-9;   // |sum - 1| allowed on input pmfs
inline constexpr double kInfoTol = 1e-9;   // tolerance on certified information quantities
inline constexpr double kMergeTol = 1e-12; // breakpoint merge radius in the cell construction

struct Pmf {
  std::vector<std::string> labels;
  std::vector<double> probs;

  std::size_t size() const { return probs.size(); }
};

inline void check_mass(std::span<const double> probs, const char* who) {
  double sum = 0.0;
  for (double p : probs) {
    if (p < 0.0) fail(Errc::NegativeMass, std::string(who) + " has a negative probability");
    sum += p;
  }
  if (std::abs(sum - 1.0) > kMassTol)
    fail(Errc::MassNotOne, std::string(who) + " mass is " + std::to_string(sum));
}

inline Pmf make_pmf(std::vector<std::string> labels, std::vector<double> probs) {
  if (labels.empty()) fail(Errc::EmptyAlphabet, "pmf needs at least one symbol");
  if (labels.size() != probs.size())
    fail(Errc::DomainError, "pmf labels and probabilities disagree in length");
  check_mass(probs, "pmf");
  return Pmf{std::move(labels), std::move(probs)};
}

inline double entropy(std::span<const double> probs) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log2(p);
  return h;
}

inline double entropy(const Pmf& p) { return entropy(std::span<const double>(p.probs)); }

namespace detail {

inline std::size_t support_count(std::span<const double> probs) {
  std::size_t c = 0;
  for (double p : probs)
    if (p > 0.0) ++c;
  return c;
}

}  // namespace detail

inline double binary_entropy(double a) {
  if (a < -1e-12 || a > 1.0 + 1e-12) fail(Errc::DomainError, "binary_entropy argument outside [0,1]");
  a = std::clamp(a, 0.0, 1.0);
  double h = 0.0;
  if (a > 0.0) h -= a * std::log2(a);
  if (a < 1.0) h -= (1.0 - a) * std::log2(1.0 - a);
  return h;
}

// Joint over a labeled product alphabet, stored row-major: p(i,j) = P(X=x_i, Y=y_j).
struct JointDistribution {
  std::vector<std::string> x_labels;
  std::vector<std::string> y_labels;
  std::vector<double> pmf;

  std::size_t nx() const { return x_labels.size(); }
  std::size_t ny() const { return y_labels.size(); }
  double p(std::size_t i, std::size_t j) const { return pmf[i * ny() + j]; }
  std::span<const double> row(std::size_t i) const {
    return std::span<const double>(pmf).subspan(i * ny(), ny());
  }

  Pmf x_marginal() const {
    std::vector<double> m(nx(), 0.0);
    for (std::size_t i = 0; i < nx(); ++i)
      for (std::size_t j = 0; j < ny(); ++j) m[i] += p(i, j);
    return Pmf{x_labels, std::move(m)};
  }
  Pmf y_marginal() const {
    std::vector<double> m(ny(), 0.0);
    for (std::size_t i = 0; i < nx(); ++i)
      for (std::size_t j = 0; j < ny(); ++j) m[j] += p(i, j);
    return Pmf{y_labels, std::move(m)};
  }
};

inline JointDistribution validate_joint(const std::vector<std::vector<double>>& matrix,
                                        std::vector<std::string> x_labels,
                                        std::vector<std::string> y_labels) {
  if (x_labels.empty() || y_labels.empty())
    fail(Errc::EmptyAlphabet, "joint needs nonempty alphabets on both sides");
  if (matrix.size() != x_labels.size())
    fail(Errc::DomainError, "joint row count does not match x alphabet");
  std::vector<double> flat;
  flat.reserve(x_labels.size() * y_labels.size());
  for (const auto& row : matrix) {
    if (row.size() != y_labels.size())
      fail(Errc::DomainError, "joint column count does not match y alphabet");
    flat.insert(flat.end(), row.begin(), row.end());
  }
  check_mass(flat, "joint");
  return JointDistribution{std::move(x_labels), std::move(y_labels), std::move(flat)};
}

enum class Direction { YgivenX, XgivenY };

inline double conditional_entropy(const JointDistribution& j, Direction d) {
  // H(A|B) = H(A,B) - H(B); evaluated directly as -sum p log p(a|b) for accuracy.
  double h = 0.0;
  if (d == Direction::YgivenX) {
    for (std::size_t i = 0; i < j.nx(); ++i) {
      double px = 0.0;
      for (std::size_t k = 0; k < j.ny(); ++k) px += j.p(i, k);
      if (px <= 0.0) continue;
      for (std::size_t k = 0; k < j.ny(); ++k) {
        double v = j.p(i, k);
        if (v > 0.0) h -= v * std::log2(v / px);
      }
    }
  } else {
    for (std::size_t k = 0; k < j.ny(); ++k) {
      double py = 0.0;
      for (std::size_t i = 0; i < j.nx(); ++i) py += j.p(i, k);
      if (py <= 0.0) continue;
      for (std::size_t i = 0; i < j.nx(); ++i) {
        double v = j.p(i, k);
        if (v > 0.0) h -= v * std::log2(v / py);
      }
    }
  }
  return std::max(h, 0.0);
}

// H(Y|X=x) per symbol. Zero-mass x stay in the vector (as 0) but are excluded
// from sum, min and the nonzero-filtered min.
struct PerSymbolEntropies {
  std::vector<double> values;
  std::vector<bool> realizable;
  double sum = 0.0;
  double min = 0.0;
  double min_nonzero = 0.0;
};

inline PerSymbolEntropies per_symbol_conditional_entropies(const JointDistribution& j) {
  PerSymbolEntropies out;
  out.values.assign(j.nx(), 0.0);
  out.realizable.assign(j.nx(), false);
  double mn = std::numeric_limits<double>::infinity();
  double mnz = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < j.nx(); ++i) {
    double px = 0.0;
    for (std::size_t k = 0; k < j.ny(); ++k) px += j.p(i, k);
    if (px <= 0.0) continue;
    out.realizable[i] = true;
    double h = 0.0;
    for (std::size_t k = 0; k < j.ny(); ++k) {
      double v = j.p(i, k);
      if (v > 0.0) h -= (v / px) * std::log2(v / px);
    }
    h = std::max(h, 0.0);
    out.values[i] = h;
    out.sum += h;
    mn = std::min(mn, h);
    if (h > kInfoTol) mnz = std::min(mnz, h);
  }
  if (!std::isfinite(mn)) fail(Errc::DegenerateJoint, "joint has no positive-mass x symbol");
  out.min = mn;
  out.min_nonzero = std::isfinite(mnz) ? mnz : mn;
  return out;
}

inline double mutual_information(const JointDistribution& j) {
  double hx = entropy(j.x_marginal());
  double hy = entropy(j.y_marginal());
  double hxy = entropy(std::span<const double>(j.pmf));
  double mi = hx + hy - hxy;
  return std::max(mi, 0.0);
}

// True iff the conditioned variable is a deterministic function of the other:
// XgivenY means every y column carries at most one positive x.
inline bool is_deterministic_function(const JointDistribution& j, Direction d) {
  if (d == Direction::XgivenY) {
    for (std::size_t k = 0; k < j.ny(); ++k) {
      int hits = 0;
      for (std::size_t i = 0; i < j.nx(); ++i)
        if (j.p(i, k) > 0.0 && ++hits > 1) return false;
    }
  } else {
    for (std::size_t i = 0; i < j.nx(); ++i) {
      int hits = 0;
      for (std::size_t k = 0; k < j.ny(); ++k)
        if (j.p(i, k) > 0.0 && ++hits > 1) return false;
    }
  }
  return true;
}

// Dense joint over four labeled axes (X, Y, W, U), row-major in that order.
struct FourWayJoint {
  std::array<std::size_t, 4> dims{};
  std::vector<double> p;

  std::size_t index(std::size_t x, std::size_t y, std::size_t w, std::size_t u) const {
    return ((x * dims[1] + y) * dims[2] + w) * dims[3] + u;
  }
  double& at(std::size_t x, std::size_t y, std::size_t w, std::size_t u) {
    return p[index(x, y, w, u)];
  }
  double at(std::size_t x, std::size_t y, std::size_t w, std::size_t u) const {
    return p[index(x, y, w, u)];
  }
};

inline FourWayJoint make_fourway(std::array<std::size_t, 4> dims, std::vector<double> p) {
  std::size_t n = dims[0] * dims[1] * dims[2] * dims[3];
  if (n == 0) fail(Errc::EmptyAlphabet, "four-way joint needs nonempty axes");
  if (p.size() != n) fail(Errc::DomainError, "four-way joint size mismatch");
  check_mass(p, "four-way joint");
  return FourWayJoint{dims, std::move(p)};
}

// Entropy of the marginal over the axes selected by bit i of `axes_mask`
// (bit 0 = X, 1 = Y, 2 = W, 3 = U).
inline double marginal_entropy(const FourWayJoint& f, unsigned axes_mask) {
  std::array<std::size_t, 4> stride{};
  std::size_t cells = 1;
  for (int a = 0; a < 4; ++a) {
    if (axes_mask & (1u << a)) {
      stride[a] = cells;
      cells *= f.dims[a];
    } else {
      stride[a] = 0;
    }
  }
  std::vector<double> marg(cells, 0.0);
  std::array<std::size_t, 4> ix{};
  for (ix[0] = 0; ix[0] < f.dims[0]; ++ix[0])
    for (ix[1] = 0; ix[1] < f.dims[1]; ++ix[1])
      for (ix[2] = 0; ix[2] < f.dims[2]; ++ix[2])
        for (ix[3] = 0; ix[3] < f.dims[3]; ++ix[3]) {
          std::size_t key = ix[0] * stride[0] + ix[1] * stride[1] + ix[2] * stride[2] +
                            ix[3] * stride[3];
          marg[key] += f.at(ix[0], ix[1], ix[2], ix[3]);
        }
  return entropy(std::span<const double>(marg));
}

// Residual of the exact decomposition
//   I(U;Y,W) = I(U;X) + H(Y,W|X) - H(Y,W|X,U) - I(X;U|Y,W),
// which is zero for every joint; the return value is the absolute defect.
inline double check_identity_decomposition(const FourWayJoint& f) {
  constexpr unsigned X = 1u, Y = 2u, W = 4u, U = 8u;
  double h_x = marginal_entropy(f, X);
  double h_u = marginal_entropy(f, U);
  double h_yw = marginal_entropy(f, Y | W);
  double h_xu = marginal_entropy(f, X | U);
  double h_uyw = marginal_entropy(f, U | Y | W);
  double h_xyw = marginal_entropy(f, X | Y | W);
  double h_xywu = marginal_entropy(f, X | Y | W | U);

  double lhs = h_u + h_yw - h_uyw;                       // I(U;Y,W)
  double i_ux = h_u + h_x - h_xu;                        // I(U;X)
  double h_yw_x = h_xyw - h_x;                           // H(Y,W|X)
  double h_yw_xu = h_xywu - h_xu;                        // H(Y,W|X,U)
  double i_xu_yw = h_xyw + h_uyw - h_yw - h_xywu;        // I(X;U|Y,W)
  double rhs = i_ux + h_yw_x - h_yw_xu - i_xu_yw;
  return std::abs(lhs - rhs);
}

}  // namespace pvlc
