#pragma once

// Closed-form bounds on the expected codeword length of leakage-controlled
// codes, with applicability flags. Conventions:
//   - entropy sums and the min in L2 run over positive-mass symbols;
//   - cardinality terms use support sizes (identical to alphabet sizes on
//     full-support instances, and still sound when padding symbols carry
//     zero mass);
//   - key/pad terms use the actual key alphabet of the matching scheme;
//   - ceilinged bounds are reported pre- and post-ceiling so slack is
//     visible.

#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pvlc/coding.hpp"
#include "pvlc/errors.hpp"
#include "pvlc/pmf.hpp"
#include "pvlc/separation.hpp"

namespace pvlc {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

namespace detail {

inline void check_eps_range(double eps, double hx) {
  if (eps < -kInfoTol || eps > hx + kInfoTol)
    fail(Errc::EpsOutOfRange,
         "eps = " + std::to_string(eps) + " outside [0, H(X) = " + std::to_string(hx) + "]");
}

}  // namespace detail

struct LowerBounds {
  double eps = 0.0;
  double l1 = 0.0;         // H(Y|X)
  double l2 = 0.0;         // min_x H(Y|X=x) + eps, min over positive-mass x
  double l2_nonzero = 0.0;  // variant skipping zero-entropy rows (informational)
  double l3 = 0.0;         // H(Y|X) - H(X|Y) + eps
  double max_lower = 0.0;  // max{l1, l2, l3}
  double logmax = 0.0;     // log2(1/max_x P_X(x)); only meaningful when flagged
  bool logmax_applies = false;  // X determined by Y
  double thm4 = 0.0;            // H(Y|X) - H(X|Y); valid for bounded leakage
  double thm4_logmax = 0.0;     // same logmax value under the bounded model
  bool thm4_logmax_applies = false;
  double overall_exact = 0.0;    // strongest bound for an exact-leakage code
  double overall_bounded = 0.0;  // strongest bound for a bounded-leakage code
};

inline LowerBounds lower_bounds(const JointDistribution& j, double eps) {
  Pmf px = j.x_marginal();
  double hx = entropy(px);
  detail::check_eps_range(eps, hx);
  LowerBounds lb;
  lb.eps = eps;
  PerSymbolEntropies per = per_symbol_conditional_entropies(j);
  lb.l1 = conditional_entropy(j, Direction::YgivenX);
  lb.l2 = per.min + eps;
  lb.l2_nonzero = per.min_nonzero + eps;
  lb.l3 = lb.l1 - conditional_entropy(j, Direction::XgivenY) + eps;
  lb.max_lower = std::max({lb.l1, lb.l2, lb.l3});
  double pmax = 0.0;
  for (double p : px.probs) pmax = std::max(pmax, p);
  lb.logmax_applies = is_deterministic_function(j, Direction::XgivenY);
  lb.logmax = lb.logmax_applies && pmax > 0.0 ? std::log2(1.0 / pmax) : 0.0;
  lb.thm4 = std::max(lb.l1 - conditional_entropy(j, Direction::XgivenY), 0.0);
  lb.thm4_logmax_applies = lb.logmax_applies;
  lb.thm4_logmax = lb.logmax;
  lb.overall_exact = std::max(lb.max_lower, lb.logmax_applies ? lb.logmax : 0.0);
  lb.overall_bounded = std::max(lb.thm4, lb.thm4_logmax_applies ? lb.thm4_logmax : 0.0);
  return lb;
}

struct Thm1Upper {
  double eps = 0.0;
  double alpha = 0.0;    // eps / H(X), 0 when H(X) = 0
  double h_alpha = 0.0;  // binary entropy of alpha
  double sum_hyx = 0.0;  // sum over positive-mass x of H(Y|X=x)
  double eq12 = 0.0;
  double eq13_pre = 0.0, eq13 = 0.0;  // pad + pair cardinality, without the reveal term
  double eq13_full_pre = 0.0, eq13_full = 0.0;  // with the reveal factor |X|+1 in the field
  double eq14_pre = 0.0, eq14 = 0.0;
  bool eq14_applies = false;  // X determined by Y
  std::size_t card_generic = 0;     // |X|(|Y|-1)+1
  std::size_t card_functional = 0;  // |Y|-|X|+1
  std::size_t support_x = 0, support_y = 0;
};

inline Thm1Upper upper_thm1(const JointDistribution& j, double eps) {
  Pmf px = j.x_marginal();
  double hx = entropy(px);
  detail::check_eps_range(eps, hx);
  Thm1Upper u;
  u.eps = eps;
  u.alpha = hx > 0.0 ? std::min(eps / hx, 1.0) : 0.0;
  u.h_alpha = binary_entropy(u.alpha);
  PerSymbolEntropies per = per_symbol_conditional_entropies(j);
  u.sum_hyx = per.sum;
  u.support_x = detail::support_count(px.probs);
  u.support_y = detail::support_count(j.y_marginal().probs);
  const double sx = static_cast<double>(u.support_x);
  const double sy = static_cast<double>(u.support_y);
  const double log_sx = std::log2(sx);
  const double pad = static_cast<double>(ceil_log2(u.support_x));
  u.eq12 = u.sum_hyx + eps + u.h_alpha + 1.0 + pad;
  u.card_generic = u.support_x * (u.support_y - 1) + 1;
  u.eq13_pre = std::log2(static_cast<double>(u.card_generic)) + log_sx;
  u.eq13 = static_cast<double>(ceil_log2(u.card_generic)) + pad;
  u.eq13_full_pre = std::log2(static_cast<double>(u.card_generic) * (sx + 1.0)) + log_sx;
  u.eq13_full =
      static_cast<double>(ceil_log2(u.card_generic * (u.support_x + 1))) + pad;
  u.eq14_applies = is_deterministic_function(j, Direction::XgivenY);
  if (u.eq14_applies) {
    u.card_functional = u.support_y - u.support_x + 1;
    u.eq14_pre = std::log2(static_cast<double>(u.card_functional) * (sx + 1.0)) + log_sx;
    u.eq14 = static_cast<double>(ceil_log2(u.card_functional * (u.support_x + 1))) + pad;
  }
  return u;
}

struct Thm3Upper {
  double eps = 0.0;
  double h_x1 = 0.0, h_x2 = 0.0;
  double sum_hyx = 0.0;
  std::size_t key_eq21 = 0;  // |X2|: pad the second coordinate
  std::size_t key_eq24 = 0;  // |X1|: pad the first coordinate
  double eq21 = 0.0;
  double eq22_pre = 0.0, eq22 = 0.0;
  double eq23_pre = 0.0, eq23 = 0.0;
  bool eq23_applies = false;       // X determined by Y
  double eq24 = 0.0;
  bool eq21_applies = false;  // eps >= H(X1), gates eq21..eq23
  bool eq24_applies = false;  // eps >= H(X2)
};

inline Thm3Upper upper_thm3(const JointDistribution& j, const Separation& sep, double eps) {
  validate_separation(sep, j.nx());
  Thm3Upper u;
  u.eps = eps;
  Pmf px = j.x_marginal();
  u.h_x1 = entropy(std::span<const double>(row_masses(sep, px)));
  u.h_x2 = entropy(std::span<const double>(col_masses(sep, px)));
  PerSymbolEntropies per = per_symbol_conditional_entropies(j);
  u.sum_hyx = per.sum;
  u.key_eq21 = sep.n_cols;
  u.key_eq24 = sep.n_rows;
  std::size_t sx = detail::support_count(px.probs);
  std::size_t sy = detail::support_count(j.y_marginal().probs);
  std::size_t card = sx * (sy - 1) + 1;
  double pad2 = static_cast<double>(ceil_log2(sep.n_cols));
  double pad1 = static_cast<double>(ceil_log2(sep.n_rows));
  u.eq21 = u.sum_hyx + u.h_x1 + 2.0 + pad2;
  u.eq22_pre = std::log2(static_cast<double>(card)) + pad2 + 2.0 + u.h_x1;
  u.eq22 = static_cast<double>(ceil_log2(card)) + pad2 + 2.0 + u.h_x1;
  u.eq23_applies = is_deterministic_function(j, Direction::XgivenY);
  if (u.eq23_applies) {
    std::size_t cardf = sy - sx + 1;
    u.eq23_pre = std::log2(static_cast<double>(cardf)) + pad2 + 2.0 + u.h_x1;
    u.eq23 = static_cast<double>(ceil_log2(cardf)) + pad2 + 2.0 + u.h_x1;
  }
  u.eq24 = u.sum_hyx + u.h_x2 + 2.0 + pad1;
  u.eq21_applies = eps + kInfoTol >= u.h_x1;
  u.eq24_applies = eps + kInfoTol >= u.h_x2;
  return u;
}

struct Thm5Upper {
  double eps = 0.0;
  double sum_hyx = 0.0;
  bool s1_feasible = false, s2_feasible = false;
  std::optional<SeparationSearchResult> s1, s2;
  double eq27 = kInf, eq28 = kInf;
  std::size_t eq27_key = 0, eq28_key = 0;
};

inline Thm5Upper upper_thm5(const JointDistribution& j, double eps,
                            SepSearchMode mode = SepSearchMode::Exhaustive,
                            std::size_t budget = 200000) {
  Thm5Upper u;
  u.eps = eps;
  PerSymbolEntropies per = per_symbol_conditional_entropies(j);
  u.sum_hyx = per.sum;
  Pmf px = j.x_marginal();
  try {
    u.s1 = search_separations(px, eps, SepSet::S1, mode, budget);
    u.s1_feasible = true;
    u.eq27 = u.sum_hyx + 2.0 + u.s1->best_objective;
    u.eq27_key = u.s1->key_size;
  } catch (const Error& e) {
    if (e.code() != Errc::EmptyFeasibleSet) throw;
  }
  try {
    u.s2 = search_separations(px, eps, SepSet::S2, mode, budget);
    u.s2_feasible = true;
    u.eq28 = u.sum_hyx + 2.0 + u.s2->best_objective;
    u.eq28_key = u.s2->key_size;
  } catch (const Error& e) {
    if (e.code() != Errc::EmptyFeasibleSet) throw;
  }
  if (!u.s1_feasible && !u.s2_feasible)
    fail(Errc::EmptyFeasibleSet, "no separation meets the leakage threshold");
  return u;
}

struct Thm6Upper {
  double sum_hyx1 = 0.0;  // sum over rows of H(Y|X1=x1)
  double eq30 = 0.0;
  double eq31_pre = 0.0, eq31 = 0.0;
  double eq32_pre = 0.0, eq32 = 0.0;
  bool eq32_applies = false;  // X determined by Y
  std::size_t key_size = 0;   // |X1|
};

// Requires the separation to be functional: the second coordinate is
// determined by the first, so revealing nothing still allows decoding.
inline Thm6Upper upper_thm6(const JointDistribution& j, const Separation& sep) {
  validate_separation(sep, j.nx());
  Pmf px = j.x_marginal();
  if (!separation_is_functional(sep, px))
    fail(Errc::NotFunctional, "second coordinate is not a function of the first");
  Thm6Upper u;
  // Each row holds at most one positive symbol, so the row-conditioned
  // entropies are exactly the symbol-conditioned ones.
  PerSymbolEntropies per = per_symbol_conditional_entropies(j);
  u.sum_hyx1 = per.sum;
  u.key_size = sep.n_rows;
  double pad1 = static_cast<double>(ceil_log2(sep.n_rows));
  u.eq30 = u.sum_hyx1 + 1.0 + pad1;
  std::size_t sx = detail::support_count(px.probs);
  std::size_t sy = detail::support_count(j.y_marginal().probs);
  std::size_t card = sx * (sy - 1) + 1;
  u.eq31_pre = std::log2(static_cast<double>(card)) + pad1 + 1.0;
  u.eq31 = static_cast<double>(ceil_log2(card)) + pad1 + 1.0;
  u.eq32_applies = is_deterministic_function(j, Direction::XgivenY);
  if (u.eq32_applies) {
    std::size_t cardf = sy - sx + 1;
    u.eq32_pre = std::log2(static_cast<double>(cardf)) + pad1 + 1.0;
    u.eq32 = static_cast<double>(ceil_log2(cardf)) + pad1 + 1.0;
  }
  return u;
}

struct SpecialCaseUpper {
  double eps = 0.0;
  double sum_hyx1 = 0.0;
  double objective = 0.0;  // min H(X1') + ceil(log2 |X1''|) over feasible splits of X1
  double bound = 0.0;      // sum + 2 + objective
  std::size_t key_size = 0;
  SeparationSearchResult search;
};

// Second-level separation: X = (X1, X2) with X2 = f(X1); the row variable
// X1 is itself separated, its low-entropy factor revealed.
inline SpecialCaseUpper upper_special_case(const JointDistribution& j, const Separation& sep,
                                           double eps,
                                           SepSearchMode mode = SepSearchMode::Exhaustive,
                                           std::size_t budget = 200000) {
  validate_separation(sep, j.nx());
  Pmf px = j.x_marginal();
  if (!separation_is_functional(sep, px))
    fail(Errc::NotFunctional, "second coordinate is not a function of the first");
  SpecialCaseUpper u;
  u.eps = eps;
  PerSymbolEntropies per = per_symbol_conditional_entropies(j);
  u.sum_hyx1 = per.sum;
  Pmf x1;
  x1.probs = row_masses(sep, px);
  for (std::size_t r = 0; r < x1.probs.size(); ++r) x1.labels.push_back("x1_" + std::to_string(r));
  u.search = search_separations(x1, eps, SepSet::S1, mode, budget);
  u.objective = u.search.best_objective;
  u.bound = u.sum_hyx1 + 2.0 + u.objective;
  u.key_size = u.search.key_size;
  return u;
}

inline bool check_remark4(double a, double b) {
  if (a < 0.0 || b < 0.0) fail(Errc::DomainError, "remark-4 property needs nonnegative reals");
  return std::ceil(a) + std::ceil(b) <= std::ceil(a + b) + 1.0 + 1e-12;
}

struct BoundsReport {
  double eps = 0.0;
  double h_x = 0.0, h_y = 0.0;
  double h_y_given_x = 0.0, h_x_given_y = 0.0;
  double mi_xy = 0.0;
  LowerBounds lower;
  Thm1Upper thm1;
  std::optional<Thm5Upper> thm5;
  std::optional<Thm3Upper> thm3;        // only when a separation is supplied
  std::optional<Thm6Upper> thm6;        // only for functional separations
  std::optional<SpecialCaseUpper> special;
  std::vector<std::string> notes;
};

inline BoundsReport evaluate_bounds(const JointDistribution& j, double eps,
                                    const Separation* sep = nullptr, bool run_search = true,
                                    SepSearchMode mode = SepSearchMode::Exhaustive,
                                    std::size_t budget = 200000) {
  BoundsReport r;
  r.eps = eps;
  r.h_x = entropy(j.x_marginal());
  r.h_y = entropy(j.y_marginal());
  r.h_y_given_x = conditional_entropy(j, Direction::YgivenX);
  r.h_x_given_y = conditional_entropy(j, Direction::XgivenY);
  r.mi_xy = mutual_information(j);
  r.lower = lower_bounds(j, eps);
  r.thm1 = upper_thm1(j, eps);
  if (!r.lower.logmax_applies)
    r.notes.push_back("logmax lower bounds skipped: X is not a function of Y");
  if (!r.thm1.eq14_applies) r.notes.push_back("eq14 skipped: X is not a function of Y");
  if (run_search) {
    try {
      r.thm5 = upper_thm5(j, eps, mode, budget);
    } catch (const Error& e) {
      if (e.code() != Errc::EmptyFeasibleSet) throw;
      r.notes.push_back("thm5: no feasible separation at this eps");
    }
  }
  if (sep != nullptr) {
    r.thm3 = upper_thm3(j, *sep, eps);
    if (!r.thm3->eq21_applies)
      r.notes.push_back("eq21-eq23 need eps >= H(X1) for this separation");
    if (!r.thm3->eq24_applies) r.notes.push_back("eq24 needs eps >= H(X2) for this separation");
    if (separation_is_functional(*sep, j.x_marginal())) {
      r.thm6 = upper_thm6(j, *sep);
      try {
        r.special = upper_special_case(j, *sep, eps, mode, budget);
      } catch (const Error& e) {
        if (e.code() != Errc::EmptyFeasibleSet) throw;
        r.notes.push_back("special case: no feasible second-level separation at this eps");
      }
    } else {
      r.notes.push_back("thm6/special case skipped: separation is not functional");
    }
  }
  return r;
}

// Strongest lower bound an audited scheme of the given kind must respect.
inline double applicable_lower(const BoundsReport& r, bool exact_leakage_model) {
  return exact_leakage_model ? r.lower.overall_exact : r.lower.overall_bounded;
}

}  // namespace pvlc
