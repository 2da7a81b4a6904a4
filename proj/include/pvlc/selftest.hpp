#pragma once

// Invariant suites over seeded random instances. Each suite checks the
// exact properties its construction promises (independence, exact leakage,
// losslessness, cardinality, bound sandwiches) and returns a pass/fail
// tally; the CLI selftest command and the acceptance runner share them.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "pvlc/bounds.hpp"
#include "pvlc/codec.hpp"
#include "pvlc/frl.hpp"
#include "pvlc/instances.hpp"
#include "pvlc/pmf.hpp"

namespace pvlc {

struct SuiteResult {
  std::string name;
  std::size_t checks = 0;
  std::size_t failures = 0;
  std::vector<std::string> messages;  // first few failure details
  bool pass() const { return failures == 0; }

  void expect(bool ok, const std::string& what) {
    ++checks;
    if (ok) return;
    ++failures;
    if (messages.size() < 8) messages.push_back(what);
  }
};

namespace detail {

// Exact I(U;X) of the base channel from its assembled (x, u) joint.
inline double frl_leakage(const FrlChannel& ch) {
  double mi = 0.0;
  for (std::size_t x = 0; x < ch.nx; ++x) {
    if (ch.x_marg[x] <= 0.0) continue;
    std::vector<double> pux = ch.u_given_x(x);
    for (std::size_t u = 0; u < ch.cell_count(); ++u) {
      double pxu = ch.x_marg[x] * pux[u];
      if (pxu <= 0.0 || ch.u_pmf.probs[u] <= 0.0) continue;
      mi += pxu * std::log2(pux[u] / ch.u_pmf.probs[u]);
    }
  }
  return mi;
}

// Exact I(U,T;X) of the extended channel.
inline double efrl_leakage(const ExtendedChannel& ch) {
  double mi = 0.0;
  for (std::size_t x = 0; x < ch.base.nx; ++x) {
    double px = ch.base.x_marg[x];
    if (px <= 0.0) continue;
    std::vector<double> pux = ch.base.u_given_x(x);
    double inner = 0.0;
    for (std::size_t u = 0; u < ch.base.cell_count(); ++u) {
      if (pux[u] <= 0.0) continue;
      if (ch.alpha > 0.0) {
        std::size_t p = ch.pair_index(u, ch.reveal_of_x[x]);
        double cond = pux[u] * ch.alpha;
        if (ch.pair_pmf.probs[p] > 0.0) inner += cond * std::log2(cond / ch.pair_pmf.probs[p]);
      }
      if (ch.alpha < 1.0) {
        std::size_t p = ch.pair_index(u, ch.erasure());
        double cond = pux[u] * (1.0 - ch.alpha);
        if (ch.pair_pmf.probs[p] > 0.0) inner += cond * std::log2(cond / ch.pair_pmf.probs[p]);
      }
    }
    mi += px * inner;
  }
  return mi;
}

// Largest deviation between P(Y|X=x) and the mass the decode map pushes
// onto each y; zero means Y really is the claimed function of (U, X).
inline double frl_decode_residual(const FrlChannel& ch, const JointDistribution& j) {
  double worst = 0.0;
  for (std::size_t x = 0; x < ch.nx; ++x) {
    if (ch.x_marg[x] <= 0.0) continue;
    std::vector<double> pux = ch.u_given_x(x);
    std::vector<double> pushed(ch.ny, 0.0);
    for (std::size_t u = 0; u < ch.cell_count(); ++u)
      if (pux[u] > 0.0) pushed[ch.decode_map(u, x)] += pux[u];
    for (std::size_t y = 0; y < ch.ny; ++y) {
      double target = j.p(x, y) / ch.x_marg[x];
      worst = std::max(worst, std::abs(pushed[y] - target));
    }
  }
  return worst;
}

// Minimal expected length over all prefix-free length profiles: sorted
// probabilities against nondecreasing lengths with Kraft sum <= 1. Valid for
// supports up to ~8; the tests use it on supports <= 6.
inline double optimal_expected_length(std::vector<double> probs) {
  std::erase_if(probs, [](double p) { return p <= 0.0; });
  std::sort(probs.begin(), probs.end(), std::greater<>());
  const std::size_t k = probs.size();
  if (k <= 1) return 0.0;
  const unsigned max_len = static_cast<unsigned>(k - 1);
  double best = kInf;
  // DFS over nondecreasing length profiles.
  std::vector<unsigned> len(k, 0);
  auto rec = [&](auto&& self, std::size_t i, unsigned prev, double kraft_used,
                 double acc) -> void {
    if (acc >= best) return;
    if (i == k) {
      if (kraft_used <= 1.0 + 1e-12) best = acc;
      return;
    }
    for (unsigned l = prev; l <= max_len; ++l) {
      double used = kraft_used + std::ldexp(1.0, -static_cast<int>(l));
      if (used > 1.0 + 1e-12) continue;
      // remaining symbols need at least 2^-max_len each
      double need = static_cast<double>(k - i - 1) * std::ldexp(1.0, -static_cast<int>(max_len));
      if (used + need > 1.0 + 1e-12) continue;
      self(self, i + 1, l, used, acc + probs[i] * static_cast<double>(l));
    }
  };
  rec(rec, 0, 1, 0.0, 0.0);
  return best;
}

// Deliberately breaks a codeword table; the indexer must reject it.
inline bool huffman_fault_detected(PrefixCode code) {
  if (code.support_size < 2) return true;
  // make the first supported codeword a strict prefix of the second
  std::size_t a = SIZE_MAX, b = SIZE_MAX;
  for (std::size_t i = 0; i < code.size(); ++i) {
    if (!code.in_support[i]) continue;
    if (a == SIZE_MAX) {
      a = i;
    } else {
      b = i;
      break;
    }
  }
  // Replace a's word with a strict prefix of b's (possibly empty): the
  // table is no longer prefix-free, and the indexer must say so.
  Bitstring pref;
  const Bitstring& longer = code.codewords[b];
  for (std::size_t i = 0; i + 1 < longer.size(); ++i) pref.push_back(longer.bit(i));
  code.codewords[a] = pref;
  try {
    index_prefix_code(code);
  } catch (const Error& e) {
    return e.code() == Errc::MalformedCodeword;
  }
  return false;
}

}  // namespace detail

// Random joints plus functional instances: independence, losslessness and
// cardinality of the base channel construction.
inline SuiteResult suite_frl(std::uint64_t seed, std::size_t instances = 200) {
  SuiteResult r;
  r.name = "frl";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    bool functional = i % 4 == 3;
    JointDistribution j =
        functional ? random_functional_joint(rng, detail::pick(rng, 2, 4),
                                             detail::pick(rng, 4, 6))
                   : random_joint(rng, detail::pick(rng, 2, 4), detail::pick(rng, 2, 6));
    FrlChannel ch = build_frl(j);
    std::string tag = " [frl #" + std::to_string(i) + "]";
    r.expect(std::abs(detail::frl_leakage(ch)) <= kInfoTol, "I(U;X) not ~0" + tag);
    r.expect(detail::frl_decode_residual(ch, j) <= kInfoTol, "decode mass mismatch" + tag);
    CardinalityCertificate cert = cardinality_certificate(ch, j);
    r.expect(cert.actual <= cert.bound, "cell count exceeds cardinality bound" + tag);
    if (functional)
      r.expect(cert.functional_case, "functional instance missed the tight bound" + tag);
  }
  return r;
}

// Extended channels across the eps grid: exact leakage, determinism,
// cardinality and the entropy upper bound.
inline SuiteResult suite_efrl(std::uint64_t seed, std::size_t instances = 200) {
  SuiteResult r;
  r.name = "efrl";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    JointDistribution j =
        random_joint(rng, detail::pick(rng, 2, 4), detail::pick(rng, 2, 6));
    double hx = entropy(j.x_marginal());
    for (double frac : {0.0, 0.25, 0.5, 1.0}) {
      double eps = frac * hx;
      ExtendedChannel ch = build_extended(j, eps);
      std::string tag =
          " [efrl #" + std::to_string(i) + " frac=" + std::to_string(frac) + "]";
      r.expect(std::abs(detail::efrl_leakage(ch) - eps) <= kInfoTol,
               "I(U;X) != eps" + tag);
      // H(Y|U,T,X) = 0 means the decode map pushes exactly P(Y|X=x) for
      // every x; the reveal coin is independent decoration.
      r.expect(detail::frl_decode_residual(ch.base, j) <= kInfoTol,
               "Y not determined by (U,X)" + tag);
      CardinalityCertificate cert = cardinality_certificate(ch, j);
      r.expect(cert.actual <= cert.bound, "pair count exceeds cardinality bound" + tag);
      PerSymbolEntropies per = per_symbol_conditional_entropies(j);
      double cap = per.sum + eps + binary_entropy(ch.alpha);
      r.expect(entropy(ch.pair_pmf) <= cap + kInfoTol, "H(U) exceeds entropy cap" + tag);
    }
  }
  return r;
}

// End-to-end exact-leakage codecs: losslessness, audited leakage, per-key
// balance and the lower/upper sandwich.
inline SuiteResult suite_thm1(std::uint64_t seed, std::size_t instances = 200) {
  SuiteResult r;
  r.name = "thm1";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    bool functional = i % 4 == 3;
    JointDistribution j =
        functional ? random_functional_joint(rng, detail::pick(rng, 2, 4),
                                             detail::pick(rng, 4, 6))
                   : random_joint(rng, detail::pick(rng, 2, 4), detail::pick(rng, 2, 6));
    double hx = entropy(j.x_marginal());
    double pmax = 0.0;
    for (double p : j.x_marginal().probs) pmax = std::max(pmax, p);
    for (double frac : {0.0, 0.25, 0.5, 1.0}) {
      double eps = frac * hx;
      std::string tag =
          " [thm1 #" + std::to_string(i) + " frac=" + std::to_string(frac) + "]";
      CodecScheme s = build_eps_private(j, eps, UCodingMode::Huffman);
      LeakageAudit a = audit(s);
      LowerBounds lb = lower_bounds(j, eps);
      Thm1Upper up = upper_thm1(j, eps);
      r.expect(a.lossless, "not lossless: " + a.first_failure + tag);
      r.expect(std::abs(a.exact_leakage - eps) <= kInfoTol, "I(C;X) != eps" + tag);
      r.expect(a.per_key_spread <= kInfoTol, "per-key lengths differ" + tag);
      r.expect(a.expected_length >= lb.max_lower - kInfoTol, "E[L] under max lower" + tag);
      r.expect(a.expected_length <= up.eq12 + kInfoTol, "E[L] over eq12" + tag);
      r.expect(a.expected_length + kInfoTol >= a.codeword_entropy, "E[L] under H(C)" + tag);
      r.expect(a.codeword_entropy >= lb.overall_exact - kInfoTol, "H(C) under lower" + tag);
      if (functional)
        r.expect(a.max_codeword_prob <= pmax + 1e-12, "P(c) above max P_X" + tag);
      CodecScheme sf = build_eps_private(j, eps, UCodingMode::FixedLength);
      LeakageAudit af = audit(sf);
      r.expect(af.lossless, "fixed mode not lossless" + tag);
      r.expect(std::abs(af.exact_leakage - eps) <= kInfoTol, "fixed I(C;X) != eps" + tag);
      r.expect(af.per_key_spread <= 1e-12, "fixed lengths not constant" + tag);
      r.expect(af.expected_length <= up.eq13_full + kInfoTol, "fixed E[L] over eq13" + tag);
      if (functional)
        r.expect(af.expected_length <= up.eq14 + kInfoTol, "fixed E[L] over eq14" + tag);
    }
  }
  return r;
}

// Split codecs on grid instances, both variants, against the matching
// revealed-coordinate bounds.
inline SuiteResult suite_thm3(std::uint64_t seed, std::size_t instances = 50) {
  SuiteResult r;
  r.name = "thm3";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    GridInstance g = random_split_instance(rng);
    Pmf px = g.joint.x_marginal();
    double h1 = entropy(std::span<const double>(row_masses(g.sep, px)));
    double h2 = entropy(std::span<const double>(col_masses(g.sep, px)));
    Thm3Upper up = upper_thm3(g.joint, g.sep, std::max(h1, h2));
    std::string tag = " [thm3 #" + std::to_string(i) + "]";
    {
      CodecScheme s =
          build_bounded_split(g.joint, g.sep, h1, SplitVariant::OtpX2, UCodingMode::Huffman);
      LeakageAudit a = audit(s);
      r.expect(a.lossless, "otp_x2 not lossless: " + a.first_failure + tag);
      r.expect(std::abs(a.exact_leakage - h1) <= kInfoTol, "leakage != H(X1)" + tag);
      r.expect(a.exact_leakage <= h1 + kInfoTol, "leakage above budget" + tag);
      r.expect(s.key_size < g.joint.nx(), "key not shorter than |X|" + tag);
      r.expect(a.expected_length <= up.eq21 + kInfoTol, "E[L] over eq21" + tag);
      r.expect(a.per_key_spread <= kInfoTol, "per-key lengths differ" + tag);
      CodecScheme sf =
          build_bounded_split(g.joint, g.sep, h1, SplitVariant::OtpX2, UCodingMode::FixedLength);
      LeakageAudit af = audit(sf);
      r.expect(af.lossless, "otp_x2 fixed not lossless" + tag);
      r.expect(af.expected_length <= up.eq22 + kInfoTol, "fixed E[L] over eq22" + tag);
    }
    {
      CodecScheme s =
          build_bounded_split(g.joint, g.sep, h2, SplitVariant::OtpX1, UCodingMode::Huffman);
      LeakageAudit a = audit(s);
      r.expect(a.lossless, "otp_x1 not lossless: " + a.first_failure + tag);
      r.expect(std::abs(a.exact_leakage - h2) <= kInfoTol, "leakage != H(X2)" + tag);
      r.expect(s.key_size < g.joint.nx(), "key not shorter than |X|" + tag);
      r.expect(a.expected_length <= up.eq24 + kInfoTol, "E[L] over eq24" + tag);
    }
    if (h1 > 0.1) {
      bool threw = false;
      try {
        build_bounded_split(g.joint, g.sep, h1 * 0.5, SplitVariant::OtpX2,
                            UCodingMode::Huffman);
      } catch (const Error& e) {
        threw = e.code() == Errc::ThresholdNotMet;
      }
      r.expect(threw, "eps below H(X1) accepted" + tag);
    }
  }
  return r;
}

// Perfect-privacy functional codecs: zero leakage, short key, eq30 family.
inline SuiteResult suite_thm6(std::uint64_t seed, std::size_t instances = 50) {
  SuiteResult r;
  r.name = "thm6";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    GridInstance g = random_functional_instance(rng);
    Thm6Upper up = upper_thm6(g.joint, g.sep);
    std::string tag = " [thm6 #" + std::to_string(i) + "]";
    CodecScheme s = build_perfect_functional(g.joint, g.sep, UCodingMode::Huffman);
    LeakageAudit a = audit(s);
    r.expect(a.lossless, "not lossless: " + a.first_failure + tag);
    r.expect(a.exact_leakage <= kInfoTol, "leakage not ~0" + tag);
    r.expect(s.key_size == g.sep.n_rows, "key size is not |X1|" + tag);
    r.expect(a.expected_length <= up.eq30 + kInfoTol, "E[L] over eq30" + tag);
    r.expect(a.per_key_spread <= kInfoTol, "per-key lengths differ" + tag);
    CodecScheme sf = build_perfect_functional(g.joint, g.sep, UCodingMode::FixedLength);
    LeakageAudit af = audit(sf);
    r.expect(af.lossless, "fixed not lossless" + tag);
    r.expect(af.exact_leakage <= kInfoTol, "fixed leakage not ~0" + tag);
    r.expect(af.expected_length <= up.eq31 + kInfoTol, "fixed E[L] over eq31" + tag);
    if (up.eq32_applies)
      r.expect(af.expected_length <= up.eq32 + kInfoTol, "fixed E[L] over eq32" + tag);
  }
  return r;
}

// The four-variable information identity behind the converse proofs.
inline SuiteResult suite_identity(std::uint64_t seed, std::size_t instances = 100) {
  SuiteResult r;
  r.name = "identity";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    FourWayJoint f = random_fourway(rng);
    double resid = check_identity_decomposition(f);
    r.expect(resid <= kInfoTol, "identity residual " + std::to_string(resid) + " [fourway #" +
                                    std::to_string(i) + "]");
  }
  return r;
}

// Prefix-code and pad primitives: Kraft, entropy sandwich, optimality on
// small supports, fault detection, exact pad secrecy.
inline SuiteResult suite_coding(std::uint64_t seed, std::size_t pmfs = 500) {
  SuiteResult r;
  r.name = "coding";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < pmfs; ++i) {
    std::size_t n = detail::pick(rng, 1, 12);
    Pmf p = random_pmf(rng, n, i % 3 == 0);
    PrefixCode code = huffman_build(p);
    std::string tag = " [pmf #" + std::to_string(i) + "]";
    double h = entropy(p);
    r.expect(code.kraft_sum <= 1.0 + 1e-12, "Kraft sum above 1" + tag);
    r.expect(code.expected_length >= h - kInfoTol, "E[L] below entropy" + tag);
    r.expect(code.expected_length <= h + 1.0 + kInfoTol, "E[L] above entropy + 1" + tag);
    if (code.support_size >= 2) {
      // round-trip across the support
      Bitstring all;
      std::vector<std::size_t> syms;
      for (std::size_t s = 0; s < p.probs.size(); ++s)
        if (p.probs[s] > 0.0) {
          syms.push_back(s);
          prefix_encode(code, s, all);
        }
      std::size_t cursor = 0;
      bool ok = true;
      for (std::size_t s : syms) ok = ok && prefix_decode(code, all, cursor) == s;
      r.expect(ok && cursor == all.size(), "encode/decode round trip failed" + tag);
    }
    if (code.support_size >= 2 && code.support_size <= 6) {
      std::vector<double> support;
      for (double q : p.probs)
        if (q > 0.0) support.push_back(q);
      double opt = detail::optimal_expected_length(support);
      r.expect(std::abs(code.expected_length - opt) <= 1e-9,
               "Huffman not optimal vs length oracle" + tag);
    }
    if (code.support_size >= 2 && i % 25 == 0)
      r.expect(detail::huffman_fault_detected(code), "prefix fault not detected" + tag);
  }
  for (std::size_t i = 0; i < 100; ++i) {
    std::size_t m = detail::pick(rng, 2, 9);
    Pmf p = random_pmf(rng, m, false);
    std::string tag = " [otp #" + std::to_string(i) + "]";
    // exact joint of (x, padded x) under a uniform key
    double mi = 0.0;
    std::vector<double> pt(m, 0.0);
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t w = 0; w < m; ++w) pt[otp_encode(x, w, m)] += p.probs[x] / double(m);
    for (std::size_t x = 0; x < m; ++x) {
      if (p.probs[x] <= 0.0) continue;
      for (std::size_t w = 0; w < m; ++w) {
        std::size_t t = otp_encode(x, w, m);
        double pxt = p.probs[x] / double(m);
        mi += pxt * std::log2((1.0 / double(m)) / pt[t]);
      }
    }
    r.expect(std::abs(mi) <= 1e-12, "pad output not independent of input" + tag);
    bool rt = true;
    for (std::size_t x = 0; x < m; ++x)
      for (std::size_t w = 0; w < m; ++w) rt = rt && otp_decode(otp_encode(x, w, m), w, m) == x;
    r.expect(rt, "pad round trip failed" + tag);
  }
  return r;
}

// Ceiling superadditivity property plus edge cases.
inline SuiteResult suite_remark4(std::uint64_t seed, std::size_t pairs = 100000) {
  SuiteResult r;
  r.name = "remark4";
  std::mt19937_64 rng(seed);
  const double edges[][2] = {{0.0, 0.0}, {1.0, 1.0},          {0.5, 0.5},
                             {1e-9, 1.0 - 1e-9}, {2.0, 3.0000001}, {7.0, 0.0}};
  for (const auto& e : edges)
    r.expect(check_remark4(e[0], e[1]), "edge case failed");
  for (std::size_t i = 0; i < pairs; ++i) {
    double a = detail::unit_double(rng) * 64.0;
    double b = detail::unit_double(rng) * 64.0;
    if (!check_remark4(a, b)) {
      r.expect(false, "pair (" + std::to_string(a) + ", " + std::to_string(b) + ")");
    } else {
      ++r.checks;
    }
  }
  return r;
}

// Bound-family coherence: monotonicity in eps and upper >= lower sanity.
inline SuiteResult suite_bounds(std::uint64_t seed, std::size_t instances = 50) {
  SuiteResult r;
  r.name = "bounds";
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < instances; ++i) {
    JointDistribution j =
        random_joint(rng, detail::pick(rng, 2, 4), detail::pick(rng, 2, 6));
    double hx = entropy(j.x_marginal());
    std::string tag = " [bounds #" + std::to_string(i) + "]";
    double prev_l2 = -kInf, prev_l3 = -kInf, prev_eq12_half = -kInf;
    for (double frac : {0.0, 0.1, 0.25, 0.5, 0.75, 1.0}) {
      double eps = frac * hx;
      LowerBounds lb = lower_bounds(j, eps);
      Thm1Upper up = upper_thm1(j, eps);
      r.expect(lb.l2 >= prev_l2 - 1e-12, "L2 not nondecreasing in eps" + tag);
      r.expect(lb.l3 >= prev_l3 - 1e-12, "L3 not nondecreasing in eps" + tag);
      prev_l2 = lb.l2;
      prev_l3 = lb.l3;
      if (frac <= 0.5) {
        r.expect(up.eq12 >= prev_eq12_half - 1e-12, "eq12 not nondecreasing below H(X)/2" + tag);
        prev_eq12_half = up.eq12;
      }
      r.expect(up.eq12 >= lb.overall_exact - kInfoTol, "eq12 under max lower" + tag);
      r.expect(up.eq13_full >= lb.overall_exact - kInfoTol, "eq13 under max lower" + tag);
      if (up.eq14_applies)
        r.expect(up.eq14 >= lb.overall_exact - kInfoTol, "eq14 under max lower" + tag);
    }
  }
  return r;
}

inline std::vector<SuiteResult> run_selftest(std::uint64_t seed, std::size_t trials = 200) {
  std::vector<SuiteResult> out;
  out.push_back(suite_frl(seed, trials));
  out.push_back(suite_efrl(seed + 1, trials));
  out.push_back(suite_thm1(seed + 2, trials));
  out.push_back(suite_thm3(seed + 3, std::max<std::size_t>(trials / 4, 10)));
  out.push_back(suite_thm6(seed + 4, std::max<std::size_t>(trials / 4, 10)));
  out.push_back(suite_identity(seed + 5, std::max<std::size_t>(trials / 2, 20)));
  out.push_back(suite_coding(seed + 6, std::max<std::size_t>(trials * 2, 100)));
  out.push_back(suite_remark4(seed + 7, 100000));
  out.push_back(suite_bounds(seed + 8, std::max<std::size_t>(trials / 4, 10)));
  return out;
}

}  // namespace pvlc
