// Acceptance runner: one line per criterion, nonzero exit if any fails.
// Each block either reuses an invariant suite or pins frozen values with
// oracles computed locally, so a regression in the library cannot hide.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <vector>

#include "pvlc/selftest.hpp"

using namespace pvlc;

namespace {

// H(Y|X) for the bit-count instance from Pascal's triangle alone.
double binomial_conditional_entropy(unsigned n) {
  std::vector<double> c(n + 1, 0.0);
  c[0] = 1.0;
  for (unsigned i = 1; i <= n; ++i)
    for (unsigned k = i; k > 0; --k) c[k] += c[k - 1];
  double h = 0.0;
  for (double v : c)
    if (v > 1.0) h += v * std::log2(v);
  return h / std::ldexp(1.0, static_cast<int>(n));
}

SuiteResult bit_count_criterion() {
  SuiteResult r;
  r.name = "example1";
  const double h10 = binomial_conditional_entropy(10);
  r.expect(std::abs(h10 - 7.2936) <= 1e-3,
           "oracle H(Y|X) = " + std::to_string(h10) + ", expected ~7.2936");

  JointDistribution j = example1_joint(10);
  BoundsReport b = evaluate_bounds(j, 0.5, nullptr, false);
  r.expect(std::abs(b.h_y_given_x - h10) <= 1e-9, "library H(Y|X) differs from the oracle");
  r.expect(std::abs(b.lower.l3 - (h10 + 0.5)) <= 1e-9, "l3 != eps + H(Y|X)");
  r.expect(std::abs(b.lower.max_lower - 7.794) <= 1e-3,
           "max lower = " + std::to_string(b.lower.max_lower) + ", expected ~7.794");
  r.expect(b.thm1.eq14_applies, "bit count should be a function of the string");
  r.expect(std::abs(b.thm1.eq14_pre - 17.03) <= 1e-2,
           "functional RHS = " + std::to_string(b.thm1.eq14_pre) + ", expected ~17.03");

  CodecScheme s = build_eps_private(j, 0.5, UCodingMode::Huffman);
  LeakageAudit a = audit(s);
  r.expect(a.lossless, "audit not lossless: " + a.first_failure);
  r.expect(std::abs(a.exact_leakage - 0.5) <= 1e-9,
           "I(C;X) = " + std::to_string(a.exact_leakage) + ", expected 0.5");
  r.expect(a.expected_length >= b.lower.max_lower - 1e-9, "E[L] under the max lower bound");
  r.expect(a.expected_length <= b.thm1.eq14_pre + 1e-9, "E[L] over the functional RHS");

  double prev = -1.0;
  for (unsigned n : {4u, 8u, 12u}) {
    double rate = binomial_conditional_entropy(n) / static_cast<double>(n);
    r.expect(rate > prev + 1e-12, "per-bit H(Y|X) not strictly increasing at n=" +
                                      std::to_string(n));
    prev = rate;
  }
  return r;
}

SuiteResult twelve_symbol_criterion() {
  SuiteResult r;
  r.name = "example2";
  JointDistribution j = example2_joint();
  Pmf px = j.x_marginal();

  SeparationSearchResult found = search_separations(px, 0.4025, SepSet::S1);
  r.expect(std::abs(found.best_objective - 1.4025) <= 1e-4,
           "search objective = " + std::to_string(found.best_objective) + ", expected 1.4025");
  r.expect(found.best.n_rows == 6 && found.best.n_cols == 2,
           "best shape " + std::to_string(found.best.n_rows) + "x" +
               std::to_string(found.best.n_cols) + ", expected 6x2");
  r.expect(std::abs(found.revealed_entropy - 0.4025) <= 1e-4,
           "revealed entropy = " + std::to_string(found.revealed_entropy) +
               ", expected 0.4025");

  Thm3Upper t3 = upper_thm3(j, found.best, 0.4025);
  r.expect(std::abs(t3.eq21 - 15.4025) <= 1e-4,
           "eq21 = " + std::to_string(t3.eq21) + ", expected 15.4025");
  r.expect(std::abs(t3.eq22 - 7.4025) <= 1e-4,
           "eq22 = " + std::to_string(t3.eq22) + ", expected 7.4025");

  // perfect-privacy comparison points, key size |X| = 12
  Thm1Upper t1 = upper_thm1(j, 0.0);
  r.expect(j.nx() == 12, "alphabet size is not 12");
  r.expect(std::abs(t1.eq12 - 17.0) <= 1e-9,
           "entropy-coded perfect-privacy value = " + std::to_string(t1.eq12) +
               ", expected 17");
  r.expect(std::abs(t1.eq13 + 1.0 - 9.0) <= 1e-9,
           "fixed-length perfect-privacy value = " + std::to_string(t1.eq13 + 1.0) +
               ", expected 9");
  return r;
}

SuiteResult split_criterion(std::uint64_t seed) {
  SuiteResult r = suite_thm3(seed, 50);
  r.name = "split";
  JointDistribution j = example2_joint();
  Separation sep = example2_separation();
  Pmf px = j.x_marginal();
  double h1 = entropy(std::span<const double>(row_masses(sep, px)));
  CodecScheme s = build_bounded_split(j, sep, 0.45, SplitVariant::OtpX2, UCodingMode::Huffman);
  LeakageAudit a = audit(s);
  Thm3Upper t3 = upper_thm3(j, sep, 0.45);
  r.expect(a.lossless, "example2 split not lossless: " + a.first_failure);
  r.expect(std::abs(a.exact_leakage - h1) <= 1e-9, "leakage differs from H(X1)");
  r.expect(a.exact_leakage <= 0.45 + 1e-9, "leakage above the budget");
  r.expect(s.key_size < j.nx(), "key size not smaller than the alphabet");
  r.expect(a.expected_length <= t3.eq21 + 1e-9, "E[L] over eq21");
  return r;
}

SuiteResult max_prob_criterion(std::uint64_t seed) {
  SuiteResult r = suite_remark4(seed, 100000);
  r.name = "remark4";
  std::mt19937_64 rng(seed ^ 0xabcdef);
  for (int i = 0; i < 30; ++i) {
    JointDistribution j = random_functional_joint(rng, 2 + i % 3, 4 + i % 4);
    double hx = entropy(j.x_marginal());
    double pmax = 0.0;
    for (double p : j.x_marginal().probs) pmax = std::max(pmax, p);
    for (double frac : {0.0, 0.5, 1.0}) {
      for (UCodingMode m : {UCodingMode::Huffman, UCodingMode::FixedLength}) {
        CodecScheme s = build_eps_private(j, frac * hx, m);
        LeakageAudit a = audit(s);
        std::string tag = " [maxprob #" + std::to_string(i) + "]";
        r.expect(a.lossless, "not lossless" + tag);
        r.expect(a.max_codeword_prob <= pmax + 1e-12, "P(c) above max P_X" + tag);
      }
    }
  }
  return r;
}

}  // namespace

int main() {
  using clock = std::chrono::steady_clock;
  const std::uint64_t seed = 20260816ull;
  bool all = true;
  double total = 0.0;
  int idx = 0;

  auto run = [&](const char* name, double limit_s, const char* note, auto&& fn) {
    ++idx;
    auto t0 = clock::now();
    SuiteResult r = fn();
    double secs = std::chrono::duration<double>(clock::now() - t0).count();
    total += secs;
    bool ok = r.failures == 0 && (limit_s <= 0.0 || secs < limit_s);
    all = all && ok;
    std::printf("[%s] %2d. %-20s %6.2fs  %zu checks", ok ? "PASS" : "FAIL", idx, name, secs,
                r.checks);
    if (r.failures > 0)
      std::printf("  %zu failed: %s", r.failures,
                  r.messages.empty() ? "(no detail)" : r.messages.front().c_str());
    if (limit_s > 0.0 && secs >= limit_s) std::printf("  over the %.0fs budget", limit_s);
    if (note != nullptr && *note != '\0') std::printf("  (%s)", note);
    std::printf("\n");
  };

  run("frl-channel", 5.0, "", [&] { return suite_frl(seed, 200); });
  run("exact-leakage", 0.0, "", [&] { return suite_efrl(seed + 1, 200); });
  run("codec-sandwich", 0.0, "", [&] { return suite_thm1(seed + 2, 200); });
  run("bit-count", 30.0, "", [&] { return bit_count_criterion(); });
  run("twelve-symbol", 10.0, "eq21 recomputes to 15.4025; the circulated figure says 15.45",
      [&] { return twelve_symbol_criterion(); });
  run("split-codecs", 0.0, "", [&] { return split_criterion(seed + 3); });
  run("functional-codecs", 0.0, "", [&] { return suite_thm6(seed + 4, 50); });
  run("identity", 0.0, "", [&] { return suite_identity(seed + 5, 100); });
  run("coding-primitives", 0.0, "", [&] { return suite_coding(seed + 6, 500); });
  run("remark4+maxprob", 0.0, "", [&] { return max_prob_criterion(seed + 7); });

  bool in_budget = total < 60.0;
  all = all && in_budget;
  std::printf("[%s] total runtime %.2fs (budget 60s)\n", in_budget ? "PASS" : "FAIL", total);
  return all ? 0 : 1;
}
