#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "pvlc/bounds.hpp"
#include "pvlc/instances.hpp"

using namespace pvlc;

namespace {

JointDistribution fair_product() {
  return validate_joint({{0.25, 0.25}, {0.25, 0.25}}, {"x0", "x1"}, {"y0", "y1"});
}

JointDistribution fair_diag() {
  return validate_joint({{0.5, 0.0}, {0.0, 0.5}}, {"x0", "x1"}, {"y0", "y1"});
}

// k positive symbols, each pinned to its own observation, plus k zero-mass
// symbols so a two-column functional grid exists.
JointDistribution padded_diag(const std::vector<double>& m) {
  std::size_t k = m.size();
  std::vector<std::vector<double>> pmf(2 * k, std::vector<double>(k, 0.0));
  std::vector<std::string> xl, yl;
  for (std::size_t r = 0; r < k; ++r) pmf[r][r] = m[r];
  for (std::size_t x = 0; x < 2 * k; ++x) xl.push_back("x" + std::to_string(x));
  for (std::size_t y = 0; y < k; ++y) yl.push_back("y" + std::to_string(y));
  return validate_joint(pmf, xl, yl);
}

Separation two_col_rows(std::size_t k) {
  Separation s;
  s.n_rows = k;
  s.n_cols = 2;
  s.grid.assign(k, {});
  for (std::size_t r = 0; r < k; ++r) s.grid[r] = {r, k + r};
  return s;
}

std::vector<double> pascal_row(unsigned n) {
  std::vector<double> c{1.0};
  for (unsigned i = 0; i < n; ++i) {
    std::vector<double> next(c.size() + 1, 0.0);
    for (std::size_t k = 0; k < c.size(); ++k) {
      next[k] += c[k];
      next[k + 1] += c[k];
    }
    c = std::move(next);
  }
  return c;
}

bool notes_mention(const BoundsReport& r, const std::string& needle) {
  for (const std::string& n : r.notes)
    if (n.find(needle) != std::string::npos) return true;
  return false;
}

}  // namespace

TEST_CASE("lower bounds on an independent pair") {
  LowerBounds lb = lower_bounds(fair_product(), 0.25);
  CHECK_THAT(lb.l1, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(lb.l2, Catch::Matchers::WithinAbs(1.25, 1e-12));
  CHECK_THAT(lb.l2_nonzero, Catch::Matchers::WithinAbs(1.25, 1e-12));
  CHECK_THAT(lb.l3, Catch::Matchers::WithinAbs(0.25, 1e-12));
  CHECK_THAT(lb.max_lower, Catch::Matchers::WithinAbs(1.25, 1e-12));
  CHECK_FALSE(lb.logmax_applies);
  CHECK(lb.thm4 <= 1e-12);
  CHECK_THAT(lb.overall_exact, Catch::Matchers::WithinAbs(1.25, 1e-12));
  CHECK(lb.overall_bounded <= 1e-12);
}

TEST_CASE("lower bounds when the observation equals the secret") {
  LowerBounds lb = lower_bounds(fair_diag(), 0.5);
  CHECK(lb.l1 <= 1e-12);
  CHECK_THAT(lb.l2, Catch::Matchers::WithinAbs(0.5, 1e-12));
  CHECK_THAT(lb.l3, Catch::Matchers::WithinAbs(0.5, 1e-12));
  CHECK(lb.logmax_applies);
  CHECK_THAT(lb.logmax, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(lb.overall_exact, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(lb.thm4 <= 1e-12);
  CHECK(lb.thm4_logmax_applies);
  CHECK_THAT(lb.overall_bounded, Catch::Matchers::WithinAbs(1.0, 1e-12));
}

TEST_CASE("bounded-model values on a skewed functional instance") {
  JointDistribution j = validate_joint({{0.5, 0.25, 0.0}, {0.0, 0.0, 0.25}},
                                       {"x0", "x1"}, {"y0", "y1", "y2"});
  LowerBounds lb = lower_bounds(j, 0.2);
  double l1 = 0.75 * binary_entropy(1.0 / 3.0);
  CHECK_THAT(lb.l1, Catch::Matchers::WithinAbs(l1, 1e-12));
  CHECK_THAT(lb.l2, Catch::Matchers::WithinAbs(0.2, 1e-12));  // one deterministic row
  CHECK_THAT(lb.l3, Catch::Matchers::WithinAbs(l1 + 0.2, 1e-12));
  CHECK_THAT(lb.thm4, Catch::Matchers::WithinAbs(l1, 1e-12));
  CHECK(lb.thm4_logmax_applies);
  CHECK_THAT(lb.thm4_logmax, Catch::Matchers::WithinAbs(std::log2(4.0 / 3.0), 1e-12));
  CHECK_THAT(lb.overall_bounded, Catch::Matchers::WithinAbs(l1, 1e-12));
  CHECK_THAT(lb.overall_exact, Catch::Matchers::WithinAbs(l1 + 0.2, 1e-12));
}

TEST_CASE("lower bounds on the bit-count instance match a local oracle") {
  const unsigned n = 10;
  JointDistribution j = example1_joint(n);
  std::vector<double> c = pascal_row(n);
  const double total = std::pow(2.0, n);
  double h_y_given_x = 0.0;
  for (double v : c) h_y_given_x += (v / total) * std::log2(v);
  std::vector<double> px;
  for (double v : c) px.push_back(v / total);

  LowerBounds lb = lower_bounds(j, 0.5);
  CHECK_THAT(lb.l1, Catch::Matchers::WithinAbs(h_y_given_x, 1e-9));
  CHECK_THAT(lb.l1, Catch::Matchers::WithinAbs(7.2936, 1e-3));
  CHECK_THAT(lb.l3, Catch::Matchers::WithinAbs(h_y_given_x + 0.5, 1e-9));
  CHECK_THAT(lb.l2, Catch::Matchers::WithinAbs(0.5, 1e-12));  // all-zeros word
  CHECK(lb.logmax_applies);
  CHECK_THAT(lb.logmax, Catch::Matchers::WithinAbs(std::log2(total / 252.0), 1e-9));
  CHECK_THAT(lb.max_lower, Catch::Matchers::WithinAbs(7.794, 1e-3));
  CHECK(lb.overall_exact == lb.max_lower);
}

TEST_CASE("eps outside the entropy range is rejected") {
  for (double bad : {-0.01, 1.01}) {
    try {
      lower_bounds(fair_diag(), bad);
      FAIL("expected EpsOutOfRange");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::EpsOutOfRange);
    }
    CHECK_THROWS_AS(upper_thm1(fair_diag(), bad), Error);
  }
}

TEST_CASE("first construction bound on the equal-bit source") {
  Thm1Upper u = upper_thm1(fair_diag(), 0.5);
  CHECK_THAT(u.alpha, Catch::Matchers::WithinAbs(0.5, 1e-12));
  CHECK_THAT(u.h_alpha, Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK(u.sum_hyx <= 1e-12);
  CHECK_THAT(u.eq12, Catch::Matchers::WithinAbs(3.5, 1e-12));
  CHECK(u.card_generic == 3);
  CHECK_THAT(u.eq13, Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK_THAT(u.eq13_full, Catch::Matchers::WithinAbs(5.0, 1e-12));
  CHECK(u.eq14_applies);
  CHECK(u.card_functional == 1);
  CHECK_THAT(u.eq14, Catch::Matchers::WithinAbs(3.0, 1e-12));
}

TEST_CASE("cardinality bounds on the bit-count instance") {
  const unsigned n = 10;
  JointDistribution j = example1_joint(n);
  std::vector<double> c = pascal_row(n);
  double sum_hyx = 0.0;
  for (double v : c) sum_hyx += std::log2(v);
  std::vector<double> px;
  for (double v : c) px.push_back(v / 1024.0);
  double hx = entropy(std::span<const double>(px));

  Thm1Upper u = upper_thm1(j, 0.5);
  CHECK(u.support_x == 11);
  CHECK(u.support_y == 1024);
  CHECK_THAT(u.sum_hyx, Catch::Matchers::WithinAbs(sum_hyx, 1e-9));
  double alpha = 0.5 / hx;
  CHECK_THAT(u.eq12,
             Catch::Matchers::WithinAbs(sum_hyx + 0.5 + binary_entropy(alpha) + 1.0 + 4.0, 1e-9));
  CHECK(u.card_generic == 11254);
  CHECK_THAT(u.eq13, Catch::Matchers::WithinAbs(18.0, 1e-12));
  CHECK_THAT(u.eq13_full, Catch::Matchers::WithinAbs(22.0, 1e-12));
  CHECK(u.eq14_applies);
  CHECK(u.card_functional == 1014);
  CHECK_THAT(u.eq14_pre, Catch::Matchers::WithinAbs(17.0303, 5e-3));
  CHECK_THAT(u.eq14, Catch::Matchers::WithinAbs(18.0, 1e-12));
}

TEST_CASE("split bounds on the twelve-symbol instance") {
  JointDistribution j = example2_joint();
  Separation sep = example2_separation();
  Thm3Upper u = upper_thm3(j, sep, 0.45);
  CHECK_THAT(u.h_x1, Catch::Matchers::WithinAbs(0.402493, 1e-5));
  CHECK_THAT(u.h_x2, Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK_THAT(u.sum_hyx, Catch::Matchers::WithinAbs(12.0, 1e-9));
  CHECK(u.key_eq21 == 2);
  CHECK(u.key_eq24 == 6);
  CHECK_THAT(u.eq21, Catch::Matchers::WithinAbs(15.402493, 1e-5));
  CHECK_THAT(u.eq22, Catch::Matchers::WithinAbs(7.402493, 1e-5));
  CHECK_FALSE(u.eq23_applies);
  CHECK_THAT(u.eq24, Catch::Matchers::WithinAbs(18.0, 1e-9));
  CHECK(u.eq21_applies);       // 0.45 >= H(X1)
  CHECK_FALSE(u.eq24_applies);  // 0.45 < H(X2) = 1

  CHECK(upper_thm3(j, sep, 0.39).eq21_applies == false);
  CHECK(upper_thm3(j, sep, 1.0).eq24_applies);
}

TEST_CASE("searched split bounds on the twelve-symbol instance") {
  JointDistribution j = example2_joint();
  Thm5Upper u = upper_thm5(j, 0.403);
  CHECK(u.s1_feasible);
  CHECK(u.s2_feasible);  // the transposed grid reveals the same masses
  CHECK_THAT(u.eq27, Catch::Matchers::WithinAbs(15.402493, 1e-5));
  CHECK_THAT(u.eq28, Catch::Matchers::WithinAbs(15.402493, 1e-5));
  CHECK(u.eq27_key == 2);
  CHECK(u.s1->best.n_rows == 6);
  CHECK_THAT(u.s1->revealed_entropy, Catch::Matchers::WithinAbs(0.402493, 1e-5));

  try {
    upper_thm5(j, 0.0);
    FAIL("expected EmptyFeasibleSet");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyFeasibleSet);
  }
}

TEST_CASE("searched split bounds on a six-symbol pmf") {
  // one heavy symbol; the best grouping packs it with two light ones
  std::vector<std::vector<double>> pmf(6, std::vector<double>(2, 0.0));
  std::vector<double> px{0.9, 0.02, 0.02, 0.02, 0.02, 0.02};
  std::vector<std::string> xl, yl{"y0", "y1"};
  for (std::size_t x = 0; x < 6; ++x) {
    pmf[x][0] = pmf[x][1] = px[x] * 0.5;
    xl.push_back("x" + std::to_string(x));
  }
  JointDistribution j = validate_joint(pmf, xl, yl);
  Thm5Upper u = upper_thm5(j, 0.4);
  CHECK(u.s1_feasible);
  CHECK(u.s2_feasible);
  // feasible only as 2 groups of 3 (H = 0.3275); the 3-of-2 split has H = 0.4822
  CHECK_THAT(u.s1->best_objective, Catch::Matchers::WithinAbs(2.3274512, 1e-5));
  CHECK(u.eq27_key == 3);
  CHECK(u.eq28_key == 3);
  CHECK_THAT(u.eq27, Catch::Matchers::WithinAbs(u.eq28, 1e-12));
  CHECK_THROWS_AS(upper_thm5(j, 0.1), Error);
}

TEST_CASE("functional grid bounds on a paired-bit instance") {
  JointDistribution j = padded_diag({0.5, 0.5});
  Separation sep = two_col_rows(2);
  Thm6Upper u = upper_thm6(j, sep);
  CHECK(u.sum_hyx1 <= 1e-12);
  CHECK(u.key_size == 2);
  CHECK_THAT(u.eq30, Catch::Matchers::WithinAbs(2.0, 1e-12));
  CHECK_THAT(u.eq31, Catch::Matchers::WithinAbs(4.0, 1e-12));
  CHECK_THAT(u.eq31_pre, Catch::Matchers::WithinAbs(std::log2(3.0) + 2.0, 1e-12));
  CHECK(u.eq32_applies);
  CHECK_THAT(u.eq32, Catch::Matchers::WithinAbs(2.0, 1e-12));

  try {
    upper_thm6(fair_product(), two_col_rows(1));
    FAIL("expected a validation error");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BadSeparation);
  }
  JointDistribution full = validate_joint(
      {{0.2, 0.05}, {0.15, 0.1}, {0.2, 0.05}, {0.15, 0.1}},
      {"a", "b", "c", "d"}, {"y0", "y1"});
  try {
    upper_thm6(full, two_col_rows(2));
    FAIL("expected NotFunctional");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotFunctional);
  }
}

TEST_CASE("second-level separation agrees between search modes") {
  std::vector<double> m{0.86};
  for (int i = 0; i < 7; ++i) m.push_back(0.02);
  JointDistribution j = padded_diag(m);
  Separation sep = two_col_rows(8);
  SpecialCaseUpper ex = upper_special_case(j, sep, 0.9, SepSearchMode::Exhaustive);
  SpecialCaseUpper gr = upper_special_case(j, sep, 0.9, SepSearchMode::Greedy);
  CHECK(ex.search.exhaustive);
  CHECK_FALSE(gr.search.exhaustive);
  CHECK(gr.objective >= ex.objective - 1e-12);
  CHECK_THAT(ex.bound, Catch::Matchers::WithinAbs(2.0 + ex.objective, 1e-12));
  CHECK(ex.search.revealed_entropy <= 0.9 + 1e-9);
}

TEST_CASE("second-level separation beats the one-level pad on a long diagonal") {
  std::vector<double> m{1.0 - 39.0 * 1e-4};
  for (int i = 0; i < 39; ++i) m.push_back(1e-4);
  JointDistribution j = padded_diag(m);
  Separation sep = two_col_rows(40);
  Thm6Upper t6 = upper_thm6(j, sep);
  CHECK_THAT(t6.eq30, Catch::Matchers::WithinAbs(7.0, 1e-12));  // 1 + ceil(log2 40)

  SpecialCaseUpper sc = upper_special_case(j, sep, 0.5, SepSearchMode::Greedy);
  CHECK(sc.objective < 2.0);
  CHECK(sc.bound + 1e-9 < t6.eq30);
  CHECK(sc.search.revealed_entropy <= 0.5 + 1e-9);

  try {
    upper_special_case(example2_joint(), example2_separation(), 0.45);
    FAIL("expected NotFunctional");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotFunctional);
  }
}

TEST_CASE("ceiling superadditivity margin") {
  CHECK(check_remark4(0.0, 0.0));
  CHECK(check_remark4(0.5, 0.5));
  CHECK(check_remark4(0.5, 0.25));
  CHECK(check_remark4(2.0, 3.0));
  CHECK(check_remark4(7.3, 2.7));
  CHECK(check_remark4(1e-12, 1e-12));
  try {
    check_remark4(-0.1, 1.0);
    FAIL("expected DomainError");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::DomainError);
  }
  std::mt19937_64 rng(77);
  auto unit = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  for (int i = 0; i < 2000; ++i) CHECK(check_remark4(10.0 * unit(), 10.0 * unit()));
}

TEST_CASE("report assembles the applicable parts") {
  JointDistribution j = example2_joint();
  Separation sep = example2_separation();
  BoundsReport r = evaluate_bounds(j, 0.45, &sep, true);
  CHECK_THAT(r.h_x, Catch::Matchers::WithinAbs(1.402493, 1e-5));
  CHECK_THAT(r.h_y, Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK(r.mi_xy <= 1e-12);
  CHECK_THAT(r.h_y_given_x, Catch::Matchers::WithinAbs(1.0, 1e-9));
  CHECK(r.thm3.has_value());
  CHECK(r.thm5.has_value());
  CHECK_FALSE(r.thm6.has_value());
  CHECK_FALSE(r.special.has_value());
  CHECK(r.notes.size() == 4);
  CHECK(notes_mention(r, "logmax"));
  CHECK(notes_mention(r, "eq14"));
  CHECK(notes_mention(r, "eq24"));
  CHECK(notes_mention(r, "not functional"));

  JointDistribution pair = padded_diag({0.5, 0.5});
  Separation psep = two_col_rows(2);
  BoundsReport rp = evaluate_bounds(pair, 0.0, &psep, true);
  CHECK(rp.thm6.has_value());
  CHECK(rp.thm5.has_value());  // both positives can share a row, revealing nothing
  CHECK_THAT(rp.thm5->eq27, Catch::Matchers::WithinAbs(3.0, 1e-9));
  CHECK_FALSE(rp.special.has_value());  // a two-row key cannot be separated again
  CHECK(notes_mention(rp, "second-level"));
  CHECK(notes_mention(rp, "eq21"));
  // both positives share a column, so H(X2) = 0 and eq24 applies even at eps 0
  CHECK_FALSE(notes_mention(rp, "eq24"));
  CHECK_FALSE(notes_mention(rp, "logmax"));
  CHECK(rp.notes.size() == 2);
  CHECK_THAT(applicable_lower(rp, true), Catch::Matchers::WithinAbs(1.0, 1e-12));
  CHECK_THAT(applicable_lower(rp, false), Catch::Matchers::WithinAbs(1.0, 1e-12));

  BoundsReport bare = evaluate_bounds(j, 0.45, nullptr, false);
  CHECK_FALSE(bare.thm5.has_value());
  CHECK_FALSE(bare.thm3.has_value());
  CHECK_FALSE(bare.thm6.has_value());
}

TEST_CASE("lower bounds never exceed the matching construction bounds") {
  std::mt19937_64 rng(2026);
  for (int t = 0; t < 30; ++t) {
    JointDistribution j = random_joint(rng, 2 + t % 4, 2 + (t / 4) % 4);
    double hx = entropy(j.x_marginal());
    for (double f : {0.0, 0.5, 1.0}) {
      double eps = f * hx;
      LowerBounds lb = lower_bounds(j, eps);
      Thm1Upper u = upper_thm1(j, eps);
      CHECK(lb.max_lower <= u.eq12 + 1e-9);
      CHECK(lb.overall_exact <= u.eq13_full + 1e-9);
    }
  }
  for (int t = 0; t < 15; ++t) {
    JointDistribution j = random_functional_joint(rng, 2 + t % 3, 4 + t % 5);
    double hx = entropy(j.x_marginal());
    for (double f : {0.0, 1.0}) {
      LowerBounds lb = lower_bounds(j, f * hx);
      Thm1Upper u = upper_thm1(j, f * hx);
      REQUIRE(u.eq14_applies);
      CHECK(lb.overall_exact <= u.eq14 + 1e-9);
    }
  }
}
