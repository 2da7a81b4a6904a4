#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "pvlc/codec.hpp"
#include "pvlc/instances.hpp"

using namespace pvlc;

namespace {

JointDistribution xy_equal_bit() {
  return validate_joint({{0.5, 0.0}, {0.0, 0.5}}, {"x0", "x1"}, {"y0", "y1"});
}

JointDistribution split_hand_instance() {
  // P_X = {0.4, 0.3, 0.2, 0.1} with distinct conditionals per symbol.
  return validate_joint({{0.40, 0.00}, {0.15, 0.15}, {0.05, 0.15}, {0.10, 0.00}},
                        {"a", "b", "c", "d"}, {"y0", "y1"});
}

Separation grid2x2() {
  Separation s;
  s.n_rows = 2;
  s.n_cols = 2;
  s.grid = {{0, 1}, {2, 3}};
  return s;
}

// I(C;X) recomputed as H(C) + H(X) - H(C,X) from an audit-independent tally.
double leakage_by_entropies(const CodecScheme& s) {
  const JointDistribution& j = s.source;
  const FrlChannel& ch = s.cell_channel();
  std::map<std::string, double> pc;
  std::map<std::pair<std::string, std::size_t>, double> pcx;
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y) {
      double pxy = j.p(x, y);
      if (pxy <= 0.0) continue;
      std::size_t cx = s.kind == SchemeKind::EpsPrivate ? x : s.lifted_index(x);
      for (const CondAtom& ca : ch.cond_sampler(cx, y)) {
        struct Br { std::size_t reveal; double p; };
        std::vector<Br> branches;
        if (s.kind == SchemeKind::EpsPrivate) {
          if (s.ext->alpha > 0.0) branches.push_back({s.ext->reveal_of_x[x], s.ext->alpha});
          if (s.ext->alpha < 1.0) branches.push_back({s.ext->erasure(), 1.0 - s.ext->alpha});
        } else {
          branches.push_back({0, 1.0});
        }
        for (const Br& br : branches)
          for (std::size_t w = 0; w < s.key_size; ++w) {
            std::string c = codeword_for_atom(s, x, w, ca.u, br.reveal).to_string();
            double m = pxy * ca.p * br.p / static_cast<double>(s.key_size);
            pc[c] += m;
            pcx[{c, x}] += m;
          }
      }
    }
  auto h = [](auto& m) {
    double out = 0.0;
    for (const auto& [k, v] : m)
      if (v > 0.0) out -= v * std::log2(v);
    return out;
  };
  return h(pc) + entropy(j.x_marginal()) - h(pcx);
}

}  // namespace

TEST_CASE("uniform equal-bit source: frozen audit values") {
  JointDistribution j = xy_equal_bit();
  CodecScheme s = build_eps_private(j, 0.5, UCodingMode::Huffman);
  CHECK(s.key_size == 2);
  CHECK(s.otp_width == 1);
  REQUIRE(s.ext.has_value());
  CHECK(s.ext->base.cell_count() == 1);
  CHECK(s.ext->reveal_count == 3);

  LeakageAudit a = audit(s);
  // one cell, three reveal values {0.25, 0.25, 0.5}: pair code costs 1.5 bits
  CHECK(a.atom_count == 8);
  CHECK(a.lossless);
  CHECK_THAT(a.exact_leakage, Catch::Matchers::WithinAbs(0.5, 1e-12));
  CHECK_THAT(a.expected_length, Catch::Matchers::WithinAbs(2.5, 1e-12));
  CHECK_THAT(a.codeword_entropy, Catch::Matchers::WithinAbs(2.5, 1e-12));
  CHECK_THAT(a.max_codeword_prob, Catch::Matchers::WithinAbs(0.25, 1e-12));
  CHECK(a.per_key_spread <= 1e-12);
  REQUIRE(a.per_key_expected_length.size() == 2);
  for (double v : a.per_key_expected_length)
    CHECK_THAT(v, Catch::Matchers::WithinAbs(2.5, 1e-12));
  CHECK_THAT(leakage_by_entropies(s), Catch::Matchers::WithinAbs(a.exact_leakage, 1e-9));

  CodecScheme sf = build_eps_private(j, 0.5, UCodingMode::FixedLength);
  CHECK(sf.pair_field_width == 2);
  LeakageAudit af = audit(sf);
  CHECK(af.lossless);
  CHECK_THAT(af.exact_leakage, Catch::Matchers::WithinAbs(0.5, 1e-12));
  CHECK_THAT(af.expected_length, Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK(af.per_key_spread == 0.0);
}

TEST_CASE("eps grid on the equal-bit source") {
  JointDistribution j = xy_equal_bit();
  for (double eps : {0.0, 0.25, 1.0}) {
    CodecScheme s = build_eps_private(j, eps, UCodingMode::Huffman);
    LeakageAudit a = audit(s);
    CHECK(a.lossless);
    CHECK_THAT(a.exact_leakage, Catch::Matchers::WithinAbs(eps, 1e-9));
    CHECK_THAT(leakage_by_entropies(s), Catch::Matchers::WithinAbs(eps, 1e-9));
    CHECK(a.per_key_spread <= 1e-12);
  }
}

TEST_CASE("split codec leaks exactly the revealed-coordinate entropy") {
  JointDistribution j = split_hand_instance();
  Separation sep = grid2x2();
  Pmf px = j.x_marginal();
  double h1 = entropy(std::span<const double>(row_masses(sep, px)));
  double h2 = entropy(std::span<const double>(col_masses(sep, px)));
  CHECK_THAT(h1, Catch::Matchers::WithinAbs(
                     -0.7 * std::log2(0.7) - 0.3 * std::log2(0.3), 1e-12));

  CodecScheme s = build_bounded_split(j, sep, 0.9, SplitVariant::OtpX2, UCodingMode::Huffman);
  CHECK(s.key_size == 2);
  CHECK(s.leakage_target == h1);
  LeakageAudit a = audit(s);
  CHECK(a.lossless);
  CHECK_THAT(a.exact_leakage, Catch::Matchers::WithinAbs(h1, 1e-9));
  CHECK(a.exact_leakage <= 0.9 + 1e-9);
  CHECK(a.per_key_spread <= 1e-12);
  CHECK_THAT(leakage_by_entropies(s), Catch::Matchers::WithinAbs(h1, 1e-9));

  CodecScheme sx1 = build_bounded_split(j, sep, 1.0, SplitVariant::OtpX1, UCodingMode::Huffman);
  LeakageAudit ax1 = audit(sx1);
  CHECK(ax1.lossless);
  CHECK_THAT(ax1.exact_leakage, Catch::Matchers::WithinAbs(h2, 1e-9));

  CodecScheme sfix =
      build_bounded_split(j, sep, 0.9, SplitVariant::OtpX2, UCodingMode::FixedLength);
  LeakageAudit afix = audit(sfix);
  CHECK(afix.lossless);
  CHECK_THAT(afix.exact_leakage, Catch::Matchers::WithinAbs(h1, 1e-9));

  try {
    build_bounded_split(j, sep, 0.5, SplitVariant::OtpX2, UCodingMode::Huffman);
    FAIL("expected ThresholdNotMet");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::ThresholdNotMet);
  }
}

TEST_CASE("functional codec leaks nothing") {
  JointDistribution j = validate_joint(
      {{0.30, 0.25}, {0.0, 0.0}, {0.0, 0.0}, {0.20, 0.25}},
      {"a", "b", "c", "d"}, {"y0", "y1"});
  Separation sep = grid2x2();
  CodecScheme s = build_perfect_functional(j, sep, UCodingMode::Huffman);
  CHECK(s.key_size == 2);
  CHECK(s.func_map == std::vector<std::size_t>{0, 1});
  LeakageAudit a = audit(s);
  CHECK(a.lossless);
  CHECK(a.exact_leakage <= 1e-12);
  CHECK(a.per_key_spread <= 1e-12);
  CHECK(std::abs(leakage_by_entropies(s)) <= 1e-9);

  LeakageAudit af = audit(build_perfect_functional(j, sep, UCodingMode::FixedLength));
  CHECK(af.lossless);
  CHECK(af.exact_leakage <= 1e-12);

  // a non-functional grid is rejected
  JointDistribution full = split_hand_instance();
  try {
    build_perfect_functional(full, sep, UCodingMode::Huffman);
    FAIL("expected NotFunctional");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::NotFunctional);
  }
}

TEST_CASE("encoder and decoder reject bad arguments") {
  JointDistribution j = validate_joint({{0.25, 0.0, 0.25}, {0.25, 0.0, 0.25}},
                                       {"x0", "x1"}, {"y0", "y1", "y2"});
  CodecScheme s = build_eps_private(j, 0.0, UCodingMode::Huffman);
  EncoderRng rng(1);
  try {
    encode(s, 1, 0, rng);  // y1 has zero mass
    FAIL("expected UnknownSymbol");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::UnknownSymbol);
  }
  try {
    encode(s, 0, 7, rng);
    FAIL("expected KeyOutOfRange");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::KeyOutOfRange);
  }
  Bitstring ok = encode(s, 0, 1, rng);
  CHECK(decode(s, ok, 1) == 0);
  CHECK_THROWS_AS(decode(s, ok, 9), Error);
}

TEST_CASE("decoder flags malformed codewords") {
  JointDistribution j = example2_joint();
  CodecScheme s = build_eps_private(j, 0.2, UCodingMode::FixedLength);
  CHECK(s.otp_width == 4);
  CHECK(s.ext->base.cell_count() == 2);
  CHECK(s.ext->pair_count() == 26);
  CHECK(s.pair_field_width == 5);

  EncoderRng rng(3);
  Bitstring good = encode(s, 0, 5, rng);
  REQUIRE(good.size() == 9);
  CHECK(decode(s, good, 5) < 2);

  auto expect_malformed = [&](const Bitstring& bits) {
    try {
      decode(s, bits, 5);
      return false;
    } catch (const Error& e) {
      return e.code() == Errc::MalformedCodeword;
    }
  };

  // padded field outside the key alphabet
  Bitstring pad13;
  pad13.append_uint(13, 4);
  pad13.append_uint(0, 5);
  CHECK(expect_malformed(pad13));

  // pair index past the pair count
  Bitstring pair30;
  pair30.append_uint(5, 4);
  pair30.append_uint(30, 5);
  CHECK(expect_malformed(pair30));

  // truncated stream
  Bitstring cut;
  for (std::size_t i = 0; i + 1 < good.size(); ++i) cut.push_back(good.bit(i));
  CHECK(expect_malformed(cut));

  // trailing bits
  Bitstring extra = good;
  extra.push_back(true);
  CHECK(expect_malformed(extra));
}

TEST_CASE("audit honors the atom budget") {
  CodecScheme s = build_eps_private(xy_equal_bit(), 0.5, UCodingMode::Huffman);
  try {
    audit(s, 4);
    FAIL("expected BudgetExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::BudgetExceeded);
  }
  CHECK(audit(s, 8).atom_count == 8);
}

TEST_CASE("audit is deterministic") {
  CodecScheme s = build_bounded_split(split_hand_instance(), grid2x2(), 0.9,
                                      SplitVariant::OtpX2, UCodingMode::Huffman);
  LeakageAudit a = audit(s);
  LeakageAudit b = audit(s);
  CHECK(a.exact_leakage == b.exact_leakage);
  CHECK(a.expected_length == b.expected_length);
  CHECK(a.codeword_entropy == b.codeword_entropy);
  CHECK(a.per_key_expected_length == b.per_key_expected_length);
  CHECK(a.codeword_count == b.codeword_count);
}

TEST_CASE("sampled encoding agrees with the exact audit") {
  JointDistribution j = xy_equal_bit();
  CodecScheme s = build_eps_private(j, 0.5, UCodingMode::Huffman);
  MonteCarloAudit mc = audit_monte_carlo(s, 20000, 42);
  CHECK(mc.samples == 20000);
  CHECK_THAT(mc.expected_length, Catch::Matchers::WithinAbs(2.5, 0.05));
  CHECK_THAT(mc.leakage_estimate, Catch::Matchers::WithinAbs(0.5, 0.05));
  CHECK_THROWS_AS(audit_monte_carlo(s, 0, 1), Error);
}

TEST_CASE("encode replays exactly for a fixed seed") {
  JointDistribution j = split_hand_instance();
  CodecScheme s = build_bounded_split(j, grid2x2(), 0.9, SplitVariant::OtpX2,
                                      UCodingMode::Huffman);
  EncoderRng r1(99), r2(99);
  for (int i = 0; i < 50; ++i) {
    std::size_t y = i % 2, w = i % 2;
    SampledAtom a = sample_encode(s, y, w, r1);
    SampledAtom b = sample_encode(s, y, w, r2);
    CHECK(a.x == b.x);
    CHECK(a.bits == b.bits);
    CHECK(decode(s, a.bits, w) == y);
  }
}
