#pragma once

// The three shared-key codecs and their exact audits.
//
//   EpsPrivate        pad(X) || code(cell, reveal)          leaks exactly eps
//   BoundedSplit      pad(X2) || code(X1) || code(cell)     leaks exactly H(X1)
//                     (or the mirrored variant padding X1 and sending X2)
//   PerfectFunctional pad(X1) || code(cell), X2 = f(X1)     leaks nothing
//
// Codewords put the fixed-width padded field first, prefix-free fields after.
// The encoder maps (y, key) to bits; private symbols not determined by y are
// drawn from P(X|Y=y) on an explicit rng stream, and the audit enumerates
// every (x, y, key, cell, coin) atom exactly, so the leakage, losslessness
// and per-key-length claims are certified by exhaustion rather than sampling.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pvlc/bitstring.hpp"
#include "pvlc/coding.hpp"
#include "pvlc/errors.hpp"
#include "pvlc/frl.hpp"
#include "pvlc/pmf.hpp"
#include "pvlc/separation.hpp"

namespace pvlc {

inline constexpr std::size_t kDefaultAtomBudget = 10'000'000;

enum class SchemeKind { EpsPrivate, BoundedSplit, PerfectFunctional };
enum class SplitVariant { OtpX2, OtpX1 };
enum class UCodingMode { Huffman, FixedLength };

inline const char* scheme_kind_name(SchemeKind k) {
  switch (k) {
    case SchemeKind::EpsPrivate: return "eps";
    case SchemeKind::BoundedSplit: return "split";
    case SchemeKind::PerfectFunctional: return "functional";
  }
  return "?";
}

// Independent engines for the three stochastic choices an encoder makes, all
// derived from one user seed so replays are exact.
struct EncoderRng {
  std::mt19937_64 source, cell, coin;
  explicit EncoderRng(std::uint64_t seed)
      : source(seed ^ 0x9e3779b97f4a7c15ull),
        cell(seed ^ 0xbf58476d1ce4e5b9ull),
        coin(seed ^ 0x94d049bb133111ebull) {}
};

namespace detail {

inline std::size_t draw_index(std::span<const double> weights, std::mt19937_64& rng) {
  double v = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    if (weights[i] <= 0.0) continue;
    last = i;
    acc += weights[i];
    if (v < acc) return i;
  }
  return last;
}

}  // namespace detail

struct CodecScheme {
  SchemeKind kind = SchemeKind::EpsPrivate;
  UCodingMode u_mode = UCodingMode::Huffman;
  double eps = 0.0;           // leakage budget the scheme was built against
  double leakage_target = 0.0;  // the exact leakage this construction promises
  std::size_t key_size = 0;
  unsigned otp_width = 0;

  JointDistribution source;
  std::vector<std::vector<double>> x_given_y;  // [y] -> pmf over x; empty when P(y) = 0

  // EpsPrivate
  std::optional<ExtendedChannel> ext;
  std::optional<PrefixCode> pair_code;  // Huffman mode
  unsigned pair_field_width = 0;        // fixed mode: one field for the (cell, reveal) pair

  // BoundedSplit / PerfectFunctional
  std::optional<Separation> sep;
  std::optional<JointDistribution> lifted;
  std::optional<FrlChannel> frl;
  SplitVariant variant = SplitVariant::OtpX2;
  std::optional<PrefixCode> clear_code;  // the coordinate sent in the clear
  std::optional<PrefixCode> u_code;      // Huffman mode cell code
  unsigned u_field_width = 0;            // fixed mode cell field
  std::vector<std::size_t> sym_row, sym_col;  // original symbol -> grid coordinates
  std::vector<std::size_t> func_map;          // functional: row -> its single positive column

  const FrlChannel& cell_channel() const { return ext ? ext->base : *frl; }
  std::size_t lifted_index(std::size_t x) const { return sym_row[x] * sep->n_cols + sym_col[x]; }
};

namespace detail {

inline void fill_x_given_y(CodecScheme& s) {
  const JointDistribution& j = s.source;
  s.x_given_y.assign(j.ny(), {});
  for (std::size_t y = 0; y < j.ny(); ++y) {
    double py = 0.0;
    for (std::size_t x = 0; x < j.nx(); ++x) py += j.p(x, y);
    if (py <= 0.0) continue;
    auto& col = s.x_given_y[y];
    col.assign(j.nx(), 0.0);
    for (std::size_t x = 0; x < j.nx(); ++x) col[x] = j.p(x, y) / py;
  }
}

inline void fill_grid_maps(CodecScheme& s) {
  const Separation& sep = *s.sep;
  s.sym_row.assign(s.source.nx(), SIZE_MAX);
  s.sym_col.assign(s.source.nx(), SIZE_MAX);
  for (std::size_t r = 0; r < sep.n_rows; ++r)
    for (std::size_t c = 0; c < sep.n_cols; ++c) {
      std::size_t v = sep.grid[r][c];
      if (v == kPadCell) continue;
      s.sym_row[v] = r;
      s.sym_col[v] = c;
    }
}

}  // namespace detail

inline CodecScheme build_eps_private(const JointDistribution& j, double eps,
                                     UCodingMode mode = UCodingMode::Huffman) {
  CodecScheme s;
  s.kind = SchemeKind::EpsPrivate;
  s.u_mode = mode;
  s.source = j;
  s.ext = build_extended(j, eps);
  s.eps = s.ext->eps;
  s.leakage_target = s.ext->eps;
  s.key_size = j.nx();
  s.otp_width = otp_field_width(s.key_size);
  if (mode == UCodingMode::Huffman) {
    s.pair_code = huffman_build(s.ext->pair_pmf);
  } else {
    s.pair_field_width = ceil_log2(s.ext->pair_count());
  }
  detail::fill_x_given_y(s);
  return s;
}

inline CodecScheme build_bounded_split(const JointDistribution& j, const Separation& sep,
                                       double eps, SplitVariant variant = SplitVariant::OtpX2,
                                       UCodingMode mode = UCodingMode::Huffman) {
  validate_separation(sep, j.nx());
  CodecScheme s;
  s.kind = SchemeKind::BoundedSplit;
  s.u_mode = mode;
  s.variant = variant;
  s.eps = eps;
  s.source = j;
  s.sep = sep;
  Pmf px = j.x_marginal();
  Pmf clear_pmf;
  if (variant == SplitVariant::OtpX2) {
    clear_pmf = Pmf{{}, row_masses(sep, px)};
    s.key_size = sep.n_cols;
  } else {
    clear_pmf = Pmf{{}, col_masses(sep, px)};
    s.key_size = sep.n_rows;
  }
  for (std::size_t i = 0; i < clear_pmf.probs.size(); ++i)
    clear_pmf.labels.push_back((variant == SplitVariant::OtpX2 ? "x1_" : "x2_") +
                               std::to_string(i));
  s.leakage_target = entropy(clear_pmf);
  if (s.leakage_target > eps + kInfoTol)
    fail(Errc::ThresholdNotMet, "revealed coordinate entropy exceeds the leakage budget");
  s.otp_width = otp_field_width(s.key_size);
  s.clear_code = huffman_build(clear_pmf);
  s.lifted = lift_separation(j, sep);
  s.frl = build_frl(*s.lifted);
  if (mode == UCodingMode::Huffman) {
    s.u_code = huffman_build(s.frl->u_pmf);
  } else {
    s.u_field_width = ceil_log2(s.frl->cell_count());
  }
  detail::fill_x_given_y(s);
  detail::fill_grid_maps(s);
  return s;
}

inline CodecScheme build_perfect_functional(const JointDistribution& j, const Separation& sep,
                                            UCodingMode mode = UCodingMode::Huffman) {
  validate_separation(sep, j.nx());
  Pmf px = j.x_marginal();
  if (!separation_is_functional(sep, px))
    fail(Errc::NotFunctional, "second coordinate is not a function of the first");
  CodecScheme s;
  s.kind = SchemeKind::PerfectFunctional;
  s.u_mode = mode;
  s.eps = 0.0;
  s.leakage_target = 0.0;
  s.source = j;
  s.sep = sep;
  s.key_size = sep.n_rows;
  s.otp_width = otp_field_width(s.key_size);
  s.func_map.assign(sep.n_rows, SIZE_MAX);
  for (std::size_t r = 0; r < sep.n_rows; ++r)
    for (std::size_t c = 0; c < sep.n_cols; ++c) {
      std::size_t v = sep.grid[r][c];
      if (v != kPadCell && px.probs[v] > 0.0) s.func_map[r] = c;
    }
  s.lifted = lift_separation(j, sep);
  s.frl = build_frl(*s.lifted);
  if (mode == UCodingMode::Huffman) {
    s.u_code = huffman_build(s.frl->u_pmf);
  } else {
    s.u_field_width = ceil_log2(s.frl->cell_count());
  }
  detail::fill_x_given_y(s);
  detail::fill_grid_maps(s);
  return s;
}

namespace detail {

// Codeword suffix past the padded field; independent of the key.
inline Bitstring codeword_suffix(const CodecScheme& s, std::size_t x, std::size_t u,
                                 std::size_t reveal) {
  Bitstring bits;
  if (s.kind == SchemeKind::EpsPrivate) {
    std::size_t p = s.ext->pair_index(u, reveal);
    if (s.u_mode == UCodingMode::Huffman)
      prefix_encode(*s.pair_code, p, bits);
    else
      bits.append_uint(p, s.pair_field_width);
    return bits;
  }
  if (s.kind == SchemeKind::BoundedSplit) {
    std::size_t clear_sym = s.variant == SplitVariant::OtpX2 ? s.sym_row[x] : s.sym_col[x];
    prefix_encode(*s.clear_code, clear_sym, bits);
  }
  if (s.u_mode == UCodingMode::Huffman)
    prefix_encode(*s.u_code, u, bits);
  else
    bits.append_uint(u, s.u_field_width);
  return bits;
}

inline std::size_t padded_symbol(const CodecScheme& s, std::size_t x) {
  switch (s.kind) {
    case SchemeKind::EpsPrivate: return x;
    case SchemeKind::BoundedSplit:
      return s.variant == SplitVariant::OtpX2 ? s.sym_col[x] : s.sym_row[x];
    case SchemeKind::PerfectFunctional: return s.sym_row[x];
  }
  return 0;
}

}  // namespace detail

// Full codeword for one realization of (x, y, key, cell, reveal coin).
inline Bitstring codeword_for_atom(const CodecScheme& s, std::size_t x, std::size_t w,
                                   std::size_t u, std::size_t reveal) {
  Bitstring bits;
  bits.append_uint(otp_encode(detail::padded_symbol(s, x), w, s.key_size), s.otp_width);
  bits.append(detail::codeword_suffix(s, x, u, reveal));
  return bits;
}

struct SampledAtom {
  std::size_t x = 0;
  Bitstring bits;
};

// Encoder: maps (y, key) to bits, drawing the private symbol, the cell and
// the reveal coin from the rng streams.
inline SampledAtom sample_encode(const CodecScheme& s, std::size_t y, std::size_t w,
                                 EncoderRng& rng) {
  if (y >= s.source.ny() || s.x_given_y[y].empty())
    fail(Errc::UnknownSymbol, "y has zero probability");
  if (w >= s.key_size) fail(Errc::KeyOutOfRange, "key outside the shared alphabet");
  SampledAtom out;
  out.x = detail::draw_index(s.x_given_y[y], rng.source);
  if (s.kind == SchemeKind::EpsPrivate) {
    std::size_t u = sample_u(s.ext->base, out.x, y, rng.cell);
    double c = std::uniform_real_distribution<double>(0.0, 1.0)(rng.coin);
    std::size_t reveal = c < s.ext->alpha ? s.ext->reveal_of_x[out.x] : s.ext->erasure();
    out.bits = codeword_for_atom(s, out.x, w, u, reveal);
  } else {
    std::size_t u = sample_u(*s.frl, s.lifted_index(out.x), y, rng.cell);
    out.bits = codeword_for_atom(s, out.x, w, u, 0);
  }
  return out;
}

inline Bitstring encode(const CodecScheme& s, std::size_t y, std::size_t w, EncoderRng& rng) {
  return sample_encode(s, y, w, rng).bits;
}

// Decoder: strict full-consumption parse. Any anomaly (truncated field,
// impossible index, leftover bits) surfaces as MalformedCodeword; a flipped
// bit may also decode to a wrong y, but never to a silent partial parse.
inline std::size_t decode(const CodecScheme& s, const Bitstring& bits, std::size_t w) {
  if (w >= s.key_size) fail(Errc::KeyOutOfRange, "key outside the shared alphabet");
  try {
    std::size_t cursor = 0;
    std::size_t padded = bits.read_uint(cursor, s.otp_width);
    std::size_t y = SIZE_MAX;
    if (padded >= s.key_size) fail(Errc::MalformedCodeword, "padded field outside Z_m");
    std::size_t unpadded = otp_decode(padded, w, s.key_size);
    switch (s.kind) {
      case SchemeKind::EpsPrivate: {
        std::size_t p = s.u_mode == UCodingMode::Huffman
                            ? prefix_decode(*s.pair_code, bits, cursor)
                            : static_cast<std::size_t>(bits.read_uint(cursor, s.pair_field_width));
        if (p >= s.ext->pair_count()) fail(Errc::MalformedCodeword, "pair index out of range");
        y = s.ext->base.decode_map(s.ext->pair_cell(p), unpadded);
        break;
      }
      case SchemeKind::BoundedSplit: {
        std::size_t clear_sym = prefix_decode(*s.clear_code, bits, cursor);
        std::size_t u = s.u_mode == UCodingMode::Huffman
                            ? prefix_decode(*s.u_code, bits, cursor)
                            : static_cast<std::size_t>(bits.read_uint(cursor, s.u_field_width));
        if (u >= s.frl->cell_count()) fail(Errc::MalformedCodeword, "cell index out of range");
        std::size_t r = s.variant == SplitVariant::OtpX2 ? clear_sym : unpadded;
        std::size_t c = s.variant == SplitVariant::OtpX2 ? unpadded : clear_sym;
        y = s.frl->decode_map(u, r * s.sep->n_cols + c);
        break;
      }
      case SchemeKind::PerfectFunctional: {
        std::size_t u = s.u_mode == UCodingMode::Huffman
                            ? prefix_decode(*s.u_code, bits, cursor)
                            : static_cast<std::size_t>(bits.read_uint(cursor, s.u_field_width));
        if (u >= s.frl->cell_count()) fail(Errc::MalformedCodeword, "cell index out of range");
        std::size_t col = s.func_map[unpadded];
        if (col == SIZE_MAX) fail(Errc::MalformedCodeword, "padded row has no image");
        y = s.frl->decode_map(u, unpadded * s.sep->n_cols + col);
        break;
      }
    }
    if (cursor != bits.size()) fail(Errc::MalformedCodeword, "trailing bits after the codeword");
    return y;
  } catch (const Error& e) {
    if (e.code() == Errc::MalformedCodeword) throw;
    fail(Errc::MalformedCodeword, std::string("parse failed: ") + e.what());
  }
}

struct LeakageAudit {
  double exact_leakage = 0.0;
  double leakage_target = 0.0;
  double expected_length = 0.0;                 // mean over keys
  std::vector<double> per_key_expected_length;  // indexed by key
  double per_key_spread = 0.0;                  // max |per-key - mean|
  double codeword_entropy = 0.0;
  double max_codeword_prob = 0.0;
  std::size_t codeword_count = 0;
  std::size_t atom_count = 0;
  bool lossless = true;
  std::string first_failure;
};

// Exhaustive audit over every positive-probability atom. Deterministic:
// atoms are visited in index order and tallied into ordered maps.
inline LeakageAudit audit(const CodecScheme& s, std::size_t atom_budget = kDefaultAtomBudget) {
  const JointDistribution& j = s.source;
  const std::size_t M = s.key_size;
  const bool eps_kind = s.kind == SchemeKind::EpsPrivate;
  const FrlChannel& ch = s.cell_channel();

  // Count atoms before enumerating anything.
  std::size_t coins = 1;
  if (eps_kind) coins = (s.ext->alpha > 0.0 ? 1 : 0) + (s.ext->alpha < 1.0 ? 1 : 0);
  std::size_t atoms = 0;
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y) {
      if (j.p(x, y) <= 0.0) continue;
      std::size_t cx = eps_kind ? x : s.lifted_index(x);
      atoms += M * ch.cond_sampler(cx, y).size() * coins;
    }
  if (atoms > atom_budget)
    fail(Errc::BudgetExceeded,
         "audit needs " + std::to_string(atoms) + " atoms, budget is " +
             std::to_string(atom_budget));

  LeakageAudit a;
  a.leakage_target = s.leakage_target;
  a.atom_count = atoms;
  a.per_key_expected_length.assign(M, 0.0);

  std::map<std::string, std::map<std::size_t, double>> joint;  // codeword -> x -> mass
  for (std::size_t x = 0; x < j.nx(); ++x)
    for (std::size_t y = 0; y < j.ny(); ++y) {
      double pxy = j.p(x, y);
      if (pxy <= 0.0) continue;
      std::size_t cx = eps_kind ? x : s.lifted_index(x);
      for (const CondAtom& ca : ch.cond_sampler(cx, y)) {
        struct Branch { std::size_t reveal; double p; };
        std::vector<Branch> branches;
        if (eps_kind) {
          if (s.ext->alpha > 0.0) branches.push_back({s.ext->reveal_of_x[x], s.ext->alpha});
          if (s.ext->alpha < 1.0) branches.push_back({s.ext->erasure(), 1.0 - s.ext->alpha});
        } else {
          branches.push_back({0, 1.0});
        }
        for (const Branch& br : branches) {
          Bitstring suffix = detail::codeword_suffix(s, x, ca.u, br.reveal);
          double p_atom_given_w = pxy * ca.p * br.p;  // conditional on the key
          for (std::size_t w = 0; w < M; ++w) {
            Bitstring bits;
            bits.append_uint(otp_encode(detail::padded_symbol(s, x), w, M), s.otp_width);
            bits.append(suffix);
            a.per_key_expected_length[w] += p_atom_given_w * static_cast<double>(bits.size());
            joint[bits.to_string()][x] += p_atom_given_w / static_cast<double>(M);
            if (a.lossless) {
              std::size_t got = SIZE_MAX;
              try {
                got = decode(s, bits, w);
              } catch (const Error&) {
              }
              if (got != y) {
                a.lossless = false;
                a.first_failure = "atom (x=" + std::to_string(x) + ",y=" + std::to_string(y) +
                                  ",w=" + std::to_string(w) + ") decoded to " +
                                  (got == SIZE_MAX ? std::string("error") : std::to_string(got));
              }
            }
          }
        }
      }
    }

  Pmf px = j.x_marginal();
  double mi = 0.0;
  for (const auto& [c, by_x] : joint) {
    double pc = 0.0;
    for (const auto& [x, m] : by_x) pc += m;
    a.codeword_entropy -= pc > 0.0 ? pc * std::log2(pc) : 0.0;
    a.max_codeword_prob = std::max(a.max_codeword_prob, pc);
    for (const auto& [x, m] : by_x)
      if (m > 0.0) mi += m * std::log2(m / (pc * px.probs[x]));
  }
  a.exact_leakage = std::max(mi, 0.0);
  a.codeword_count = joint.size();

  double mean = 0.0;
  for (double v : a.per_key_expected_length) mean += v;
  mean /= static_cast<double>(M);
  a.expected_length = mean;
  for (double v : a.per_key_expected_length)
    a.per_key_spread = std::max(a.per_key_spread, std::abs(v - mean));
  return a;
}

struct MonteCarloAudit {
  double leakage_estimate = 0.0;
  double expected_length = 0.0;
  std::size_t samples = 0;
};

// Sampled cross-check of the exact audit: plug-in estimate of the
// codeword/private-symbol mutual information from `samples` encoder runs.
inline MonteCarloAudit audit_monte_carlo(const CodecScheme& s, std::size_t samples,
                                         std::uint64_t seed) {
  if (samples == 0) fail(Errc::DomainError, "monte carlo audit needs samples");
  EncoderRng rng(seed);
  std::mt19937_64 pick(seed ^ 0xda942042e4dd58b5ull);
  Pmf py = s.source.y_marginal();
  MonteCarloAudit mc;
  mc.samples = samples;
  std::map<std::string, std::map<std::size_t, double>> joint;
  std::map<std::size_t, double> px;
  double total_len = 0.0;
  const double unit = 1.0 / static_cast<double>(samples);
  for (std::size_t i = 0; i < samples; ++i) {
    std::size_t y = detail::draw_index(py.probs, pick);
    std::size_t w = std::uniform_int_distribution<std::size_t>(0, s.key_size - 1)(pick);
    SampledAtom atom = sample_encode(s, y, w, rng);
    total_len += static_cast<double>(atom.bits.size());
    joint[atom.bits.to_string()][atom.x] += unit;
    px[atom.x] += unit;
  }
  mc.expected_length = total_len * unit;
  double mi = 0.0;
  for (const auto& [c, by_x] : joint) {
    double pc = 0.0;
    for (const auto& [x, m] : by_x) pc += m;
    for (const auto& [x, m] : by_x)
      if (m > 0.0) mi += m * std::log2(m / (pc * px[x]));
  }
  mc.leakage_estimate = std::max(mi, 0.0);
  return mc;
}

}  // namespace pvlc
