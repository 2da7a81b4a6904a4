#pragma once

// JSON and CSV serialization. All JSON goes through ordered_json so key
// order is stable across runs; distributions round-trip bit-exactly
// (shortest-round-trip double formatting on write, exact parse on read).

#include <fstream>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "pvlc/bitstring.hpp"
#include "pvlc/bounds.hpp"
#include "pvlc/codec.hpp"
#include "pvlc/errors.hpp"
#include "pvlc/pmf.hpp"
#include "pvlc/separation.hpp"

namespace pvlc {

using ordered_json = nlohmann::ordered_json;

inline std::string base64_encode(const std::vector<std::uint8_t>& data) {
  static const char* tab = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  std::size_t i = 0;
  while (i + 3 <= data.size()) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8) | data[i + 2];
    out.push_back(tab[(v >> 18) & 63]);
    out.push_back(tab[(v >> 12) & 63]);
    out.push_back(tab[(v >> 6) & 63]);
    out.push_back(tab[v & 63]);
    i += 3;
  }
  std::size_t rem = data.size() - i;
  if (rem == 1) {
    std::uint32_t v = data[i] << 16;
    out.push_back(tab[(v >> 18) & 63]);
    out.push_back(tab[(v >> 12) & 63]);
    out.push_back('=');
    out.push_back('=');
  } else if (rem == 2) {
    std::uint32_t v = (data[i] << 16) | (data[i + 1] << 8);
    out.push_back(tab[(v >> 18) & 63]);
    out.push_back(tab[(v >> 12) & 63]);
    out.push_back(tab[(v >> 6) & 63]);
    out.push_back('=');
  }
  return out;
}

inline std::vector<std::uint8_t> base64_decode(const std::string& text) {
  auto val = [](char c) -> int {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
  };
  if (text.size() % 4 != 0) fail(Errc::ParseError, "base64 length not a multiple of 4");
  std::vector<std::uint8_t> out;
  out.reserve(text.size() / 4 * 3);
  for (std::size_t i = 0; i < text.size(); i += 4) {
    int pad = 0;
    std::uint32_t v = 0;
    for (std::size_t k = 0; k < 4; ++k) {
      char c = text[i + k];
      if (c == '=') {
        if (i + 4 != text.size() || k < 2) fail(Errc::ParseError, "misplaced base64 padding");
        ++pad;
        v <<= 6;
        continue;
      }
      if (pad > 0) fail(Errc::ParseError, "base64 data after padding");
      int d = val(c);
      if (d < 0) fail(Errc::ParseError, std::string("bad base64 character '") + c + "'");
      v = (v << 6) | static_cast<std::uint32_t>(d);
    }
    out.push_back(static_cast<std::uint8_t>((v >> 16) & 0xff));
    if (pad < 2) out.push_back(static_cast<std::uint8_t>((v >> 8) & 0xff));
    if (pad < 1) out.push_back(static_cast<std::uint8_t>(v & 0xff));
  }
  return out;
}

inline ordered_json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(Errc::ParseError, "cannot open " + path);
  try {
    return ordered_json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, path + ": " + e.what());
  }
}

inline void save_json_file(const std::string& path, const ordered_json& j) {
  std::ofstream out(path);
  if (!out) fail(Errc::ParseError, "cannot open " + path + " for writing");
  out << j.dump(2) << '\n';
}

inline ordered_json joint_to_json(const JointDistribution& j) {
  ordered_json out;
  out["x_labels"] = j.x_labels;
  out["y_labels"] = j.y_labels;
  ordered_json rows = ordered_json::array();
  for (std::size_t x = 0; x < j.nx(); ++x) {
    ordered_json row = ordered_json::array();
    for (std::size_t y = 0; y < j.ny(); ++y) row.push_back(j.p(x, y));
    rows.push_back(std::move(row));
  }
  out["pmf"] = std::move(rows);
  return out;
}

inline JointDistribution joint_from_json(const ordered_json& in) {
  try {
    std::vector<std::string> xl = in.at("x_labels").get<std::vector<std::string>>();
    std::vector<std::string> yl = in.at("y_labels").get<std::vector<std::string>>();
    std::vector<std::vector<double>> pmf =
        in.at("pmf").get<std::vector<std::vector<double>>>();
    return validate_joint(pmf, xl, yl);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("distribution: ") + e.what());
  }
}

inline JointDistribution load_joint(const std::string& path) {
  return joint_from_json(load_json_file(path));
}

inline void save_joint(const std::string& path, const JointDistribution& j) {
  save_json_file(path, joint_to_json(j));
}

inline ordered_json pmf_to_json(const Pmf& p) {
  ordered_json out;
  out["labels"] = p.labels;
  out["probs"] = p.probs;
  return out;
}

inline ordered_json bitstring_to_json(const Bitstring& b) {
  ordered_json out;
  out["bits"] = base64_encode(b.bytes());
  out["len"] = b.size();
  return out;
}

inline Bitstring bitstring_from_json(const ordered_json& in) {
  try {
    std::vector<std::uint8_t> bytes = base64_decode(in.at("bits").get<std::string>());
    std::size_t len = in.at("len").get<std::size_t>();
    if (len > bytes.size() * 8) fail(Errc::ParseError, "bit length exceeds payload");
    return Bitstring::from_bytes(bytes, len);
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("bitstring: ") + e.what());
  }
}

inline ordered_json separation_to_json(const Separation& s,
                                       const std::vector<std::string>& x_labels) {
  ordered_json out;
  out["shape"] = {s.n_rows, s.n_cols};
  ordered_json rows = ordered_json::array();
  for (std::size_t r = 0; r < s.n_rows; ++r) {
    ordered_json row = ordered_json::array();
    for (std::size_t c = 0; c < s.n_cols; ++c) {
      std::size_t v = s.grid[r][c];
      if (v == kPadCell)
        row.push_back(nullptr);
      else
        row.push_back(x_labels.at(v));
    }
    rows.push_back(std::move(row));
  }
  out["rows"] = std::move(rows);
  return out;
}

inline Separation separation_from_json(const ordered_json& in,
                                       const std::vector<std::string>& x_labels) {
  try {
    std::vector<std::size_t> shape = in.at("shape").get<std::vector<std::size_t>>();
    if (shape.size() != 2) fail(Errc::ParseError, "shape must be [rows, cols]");
    Separation s;
    s.n_rows = shape[0];
    s.n_cols = shape[1];
    s.grid.assign(s.n_rows, std::vector<std::size_t>(s.n_cols, kPadCell));
    const ordered_json& rows = in.at("rows");
    if (rows.size() != s.n_rows) fail(Errc::ParseError, "row count does not match shape");
    for (std::size_t r = 0; r < s.n_rows; ++r) {
      const ordered_json& row = rows.at(r);
      if (row.size() != s.n_cols) fail(Errc::ParseError, "column count does not match shape");
      for (std::size_t c = 0; c < s.n_cols; ++c) {
        if (row.at(c).is_null()) {
          s.padded = true;
          continue;
        }
        std::string label = row.at(c).get<std::string>();
        auto it = std::find(x_labels.begin(), x_labels.end(), label);
        if (it == x_labels.end()) fail(Errc::ParseError, "unknown x label '" + label + "'");
        s.grid[r][c] = static_cast<std::size_t>(it - x_labels.begin());
      }
    }
    validate_separation(s, x_labels.size());
    return s;
  } catch (const nlohmann::json::exception& e) {
    fail(Errc::ParseError, std::string("separation: ") + e.what());
  }
}

inline ordered_json search_to_json(const SeparationSearchResult& r,
                                   const std::vector<std::string>& x_labels) {
  ordered_json out;
  out["objective"] = r.best_objective;
  out["revealed_entropy"] = r.revealed_entropy;
  out["key_size"] = r.key_size;
  out["separation"] = separation_to_json(r.best, x_labels);
  out["feasible_count"] = r.feasible_count;
  out["examined"] = r.examined;
  out["exhaustive"] = r.exhaustive;
  return out;
}

inline ordered_json audit_to_json(const LeakageAudit& a) {
  ordered_json out;
  out["exact_leakage"] = a.exact_leakage;
  out["leakage_target"] = a.leakage_target;
  out["expected_length"] = a.expected_length;
  out["per_key_expected_length"] = a.per_key_expected_length;
  out["per_key_spread"] = a.per_key_spread;
  out["codeword_entropy"] = a.codeword_entropy;
  out["max_codeword_prob"] = a.max_codeword_prob;
  out["codeword_count"] = a.codeword_count;
  out["atom_count"] = a.atom_count;
  out["lossless"] = a.lossless;
  if (!a.first_failure.empty()) out["first_failure"] = a.first_failure;
  return out;
}

inline ordered_json mc_audit_to_json(const MonteCarloAudit& a) {
  ordered_json out;
  out["leakage_estimate"] = a.leakage_estimate;
  out["expected_length"] = a.expected_length;
  out["samples"] = a.samples;
  return out;
}

inline ordered_json scheme_to_json(const CodecScheme& s) {
  ordered_json out;
  out["kind"] = scheme_kind_name(s.kind);
  out["u_mode"] = s.u_mode == UCodingMode::Huffman ? "huffman" : "fixed";
  out["eps"] = s.eps;
  out["leakage_target"] = s.leakage_target;
  out["key_size"] = s.key_size;
  out["otp_width"] = s.otp_width;
  out["cells"] = s.cell_channel().cell_count();
  if (s.ext) {
    out["reveal_count"] = s.ext->reveal_count;
    out["alpha"] = s.ext->alpha;
    out["pair_count"] = s.ext->pair_count();
  }
  if (s.sep) {
    out["separation"] = separation_to_json(*s.sep, s.source.x_labels);
    if (s.kind == SchemeKind::BoundedSplit)
      out["variant"] = s.variant == SplitVariant::OtpX2 ? "otp_x2" : "otp_x1";
  }
  return out;
}

inline ordered_json lower_to_json(const LowerBounds& lb) {
  ordered_json out;
  out["l1"] = lb.l1;
  out["l2"] = lb.l2;
  out["l2_nonzero"] = lb.l2_nonzero;
  out["l3"] = lb.l3;
  out["max_lower"] = lb.max_lower;
  out["logmax"] = lb.logmax;
  out["logmax_applies"] = lb.logmax_applies;
  out["thm4"] = lb.thm4;
  out["thm4_logmax"] = lb.thm4_logmax;
  out["thm4_logmax_applies"] = lb.thm4_logmax_applies;
  out["overall_exact"] = lb.overall_exact;
  out["overall_bounded"] = lb.overall_bounded;
  return out;
}

inline ordered_json bounds_to_json(const BoundsReport& r,
                                   const std::vector<std::string>& x_labels) {
  ordered_json out;
  out["eps"] = r.eps;
  ordered_json ent;
  ent["h_x"] = r.h_x;
  ent["h_y"] = r.h_y;
  ent["h_y_given_x"] = r.h_y_given_x;
  ent["h_x_given_y"] = r.h_x_given_y;
  ent["mi_xy"] = r.mi_xy;
  out["entropies"] = std::move(ent);
  out["lower"] = lower_to_json(r.lower);
  ordered_json t1;
  t1["alpha"] = r.thm1.alpha;
  t1["h_alpha"] = r.thm1.h_alpha;
  t1["sum_hyx"] = r.thm1.sum_hyx;
  t1["eq12"] = r.thm1.eq12;
  t1["eq13_pre"] = r.thm1.eq13_pre;
  t1["eq13"] = r.thm1.eq13;
  t1["eq13_full_pre"] = r.thm1.eq13_full_pre;
  t1["eq13_full"] = r.thm1.eq13_full;
  t1["eq14_applies"] = r.thm1.eq14_applies;
  if (r.thm1.eq14_applies) {
    t1["eq14_pre"] = r.thm1.eq14_pre;
    t1["eq14"] = r.thm1.eq14;
  }
  t1["card_generic"] = r.thm1.card_generic;
  if (r.thm1.eq14_applies) t1["card_functional"] = r.thm1.card_functional;
  out["thm1"] = std::move(t1);
  if (r.thm5) {
    ordered_json t5;
    t5["sum_hyx"] = r.thm5->sum_hyx;
    if (r.thm5->s1_feasible) {
      t5["eq27"] = r.thm5->eq27;
      t5["eq27_key"] = r.thm5->eq27_key;
      t5["s1"] = search_to_json(*r.thm5->s1, x_labels);
    }
    if (r.thm5->s2_feasible) {
      t5["eq28"] = r.thm5->eq28;
      t5["eq28_key"] = r.thm5->eq28_key;
      t5["s2"] = search_to_json(*r.thm5->s2, x_labels);
    }
    out["thm5"] = std::move(t5);
  } else {
    out["thm5"] = nullptr;
  }
  if (r.thm3) {
    ordered_json t3;
    t3["h_x1"] = r.thm3->h_x1;
    t3["h_x2"] = r.thm3->h_x2;
    t3["sum_hyx"] = r.thm3->sum_hyx;
    t3["eq21"] = r.thm3->eq21;
    t3["eq21_applies"] = r.thm3->eq21_applies;
    t3["eq22_pre"] = r.thm3->eq22_pre;
    t3["eq22"] = r.thm3->eq22;
    t3["eq23_applies"] = r.thm3->eq23_applies;
    if (r.thm3->eq23_applies) {
      t3["eq23_pre"] = r.thm3->eq23_pre;
      t3["eq23"] = r.thm3->eq23;
    }
    t3["eq24"] = r.thm3->eq24;
    t3["eq24_applies"] = r.thm3->eq24_applies;
    t3["key_eq21"] = r.thm3->key_eq21;
    t3["key_eq24"] = r.thm3->key_eq24;
    out["thm3"] = std::move(t3);
  }
  if (r.thm6) {
    ordered_json t6;
    t6["sum_hyx1"] = r.thm6->sum_hyx1;
    t6["eq30"] = r.thm6->eq30;
    t6["eq31_pre"] = r.thm6->eq31_pre;
    t6["eq31"] = r.thm6->eq31;
    t6["eq32_applies"] = r.thm6->eq32_applies;
    if (r.thm6->eq32_applies) {
      t6["eq32_pre"] = r.thm6->eq32_pre;
      t6["eq32"] = r.thm6->eq32;
    }
    t6["key_size"] = r.thm6->key_size;
    out["thm6"] = std::move(t6);
  }
  if (r.special) {
    ordered_json sc;
    sc["sum_hyx1"] = r.special->sum_hyx1;
    sc["objective"] = r.special->objective;
    sc["bound"] = r.special->bound;
    sc["key_size"] = r.special->key_size;
    out["special_case"] = std::move(sc);
  }
  out["notes"] = r.notes;
  return out;
}

namespace detail {

inline std::string csv_num(double v) {
  if (v == kInf) return "";
  std::ostringstream os;
  os << std::setprecision(12) << v;
  return os.str();
}

}  // namespace detail

inline std::string bounds_csv_header() {
  return "eps,h_x,h_y,h_y_given_x,h_x_given_y,mi_xy,l1,l2,l3,max_lower,logmax,thm4,"
         "thm4_logmax,eq12,eq13,eq13_full,eq14,eq21,eq22,eq23,eq24,eq27,eq28,eq30,eq31,"
         "eq32,special";
}

inline std::string bounds_csv_row(const BoundsReport& r) {
  using detail::csv_num;
  std::string row;
  auto add = [&row](const std::string& v) {
    if (!row.empty()) row += ',';
    row += v;
  };
  add(csv_num(r.eps));
  add(csv_num(r.h_x));
  add(csv_num(r.h_y));
  add(csv_num(r.h_y_given_x));
  add(csv_num(r.h_x_given_y));
  add(csv_num(r.mi_xy));
  add(csv_num(r.lower.l1));
  add(csv_num(r.lower.l2));
  add(csv_num(r.lower.l3));
  add(csv_num(r.lower.max_lower));
  add(r.lower.logmax_applies ? csv_num(r.lower.logmax) : "");
  add(csv_num(r.lower.thm4));
  add(r.lower.thm4_logmax_applies ? csv_num(r.lower.thm4_logmax) : "");
  add(csv_num(r.thm1.eq12));
  add(csv_num(r.thm1.eq13));
  add(csv_num(r.thm1.eq13_full));
  add(r.thm1.eq14_applies ? csv_num(r.thm1.eq14) : "");
  add(r.thm3 && r.thm3->eq21_applies ? csv_num(r.thm3->eq21) : "");
  add(r.thm3 && r.thm3->eq21_applies ? csv_num(r.thm3->eq22) : "");
  add(r.thm3 && r.thm3->eq21_applies && r.thm3->eq23_applies ? csv_num(r.thm3->eq23) : "");
  add(r.thm3 && r.thm3->eq24_applies ? csv_num(r.thm3->eq24) : "");
  add(r.thm5 && r.thm5->s1_feasible ? csv_num(r.thm5->eq27) : "");
  add(r.thm5 && r.thm5->s2_feasible ? csv_num(r.thm5->eq28) : "");
  add(r.thm6 ? csv_num(r.thm6->eq30) : "");
  add(r.thm6 ? csv_num(r.thm6->eq31) : "");
  add(r.thm6 && r.thm6->eq32_applies ? csv_num(r.thm6->eq32) : "");
  add(r.special ? csv_num(r.special->bound) : "");
  return row;
}

}  // namespace pvlc
