#pragma once

// Source-coding primitives: Huffman prefix codes with deterministic
// tie-breaking, prefix encode/decode over a packed bitstream, and the
// modular one-time pad used for the fixed-length codeword fields.

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "pvlc/bitstring.hpp"
#include "pvlc/errors.hpp"
#include "pvlc/pmf.hpp"

namespace pvlc {

// ceil(log2 m); m == 1 needs zero bits.
inline unsigned ceil_log2(std::size_t m) {
  if (m == 0) fail(Errc::DomainError, "ceil_log2 of zero");
  return static_cast<unsigned>(std::bit_width(m - 1));
}

struct PrefixCode {
  std::vector<std::string> labels;
  std::vector<Bitstring> codewords;   // empty and unmarked for zero-mass symbols
  std::vector<bool> in_support;
  double expected_length = 0.0;       // under the pmf the code was built from
  double kraft_sum = 0.0;

  // Decode trie: branch[n] = children for bit 0/1 (-1 when absent),
  // leaf[n] = decoded symbol (-1 on interior nodes). Node 0 is the root.
  std::vector<std::array<std::int32_t, 2>> branch;
  std::vector<std::int32_t> leaf;
  std::size_t support_size = 0;
  std::size_t lone_symbol = SIZE_MAX;

  std::size_t size() const { return codewords.size(); }
};

// Builds the decode trie from the codeword table. Throws if the support
// codewords are not prefix-free (duplicate paths or codes through a leaf).
inline void index_prefix_code(PrefixCode& code) {
  code.branch.assign(1, {-1, -1});
  code.leaf.assign(1, -1);
  code.support_size = 0;
  code.lone_symbol = SIZE_MAX;
  for (std::size_t s = 0; s < code.size(); ++s) {
    if (!code.in_support[s]) continue;
    ++code.support_size;
    code.lone_symbol = s;
  }
  if (code.support_size <= 1) return;  // single symbol: empty codeword, no trie walk
  for (std::size_t s = 0; s < code.size(); ++s) {
    if (!code.in_support[s]) continue;
    const Bitstring& cw = code.codewords[s];
    if (cw.empty()) fail(Errc::MalformedCodeword, "empty codeword in a multi-symbol code");
    std::int32_t node = 0;
    for (std::size_t i = 0; i < cw.size(); ++i) {
      if (code.leaf[node] >= 0)
        fail(Errc::MalformedCodeword, "codeword runs through another codeword");
      int b = cw.bit(i) ? 1 : 0;
      if (code.branch[node][b] < 0) {
        code.branch[node][b] = static_cast<std::int32_t>(code.branch.size());
        code.branch.push_back({-1, -1});
        code.leaf.push_back(-1);
      }
      node = code.branch[node][b];
    }
    if (code.leaf[node] >= 0 || code.branch[node][0] >= 0 || code.branch[node][1] >= 0)
      fail(Errc::MalformedCodeword, "codeword set is not prefix-free");
    code.leaf[node] = static_cast<std::int32_t>(s);
  }
}

// Optimal binary prefix code over the positive-mass symbols. Ties in the merge
// queue break on (probability, smallest constituent symbol index), so equal
// inputs always produce the same code. A lone positive symbol gets the empty
// codeword: decoders consume zero bits and return it.
inline PrefixCode huffman_build(const Pmf& p) {
  const std::size_t n = p.size();
  std::vector<std::size_t> support;
  for (std::size_t i = 0; i < n; ++i)
    if (p.probs[i] > 0.0) support.push_back(i);
  if (support.empty()) fail(Errc::EmptySupport, "huffman over an all-zero pmf");

  PrefixCode code;
  code.labels = p.labels;
  code.codewords.assign(n, Bitstring{});
  code.in_support.assign(n, false);
  for (std::size_t i : support) code.in_support[i] = true;

  if (support.size() == 1) {
    code.expected_length = 0.0;
    code.kraft_sum = 1.0;
    index_prefix_code(code);
    return code;
  }

  struct Node {
    double prob;
    std::size_t min_symbol;  // smallest source symbol underneath, for stable ordering
    int left = -1, right = -1;
    std::size_t symbol = SIZE_MAX;
  };
  std::vector<Node> nodes;
  nodes.reserve(2 * support.size());
  auto order = [&nodes](int a, int b) {  // true when a ranks after b (min-heap via max-queue)
    if (nodes[a].prob != nodes[b].prob) return nodes[a].prob > nodes[b].prob;
    return nodes[a].min_symbol > nodes[b].min_symbol;
  };
  std::priority_queue<int, std::vector<int>, decltype(order)> queue(order);
  for (std::size_t i : support) {
    nodes.push_back(Node{p.probs[i], i, -1, -1, i});
    queue.push(static_cast<int>(nodes.size()) - 1);
  }
  while (queue.size() > 1) {
    int a = queue.top();
    queue.pop();
    int b = queue.top();
    queue.pop();
    nodes.push_back(Node{nodes[a].prob + nodes[b].prob,
                         std::min(nodes[a].min_symbol, nodes[b].min_symbol), a, b});
    queue.push(static_cast<int>(nodes.size()) - 1);
  }

  // First-popped child takes bit 0.
  struct Frame { int node; Bitstring prefix; };
  std::vector<Frame> stack{{queue.top(), Bitstring{}}};
  while (!stack.empty()) {
    Frame f = std::move(stack.back());
    stack.pop_back();
    const Node& nd = nodes[f.node];
    if (nd.symbol != SIZE_MAX) {
      code.codewords[nd.symbol] = std::move(f.prefix);
      continue;
    }
    Bitstring l = f.prefix, r = f.prefix;
    l.push_back(false);
    r.push_back(true);
    stack.push_back(Frame{nd.left, std::move(l)});
    stack.push_back(Frame{nd.right, std::move(r)});
  }

  for (std::size_t i : support) {
    code.expected_length += p.probs[i] * static_cast<double>(code.codewords[i].size());
    code.kraft_sum += std::ldexp(1.0, -static_cast<int>(code.codewords[i].size()));
  }
  index_prefix_code(code);
  return code;
}

inline void prefix_encode(const PrefixCode& code, std::size_t symbol, Bitstring& out) {
  if (symbol >= code.size() || !code.in_support[symbol])
    fail(Errc::UnknownSymbol, "symbol has no codeword");
  out.append(code.codewords[symbol]);
}

// Follows the decode trie from `cursor`; returns the decoded symbol and
// leaves the cursor just past its codeword.
inline std::size_t prefix_decode(const PrefixCode& code, const Bitstring& bits,
                                 std::size_t& cursor) {
  if (code.support_size == 0) fail(Errc::EmptySupport, "decode with an empty code");
  if (code.support_size == 1) return code.lone_symbol;
  std::int32_t node = 0;
  while (code.leaf[node] < 0) {
    if (cursor >= bits.size()) fail(Errc::TruncatedStream, "bitstring ends inside a codeword");
    std::int32_t next = code.branch[node][bits.bit(cursor) ? 1 : 0];
    ++cursor;
    if (next < 0) fail(Errc::MalformedCodeword, "bit pattern matches no codeword");
    node = next;
  }
  return static_cast<std::size_t>(code.leaf[node]);
}

// One-time pad over Z_m by modular addition. The key w must be uniform on
// {0..m-1} for the padded symbol to be independent of x; that property is
// what the enumeration tests certify.
inline std::size_t otp_encode(std::size_t x, std::size_t w, std::size_t m) {
  if (m == 0) fail(Errc::DomainError, "pad modulus must be positive");
  if (x >= m) fail(Errc::IndexOutOfRange, "pad input outside Z_m");
  if (w >= m) fail(Errc::KeyOutOfRange, "pad key outside Z_m");
  return (x + w) % m;
}

inline std::size_t otp_decode(std::size_t xt, std::size_t w, std::size_t m) {
  if (m == 0) fail(Errc::DomainError, "pad modulus must be positive");
  if (xt >= m) fail(Errc::IndexOutOfRange, "padded symbol outside Z_m");
  if (w >= m) fail(Errc::KeyOutOfRange, "pad key outside Z_m");
  return (xt + m - w) % m;
}

inline unsigned otp_field_width(std::size_t m) { return ceil_log2(m); }

}  // namespace pvlc
