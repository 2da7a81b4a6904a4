#pragma once

// Factorizations of the private alphabet into a two-coordinate grid
// X ~ (X1, X2). A separation assigns every symbol to a grid cell; row sums
// give the X1 marginal, column sums the X2 marginal. The search scans all
// factor-pair shapes (both orientations, each dimension >= 2; prime sizes
// get one zero-mass pad cell pinned to the last grid position) for the
// assignment minimizing revealed entropy plus the padded-coordinate field.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "pvlc/coding.hpp"
#include "pvlc/errors.hpp"
#include "pvlc/pmf.hpp"

namespace pvlc {

inline constexpr std::size_t kPadCell = SIZE_MAX;  // grid slot holding the zero-mass pad

struct SeparationShape {
  std::size_t rows = 0, cols = 0;
  bool padded = false;
};

// Unordered factor pairs r <= c with r, c >= 2; rc = n, or n+1 when n is prime.
inline std::vector<SeparationShape> enumerate_shapes(std::size_t n) {
  if (n < 2) fail(Errc::DomainError, "alphabet must have at least two symbols");
  auto is_prime = [](std::size_t m) {
    if (m < 2) return false;
    for (std::size_t d = 2; d * d <= m; ++d)
      if (m % d == 0) return false;
    return true;
  };
  bool padded = is_prime(n);
  std::size_t target = padded ? n + 1 : n;
  std::vector<SeparationShape> shapes;
  for (std::size_t r = 2; r * r <= target; ++r)
    if (target % r == 0 && target / r >= 2) shapes.push_back({r, target / r, padded});
  return shapes;
}

struct Separation {
  std::size_t n_rows = 0, n_cols = 0;
  std::vector<std::vector<std::size_t>> grid;  // [row][col] -> symbol index, or kPadCell
  bool padded = false;
};

inline void validate_separation(const Separation& s, std::size_t n_symbols) {
  if (s.n_rows < 2 || s.n_cols < 2)
    fail(Errc::BadSeparation, "both separation dimensions must be at least 2");
  std::size_t cells = s.n_rows * s.n_cols;
  std::size_t expect_pads = s.padded ? 1 : 0;
  if (cells != n_symbols + expect_pads)
    fail(Errc::BadSeparation, "grid size does not match the alphabet");
  if (s.grid.size() != s.n_rows) fail(Errc::BadSeparation, "grid row count mismatch");
  std::vector<bool> seen(n_symbols, false);
  std::size_t pads = 0;
  for (const auto& row : s.grid) {
    if (row.size() != s.n_cols) fail(Errc::BadSeparation, "grid column count mismatch");
    for (std::size_t v : row) {
      if (v == kPadCell) {
        ++pads;
        continue;
      }
      if (v >= n_symbols || seen[v]) fail(Errc::BadSeparation, "grid is not a bijection");
      seen[v] = true;
    }
  }
  if (pads != expect_pads) fail(Errc::BadSeparation, "wrong number of pad cells");
}

inline std::vector<double> row_masses(const Separation& s, const Pmf& px) {
  std::vector<double> m(s.n_rows, 0.0);
  for (std::size_t i = 0; i < s.n_rows; ++i)
    for (std::size_t v : s.grid[i])
      if (v != kPadCell) m[i] += px.probs[v];
  return m;
}

inline std::vector<double> col_masses(const Separation& s, const Pmf& px) {
  std::vector<double> m(s.n_cols, 0.0);
  for (std::size_t i = 0; i < s.n_rows; ++i)
    for (std::size_t jx = 0; jx < s.n_cols; ++jx)
      if (s.grid[i][jx] != kPadCell) m[jx] += px.probs[s.grid[i][jx]];
  return m;
}

// Objective H(revealed coordinate) + ceil(log2 |padded coordinate|).
inline double s1_objective(const Separation& s, const Pmf& px) {
  return entropy(std::span<const double>(row_masses(s, px))) +
         static_cast<double>(ceil_log2(s.n_cols));
}
inline double s2_objective(const Separation& s, const Pmf& px) {
  return entropy(std::span<const double>(col_masses(s, px))) +
         static_cast<double>(ceil_log2(s.n_rows));
}

// X2 is a function of X1 when every positive-mass row concentrates on one column.
inline bool separation_is_functional(const Separation& s, const Pmf& px) {
  for (std::size_t i = 0; i < s.n_rows; ++i) {
    int hits = 0;
    for (std::size_t jx = 0; jx < s.n_cols; ++jx) {
      std::size_t v = s.grid[i][jx];
      if (v != kPadCell && px.probs[v] > 0.0 && ++hits > 1) return false;
    }
  }
  return true;
}

// Relabels X onto the grid cells: lifted symbol (i,j) carries the original
// symbol's row of the joint; pad cells carry zero rows. Per-symbol conditional
// entropies and every marginal of Y are untouched by the lift.
inline JointDistribution lift_separation(const JointDistribution& j, const Separation& s) {
  validate_separation(s, j.nx());
  std::vector<std::string> x_labels;
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < s.n_rows; ++i)
    for (std::size_t c = 0; c < s.n_cols; ++c) {
      x_labels.push_back("(" + std::to_string(i) + "," + std::to_string(c) + ")");
      std::size_t v = s.grid[i][c];
      if (v == kPadCell) {
        rows.emplace_back(j.ny(), 0.0);
      } else {
        auto r = j.row(v);
        rows.emplace_back(r.begin(), r.end());
      }
    }
  return validate_joint(rows, std::move(x_labels), j.y_labels);
}

enum class SepSet { S1, S2 };  // entropy cap on X1 (rows revealed) vs on X2 (columns)
enum class SepSearchMode { Exhaustive, Greedy };

struct SeparationSearchResult {
  Separation best;
  double best_objective = std::numeric_limits<double>::infinity();
  double revealed_entropy = 0.0;   // H of the capped coordinate at the optimum
  std::size_t key_size = 0;        // cardinality of the padded coordinate
  std::size_t feasible_count = 0;
  std::size_t examined = 0;
  bool exhaustive = true;
};

namespace detail {

// Group-partition enumeration: items sorted by descending mass; each group
// anchored at the smallest remaining index, companions chosen in increasing
// order with equal-mass skips. `sizes[g]` is the size of group g.
struct PartitionSearch {
  const std::vector<double>& mass;          // by sorted position
  const std::vector<std::size_t>& item;     // sorted position -> original index
  std::vector<std::size_t> sizes;
  std::size_t budget;
  std::size_t examined = 0;
  std::vector<std::vector<std::size_t>> groups;  // positions
  std::vector<bool> used;

  template <typename Fn>
  void run(Fn&& on_partition) {
    groups.assign(sizes.size(), {});
    used.assign(mass.size(), false);
    recurse(0, on_partition);
  }

  template <typename Fn>
  void recurse(std::size_t g, Fn&& on_partition) {
    if (g == sizes.size()) {
      if (++examined > budget) fail(Errc::BudgetExceeded, "separation search budget exhausted");
      on_partition(groups);
      return;
    }
    std::size_t anchor = 0;
    while (anchor < mass.size() && used[anchor]) ++anchor;
    groups[g].assign(1, anchor);
    used[anchor] = true;
    pick(g, sizes[g] - 1, anchor + 1, on_partition);
    used[anchor] = false;
    groups[g].clear();
  }

  template <typename Fn>
  void pick(std::size_t g, std::size_t remaining, std::size_t from, Fn&& on_partition) {
    if (remaining == 0) {
      recurse(g + 1, on_partition);
      return;
    }
    double last = std::numeric_limits<double>::quiet_NaN();
    for (std::size_t i = from; i < mass.size(); ++i) {
      if (used[i] || mass[i] == last) continue;
      last = mass[i];
      used[i] = true;
      groups[g].push_back(i);
      pick(g, remaining - 1, i + 1, on_partition);
      groups[g].pop_back();
      used[i] = false;
    }
  }
};

inline Separation grid_from_groups(const std::vector<std::vector<std::size_t>>& groups,
                                   const std::vector<std::size_t>& item, std::size_t group_len,
                                   bool padded, std::size_t pad_group, bool groups_are_rows,
                                   std::size_t n_rows, std::size_t n_cols) {
  // Pad group moves to the end so the pad lands in the last grid cell.
  std::vector<std::vector<std::size_t>> ordered;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (padded && g == pad_group) continue;
    std::vector<std::size_t> grp;
    for (std::size_t pos : groups[g]) grp.push_back(item[pos]);
    std::sort(grp.begin(), grp.end());
    ordered.push_back(std::move(grp));
  }
  if (padded) {
    std::vector<std::size_t> grp;
    for (std::size_t pos : groups[pad_group]) grp.push_back(item[pos]);
    std::sort(grp.begin(), grp.end());
    grp.push_back(kPadCell);
    ordered.push_back(std::move(grp));
  }
  (void)group_len;
  Separation s;
  s.padded = padded;
  s.n_rows = n_rows;
  s.n_cols = n_cols;
  if (groups_are_rows) {
    s.grid = ordered;
  } else {
    // Groups are columns: transpose into row-major storage.
    s.grid.assign(n_rows, std::vector<std::size_t>(n_cols, kPadCell));
    for (std::size_t c = 0; c < ordered.size(); ++c)
      for (std::size_t r = 0; r < ordered[c].size(); ++r) s.grid[r][c] = ordered[c][r];
  }
  return s;
}

inline std::vector<std::vector<std::size_t>> canonical_key(const Separation& s) {
  std::vector<std::vector<std::size_t>> key = s.grid;
  for (auto& row : key) std::sort(row.begin(), row.end());
  std::sort(key.begin(), key.end());
  return key;
}

}  // namespace detail

// Scans every shape orientation whose revealed-coordinate entropy meets the
// cap and returns the assignment with the smallest objective. Ties break to
// the lexicographically smallest canonical grid. Exhaustive mode enumerates
// mass partitions (deduped over equal masses); greedy packs the largest
// masses together and hill-climbs with pairwise swaps, and is flagged
// non-optimal in the result.
inline SeparationSearchResult search_separations(const Pmf& px, double eps, SepSet which,
                                                 SepSearchMode mode = SepSearchMode::Exhaustive,
                                                 std::size_t budget = 200000) {
  if (eps < -kInfoTol) fail(Errc::EpsOutOfRange, "entropy cap must be nonnegative");
  std::vector<SeparationShape> shapes = enumerate_shapes(px.size());
  SeparationSearchResult best;
  best.exhaustive = (mode == SepSearchMode::Exhaustive);
  std::vector<std::vector<std::size_t>> best_key;

  std::vector<std::size_t> item(px.size());
  for (std::size_t i = 0; i < item.size(); ++i) item[i] = i;
  std::sort(item.begin(), item.end(), [&](std::size_t a, std::size_t b) {
    if (px.probs[a] != px.probs[b]) return px.probs[a] > px.probs[b];
    return a < b;
  });
  std::vector<double> mass(px.size());
  for (std::size_t i = 0; i < item.size(); ++i) mass[i] = px.probs[item[i]];

  auto consider = [&](Separation&& s) {
    double revealed = which == SepSet::S1
                          ? entropy(std::span<const double>(row_masses(s, px)))
                          : entropy(std::span<const double>(col_masses(s, px)));
    if (revealed > eps + kInfoTol) return;
    double obj = which == SepSet::S1 ? s1_objective(s, px) : s2_objective(s, px);
    ++best.feasible_count;
    auto key = detail::canonical_key(s);
    if (obj < best.best_objective - 1e-12 ||
        (obj <= best.best_objective + 1e-12 && (best_key.empty() || key < best_key))) {
      best.best_objective = obj;
      best.revealed_entropy = revealed;
      best.key_size = which == SepSet::S1 ? s.n_cols : s.n_rows;
      best.best = std::move(s);
      best_key = std::move(key);
    }
  };

  for (const SeparationShape& shape : shapes) {
    std::vector<std::pair<std::size_t, std::size_t>> orientations{{shape.rows, shape.cols}};
    if (shape.rows != shape.cols) orientations.push_back({shape.cols, shape.rows});
    for (auto [r, c] : orientations) {
      // The capped coordinate's groups drive the objective: rows for S1,
      // columns for S2. Either way we partition into `ng` groups of `len`.
      bool groups_are_rows = (which == SepSet::S1);
      std::size_t ng = groups_are_rows ? r : c;
      std::size_t len = groups_are_rows ? c : r;

      if (mode == SepSearchMode::Exhaustive) {
        detail::PartitionSearch ps{mass, item, {}, budget, best.examined, {}, {}};
        ps.sizes.assign(ng, len);
        std::size_t pad_group = ng;  // none
        if (shape.padded) {
          pad_group = ng - 1;
          ps.sizes[pad_group] = len - 1;  // pad fills the missing slot
          if (len == 1) continue;         // a pad-only group cannot happen with dims >= 2
        }
        ps.run([&](const std::vector<std::vector<std::size_t>>& groups) {
          consider(detail::grid_from_groups(groups, item, len, shape.padded, pad_group,
                                            groups_are_rows, r, c));
        });
        best.examined = ps.examined;
      } else {
        // Greedy: chunk the sorted masses, then local pairwise swaps.
        std::vector<std::vector<std::size_t>> groups(ng);
        std::size_t slots = ng * len - (shape.padded ? 1 : 0);
        for (std::size_t pos = 0; pos < slots; ++pos) groups[pos / len].push_back(pos);
        std::size_t pad_group = shape.padded ? ng - 1 : ng;
        auto group_entropy = [&] {
          std::vector<double> g(ng, 0.0);
          for (std::size_t gi = 0; gi < ng; ++gi)
            for (std::size_t pos : groups[gi]) g[gi] += mass[pos];
          return entropy(std::span<const double>(g));
        };
        bool improved = true;
        int rounds = 0;
        while (improved && ++rounds < 64) {
          improved = false;
          double cur = group_entropy();
          for (std::size_t ga = 0; ga < ng && !improved; ++ga)
            for (std::size_t gb = ga + 1; gb < ng && !improved; ++gb)
              for (std::size_t ia = 0; ia < groups[ga].size() && !improved; ++ia)
                for (std::size_t ib = 0; ib < groups[gb].size() && !improved; ++ib) {
                  std::swap(groups[ga][ia], groups[gb][ib]);
                  if (group_entropy() < cur - 1e-12) {
                    improved = true;
                  } else {
                    std::swap(groups[ga][ia], groups[gb][ib]);
                  }
                }
          ++best.examined;
        }
        consider(detail::grid_from_groups(groups, item, len, shape.padded, pad_group,
                                          groups_are_rows, r, c));
      }
    }
  }
  if (!std::isfinite(best.best_objective))
    fail(Errc::EmptyFeasibleSet, "no separation meets the entropy cap");
  return best;
}

// Deterministic functional arrangement: every positive symbol gets its own
// row (so the column is a function of the row), zero-mass symbols fill the
// remaining cells. Picks the shape with the fewest rows covering the
// support, which keeps the key short.
inline Separation auto_functional_separation(const Pmf& px) {
  const std::size_t n = px.probs.size();
  std::vector<std::size_t> positive, zero;
  for (std::size_t i = 0; i < n; ++i) (px.probs[i] > 0.0 ? positive : zero).push_back(i);
  SeparationShape chosen{0, 0, false};
  for (const SeparationShape& sh : enumerate_shapes(n))
    for (auto [r, c] : {std::pair{sh.rows, sh.cols}, std::pair{sh.cols, sh.rows}}) {
      // a padded grid keeps its pad in the last row, which must stay usable
      if (r < positive.size()) continue;
      if (chosen.rows == 0 || r < chosen.rows || (r == chosen.rows && c < chosen.cols))
        chosen = SeparationShape{r, c, sh.padded};
    }
  if (chosen.rows == 0)
    fail(Errc::NotFunctional, "no grid offers one row per positive symbol");
  Separation s;
  s.n_rows = chosen.rows;
  s.n_cols = chosen.cols;
  s.padded = chosen.padded;
  s.grid.assign(s.n_rows, std::vector<std::size_t>(s.n_cols, kPadCell));
  for (std::size_t i = 0; i < positive.size(); ++i) s.grid[i][0] = positive[i];
  std::size_t zi = 0;
  for (std::size_t r = 0; r < s.n_rows; ++r)
    for (std::size_t c = 0; c < s.n_cols; ++c) {
      if (s.grid[r][c] != kPadCell) continue;
      if (chosen.padded && r == s.n_rows - 1 && c == s.n_cols - 1) continue;  // pad cell
      if (zi < zero.size()) s.grid[r][c] = zero[zi++];
    }
  validate_separation(s, n);
  return s;
}

}  // namespace pvlc
