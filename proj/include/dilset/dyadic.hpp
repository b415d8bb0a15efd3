#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "dilset/errors.hpp"

namespace dilset {

// Everything lives on dyadic grids over [1,2].  The depth-j cell with index n
// is the half-open interval I(n,j) = [n*2^-j, (n+1)*2^-j); valid indices are
// 2^j <= n <= 2^(j+1), the last cell [2, 2+2^-j) being allowed so that closed
// constructions can keep the right endpoint 2.

inline constexpr int kDefaultDepthBudget = 40;

// Half-open range of cell indices.
struct Run {
    std::int64_t begin = 0;
    std::int64_t end = 0;

    friend bool operator==(const Run&, const Run&) = default;
};

// A finite-resolution subset of [1,2]: a union of depth-j cells stored as
// sorted, disjoint, non-adjacent index runs.  Immutable after construction.
class DyadicSet {
public:
    DyadicSet() = default;
    explicit DyadicSet(int depth);
    DyadicSet(int depth, std::vector<Run> runs);

    int depth() const { return depth_; }
    const std::vector<Run>& runs() const { return runs_; }
    bool empty() const { return runs_.empty(); }
    std::int64_t cell_count() const;
    bool contains_cell(std::int64_t n) const;

    static std::int64_t first_index(int depth) { return std::int64_t{1} << depth; }
    // Index of the cell whose left endpoint is 2.
    static std::int64_t closing_index(int depth) { return std::int64_t{2} << depth; }

    friend bool operator==(const DyadicSet&, const DyadicSet&) = default;

private:
    int depth_ = 0;
    std::vector<Run> runs_;
};

// Dyadic subinterval of [1,2]: [index*2^-level, (index+1)*2^-level) with
// 2^level <= index < 2^(level+1).  The rightmost window of each level is
// treated as closed at 2, i.e. it absorbs the closing cell.
struct DyadicWindow {
    int level = 0;
    std::int64_t index = 1;

    bool is_rightmost() const { return index == (std::int64_t{2} << level) - 1; }
    friend bool operator==(const DyadicWindow&, const DyadicWindow&) = default;
};

DyadicWindow whole_domain_window();
void validate_window(const DyadicWindow& w);

// Grid-aligned covering number N(S, 2^-j'): depth-j' cells meeting S.  The
// closing cell maps onto the coarse closing cell.  Brackets the sliding
// covering number within a factor 2.
std::int64_t covering_number(const DyadicSet& s, int coarse_depth);

// The runs of depth-j' cells meeting S (what covering_number counts).
std::vector<Run> coarse_runs(const DyadicSet& s, int coarse_depth);

// Cells of S inside the window, at unchanged depth.
DyadicSet restrict_to(const DyadicSet& s, const DyadicWindow& w);

DyadicSet set_union(const DyadicSet& a, const DyadicSet& b);

// Exact rendering of x -> 1 + 2^-(l+1) * x, mapping the depth-j grid onto the
// depth-(j+l+1) grid.
DyadicSet affine_embed(const DyadicSet& s, int l, int depth_budget = kDefaultDepthBudget);

// Streaming max of per-window cell counts at a given window level, over the
// coarse grid `coarse_depth`.  Emission is ordered by window index; the first
// maximizer wins.  Used by the characteristic and spectrum sweeps.
struct WindowCount {
    std::int64_t index = 0;
    std::int64_t count = 0;
};
WindowCount max_window_count(const std::vector<Run>& cells, int coarse_depth, int level);

// DYSET v1 text format (bit-exact, no floats):
//   DYSET v1
//   depth <j>
//   runs <count>
//   <begin> <end>      (one per run, sorted)
std::string serialize(const DyadicSet& s);
DyadicSet deserialize(const std::string& text);
void save_dyset(const DyadicSet& s, const std::string& path);
DyadicSet load_dyset(const std::string& path);

}  // namespace dilset
