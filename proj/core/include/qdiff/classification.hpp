#pragma once

#include <string>
#include <vector>

#include "qdiff/permutation.hpp"
#include "qdiff/tower_matrix.hpp"

namespace qdiff {

enum class RowClass { Peak, Valley, Ladder, Slope, Last };

const char* row_class_name(RowClass c);

// A maximal run of consecutive ladder row indices first..last, together with
// its top index (just above the run, never a ladder index, may be 0) and its
// bottom index (last, or last+1 when the step below continues the staircase).
struct LadderRun {
    int first = 0;
    int last = 0;
    int top = 0;
    int bottom = 0;
    int length() const { return last - first + 1; }
};

// Complete combinatorial profile of one permutation: row classes of the
// associated tower matrix, ladder runs, pivot columns and the covered /
// uncovered split of the slope indices.
struct IndexClassification {
    int k = 0;
    std::vector<RowClass> row_class;  // index 1..k+1

    std::vector<int> peaks;      // I_p
    std::vector<int> valleys;    // I_v
    std::vector<int> ladders;    // I_l
    std::vector<int> slopes;     // I_s
    int degree = 0;              // k - |I_l|

    std::vector<LadderRun> runs;
    std::vector<int> tops;     // I_t
    std::vector<int> bottoms;  // I_b

    // pivot[i] = c(i) for i not a peak; 0 for peaks.  For valleys,
    // pivot_other[i] = the companion column c~(i); 0 otherwise.
    std::vector<int> pivot;
    std::vector<int> pivot_other;

    // Elements of I_v and I_s in increasing order, and the covered split.
    std::vector<int> chain;
    std::vector<int> covered_slopes;    // I_cs
    std::vector<int> uncovered_slopes;  // I_us

    bool is_peak(int i) const { return row_class[static_cast<size_t>(i)] == RowClass::Peak; }
    bool is_valley(int i) const { return row_class[static_cast<size_t>(i)] == RowClass::Valley; }
    bool is_ladder(int i) const { return row_class[static_cast<size_t>(i)] == RowClass::Ladder; }
    bool is_slope(int i) const { return row_class[static_cast<size_t>(i)] == RowClass::Slope; }
};

// Classify all row indices of M(sigma) and derive pivots and coverage.
// Structural identities that must hold for every permutation (equal peak and
// valley counts, unique pivots, no top ties at valleys, pivot towers of
// length >= 2 at slopes and valleys) are verified and throw Error on failure.
IndexClassification classify(const Permutation& sigma);

// Internal ladder indices: ladders whose both neighbours above and below sit
// at adjacent positions, |ext_inv(i-1)-ext_inv(i)| = |ext_inv(i+1)-ext_inv(i)| = 1.
std::vector<int> internal_ladder_indices(const Permutation& sigma);

std::string to_json(const Permutation& sigma, const IndexClassification& c);

}  // namespace qdiff
