#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdiff/permutation.hpp"

namespace qdiff {

// (k+1) x (k+1) integer matrix over {-1, 0, +1} encoding how the relabelling
// permutation rewires momenta.  Column j carries a contiguous run ("tower")
// of +1 entries on rows ext(j-1) < i <= ext(j) when ext(j) > ext(j-1), or of
// -1 entries on rows ext(j) < i <= ext(j-1) otherwise.
struct Tower {
    int col = 0;    // 1-based column index
    int top = 0;    // smallest row index carrying a nonzero (t(j))
    int bottom = 0; // largest row index carrying a nonzero (b(j))
    int sign = 0;   // common sign of the column's entries
    int length() const { return bottom - top + 1; }
};

class TowerMatrix {
public:
    TowerMatrix() = default;
    explicit TowerMatrix(int n) : n_(n), a_(static_cast<size_t>(n) * n, 0) {}

    int n() const { return n_; }

    int operator()(int i, int j) const {  // 1-based
        return a_[idx(i, j)];
    }
    void set(int i, int j, int v) { a_[idx(i, j)] = static_cast<int8_t>(v); }

    std::vector<int> row(int i) const;
    std::vector<int> apply(const std::vector<int>& x) const;   // M x, 1-based input
    std::vector<double> apply(const std::vector<double>& x) const;

    TowerMatrix multiply(const TowerMatrix& o) const;
    bool is_identity() const;

    // Exact determinant by fraction-free (Bareiss) elimination.
    long long determinant() const;

    std::string to_string() const;

private:
    size_t idx(int i, int j) const {
        return static_cast<size_t>(i - 1) * static_cast<size_t>(n_) +
               static_cast<size_t>(j - 1);
    }
    int n_ = 0;
    std::vector<int8_t> a_;
};

// Build M(sigma): M_ij = +1 if ext(j-1) < i <= ext(j),
//                 -1 if ext(j) < i <= ext(j-1), else 0.
TowerMatrix tower_matrix(const Permutation& sigma);

// Column towers (positions and signs of each column's nonzero run).
std::vector<Tower> towers(const TowerMatrix& M);

struct UnimodularityReport {
    uint64_t checked = 0;       // number of square submatrices inspected
    uint64_t sampled = 0;       // how many of those were random samples
    bool totally_unimodular = true;
    long long worst_minor = 0;  // a determinant outside {-1,0,1} if found
};

// Check that every square minor of M lies in {-1, 0, +1}.  All minors are
// enumerated while their count stays within `budget`; otherwise `samples`
// random minors per order are drawn with the given seed.
UnimodularityReport unimodularity_check(const TowerMatrix& M,
                                        uint64_t budget = 10000000ull,
                                        uint64_t samples = 100000ull,
                                        uint64_t seed = 12345ull);

}  // namespace qdiff
