#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace qdiff {

// A permutation of {1, ..., k} together with its boundary extension
// sig~(0) = 0, sig~(k+1) = k+1 used throughout the graph machinery.
class Permutation {
public:
    Permutation() = default;

    // images[j-1] = sigma(j), 1-based values.
    explicit Permutation(std::vector<int> images);

    static Permutation identity(int k);

    // Parse "3 1 2" or "3,1,2".
    static Permutation parse(const std::string& text);

    int k() const { return k_; }

    // sigma(j) for 1 <= j <= k.
    int operator()(int j) const { return img_[static_cast<size_t>(j)]; }

    // Extension: ext(0) = 0, ext(k+1) = k+1, ext(j) = sigma(j) otherwise.
    int ext(int j) const {
        if (j == 0) return 0;
        if (j == k_ + 1) return k_ + 1;
        return img_[static_cast<size_t>(j)];
    }

    // inverse(i) for 1 <= i <= k; extended version maps 0->0, k+1->k+1.
    int inv(int i) const { return inv_[static_cast<size_t>(i)]; }
    int ext_inv(int i) const {
        if (i == 0) return 0;
        if (i == k_ + 1) return k_ + 1;
        return inv_[static_cast<size_t>(i)];
    }

    Permutation inverse() const;
    bool is_identity() const;

    bool operator==(const Permutation& o) const { return img_ == o.img_; }

    std::string to_string() const;

    const std::vector<int>& images() const { return img_; }

private:
    int k_ = 0;
    std::vector<int> img_;  // img_[j] = sigma(j), index 0 unused
    std::vector<int> inv_;  // inv_[i] = sigma^{-1}(i), index 0 unused
};

// Visit every permutation of {1..k} in lexicographic order.  Throws
// BudgetExceeded if k! would exceed `budget` (guards accidental k >= 13).
void for_each_permutation(int k, const std::function<void(const Permutation&)>& visit,
                          uint64_t budget = 500000000ull);

uint64_t factorial(int k);

}  // namespace qdiff
