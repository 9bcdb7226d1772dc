#include "qdiff/permutation.hpp"

#include <algorithm>
#include <sstream>

#include "qdiff/errors.hpp"

namespace qdiff {

Permutation::Permutation(std::vector<int> images) {
    k_ = static_cast<int>(images.size());
    img_.assign(static_cast<size_t>(k_) + 1, 0);
    inv_.assign(static_cast<size_t>(k_) + 1, 0);
    std::vector<bool> seen(static_cast<size_t>(k_) + 1, false);
    for (int j = 1; j <= k_; ++j) {
        const int v = images[static_cast<size_t>(j - 1)];
        if (v < 1 || v > k_ || seen[static_cast<size_t>(v)]) {
            throw ConfigInvalid("not a permutation of 1..k");
        }
        seen[static_cast<size_t>(v)] = true;
        img_[static_cast<size_t>(j)] = v;
        inv_[static_cast<size_t>(v)] = j;
    }
}

Permutation Permutation::identity(int k) {
    std::vector<int> im(static_cast<size_t>(k));
    for (int j = 1; j <= k; ++j) im[static_cast<size_t>(j - 1)] = j;
    return Permutation(std::move(im));
}

Permutation Permutation::parse(const std::string& text) {
    std::string cleaned = text;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream in(cleaned);
    std::vector<int> im;
    int v;
    while (in >> v) im.push_back(v);
    if (im.empty()) throw ConfigInvalid("empty permutation string");
    return Permutation(std::move(im));
}

Permutation Permutation::inverse() const {
    std::vector<int> im(static_cast<size_t>(k_));
    for (int i = 1; i <= k_; ++i) im[static_cast<size_t>(i - 1)] = inv_[static_cast<size_t>(i)];
    return Permutation(std::move(im));
}

bool Permutation::is_identity() const {
    for (int j = 1; j <= k_; ++j)
        if (img_[static_cast<size_t>(j)] != j) return false;
    return true;
}

std::string Permutation::to_string() const {
    std::ostringstream out;
    for (int j = 1; j <= k_; ++j) {
        if (j > 1) out << ' ';
        out << img_[static_cast<size_t>(j)];
    }
    return out.str();
}

uint64_t factorial(int k) {
    uint64_t f = 1;
    for (int i = 2; i <= k; ++i) f *= static_cast<uint64_t>(i);
    return f;
}

void for_each_permutation(int k, const std::function<void(const Permutation&)>& visit,
                          uint64_t budget) {
    if (k < 0 || k > 20) throw ConfigInvalid("permutation size out of range");
    if (factorial(k) > budget) throw BudgetExceeded("k! exceeds enumeration budget");
    if (k == 0) {
        visit(Permutation(std::vector<int>{}));
        return;
    }
    std::vector<int> im(static_cast<size_t>(k));
    for (int j = 0; j < k; ++j) im[static_cast<size_t>(j)] = j + 1;
    do {
        visit(Permutation(im));
    } while (std::next_permutation(im.begin(), im.end()));
}

}  // namespace qdiff
