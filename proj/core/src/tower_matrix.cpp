#include "qdiff/tower_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qdiff/errors.hpp"
#include "qdiff/rng.hpp"

namespace qdiff {

std::vector<int> TowerMatrix::row(int i) const {
    std::vector<int> r(static_cast<size_t>(n_) + 1, 0);
    for (int j = 1; j <= n_; ++j) r[static_cast<size_t>(j)] = (*this)(i, j);
    return r;
}

std::vector<int> TowerMatrix::apply(const std::vector<int>& x) const {
    std::vector<int> y(static_cast<size_t>(n_) + 1, 0);
    for (int i = 1; i <= n_; ++i) {
        int s = 0;
        for (int j = 1; j <= n_; ++j) s += (*this)(i, j) * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = s;
    }
    return y;
}

std::vector<double> TowerMatrix::apply(const std::vector<double>& x) const {
    std::vector<double> y(static_cast<size_t>(n_) + 1, 0.0);
    for (int i = 1; i <= n_; ++i) {
        double s = 0;
        for (int j = 1; j <= n_; ++j) s += (*this)(i, j) * x[static_cast<size_t>(j)];
        y[static_cast<size_t>(i)] = s;
    }
    return y;
}

TowerMatrix TowerMatrix::multiply(const TowerMatrix& o) const {
    TowerMatrix r(n_);
    for (int i = 1; i <= n_; ++i)
        for (int j = 1; j <= n_; ++j) {
            int s = 0;
            for (int l = 1; l <= n_; ++l) s += (*this)(i, l) * o(l, j);
            if (s < -127 || s > 127) throw Error("matrix product entry overflow");
            r.set(i, j, s);
        }
    return r;
}

bool TowerMatrix::is_identity() const {
    for (int i = 1; i <= n_; ++i)
        for (int j = 1; j <= n_; ++j)
            if ((*this)(i, j) != (i == j ? 1 : 0)) return false;
    return true;
}

long long TowerMatrix::determinant() const {
    std::vector<long long> m(static_cast<size_t>(n_) * n_);
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j)
            m[static_cast<size_t>(i) * n_ + j] = (*this)(i + 1, j + 1);
    long long prev = 1;
    int sign = 1;
    for (int c = 0; c < n_ - 1; ++c) {
        if (m[static_cast<size_t>(c) * n_ + c] == 0) {
            int swap_row = -1;
            for (int r = c + 1; r < n_; ++r)
                if (m[static_cast<size_t>(r) * n_ + c] != 0) {
                    swap_row = r;
                    break;
                }
            if (swap_row < 0) return 0;
            for (int j = 0; j < n_; ++j)
                std::swap(m[static_cast<size_t>(c) * n_ + j],
                          m[static_cast<size_t>(swap_row) * n_ + j]);
            sign = -sign;
        }
        for (int r = c + 1; r < n_; ++r) {
            for (int j = c + 1; j < n_; ++j) {
                m[static_cast<size_t>(r) * n_ + j] =
                    (m[static_cast<size_t>(r) * n_ + j] * m[static_cast<size_t>(c) * n_ + c] -
                     m[static_cast<size_t>(r) * n_ + c] * m[static_cast<size_t>(c) * n_ + j]) /
                    prev;
            }
            m[static_cast<size_t>(r) * n_ + c] = 0;
        }
        prev = m[static_cast<size_t>(c) * n_ + c];
    }
    return sign * m[static_cast<size_t>(n_ - 1) * n_ + (n_ - 1)];
}

std::string TowerMatrix::to_string() const {
    std::ostringstream out;
    for (int i = 1; i <= n_; ++i) {
        for (int j = 1; j <= n_; ++j) {
            const int v = (*this)(i, j);
            out << (v < 0 ? "" : " ") << v << (j < n_ ? " " : "");
        }
        out << '\n';
    }
    return out.str();
}

TowerMatrix tower_matrix(const Permutation& sigma) {
    const int n = sigma.k() + 1;
    TowerMatrix M(n);
    for (int j = 1; j <= n; ++j) {
        const int lo = sigma.ext(j - 1);
        const int hi = sigma.ext(j);
        if (hi > lo) {
            for (int i = lo + 1; i <= hi; ++i) M.set(i, j, 1);
        } else {
            for (int i = hi + 1; i <= lo; ++i) M.set(i, j, -1);
        }
    }
    return M;
}

std::vector<Tower> towers(const TowerMatrix& M) {
    std::vector<Tower> out;
    for (int j = 1; j <= M.n(); ++j) {
        Tower t;
        t.col = j;
        t.top = 0;
        for (int i = 1; i <= M.n(); ++i) {
            const int v = M(i, j);
            if (v != 0) {
                if (t.top == 0) {
                    t.top = i;
                    t.sign = v;
                }
                t.bottom = i;
            }
        }
        if (t.top == 0) throw Error("empty column in tower matrix");
        out.push_back(t);
    }
    return out;
}

namespace {

long long minor_det(const TowerMatrix& M, const std::vector<int>& rows,
                    const std::vector<int>& cols) {
    const int m = static_cast<int>(rows.size());
    std::vector<long long> a(static_cast<size_t>(m) * m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            a[static_cast<size_t>(i) * m + j] = M(rows[static_cast<size_t>(i)],
                                                  cols[static_cast<size_t>(j)]);
    long long prev = 1;
    int sign = 1;
    for (int c = 0; c < m - 1; ++c) {
        if (a[static_cast<size_t>(c) * m + c] == 0) {
            int sr = -1;
            for (int r = c + 1; r < m; ++r)
                if (a[static_cast<size_t>(r) * m + c] != 0) {
                    sr = r;
                    break;
                }
            if (sr < 0) return 0;
            for (int j = 0; j < m; ++j)
                std::swap(a[static_cast<size_t>(c) * m + j], a[static_cast<size_t>(sr) * m + j]);
            sign = -sign;
        }
        for (int r = c + 1; r < m; ++r) {
            for (int j = c + 1; j < m; ++j)
                a[static_cast<size_t>(r) * m + j] =
                    (a[static_cast<size_t>(r) * m + j] * a[static_cast<size_t>(c) * m + c] -
                     a[static_cast<size_t>(r) * m + c] * a[static_cast<size_t>(c) * m + j]) /
                    prev;
            a[static_cast<size_t>(r) * m + c] = 0;
        }
        prev = a[static_cast<size_t>(c) * m + c];
    }
    return sign * a[static_cast<size_t>(m - 1) * m + (m - 1)];
}

uint64_t choose(int n, int k) {
    if (k < 0 || k > n) return 0;
    uint64_t r = 1;
    for (int i = 1; i <= k; ++i) r = r * static_cast<uint64_t>(n - k + i) / static_cast<uint64_t>(i);
    return r;
}

// Visit all k-subsets of {1..n}.
template <typename F>
void for_each_subset(int n, int k, F&& f) {
    std::vector<int> idx(static_cast<size_t>(k));
    std::iota(idx.begin(), idx.end(), 1);
    for (;;) {
        f(idx);
        int i = k - 1;
        while (i >= 0 && idx[static_cast<size_t>(i)] == n - (k - 1 - i)) --i;
        if (i < 0) return;
        ++idx[static_cast<size_t>(i)];
        for (int j = i + 1; j < k; ++j)
            idx[static_cast<size_t>(j)] = idx[static_cast<size_t>(j - 1)] + 1;
    }
}

}  // namespace

UnimodularityReport unimodularity_check(const TowerMatrix& M, uint64_t budget,
                                        uint64_t samples, uint64_t seed) {
    UnimodularityReport rep;
    const int n = M.n();
    uint64_t total = 0;
    for (int m = 1; m <= n; ++m) {
        const uint64_t c = choose(n, m);
        total += c * c;
    }
    if (total <= budget) {
        for (int m = 1; m <= n && rep.totally_unimodular; ++m) {
            std::vector<std::vector<int>> row_sets;
            for_each_subset(n, m, [&](const std::vector<int>& s) { row_sets.push_back(s); });
            for (const auto& rows : row_sets) {
                for_each_subset(n, m, [&](const std::vector<int>& cols) {
                    const long long d = minor_det(M, rows, cols);
                    ++rep.checked;
                    if (d < -1 || d > 1) {
                        rep.totally_unimodular = false;
                        rep.worst_minor = d;
                    }
                });
                if (!rep.totally_unimodular) break;
            }
        }
        return rep;
    }
    // Sampled mode for large matrices: `samples` random minors per order.
    RngStream rng(seed, 0);
    for (int m = 1; m <= n; ++m) {
        for (uint64_t s = 0; s < samples; ++s) {
            std::vector<int> rows, cols, pool(static_cast<size_t>(n));
            std::iota(pool.begin(), pool.end(), 1);
            for (int i = 0; i < m; ++i) {
                const int pick = i + static_cast<int>(rng.next_u32() % static_cast<uint32_t>(n - i));
                std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(pick)]);
            }
            rows.assign(pool.begin(), pool.begin() + m);
            std::sort(rows.begin(), rows.end());
            std::iota(pool.begin(), pool.end(), 1);
            for (int i = 0; i < m; ++i) {
                const int pick = i + static_cast<int>(rng.next_u32() % static_cast<uint32_t>(n - i));
                std::swap(pool[static_cast<size_t>(i)], pool[static_cast<size_t>(pick)]);
            }
            cols.assign(pool.begin(), pool.begin() + m);
            std::sort(cols.begin(), cols.end());
            const long long d = minor_det(M, rows, cols);
            ++rep.checked;
            ++rep.sampled;
            if (d < -1 || d > 1) {
                rep.totally_unimodular = false;
                rep.worst_minor = d;
                return rep;
            }
        }
    }
    return rep;
}

}  // namespace qdiff
