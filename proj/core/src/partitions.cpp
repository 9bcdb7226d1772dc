#include "qdiff/partitions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "qdiff/classification.hpp"
#include "qdiff/errors.hpp"

namespace qdiff {

// ---- Partition basics ----------------------------------------------------

Partition Partition::trivial_pairs(int n) {
    Partition p;
    p.n = n;
    for (int i = 1; i <= n; ++i) p.lumps.push_back({i});
    return p;
}

Partition Partition::parse(const std::string& text, int n) {
    Partition p;
    p.n = n;
    std::vector<int> cur;
    bool in_lump = false;
    int depth = 0;
    std::string num;
    const auto flush_num = [&]() {
        if (!num.empty()) {
            cur.push_back(std::stoi(num));
            num.clear();
        }
    };
    for (char ch : text) {
        if (ch == '[') {
            ++depth;
            if (depth == 2) {
                in_lump = true;
                cur.clear();
            }
        } else if (ch == ']') {
            flush_num();
            if (depth == 2 && in_lump) {
                p.lumps.push_back(cur);
                in_lump = false;
            }
            --depth;
        } else if (ch == ',' || ch == ' ') {
            flush_num();
        } else if (ch >= '0' && ch <= '9') {
            num.push_back(ch);
        } else {
            throw ConfigInvalid("bad partition literal");
        }
    }
    p.canonicalize();
    p.validate();
    return p;
}

void Partition::validate() const {
    std::vector<int> seen(static_cast<size_t>(n) + 1, 0);
    for (const auto& lump : lumps) {
        if (lump.empty()) throw ConfigInvalid("empty lump");
        for (int e : lump) {
            if (e < 1 || e > n) throw ConfigInvalid("lump element out of range");
            if (seen[static_cast<size_t>(e)]++) throw ConfigInvalid("duplicate element in partition");
        }
    }
    for (int e = 1; e <= n; ++e)
        if (!seen[static_cast<size_t>(e)]) throw ConfigInvalid("partition does not cover ground set");
}

void Partition::canonicalize() {
    for (auto& lump : lumps) std::sort(lump.begin(), lump.end());
    std::sort(lumps.begin(), lumps.end(),
              [](const std::vector<int>& a, const std::vector<int>& b) {
                  return a.front() < b.front();
              });
}

int Partition::lump_of(int element) const {
    for (size_t b = 0; b < lumps.size(); ++b)
        for (int e : lumps[b])
            if (e == element) return static_cast<int>(b);
    throw ConfigInvalid("element not in partition");
}

std::string Partition::to_string() const {
    std::ostringstream out;
    out << '[';
    for (size_t b = 0; b < lumps.size(); ++b) {
        if (b) out << ',';
        out << '[';
        for (size_t i = 0; i < lumps[b].size(); ++i) {
            if (i) out << ',';
            out << lumps[b][i];
        }
        out << ']';
    }
    out << ']';
    return out.str();
}

std::vector<int> Partition::nontrivial_support() const {
    std::vector<int> s;
    for (const auto& lump : lumps)
        if (lump.size() >= 2) s.insert(s.end(), lump.begin(), lump.end());
    std::sort(s.begin(), s.end());
    return s;
}

// ---- Even partitions ------------------------------------------------------

void EvenPartition::validate_even() const {
    part.validate();
    if (part.n != 2 * k) throw NotEven("even partition must live on 2k elements");
    for (const auto& lump : part.lumps) {
        int left = 0, right = 0;
        for (int e : lump) (e <= k ? left : right)++;
        if (left != right) throw NotEven("lump has unequal plain/tilde halves");
        if (lump.size() < 2) throw NotEven("single lump in an even partition");
    }
}

Partition EvenPartition::projection() const {
    Partition A;
    A.n = k;
    for (const auto& lump : part.lumps) {
        std::vector<int> left;
        for (int e : lump)
            if (e <= k) left.push_back(e);
        if (!left.empty()) A.lumps.push_back(left);
    }
    A.canonicalize();
    A.validate();
    return A;
}

// ---- Enumeration ----------------------------------------------------------

uint64_t bell_number(int n) {
    if (n < 0 || n > 25) throw BudgetExceeded("Bell number out of range");
    // Bell triangle.
    std::vector<uint64_t> row = {1};
    for (int i = 1; i <= n; ++i) {
        std::vector<uint64_t> next(static_cast<size_t>(i) + 1);
        next[0] = row.back();
        for (int j = 1; j <= i; ++j) next[static_cast<size_t>(j)] =
            next[static_cast<size_t>(j - 1)] + row[static_cast<size_t>(j - 1)];
        row = std::move(next);
    }
    return row.front();
}

void for_each_partition(int n, const std::function<void(const Partition&)>& visit,
                        int cap) {
    if (n < 1) throw ConfigInvalid("partition ground set must be nonempty");
    if (n > cap) throw BudgetExceeded("partition enumeration above configured cap");
    // Restricted growth strings: a[0] = 0 and a[i] <= 1 + max(a[0..i-1]).
    std::vector<int> a(static_cast<size_t>(n), 0);
    const auto emit = [&]() {
        Partition p;
        p.n = n;
        const int nb = *std::max_element(a.begin(), a.end()) + 1;
        p.lumps.assign(static_cast<size_t>(nb), {});
        for (int i = 0; i < n; ++i)
            p.lumps[static_cast<size_t>(a[static_cast<size_t>(i)])].push_back(i + 1);
        visit(p);
    };
    for (;;) {
        emit();
        // rightmost position that can still grow: a[i] <= max(a[0..i-1])
        int i = n - 1;
        for (; i >= 1; --i) {
            int mx = 0;
            for (int j = 0; j < i; ++j) mx = std::max(mx, a[static_cast<size_t>(j)]);
            if (a[static_cast<size_t>(i)] <= mx) break;
        }
        if (i < 1) return;
        ++a[static_cast<size_t>(i)];
        for (int j = i + 1; j < n; ++j) a[static_cast<size_t>(j)] = 0;
    }
}

void for_each_even_partition(int k,
                             const std::function<void(const EvenPartition&)>& visit,
                             int cap) {
    if (k > cap) throw BudgetExceeded("even-partition enumeration above cap");
    for_each_partition(2 * k, [&](const Partition& p) {
        for (const auto& lump : p.lumps) {
            int left = 0, right = 0;
            for (int e : lump) (e <= k ? left : right)++;
            if (left != right) return;
        }
        EvenPartition ep;
        ep.k = k;
        ep.part = p;
        visit(ep);
    }, 2 * cap);
}

// ---- Compatible permutations ----------------------------------------------

uint64_t compatible_count(const EvenPartition& P) {
    P.validate_even();
    uint64_t c = 1;
    for (const auto& lump : P.part.lumps) c *= factorial(static_cast<int>(lump.size()) / 2);
    return c;
}

namespace {

// Left/right halves of every lump (tilde labels decoded to 1..k).
struct LumpHalves {
    std::vector<std::vector<int>> left, right;
};

LumpHalves halves(const EvenPartition& P) {
    LumpHalves h;
    for (const auto& lump : P.part.lumps) {
        std::vector<int> l, r;
        for (int e : lump) (e <= P.k ? l : r).push_back(e <= P.k ? e : e - P.k);
        h.left.push_back(l);
        h.right.push_back(r);
    }
    return h;
}

}  // namespace

void for_each_compatible(const EvenPartition& P,
                         const std::function<void(const Permutation&)>& visit) {
    P.validate_even();
    const LumpHalves h = halves(P);
    const size_t nl = h.left.size();
    // Per-lump assignment: left[i] -> right[perm[i]], iterated odometer-style.
    std::vector<std::vector<int>> idx(nl);
    for (size_t b = 0; b < nl; ++b) {
        idx[b].resize(h.left[b].size());
        std::iota(idx[b].begin(), idx[b].end(), 0);
    }
    std::vector<int> images(static_cast<size_t>(P.k));
    for (;;) {
        for (size_t b = 0; b < nl; ++b)
            for (size_t i = 0; i < h.left[b].size(); ++i)
                images[static_cast<size_t>(h.left[b][i] - 1)] =
                    h.right[b][static_cast<size_t>(idx[b][i])];
        visit(Permutation(images));
        // advance: next_permutation odometer over lumps
        size_t b = 0;
        while (b < nl && !std::next_permutation(idx[b].begin(), idx[b].end())) {
            std::iota(idx[b].begin(), idx[b].end(), 0);
            ++b;
        }
        if (b == nl) return;
    }
}

Permutation first_compatible(const EvenPartition& P) {
    P.validate_even();
    const LumpHalves h = halves(P);
    std::vector<int> images(static_cast<size_t>(P.k));
    for (size_t b = 0; b < h.left.size(); ++b) {
        // left and right halves are sorted; pair them in order, which is the
        // lexicographically smallest assignment within the lump
        for (size_t i = 0; i < h.left[b].size(); ++i)
            images[static_cast<size_t>(h.left[b][i] - 1)] = h.right[b][i];
    }
    return Permutation(images);
}

Permutation greedy_flip(const EvenPartition& P, FlipTrace* trace) {
    P.validate_even();
    const Partition A = P.projection();
    std::vector<int> support = A.nontrivial_support();
    Permutation sigma = first_compatible(P);
    if (support.empty()) return sigma;

    const auto badness = [&](const Permutation& s) {
        const std::vector<int> internal = internal_ladder_indices(s);
        int cnt = 0;
        for (int i : support)
            if (std::binary_search(internal.begin(), internal.end(), s(i))) ++cnt;
        return cnt;
    };

    int bad = badness(sigma);
    while (bad > 0) {
        const std::vector<int> internal = internal_ladder_indices(sigma);
        // smallest internal ladder index in the image of the support
        int i_star = 0, i_pre = 0;
        for (int ip : support) {
            const int img = sigma(ip);
            if (std::binary_search(internal.begin(), internal.end(), img)) {
                if (i_star == 0 || img < i_star) {
                    i_star = img;
                    i_pre = ip;
                }
            }
        }
        if (i_star == 0) break;
        // smallest other element of the same lump of A
        const int b = A.lump_of(i_pre);
        int j_pre = 0;
        for (int e : A.lumps[static_cast<size_t>(b)])
            if (e != i_pre) {
                j_pre = e;
                break;
            }
        if (j_pre == 0) throw Error("nontrivial lump with a single element");
        std::vector<int> images(static_cast<size_t>(sigma.k()));
        for (int j = 1; j <= sigma.k(); ++j) images[static_cast<size_t>(j - 1)] = sigma(j);
        std::swap(images[static_cast<size_t>(i_pre - 1)],
                  images[static_cast<size_t>(j_pre - 1)]);
        sigma = Permutation(images);
        const int nb = badness(sigma);
        if (trace) {
            std::ostringstream step;
            step << "swap positions " << i_pre << "," << j_pre << " -> " << sigma.to_string();
            trace->steps.push_back(step.str());
            ++trace->flips;
        }
        if (nb >= bad) throw Error("flip failed to reduce internal-ladder count");
        bad = nb;
    }

    // Certified postconditions.
    const int s = static_cast<int>(support.size());
    const int deg = classify(sigma).degree;
    if (2 * deg < s) throw Error("greedy flip produced degree below s/2");
    return sigma;
}

double joint_degree(const Partition& A, const Permutation& sigma) {
    A.validate();
    if (A.n != sigma.k()) throw ConfigInvalid("partition/permutation size mismatch");
    const int deg = classify(sigma).degree;
    return std::max(static_cast<double>(deg), 0.5 * A.s());
}

// ---- Ursell ---------------------------------------------------------------

namespace {

// Connectivity of the subgraph of K_n whose edges are the set bits of mask.
bool connected(int n, uint32_t mask, const std::vector<std::pair<int, int>>& edges) {
    std::vector<int> parent(static_cast<size_t>(n));
    std::iota(parent.begin(), parent.end(), 0);
    const std::function<int(int)> find = [&](int x) {
        while (parent[static_cast<size_t>(x)] != x) {
            parent[static_cast<size_t>(x)] = parent[static_cast<size_t>(parent[static_cast<size_t>(x)])];
            x = parent[static_cast<size_t>(x)];
        }
        return x;
    };
    int comps = n;
    for (size_t e = 0; e < edges.size(); ++e) {
        if (!(mask >> e & 1u)) continue;
        const int ra = find(edges[e].first), rb = find(edges[e].second);
        if (ra != rb) {
            parent[static_cast<size_t>(ra)] = rb;
            --comps;
        }
    }
    return comps == 1;
}

}  // namespace

UrsellResult ursell(int n, UrsellMode mode) {
    if (n < 1) throw ConfigInvalid("ursell needs n >= 1");
    UrsellResult r;
    if (mode == UrsellMode::Continuum) {
        r.value = (n == 1) ? 1 : 0;
        r.bound = (n >= 2) ? std::pow(n, n - 2) : 1;
        return r;
    }
    if (n > 7) throw BudgetExceeded("ursell brute force limited to n <= 7");
    if (n == 1) {
        r.value = 1;
        r.bound = 1;
        return r;
    }
    std::vector<std::pair<int, int>> edges;
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) edges.push_back({a, b});
    const uint32_t m = static_cast<uint32_t>(edges.size());
    long long sum = 0;
    for (uint32_t mask = 0; mask < (1u << m); ++mask) {
        if (!connected(n, mask, edges)) continue;
        ++r.graphs_checked;
        sum += (__builtin_popcount(mask) % 2 == 0) ? 1 : -1;
    }
    r.value = sum;
    r.bound = std::pow(n, n - 2);
    if (std::llabs(r.value) > static_cast<long long>(r.bound + 0.5))
        throw DivergentBound("ursell value exceeds n^{n-2}");
    return r;
}

// ---- Aux momenta ------------------------------------------------------------

Vec AuxMomentaLedger::total() const {
    Vec t(d);
    for (const Vec& x : u) t += x;
    return t;
}

AuxMomentaLedger AuxMomentaLedger::zeros(const Partition& A, int d) {
    AuxMomentaLedger l;
    l.d = d;
    l.u.assign(A.lumps.size(), Vec(d));
    return l;
}

Partition break_lump(const Partition& A, int b, const std::vector<int>& moved,
                     const Vec& r, AuxMomentaLedger& ledger, double cap) {
    A.validate();
    if (b < 0 || b >= static_cast<int>(A.lumps.size()))
        throw BadSplit("lump index out of range");
    if (ledger.u.size() != A.lumps.size())
        throw BadSplit("ledger not aligned with partition");
    const std::vector<int>& lump = A.lumps[static_cast<size_t>(b)];
    std::vector<int> moved_sorted = moved;
    std::sort(moved_sorted.begin(), moved_sorted.end());
    if (moved_sorted.empty() || moved_sorted.size() >= lump.size())
        throw BadSplit("split parts must be nonempty and proper");
    if (!std::includes(lump.begin(), lump.end(), moved_sorted.begin(), moved_sorted.end()))
        throw BadSplit("moved elements not contained in the lump");
    std::vector<int> keep;
    std::set_difference(lump.begin(), lump.end(), moved_sorted.begin(),
                        moved_sorted.end(), std::back_inserter(keep));

    Partition out = A;
    out.lumps[static_cast<size_t>(b)] = keep;
    out.lumps.push_back(moved_sorted);
    out.validate();

    const Vec old_total = ledger.total();
    ledger.u[static_cast<size_t>(b)] -= r;
    ledger.u.push_back(r);
    BreakRecord rec;
    rec.lump = b;
    rec.r_norm = norm(r);
    rec.cap = cap;
    rec.within = (cap <= 0) || (rec.r_norm <= cap);
    ledger.records.push_back(rec);
    const Vec new_total = ledger.total();
    if (norm(new_total - old_total) > 1e-12 * (1.0 + norm(old_total)))
        throw AuxiliarySumNonzero("break_lump changed the aux-momentum total");
    return out;
}

// ---- Counting ---------------------------------------------------------------

std::vector<LadderCountRow> count_by_ladder(int k) {
    if (k < 1 || k > 7) throw BudgetExceeded("ladder census limited to k <= 7");
    std::map<int, uint64_t> counts;
    for_each_permutation(k, [&](const Permutation& s) {
        counts[static_cast<int>(classify(s).ladders.size())]++;
    });
    std::vector<LadderCountRow> rows;
    for (const auto& [l, c] : counts) {
        LadderCountRow row;
        row.ladder_count = l;
        row.count = c;
        row.bound = 2.0 * std::pow(2.0 * k, k - l);
        rows.push_back(row);
    }
    return rows;
}

DegreeSumResult degree_sum(int k, double gamma, double lambda, int D) {
    if (k < 1 || k > 7) throw BudgetExceeded("degree sum limited to k <= 7");
    const double x = 2.0 * k * std::pow(lambda, gamma);
    if (x >= 1.0) throw DivergentBound("geometric bound requires 2k lambda^gamma < 1");
    DegreeSumResult r;
    for_each_permutation(k, [&](const Permutation& s) {
        const int deg = classify(s).degree;
        if (deg >= D) {
            r.sum += std::pow(lambda, gamma * deg);
            ++r.terms;
        }
    });
    r.bound = 2.0 * std::pow(x, D) / (1.0 - x);
    return r;
}

}  // namespace qdiff
