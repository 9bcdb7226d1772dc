#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "qdiff/permutation.hpp"
#include "qdiff/vec.hpp"

namespace qdiff {

// Set partition with a stable lump order.  Each lump is sorted; canonical
// form orders lumps by smallest element.  Ground set is {1..n}.
struct Partition {
    int n = 0;
    std::vector<std::vector<int>> lumps;

    static Partition trivial_pairs(int n);   // singletons {1},...,{n}
    static Partition parse(const std::string& text, int n);  // "[[1,3],[2]]"

    void validate() const;   // disjoint, nonempty, covering
    void canonicalize();
    int lump_of(int element) const;
    std::string to_string() const;

    // Union of nontrivial lumps S(A) and its size s(A).
    std::vector<int> nontrivial_support() const;
    int s() const { return static_cast<int>(nontrivial_support().size()); }
};

// Partition of I_k u I~_k where tilde labels are encoded as k+i.
struct EvenPartition {
    int k = 0;
    Partition part;  // over 2k elements

    void validate_even() const;  // throws NotEven
    // Projection onto I_k: lump_mu ^ I_k, in the same lump order.
    Partition projection() const;
};

uint64_t bell_number(int n);

// Visit every partition of {1..n} (restricted-growth-string order).
void for_each_partition(int n, const std::function<void(const Partition&)>& visit,
                        int cap = 10);

// Visit every even partition of I_k u I~_k.
void for_each_even_partition(int k,
                             const std::function<void(const EvenPartition&)>& visit,
                             int cap = 6);

// Permutations compatible with an even partition: sigma maps each left lump
// onto the matching tilde half.  Count is prod (|P_mu|/2)!.
uint64_t compatible_count(const EvenPartition& P);
void for_each_compatible(const EvenPartition& P,
                         const std::function<void(const Permutation&)>& visit);
Permutation first_compatible(const EvenPartition& P);  // lexicographically least

struct FlipTrace {
    int flips = 0;
    std::vector<std::string> steps;  // human-readable flip log
};

// Greedy flip: starting from the lexicographically smallest compatible
// permutation, swap images inside a nontrivial lump while some internal
// ladder index lies in the image of the nontrivial support.  Each flip
// strictly reduces that count; the result sigma_hat satisfies
// deg(sigma_hat) >= s(projection)/2.
Permutation greedy_flip(const EvenPartition& P, FlipTrace* trace = nullptr);

// Joint degree q(A, sigma) = max(deg sigma, s(A)/2).
double joint_degree(const Partition& A, const Permutation& sigma);

// ---- Ursell coefficients ----------------------------------------------

enum class UrsellMode { Lattice, Continuum };

struct UrsellResult {
    long long value = 0;
    double bound = 0;        // n^{n-2} for the lattice branch (n >= 2)
    uint64_t graphs_checked = 0;
};

// Lattice branch: c(n) = sum over connected spanning subgraphs of K_n of
// (-1)^{#edges}; continuum branch: c(1) = 1 and c(n >= 2) = 0.
UrsellResult ursell(int n, UrsellMode mode);

// ---- Auxiliary momenta / Operation "break a lump" ----------------------

struct BreakRecord {
    int lump = 0;
    double r_norm = 0;
    double cap = 0;      // configured |r| bound (N*zeta); 0 = unlimited
    bool within = true;
};

struct AuxMomentaLedger {
    int d = 3;
    std::vector<Vec> u;   // aligned with Partition::lumps
    std::vector<BreakRecord> records;

    Vec total() const;
    static AuxMomentaLedger zeros(const Partition& A, int d);
};

// Split lump b of A into (complement, moved): the remaining part keeps index
// b with aux momentum u_b - r, the split-off part is appended with aux
// momentum r.  The total of all aux momenta is unchanged.
Partition break_lump(const Partition& A, int b, const std::vector<int>& moved,
                     const Vec& r, AuxMomentaLedger& ledger, double cap = 0);

// ---- Counting bounds ----------------------------------------------------

struct LadderCountRow {
    int ladder_count = 0;   // l
    uint64_t count = 0;     // #{sigma : l(sigma) = l}
    double bound = 0;       // 2 (2k)^{k-l}
};

// Exhaustive census of ladder counts over S_k (k <= 7).
std::vector<LadderCountRow> count_by_ladder(int k);

// Exact sum of lambda^{gamma deg(sigma)} over permutations of degree >= D,
// with the geometric bound 2 sum_{m>=D} (2k lambda^gamma)^m.
struct DegreeSumResult {
    double sum = 0;
    double bound = 0;
    uint64_t terms = 0;
};
DegreeSumResult degree_sum(int k, double gamma, double lambda, int D);

}  // namespace qdiff
