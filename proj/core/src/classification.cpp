#include "qdiff/classification.hpp"

#include <algorithm>
#include <sstream>

#include "qdiff/errors.hpp"

namespace qdiff {

const char* row_class_name(RowClass c) {
    switch (c) {
        case RowClass::Peak: return "peak";
        case RowClass::Valley: return "valley";
        case RowClass::Ladder: return "ladder";
        case RowClass::Slope: return "slope";
        case RowClass::Last: return "last";
    }
    return "?";
}

IndexClassification classify(const Permutation& sigma) {
    const int k = sigma.k();
    const int n = k + 1;
    IndexClassification c;
    c.k = k;
    c.row_class.assign(static_cast<size_t>(n) + 1, RowClass::Last);
    c.pivot.assign(static_cast<size_t>(n) + 1, 0);
    c.pivot_other.assign(static_cast<size_t>(n) + 1, 0);

    // Row i < k+1 inherits the class of the graph point (sigma^{-1}(i), i).
    for (int i = 1; i <= k; ++i) {
        const int j = sigma.inv(i);
        const int left = sigma.ext(j - 1);
        const int right = sigma.ext(j + 1);
        RowClass cls;
        if (i < std::min(left, right)) {
            cls = RowClass::Peak;
        } else if (i > std::max(left, right)) {
            cls = RowClass::Valley;
        } else if (i - 1 == left || i - 1 == right) {
            cls = RowClass::Ladder;
        } else {
            cls = RowClass::Slope;
        }
        c.row_class[static_cast<size_t>(i)] = cls;
        switch (cls) {
            case RowClass::Peak: c.peaks.push_back(i); break;
            case RowClass::Valley: c.valleys.push_back(i); break;
            case RowClass::Ladder: c.ladders.push_back(i); break;
            case RowClass::Slope: c.slopes.push_back(i); break;
            default: break;
        }
    }
    c.degree = k - static_cast<int>(c.ladders.size());
    if (c.peaks.size() != c.valleys.size())
        throw Error("peak/valley count mismatch for " + sigma.to_string());

    // Maximal runs of consecutive ladder indices, with top / bottom indices.
    for (size_t a = 0; a < c.ladders.size();) {
        size_t b = a;
        while (b + 1 < c.ladders.size() &&
               c.ladders[b + 1] == c.ladders[b] + 1)
            ++b;
        LadderRun run;
        run.first = c.ladders[a];
        run.last = c.ladders[b];
        run.top = run.first - 1;
        const int below = run.last + 1;  // row right below the run
        const int gap = std::abs(sigma.ext_inv(below) - sigma.inv(run.last));
        run.bottom = (gap != 1) ? run.last : below;
        c.runs.push_back(run);
        c.tops.push_back(run.top);
        c.bottoms.push_back(run.bottom);
        a = b + 1;
    }
    for (const LadderRun& r : c.runs) {
        if (r.top >= 1 && c.row_class[static_cast<size_t>(r.top)] == RowClass::Ladder)
            throw Error("ladder-run top is itself a ladder index");
        const RowClass bc = c.row_class[static_cast<size_t>(r.bottom)];
        if (r.bottom != r.last && bc != RowClass::Valley && bc != RowClass::Last)
            throw Error("extended run bottom must be a valley or the last index");
    }

    // Column towers; pivot of i is the unique column whose tower ends at row i.
    const TowerMatrix M = tower_matrix(sigma);
    const std::vector<Tower> tw = towers(M);
    const auto top_of = [&](int col) { return tw[static_cast<size_t>(col - 1)].top; };
    const auto bottom_of = [&](int col) { return tw[static_cast<size_t>(col - 1)].bottom; };

    std::vector<std::vector<int>> by_bottom(static_cast<size_t>(n) + 1);
    for (const Tower& t : tw) by_bottom[static_cast<size_t>(t.bottom)].push_back(t.col);

    for (int i = 1; i <= n; ++i) {
        const RowClass cls = c.row_class[static_cast<size_t>(i)];
        const auto& cols = by_bottom[static_cast<size_t>(i)];
        if (cls == RowClass::Peak) {
            if (!cols.empty()) throw Error("peak row must not end a tower");
            continue;
        }
        if (cls == RowClass::Valley) {
            // Exactly two adjacent towers end at a valley; the pivot is the
            // higher one (smaller top row).
            if (cols.size() != 2 || cols[1] != cols[0] + 1)
                throw Error("valley row must end exactly two adjacent towers");
            const int jl = sigma.ext_inv(i);
            if (cols[0] != jl)
                throw Error("valley towers must sit at ext_inv(i), ext_inv(i)+1");
            const int t_left = top_of(jl);
            const int t_right = top_of(jl + 1);
            if (t_left == t_right) throw Error("valley tower tops tie");
            c.pivot[static_cast<size_t>(i)] = (t_left < t_right) ? jl : jl + 1;
            c.pivot_other[static_cast<size_t>(i)] = (t_left < t_right) ? jl + 1 : jl;
        } else {
            if (cols.size() != 1)
                throw Error("non-valley, non-peak row must end exactly one tower");
            c.pivot[static_cast<size_t>(i)] = cols[0];
        }
    }
    if (c.pivot[static_cast<size_t>(n)] != n)
        throw Error("pivot of the last row must be the last column");
    for (int i : c.slopes)
        if (bottom_of(c.pivot[static_cast<size_t>(i)]) - top_of(c.pivot[static_cast<size_t>(i)]) < 1)
            throw Error("slope pivot tower shorter than two");
    for (int i : c.valleys)
        if (bottom_of(c.pivot[static_cast<size_t>(i)]) - top_of(c.pivot[static_cast<size_t>(i)]) < 1)
            throw Error("valley pivot tower shorter than two");

    // Chain of valleys and slopes; a slope is covered when the next chain
    // element's pivot tower reaches at least up to it.
    c.chain.reserve(c.valleys.size() + c.slopes.size());
    c.chain.insert(c.chain.end(), c.valleys.begin(), c.valleys.end());
    c.chain.insert(c.chain.end(), c.slopes.begin(), c.slopes.end());
    std::sort(c.chain.begin(), c.chain.end());
    for (size_t m = 0; m < c.chain.size(); ++m) {
        const int h = c.chain[m];
        if (c.row_class[static_cast<size_t>(h)] != RowClass::Slope) continue;
        bool covered = false;
        if (m + 1 < c.chain.size()) {
            const int next_pivot = c.pivot[static_cast<size_t>(c.chain[m + 1])];
            covered = top_of(next_pivot) <= h;
        }
        (covered ? c.covered_slopes : c.uncovered_slopes).push_back(h);
    }
    if (c.uncovered_slopes.size() > c.valleys.size())
        throw Error("more uncovered slopes than valleys");

    return c;
}

std::vector<int> internal_ladder_indices(const Permutation& sigma) {
    std::vector<int> out;
    const IndexClassification c = classify(sigma);
    for (int i : c.ladders) {
        const int pos = sigma.ext_inv(i);
        if (std::abs(sigma.ext_inv(i - 1) - pos) == 1 &&
            std::abs(sigma.ext_inv(i + 1) - pos) == 1)
            out.push_back(i);
    }
    return out;
}

namespace {
std::string int_list(const std::vector<int>& v) {
    std::ostringstream out;
    out << '[';
    for (size_t i = 0; i < v.size(); ++i) {
        if (i) out << ',';
        out << v[i];
    }
    out << ']';
    return out.str();
}
}  // namespace

std::string to_json(const Permutation& sigma, const IndexClassification& c) {
    std::ostringstream out;
    out << "{\n";
    out << "  \"k\": " << c.k << ",\n";
    out << "  \"sigma\": [";
    for (int j = 1; j <= c.k; ++j) out << (j > 1 ? "," : "") << sigma(j);
    out << "],\n";
    out << "  \"degree\": " << c.degree << ",\n";
    out << "  \"peaks\": " << int_list(c.peaks) << ",\n";
    out << "  \"valleys\": " << int_list(c.valleys) << ",\n";
    out << "  \"ladders\": " << int_list(c.ladders) << ",\n";
    out << "  \"slopes\": " << int_list(c.slopes) << ",\n";
    out << "  \"tops\": " << int_list(c.tops) << ",\n";
    out << "  \"bottoms\": " << int_list(c.bottoms) << ",\n";
    out << "  \"covered_slopes\": " << int_list(c.covered_slopes) << ",\n";
    out << "  \"uncovered_slopes\": " << int_list(c.uncovered_slopes) << ",\n";
    out << "  \"pivot\": [";
    for (int i = 1; i <= c.k + 1; ++i)
        out << (i > 1 ? "," : "") << c.pivot[static_cast<size_t>(i)];
    out << "],\n";
    out << "  \"row_class\": [";
    for (int i = 1; i <= c.k + 1; ++i)
        out << (i > 1 ? "," : "") << '"' << row_class_name(c.row_class[static_cast<size_t>(i)]) << '"';
    out << "]\n}";
    return out.str();
}

}  // namespace qdiff
