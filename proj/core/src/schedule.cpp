#include "qdiff/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "qdiff/errors.hpp"
#include "qdiff/tower_matrix.hpp"

namespace qdiff {

const char* step_case_name(StepCase c) {
    switch (c) {
        case StepCase::Peak: return "peak";
        case StepCase::LadderBlock: return "ladder-block";
        case StepCase::UncoveredSlope: return "uncovered-slope";
        case StepCase::CoveredSlope: return "covered-slope";
        case StepCase::Valley: return "valley";
        case StepCase::Last: return "last";
    }
    return "?";
}

namespace {

bool contains(const std::vector<int>& v, int x) {
    return std::find(v.begin(), v.end(), x) != v.end();
}

}  // namespace

Schedule schedule(const Permutation& sigma) {
    const int k = sigma.k();
    const IndexClassification cls = classify(sigma);
    const TowerMatrix M = tower_matrix(sigma);

    Schedule out;
    out.k = k;

    std::vector<int> b;  // empty = no carried singularity
    std::vector<char> col_used(static_cast<size_t>(k) + 2, 0);

    auto use_column = [&](int c) {
        if (c < 1 || c > k + 1)
            throw Error("schedule: column index out of range");
        if (col_used[static_cast<size_t>(c)])
            throw Error("schedule: column integrated twice");
        col_used[static_cast<size_t>(c)] = 1;
    };

    // Next chain element strictly above h, or 0.
    auto next_chain = [&](int h) {
        for (int e : cls.chain)
            if (e > h) return e;
        return 0;
    };

    int h = 1;
    while (h <= k + 1) {
        ScheduleStep st;
        st.b_enter = b;

        if (h == k + 1) {
            st.tag = StepCase::Last;
            st.rows = {h};
            st.columns = {k + 1};
            use_column(k + 1);
            if (!b.empty())
                throw Error("schedule: point singularity carried into the last step");
            st.b_after = b;
            out.steps.push_back(std::move(st));
            ++h;
            continue;
        }

        switch (cls.row_class[static_cast<size_t>(h)]) {
            case RowClass::Peak: {
                st.tag = StepCase::Peak;
                st.rows = {h};
                st.b_after = b;
                ++h;
                break;
            }
            case RowClass::Ladder: {
                st.tag = StepCase::LadderBlock;
                const LadderRun* run = nullptr;
                for (const auto& r : cls.runs)
                    if (r.first <= h && h <= r.last) run = &r;
                if (run == nullptr || run->first != h)
                    throw Error("schedule: ladder row without enclosing run");
                for (int i = run->first; i <= run->last; ++i) {
                    st.rows.push_back(i);
                    const int c = cls.pivot[static_cast<size_t>(i)];
                    st.columns.push_back(c);
                    use_column(c);
                    // Ladder pivots never carry a singular entry.
                    if (!b.empty() && b[static_cast<size_t>(c)] != 0)
                        throw Error("schedule: carried singularity meets a ladder pivot");
                }
                st.b_after = b;
                h = run->last + 1;
                break;
            }
            case RowClass::Slope: {
                const bool covered = contains(cls.covered_slopes, h);
                const int c = cls.pivot[static_cast<size_t>(h)];
                st.columns = {c};
                st.rows = {h};
                use_column(c);
                if (covered) {
                    st.tag = StepCase::CoveredSlope;
                    // New singularity: eliminated row with the pivot entry
                    // zeroed.
                    std::vector<int> nb(static_cast<size_t>(k) + 2, 0);
                    for (int j = 1; j <= k + 1; ++j)
                        nb[static_cast<size_t>(j)] = M(h, j);
                    nb[static_cast<size_t>(c)] = 0;
                    // It must expose a +-1 at the pivot column of the next
                    // chain element (that is what "covered" means).
                    const int nxt = next_chain(h);
                    if (nxt == 0)
                        throw Error("schedule: covered slope with no successor");
                    const int pc = cls.pivot[static_cast<size_t>(nxt)];
                    if (nb[static_cast<size_t>(pc)] != 1 && nb[static_cast<size_t>(pc)] != -1)
                        throw Error("schedule: covered slope singularity misses the next pivot");
                    b = std::move(nb);
                } else {
                    st.tag = StepCase::UncoveredSlope;
                    b.clear();
                }
                st.b_after = b;
                ++h;
                break;
            }
            case RowClass::Valley: {
                st.tag = StepCase::Valley;
                st.rows = {h};
                const int c = cls.pivot[static_cast<size_t>(h)];
                const int c2 = cls.pivot_other[static_cast<size_t>(h)];
                st.columns = {c, c2};
                use_column(c);
                use_column(c2);
                b.clear();
                st.b_after = b;
                ++h;
                break;
            }
            case RowClass::Last:
                throw Error("schedule: interior row classified as last");
        }
        out.steps.push_back(std::move(st));
    }

    // Every column must have been integrated exactly once (peaks consume
    // none, valleys two; the counts balance because |I_p| = |I_v|).
    for (int c = 1; c <= k + 1; ++c)
        if (!col_used[static_cast<size_t>(c)])
            throw Error("schedule: column never integrated");

    return out;
}

std::string to_json(const Schedule& s) {
    std::ostringstream os;
    os << "{\"k\":" << s.k << ",\"steps\":[";
    for (size_t i = 0; i < s.steps.size(); ++i) {
        const auto& st = s.steps[i];
        if (i) os << ",";
        os << "{\"case\":\"" << step_case_name(st.tag) << "\",\"rows\":[";
        for (size_t j = 0; j < st.rows.size(); ++j)
            os << (j ? "," : "") << st.rows[j];
        os << "],\"columns\":[";
        for (size_t j = 0; j < st.columns.size(); ++j)
            os << (j ? "," : "") << st.columns[j];
        os << "],\"b_enter\":[";
        for (size_t j = 1; j < st.b_enter.size(); ++j)
            os << (j > 1 ? "," : "") << st.b_enter[j];
        os << "],\"b_after\":[";
        for (size_t j = 1; j < st.b_after.size(); ++j)
            os << (j > 1 ? "," : "") << st.b_after[j];
        os << "]}";
    }
    os << "]}";
    return os.str();
}

ExponentReport exponent_report(const Permutation& sigma, double kappa, int d,
                               double delta, double c_delta) {
    if (kappa >= 2.0 / (6.0 + 9.0 * d))
        throw KappaTooLarge("exponent_report: kappa must be below 2/(6+9d)");
    if (c_delta < 0.0) c_delta = 4.5 * d;

    const IndexClassification cls = classify(sigma);

    ExponentReport r;
    r.k = sigma.k();
    r.ell = static_cast<int>(cls.ladders.size());
    r.v = static_cast<int>(cls.valleys.size());
    r.s = static_cast<int>(cls.slopes.size());
    r.us = static_cast<int>(cls.uncovered_slopes.size());
    r.cs = static_cast<int>(cls.covered_slopes.size());
    r.p = static_cast<int>(cls.peaks.size());
    r.towers = static_cast<int>(cls.tops.size());
    r.degree = cls.degree;
    r.kappa = kappa;
    r.delta = delta;
    r.c_delta = c_delta;
    r.d = d;

    r.per_degree = 1.0 / 3.0 - (1.0 + 1.5 * d) * kappa - c_delta * delta;
    r.simplified_bound = r.per_degree * r.degree;

    if (sigma.is_identity()) {
        // Pure ladder: the resummed term itself, no power counting applies.
        r.total_lambda_power = 0.0;
        r.simplified_bound = 0.0;
        return r;
    }

    const double v = r.v, s = r.s, us = r.us;
    r.total_lambda_power = 2.0 * (2.0 * v + s) -
                           (1.0 + 0.5 * kappa) * (3.0 * v + s + us) -
                           (kappa + 3.0 * delta) * d * (2.0 * v + s + 1.0);
    return r;
}

std::string to_json(const ExponentReport& r) {
    std::ostringstream os;
    os.precision(17);
    os << "{\"k\":" << r.k << ",\"ell\":" << r.ell << ",\"v\":" << r.v
       << ",\"s\":" << r.s << ",\"uncovered\":" << r.us << ",\"covered\":" << r.cs
       << ",\"p\":" << r.p << ",\"towers\":" << r.towers
       << ",\"degree\":" << r.degree << ",\"kappa\":" << r.kappa
       << ",\"delta\":" << r.delta << ",\"c_delta\":" << r.c_delta
       << ",\"d\":" << r.d << ",\"total_lambda_power\":" << r.total_lambda_power
       << ",\"per_degree\":" << r.per_degree
       << ",\"simplified_bound\":" << r.simplified_bound << "}";
    return os.str();
}

double pointwise_bound(int k, double lambda, double kappa) {
    const double L = std::abs(std::log(lambda));
    // eta = lambda^{2+kappa}, so lambda^2/eta = lambda^{-kappa}.
    return std::pow(L, k + 2) * std::pow(lambda, -kappa * k);
}

double ladder_sum_bound(int k, double lambda, double kappa) {
    const double L = std::abs(std::log(lambda));
    const double base = 1.0 + std::pow(lambda, 1.0 - 12.0 * kappa);
    return std::pow(base, k) * L * L;
}

}  // namespace qdiff
