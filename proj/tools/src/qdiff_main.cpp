// qdiff: command-line driver for the graph-combinatorics, propagator-estimate
// and kinetic-transport library.  Every subcommand writes a deterministic
// artifact directory <out>/<subcommand>/<UTC timestamp>/ holding result.csv
// (byte-stable for fixed config + seed, independent of worker count),
// meta.json (the fully resolved configuration) and summary.json (machine
// readable PASS/FAIL of the subcommand's invariant suite).  The exit status
// is 0 iff every invoked check passed.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "qdiff/classification.hpp"
#include "qdiff/csv.hpp"
#include "qdiff/errors.hpp"
#include "qdiff/estimates.hpp"
#include "qdiff/k_identity.hpp"
#include "qdiff/kinetic.hpp"
#include "qdiff/ladder.hpp"
#include "qdiff/partitions.hpp"
#include "qdiff/permutation.hpp"
#include "qdiff/rng.hpp"
#include "qdiff/schedule.hpp"
#include "qdiff/self_energy.hpp"
#include "qdiff/splitstep.hpp"
#include "qdiff/tower_matrix.hpp"
#include "qdiff/wavefunction.hpp"
#include "qdiff/wigner.hpp"

using json = nlohmann::json;
using namespace qdiff;

namespace {

struct GlobalConfig {
    int d = 3;
    double lambda = 0.3;
    double kappa = 0.05;
    double delta = 0.01;
    double eta = 0.0;  // 0 -> lambda^{2+kappa}
    std::uint64_t seed = 1;
    unsigned workers = 1;
    std::string out = "artifacts";
    std::string profile = "gaussian";  // collision form factor preset

    // PASS/FAIL thresholds (one source of truth; override via config/flags).
    double tol_kidentity = 1e-6;
    double tol_wigner = 1e-10;
    double tol_selfenergy = 1e-3;
    double sigma_level = 3.0;     // MC vs closed form, in standard errors
    double tol_heat_var = 0.05;
    double min_ks_p = 0.01;
    double tol_ladder0 = 1e-8;
    double tol_ladder1 = 0.10;
    double tol_autocorr = 0.05;
    double tol_unitarity = 1e-10;

    PropagatorParams params() const {
        PropagatorParams p;
        p.d = d;
        p.lambda = lambda;
        p.kappa = kappa;
        p.delta = delta;
        p.eta = eta;
        return p;
    }

    RadialProfile make_profile() const {
        if (profile == "gaussian") return RadialProfile::gaussian();
        if (profile.rfind("constant", 0) == 0) {
            double b = 1.0;
            const auto colon = profile.find(':');
            if (colon != std::string::npos) b = std::stod(profile.substr(colon + 1));
            return RadialProfile::constant(b);
        }
        throw ConfigInvalid("unknown profile preset '" + profile +
                            "' (use gaussian or constant[:b])");
    }

    json to_json() const {
        return json{{"d", d},
                    {"lambda", lambda},
                    {"kappa", kappa},
                    {"delta", delta},
                    {"eta", eta},
                    {"eta_resolved", params().eta_value()},
                    {"zeta", params().zeta()},
                    {"seed", seed},
                    {"workers", workers},
                    {"out", out},
                    {"profile", profile},
                    {"thresholds",
                     {{"tol_kidentity", tol_kidentity},
                      {"tol_wigner", tol_wigner},
                      {"tol_selfenergy", tol_selfenergy},
                      {"sigma_level", sigma_level},
                      {"tol_heat_var", tol_heat_var},
                      {"min_ks_p", min_ks_p},
                      {"tol_ladder0", tol_ladder0},
                      {"tol_ladder1", tol_ladder1},
                      {"tol_autocorr", tol_autocorr},
                      {"tol_unitarity", tol_unitarity}}}};
    }
};

struct CheckList {
    json checks = json::array();
    bool all_pass = true;

    void add(const std::string& name, bool pass, const std::string& detail) {
        checks.push_back(json{{"name", name}, {"pass", pass}, {"detail", detail}});
        all_pass = all_pass && pass;
        std::cout << (pass ? "PASS " : "FAIL ") << name << ": " << detail << "\n";
    }
};

std::string fmt(double x) { return format_g17(x); }

std::string join_ints(const std::vector<int>& v, const char* sep = " ") {
    if (v.empty()) return "-";
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += sep;
        s += std::to_string(v[i]);
    }
    return s;
}

// Emit the three artifact files and the final verdict line.
int emit(const GlobalConfig& g, const std::string& sub, const json& params,
         const CsvWriter& csv, CheckList& checks, const json& results = json::object()) {
    ArtifactPaths paths = make_artifact_dir(g.out, sub);
    csv.write(paths.csv);
    json meta = {{"subcommand", sub},
                 {"timestamp_utc", utc_timestamp()},
                 {"config", g.to_json()},
                 {"params", params}};
    write_text_file(paths.meta, meta.dump(2) + "\n");
    json summary = {{"subcommand", sub},
                    {"pass", checks.all_pass},
                    {"checks", checks.checks},
                    {"results", results}};
    write_text_file(paths.summary, summary.dump(2) + "\n");
    std::cout << (checks.all_pass ? "PASS" : "FAIL") << " (" << paths.dir << ")\n";
    return checks.all_pass ? 0 : 1;
}

Dispersion make_dispersion(const GlobalConfig& g, double e_max, int n_points = 2048) {
    return Dispersion::make(g.params(), g.make_profile(), e_max, n_points, g.workers);
}

// ---------------------------------------------------------------- classify

int run_classify(const GlobalConfig& g, const std::string& perm) {
    const Permutation sigma = Permutation::parse(perm);
    const IndexClassification c = classify(sigma);
    std::cout << to_json(sigma, c) << "\n";

    CsvWriter csv({"row", "class", "pivot", "pivot_other"});
    for (int i = 1; i <= c.k + 1; ++i)
        csv.row({std::to_string(i), row_class_name(c.row_class[i]),
                 std::to_string(c.pivot[i]), std::to_string(c.pivot_other[i])});

    CheckList checks;
    checks.add("peaks_eq_valleys", c.peaks.size() == c.valleys.size(),
               "p = " + std::to_string(c.peaks.size()) + ", v = " +
                   std::to_string(c.valleys.size()));
    const bool degree_rule = sigma.is_identity() ? (c.degree == 0) : (c.degree >= 2);
    checks.add("degree_rule", degree_rule, "degree = " + std::to_string(c.degree));
    checks.add("uncovered_at_most_valleys",
               c.uncovered_slopes.size() <= c.valleys.size(),
               "|I_us| = " + std::to_string(c.uncovered_slopes.size()));
    return emit(g, "classify", json{{"perm", perm}}, csv, checks,
                json::parse(to_json(sigma, c)));
}

// ------------------------------------------------------------------ matrix

int run_matrix(const GlobalConfig& g, const std::string& perm) {
    const Permutation sigma = Permutation::parse(perm);
    const TowerMatrix M = tower_matrix(sigma);
    std::cout << M.to_string();

    CsvWriter csv({"i", "j", "value"});
    for (int i = 1; i <= M.n(); ++i)
        for (int j = 1; j <= M.n(); ++j)
            csv.row({std::to_string(i), std::to_string(j), std::to_string(M(i, j))});

    CheckList checks;
    const TowerMatrix Minv = tower_matrix(sigma.inverse());
    checks.add("inverse_is_matrix_of_inverse", M.multiply(Minv).is_identity(),
               "M(sigma) M(sigma^-1) = I");
    const auto tw = towers(M);
    checks.add("one_tower_per_column", static_cast<int>(tw.size()) == M.n(),
               std::to_string(tw.size()) + " towers");
    const UnimodularityReport rep = unimodularity_check(M);
    checks.add("unimodular",
               rep.totally_unimodular,
               "minors checked = " + std::to_string(rep.checked) +
                   (rep.sampled ? " (sampled)" : " (exhaustive)"));
    return emit(g, "matrix", json{{"perm", perm}}, csv, checks,
                json{{"n", M.n()}, {"determinant", M.determinant()}});
}

// ---------------------------------------------------------------- schedule

int run_schedule(const GlobalConfig& g, const std::string& perm) {
    const Permutation sigma = Permutation::parse(perm);
    CheckList checks;
    CsvWriter csv({"step", "case", "rows", "columns", "b_after_entries"});
    json result;
    try {
        const Schedule s = schedule(sigma);
        for (std::size_t i = 0; i < s.steps.size(); ++i) {
            const ScheduleStep& st = s.steps[i];
            std::vector<int> bnz;
            for (int c = 1; c < static_cast<int>(st.b_after.size()); ++c)
                if (st.b_after[c] != 0) bnz.push_back(c);
            csv.row({std::to_string(i + 1), step_case_name(st.tag), join_ints(st.rows),
                     join_ints(st.columns), join_ints(bnz)});
        }
        // every row 1..k+1 once; every column 1..k+1 exactly once
        std::vector<int> rows_seen, cols_seen;
        for (const auto& st : s.steps) {
            rows_seen.insert(rows_seen.end(), st.rows.begin(), st.rows.end());
            cols_seen.insert(cols_seen.end(), st.columns.begin(), st.columns.end());
        }
        std::sort(rows_seen.begin(), rows_seen.end());
        std::sort(cols_seen.begin(), cols_seen.end());
        std::vector<int> expect;
        for (int i = 1; i <= s.k + 1; ++i) expect.push_back(i);
        checks.add("rows_once", rows_seen == expect, "all rows eliminated once");
        checks.add("columns_once", cols_seen == expect, "all columns integrated once");
        checks.add("built", true, std::to_string(s.steps.size()) + " steps");
        result = json::parse(to_json(s));
        std::cout << to_json(s) << "\n";
    } catch (const Error& e) {
        checks.add("built", false, e.what());
    }
    return emit(g, "schedule", json{{"perm", perm}}, csv, checks, result);
}

// ---------------------------------------------------------------- exponent

int run_exponent(const GlobalConfig& g, const std::string& perm, double c_delta) {
    const double kappa_cap = 2.0 / (6.0 + 9.0 * g.d);
    if (g.kappa >= kappa_cap)
        throw ConfigInvalid("kappa = " + fmt(g.kappa) + " violates kappa < 2/(6+9d) = " +
                            fmt(kappa_cap) + " required for exponent reports");
    const Permutation sigma = Permutation::parse(perm);
    const ExponentReport r = exponent_report(sigma, g.kappa, g.d, g.delta, c_delta);
    std::cout << to_json(r) << "\n";

    CsvWriter csv({"k", "ell", "v", "s", "us", "cs", "p", "towers", "degree", "kappa",
                   "delta", "c_delta", "d", "total_lambda_power", "per_degree",
                   "simplified_bound"});
    csv.row({std::to_string(r.k), std::to_string(r.ell), std::to_string(r.v),
             std::to_string(r.s), std::to_string(r.us), std::to_string(r.cs),
             std::to_string(r.p), std::to_string(r.towers), std::to_string(r.degree),
             fmt(r.kappa), fmt(r.delta), fmt(r.c_delta), std::to_string(r.d),
             fmt(r.total_lambda_power), fmt(r.per_degree), fmt(r.simplified_bound)});

    CheckList checks;
    checks.add("total_ge_simplified", r.total_lambda_power >= r.simplified_bound - 1e-12,
               fmt(r.total_lambda_power) + " >= " + fmt(r.simplified_bound));
    return emit(g, "exponent", json{{"perm", perm}, {"c_delta", c_delta}}, csv, checks,
                json::parse(to_json(r)));
}

// ------------------------------------------------------------------ ursell

int run_ursell(const GlobalConfig& g, int n, const std::string& mode) {
    UrsellMode m;
    if (mode == "lattice")
        m = UrsellMode::Lattice;
    else if (mode == "continuum")
        m = UrsellMode::Continuum;
    else
        throw ConfigInvalid("mode must be lattice or continuum");
    const UrsellResult r = ursell(n, m);
    std::cout << "c(" << n << ") = " << r.value << "  (bound " << r.bound << ", "
              << r.graphs_checked << " graphs)\n";

    CsvWriter csv({"n", "mode", "value", "bound", "graphs_checked"});
    csv.row({std::to_string(n), mode, std::to_string(r.value), fmt(r.bound),
             std::to_string(r.graphs_checked)});

    CheckList checks;
    long long closed;
    if (m == UrsellMode::Lattice) {
        closed = 1;
        for (int i = 1; i < n; ++i) closed *= i;
        if (n % 2 == 0) closed = -closed;  // (-1)^{n-1} (n-1)!
    } else {
        closed = (n == 1) ? 1 : 0;
    }
    checks.add("matches_closed_form", r.value == closed, "expected " + std::to_string(closed));
    checks.add("within_tree_bound", std::llabs(r.value) <= static_cast<long long>(r.bound + 0.5),
               "|c| <= n^{n-2} = " + fmt(r.bound));
    return emit(g, "ursell", json{{"n", n}, {"mode", mode}}, csv, checks,
                json{{"value", r.value}, {"bound", r.bound}});
}

// -------------------------------------------------------------- partitions

bool is_compatible(const EvenPartition& P, const Permutation& sigma) {
    for (int j = 1; j <= P.k; ++j)
        if (P.part.lump_of(j) != P.part.lump_of(P.k + sigma(j))) return false;
    return true;
}

std::string sanitize(std::string s) {
    for (char& c : s)
        if (c == ',') c = ' ';
    return s;
}

int run_partitions(const GlobalConfig& g, int k) {
    CsvWriter csv({"index", "partition", "s", "compatible"});
    CheckList checks;
    std::uint64_t total = 0, bad_counts = 0;
    const bool brute = (k <= 4);
    for_each_even_partition(k, [&](const EvenPartition& P) {
        const std::uint64_t cnt = compatible_count(P);
        csv.row({std::to_string(total), sanitize(P.part.to_string()),
                 std::to_string(P.projection().s()), std::to_string(cnt)});
        if (brute) {
            std::uint64_t seen = 0;
            for_each_compatible(P, [&](const Permutation& s) {
                if (!is_compatible(P, s)) ++bad_counts;
                ++seen;
            });
            if (seen != cnt) ++bad_counts;
        }
        ++total;
    });
    std::cout << total << " even partitions at k = " << k << "\n";
    checks.add("enumerated", total > 0, std::to_string(total) + " partitions");
    if (brute)
        checks.add("count_formula", bad_counts == 0,
                   "prod (|P_mu|/2)! verified against explicit enumeration");
    return emit(g, "partitions", json{{"k", k}}, csv, checks, json{{"total", total}});
}

// -------------------------------------------------------------------- flip

int run_flip(const GlobalConfig& g, int k) {
    CsvWriter csv({"index", "partition", "s", "flips", "degree"});
    CheckList checks;
    std::uint64_t total = 0, incompatible = 0, degree_low = 0, overlap = 0;
    for_each_even_partition(k, [&](const EvenPartition& P) {
        FlipTrace trace;
        const Permutation shat = greedy_flip(P, &trace);
        const Partition A = P.projection();
        const int s = A.s();
        const IndexClassification c = classify(shat);
        csv.row({std::to_string(total), sanitize(P.part.to_string()), std::to_string(s),
                 std::to_string(trace.flips), std::to_string(c.degree)});
        if (!is_compatible(P, shat)) ++incompatible;
        if (2 * c.degree < s) ++degree_low;
        const std::vector<int> internal = internal_ladder_indices(shat);
        for (int j : A.nontrivial_support())
            if (std::find(internal.begin(), internal.end(), shat(j)) != internal.end())
                ++overlap;
        ++total;
    });
    checks.add("compatible", incompatible == 0,
               std::to_string(total) + " partitions, all outputs compatible");
    checks.add("degree_ge_half_s", degree_low == 0, "deg(sigma_hat) >= s(A)/2 everywhere");
    checks.add("no_internal_ladder_in_support_image", overlap == 0,
               "I*_l(sigma_hat) disjoint from sigma_hat(S(A))");
    return emit(g, "flip", json{{"k", k}}, csv, checks, json{{"total", total}});
}

// ------------------------------------------------------------------ counts

int run_counts(const GlobalConfig& g, int k) {
    const auto rows = count_by_ladder(k);
    CsvWriter csv({"ell", "count", "bound"});
    CheckList checks;
    bool within = true, idrow = false, gap = true;
    std::uint64_t total = 0;
    for (const auto& r : rows) {
        csv.row({std::to_string(r.ladder_count), std::to_string(r.count), fmt(r.bound)});
        if (static_cast<double>(r.count) > r.bound) within = false;
        if (r.ladder_count == k) idrow = (r.count == 1);
        if (r.ladder_count == k - 1 && r.count != 0) gap = false;
        total += r.count;
    }
    checks.add("counts_within_bound", within, "count <= 2 (2k)^{k-ell} for all ell");
    checks.add("identity_unique", idrow, "ell = k only for the identity");
    checks.add("no_ell_k_minus_1", gap, "no permutation has ell = k-1");
    checks.add("census_complete", total == factorial(k),
               std::to_string(total) + " = k!");
    return emit(g, "counts", json{{"k", k}}, csv, checks, json{{"k", k}});
}

// --------------------------------------------------------------- kidentity

int run_kidentity(const GlobalConfig& g, int n, double t, double eta, int sets) {
    if (n < 1 || n > 64) throw ConfigInvalid("frequency count must be in [1, 64]");
    CsvWriter csv({"set", "n", "t", "eta", "residual"});
    CheckList checks;
    double worst = 0.0;
    for (int s = 0; s < sets; ++s) {
        RngStream rng(g.seed, static_cast<std::uint64_t>(s));
        std::vector<Cplx> omega(n);
        for (int j = 0; j < n; ++j)
            omega[j] = Cplx(rng.uniform(-3.0, 3.0), -rng.uniform(0.0, 0.3));
        if (s % 4 == 3 && n >= 2) omega[1] = omega[0] + Cplx(1e-9, 0.0);  // near-confluent
        const double res = k_identity_check(omega, t, eta);
        worst = std::max(worst, res);
        csv.row({std::to_string(s), std::to_string(n), fmt(t), fmt(eta), fmt(res)});
    }
    std::cout << "max residual over " << sets << " sets: " << fmt(worst) << "\n";
    checks.add("residual_below_tolerance", worst < g.tol_kidentity,
               fmt(worst) + " < " + fmt(g.tol_kidentity));
    return emit(g, "kidentity", json{{"n", n}, {"t", t}, {"eta", eta}, {"sets", sets}},
                csv, checks, json{{"max_residual", worst}});
}

// -------------------------------------------------------------- selfenergy

int run_selfenergy(const GlobalConfig& g, int n_alpha) {
    const RadialProfile prof = g.make_profile();
    CsvWriter csv({"alpha", "re", "im", "im_closed", "re_error"});
    CheckList checks;
    double worst = 0.0;
    for (int i = 0; i < n_alpha; ++i) {
        const double alpha = 0.1 * std::pow(50.0, i / static_cast<double>(n_alpha - 1));
        const SelfEnergyValue v = theta(alpha, 0.0, prof, g.d);
        const double imc = theta_im_closed(alpha, prof, g.d);
        worst = std::max(worst, std::abs(v.value.imag() - imc) / std::max(1e-300, std::abs(imc)));
        csv.row({fmt(alpha), fmt(v.value.real()), fmt(v.value.imag()), fmt(imc),
                 fmt(v.re_error)});
    }
    checks.add("im_matches_closed_form", worst < 1e-12,
               "relative gap " + fmt(worst) + " (boundary value uses the closed form)");
    return emit(g, "selfenergy", json{{"n_alpha", n_alpha}}, csv, checks,
                json{{"worst_im_gap", worst}});
}

// ----------------------------------------------------------------- lemma33

Lemma33Case parse_case(const std::string& name) {
    if (name == "logest") return Lemma33Case::LogEst;
    if (name == "2aint") return Lemma33Case::TwoAInt;
    if (name == "3aint") return Lemma33Case::ThreeAInt;
    if (name == "ladderint") return Lemma33Case::LadderInt;
    throw ConfigInvalid("case must be one of logest, 2aint, 3aint, ladderint");
}

int run_lemma33(const GlobalConfig& g, const std::string& name, double a) {
    if (!g.params().eta_in_window())
        throw ConfigInvalid(
            "eta = " + fmt(g.params().eta_value()) +
            " violates lambda^{2+4 kappa} <= eta <= lambda^2 required for the "
            "propagator estimates");
    const Dispersion disp = make_dispersion(g, /*e_max=*/80.0);
    const Lemma33Report rep = lemma33_check(disp, parse_case(name), a);
    std::cout << to_json(rep) << "\n";

    CsvWriter csv({"alpha", "q", "a", "lhs", "shape", "ratio"});
    for (const auto& s : rep.samples)
        csv.row({fmt(s.alpha), fmt(s.qnorm), fmt(s.a), fmt(s.lhs), fmt(s.shape),
                 fmt(s.ratio)});

    CheckList checks;
    checks.add("finite_positive", rep.max_ratio > 0 && std::isfinite(rep.max_ratio),
               "calibration constant " + fmt(rep.max_ratio));
    checks.add("stable_under_refinement", rep.stable,
               "refined " + fmt(rep.max_ratio_refined) + " <= 2 x coarse " +
                   fmt(rep.max_ratio));
    return emit(g, "lemma33", json{{"case", name}, {"a", a}}, csv, checks,
                json::parse(to_json(rep)));
}

// ---------------------------------------------------------------- appendix

int run_appendix(const GlobalConfig& g, double qnorm, double rnorm, double angle) {
    Vec q = Vec::zero(g.d), r = Vec::zero(g.d);
    q[g.d - 1] = qnorm;
    r[0] = rnorm * std::sin(angle);
    r[g.d - 1] = rnorm * std::cos(angle);
    const AppendixReport rep = appendix_integrals(q, r, g.params());
    std::cout << to_json(rep) << "\n";

    CsvWriter csv({"eta", "zeta", "alpha", "beta", "q", "r", "I1", "I1_shape", "ratio1",
                   "I2", "I2_shape", "ratio2", "J", "J_shape", "ratioJ"});
    csv.row({fmt(rep.eta), fmt(rep.zeta), fmt(rep.alpha), fmt(rep.beta), fmt(rep.qnorm),
             fmt(rep.rnorm), fmt(rep.I1), fmt(rep.I1_shape), fmt(rep.ratio1), fmt(rep.I2),
             fmt(rep.I2_shape), fmt(rep.ratio2), fmt(rep.J), fmt(rep.J_shape),
             fmt(rep.ratioJ)});

    CheckList checks;
    checks.add("finite_positive",
               rep.I1 > 0 && rep.I2 > 0 && rep.J > 0 && std::isfinite(rep.I1 + rep.I2 + rep.J),
               "I1 = " + fmt(rep.I1) + ", I2 = " + fmt(rep.I2) + ", J = " + fmt(rep.J));
    checks.add("stable_under_refinement", rep.stable, "refined quadrature within x2");
    return emit(g, "appendix", json{{"q", qnorm}, {"r", rnorm}, {"angle", angle}}, csv,
                checks, json::parse(to_json(rep)));
}

// ------------------------------------------------------------------ ladder

int run_ladder(const GlobalConfig& g, double t, int k, bool free_term, double eps_scale) {
    LadderOptions opts;
    opts.workers = g.workers;
    const double e_need = 0.5 * opts.r_max * opts.r_max + 2.0;
    const Dispersion disp = make_dispersion(g, e_need);
    const RadialProfile psi0 = RadialProfile::initial_state(g.d);

    CheckList checks;
    json results;
    CsvWriter csv({"t", "k", "lambda", "re", "im", "abs"});
    if (free_term) {
        Observable obs;
        obs.xi_part = [](double x) { return std::exp(-x * x); };
        obs.v_part = [](double v) { return std::exp(-0.5 * v * v); };
        const Cplx w = free_term_W(t, eps_scale, disp, psi0, obs, opts);
        csv.row({fmt(t), std::to_string(-1), fmt(g.lambda), fmt(w.real()), fmt(w.imag()),
                 fmt(std::abs(w))});
        std::cout << "free term W(t=" << t << ", eps=" << eps_scale << ") = " << w.real()
                  << (w.imag() < 0 ? " - " : " + ") << std::abs(w.imag()) << "i\n";
        checks.add("finite", std::isfinite(std::abs(w)), "|W| = " + fmt(std::abs(w)));
        results = json{{"re", w.real()}, {"im", w.imag()}};
    } else {
        const Cplx v = ladder_value(t, k, disp, psi0, opts);
        csv.row({fmt(t), std::to_string(k), fmt(g.lambda), fmt(v.real()), fmt(v.imag()),
                 fmt(std::abs(v))});
        std::cout << "ladder value V(t=" << t << ", k=" << k << ") = " << v.real() << "\n";
        if (k == 0 && t == 0.0)
            checks.add("normalized_at_zero", std::abs(v - Cplx(1.0, 0.0)) <= g.tol_ladder0,
                       "|V - 1| = " + fmt(std::abs(v - Cplx(1.0, 0.0))));
        else
            checks.add("finite", std::isfinite(std::abs(v)), "|V| = " + fmt(std::abs(v)));
        results = json{{"re", v.real()}, {"im", v.imag()}};
    }
    return emit(g, "ladder",
                json{{"t", t}, {"k", k}, {"free_term", free_term}, {"eps", eps_scale}},
                csv, checks, results);
}

// ----------------------------------------------------------------- kinetic

int run_kinetic(const GlobalConfig& g, std::vector<double> energies) {
    if (energies.empty()) energies = {0.25, 1.0, 4.0};
    const RadialProfile prof = g.make_profile();
    CsvWriter csv({"e", "sigma0", "sigma1", "rate", "D_closed"});
    CheckList checks;
    bool positive = true, mixing = true;
    for (double e : energies) {
        const SigmaMoments sm = sigma_moments(e, prof, g.d);
        const double rate = sm.sigma0 - sm.sigma1;
        const double D = diffusion_constant(e, prof, g.d, DiffusionMode::ClosedForm).value;
        csv.row({fmt(e), fmt(sm.sigma0), fmt(sm.sigma1), fmt(rate), fmt(D)});
        std::cout << "e = " << e << ": sigma0 = " << sm.sigma0 << ", sigma0-sigma1 = "
                  << rate << ", D = " << D << "\n";
        positive = positive && sm.sigma0 > 0 && D > 0;
        mixing = mixing && rate > 0;
    }
    checks.add("rates_positive", positive, "sigma0 and D positive at all energies");
    checks.add("mixing_gap_positive", mixing, "sigma0 - sigma1 > 0 at all energies");
    return emit(g, "kinetic", json{{"e", energies}}, csv, checks, json::object());
}

// --------------------------------------------------------------- diffusion

int run_diffusion(const GlobalConfig& g, double e, int ntraj) {
    const RadialProfile prof = g.make_profile();
    const ValueWithError closed = diffusion_constant(e, prof, g.d, DiffusionMode::ClosedForm);
    const ValueWithError mc =
        diffusion_constant(e, prof, g.d, DiffusionMode::MonteCarlo, ntraj, g.seed, g.workers);
    const double z = std::abs(mc.value - closed.value) / std::max(mc.error, 1e-300);
    std::cout << "D_closed = " << closed.value << ", D_mc = " << mc.value << " +- "
              << mc.error << "  (z = " << z << ")\n";

    CsvWriter csv({"e", "ntraj", "D_closed", "D_mc", "stderr", "z"});
    csv.row({fmt(e), std::to_string(ntraj), fmt(closed.value), fmt(mc.value),
             fmt(mc.error), fmt(z)});

    CheckList checks;
    checks.add("mc_matches_closed_form", z <= g.sigma_level,
               "agreement within " + fmt(z) + " standard errors (limit " +
                   fmt(g.sigma_level) + ")");
    return emit(g, "diffusion", json{{"e", e}, {"ntraj", ntraj}}, csv, checks,
                json{{"D_closed", closed.value}, {"D_mc", mc.value}, {"stderr", mc.error}});
}

// ----------------------------------------------------------------- heatfit

int run_heatfit(const GlobalConfig& g, double e, double T, int ntraj) {
    const RadialProfile prof = g.make_profile();
    if (T <= 0) {
        const SigmaMoments sm = sigma_moments(e, prof, g.d);
        T = 150.0 / (sm.sigma0 - sm.sigma1);  // deep in the diffusive regime
    }
    const HeatCompareReport r = heat_compare(e, T, ntraj, g.seed, prof, g.d, g.workers);
    std::cout << to_json(r) << "\n";

    CsvWriter csv({"e", "T", "ntraj", "D", "var", "var_expected", "var_rel_err", "ks_stat",
                   "ks_p", "msd", "msd_expected", "mean_jumps"});
    csv.row({fmt(r.e), fmt(r.T), std::to_string(r.n_traj), fmt(r.D), fmt(r.var_per_coord),
             fmt(r.var_expected), fmt(r.var_rel_err), fmt(r.ks_stat_max), fmt(r.ks_p_min),
             fmt(r.msd), fmt(r.msd_expected), fmt(r.mean_jumps)});

    CheckList checks;
    checks.add("variance_matches_heat_kernel", std::abs(r.var_rel_err) <= g.tol_heat_var,
               "relative error " + fmt(r.var_rel_err));
    checks.add("per_coordinate_gaussian", r.ks_p_min > g.min_ks_p,
               "KS p = " + fmt(r.ks_p_min));
    checks.add("msd_matches", std::abs(r.msd / r.msd_expected - 1.0) <= g.tol_heat_var,
               "msd/expected = " + fmt(r.msd / r.msd_expected));
    return emit(g, "heatfit", json{{"e", e}, {"T", T}, {"ntraj", ntraj}}, csv, checks,
                json::parse(to_json(r)));
}

// ------------------------------------------------------------------ wigner

int run_wigner(const GlobalConfig& g, int d, int N, double h, double sigma, double eps,
               const std::string& state) {
    WaveFunction psi;
    if (state == "gaussian") {
        psi = gaussian_packet(d, N, h, sigma);
    } else if (state == "twobump") {
        const double a = 6.0 * sigma;
        WaveFunction s = gaussian_packet(d, N, h, sigma, -a) + gaussian_packet(d, N, h, sigma, a);
        psi = (1.0 / std::sqrt(s.norm2())) * s;
    } else if (state == "moving") {
        psi = gaussian_packet(d, N, h, sigma, 0.0, std::vector<double>(d, 0.5));
    } else {
        throw ConfigInvalid("state must be gaussian, twobump, or moving");
    }

    const WignerFunction W = wigner(psi, eps);
    const double mass_err = std::abs(W.mass() - psi.norm2());

    const std::vector<double> mx = W.marginal_x();
    const std::vector<double> mv = W.marginal_v();
    const std::vector<double> pv = momentum_density(psi);
    const double cell = psi.cell();
    double ex_err = 0.0, ev_err = 0.0;
    for (std::size_t j = 0; j < mx.size(); ++j) {
        const double expect = std::norm(psi.amp[j]) / std::pow(eps, d);
        ex_err = std::max(ex_err, std::abs(mx[j] - expect));
    }
    for (std::size_t n = 0; n < mv.size(); ++n)
        ev_err = std::max(ev_err, std::abs(mv[n] - pv[n]));

    CsvWriter csv({"kind", "index", "coord", "density", "expected"});
    if (d == 1) {
        for (int j = 0; j < N; ++j)
            csv.row({"position", std::to_string(j), fmt(W.X[j]), fmt(mx[j]),
                     fmt(std::norm(psi.amp[j]) / eps)});
        for (int n = 0; n < N; ++n)
            csv.row({"velocity", std::to_string(n), fmt(W.v[n]), fmt(mv[n]), fmt(pv[n])});
    } else {
        for (std::size_t j = 0; j < mx.size(); ++j)
            csv.row({"position", std::to_string(j), "-", fmt(mx[j]),
                     fmt(std::norm(psi.amp[j]) / (eps * eps))});
        for (std::size_t n = 0; n < mv.size(); ++n)
            csv.row({"velocity", std::to_string(n), "-", fmt(mv[n]), fmt(pv[n])});
    }

    CheckList checks;
    checks.add("normalization", mass_err < g.tol_wigner,
               "|mass - ||psi||^2| = " + fmt(mass_err));
    checks.add("position_marginal", ex_err < g.tol_wigner, "sup error " + fmt(ex_err));
    checks.add("velocity_marginal", ev_err < g.tol_wigner, "sup error " + fmt(ev_err));

    // quick continuity probe: a 10% orthogonal-ish perturbation
    WaveFunction bump = gaussian_packet(d, N, h, sigma, 2.0 * sigma,
                                        std::vector<double>(d, 1.0 / (4.0 * sigma)));
    const WignerContinuityReport cont =
        wigner_continuity_check(psi, 0.1 * bump, Observable{
            [](double x) { return std::exp(-x * x); },
            [](double v) { return std::exp(-0.5 * v * v); }});
    checks.add("continuity_bound", cont.holds,
               "lhs " + fmt(cont.lhs) + " <= rhs " + fmt(cont.rhs));
    (void)cell;
    return emit(g, "wigner",
                json{{"d", d}, {"N", N}, {"h", h}, {"sigma", sigma}, {"eps", eps},
                     {"state", state}},
                csv, checks,
                json{{"mass_error", mass_err},
                     {"position_marginal_error", ex_err},
                     {"velocity_marginal_error", ev_err}});
}

// ------------------------------------------------------------------ evolve

int run_evolve(const GlobalConfig& g, int d, int N, double L, double lambda, double t,
               double dt) {
    if (N == 0) N = (d == 1) ? 256 : (d == 2 ? 64 : 32);
    if (L == 0) L = (d == 1) ? 32.0 : (d == 2 ? 16.0 : 8.0);
    const PoissonPotential V = sample_poisson_potential(d, L, g.seed);
    const WaveFunction psi0 = gaussian_packet(d, N, L / N, /*sigma=*/1.0);

    CsvWriter csv({"t", "norm2", "msd"});
    CheckList checks;
    const int segments = 10;
    WaveFunction psi = psi0;
    csv.row({fmt(0.0), fmt(psi.norm2()), fmt(mean_square_displacement(psi))});
    for (int s = 1; s <= segments; ++s) {
        psi = evolve_splitstep(psi, V, lambda, t / segments, dt);
        csv.row({fmt(s * t / segments), fmt(psi.norm2()),
                 fmt(mean_square_displacement(psi))});
    }
    const double drift = std::abs(psi.norm2() - psi0.norm2());
    std::cout << "M = " << V.centers.size() << " bumps; norm drift " << fmt(drift)
              << "; msd(t) = " << mean_square_displacement(psi) << "\n";
    checks.add("unitary", drift < g.tol_unitarity, "norm drift " + fmt(drift));
    if (lambda == 0.0) {
        const WaveFunction exact = evolve_free(psi0, t);
        double err2 = 0.0;
        for (std::size_t i = 0; i < exact.size(); ++i)
            err2 += std::norm(psi.amp[i] - exact.amp[i]);
        err2 = std::sqrt(err2 * psi.cell());
        checks.add("free_case_exact", err2 < g.tol_unitarity, "L2 error " + fmt(err2));
    }
    return emit(g, "evolve",
                json{{"d", d}, {"N", N}, {"L", L}, {"lambda", lambda}, {"t", t},
                     {"dt", dt}, {"bumps", V.centers.size()}},
                csv, checks,
                json{{"norm_drift", drift}, {"msd", mean_square_displacement(psi)}});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"graph-combinatorics, propagator-estimate and kinetic-transport driver"};
    app.require_subcommand(0, 1);
    app.set_config("--config", "", "read options from a key=value file");

    GlobalConfig g;
    bool show_config = false;
    app.add_option("--d", g.d, "ambient dimension for scattering modules")->capture_default_str();
    app.add_option("--lambda", g.lambda, "coupling lambda")->capture_default_str();
    app.add_option("--kappa", g.kappa, "time-scale exponent kappa")->capture_default_str();
    app.add_option("--delta", g.delta, "cutoff exponent delta")->capture_default_str();
    app.add_option("--eta", g.eta, "regularization eta (0 = lambda^{2+kappa})")
        ->capture_default_str();
    app.add_option("--seed", g.seed, "master seed")->capture_default_str();
    app.add_option("--workers", g.workers, "worker threads")->capture_default_str();
    app.add_option("--out", g.out, "artifact root directory")->capture_default_str();
    app.add_option("--profile", g.profile, "form factor preset (gaussian | constant[:b])")
        ->capture_default_str();
    app.add_flag("--show-config", show_config, "print the resolved configuration and exit");
    app.add_option("--tol-kidentity", g.tol_kidentity)->capture_default_str();
    app.add_option("--tol-wigner", g.tol_wigner)->capture_default_str();
    app.add_option("--tol-selfenergy", g.tol_selfenergy)->capture_default_str();
    app.add_option("--sigma-level", g.sigma_level)->capture_default_str();
    app.add_option("--tol-heat-var", g.tol_heat_var)->capture_default_str();
    app.add_option("--min-ks-p", g.min_ks_p)->capture_default_str();
    app.add_option("--tol-ladder0", g.tol_ladder0)->capture_default_str();
    app.add_option("--tol-ladder1", g.tol_ladder1)->capture_default_str();
    app.add_option("--tol-autocorr", g.tol_autocorr)->capture_default_str();
    app.add_option("--tol-unitarity", g.tol_unitarity)->capture_default_str();

    // classify / matrix / schedule / exponent
    std::string perm = "1 2 7 6 5 3 4 8";
    double c_delta = -1.0;
    auto* sc_classify = app.add_subcommand("classify", "row classes, runs and pivots");
    sc_classify->add_option("--perm", perm, "permutation images, e.g. \"2 1 3\"");
    auto* sc_matrix = app.add_subcommand("matrix", "relabelling matrix and unimodularity");
    sc_matrix->add_option("--perm", perm);
    auto* sc_schedule = app.add_subcommand("schedule", "integration schedule walk");
    sc_schedule->add_option("--perm", perm);
    auto* sc_exponent = app.add_subcommand("exponent", "lambda-power ledger");
    sc_exponent->add_option("--perm", perm);
    sc_exponent->add_option("--cdelta", c_delta, "delta bookkeeping constant (-1 = default)");

    // ursell / partitions / flip / counts
    int n_ursell = 4, k_part = 3, k_flip = 4, k_counts = 5;
    std::string mode = "lattice";
    auto* sc_ursell = app.add_subcommand("ursell", "connected-graph coefficient");
    sc_ursell->add_option("--n", n_ursell, "lump size");
    sc_ursell->add_option("--mode", mode, "lattice | continuum");
    auto* sc_part = app.add_subcommand("partitions", "even partitions and compatibility");
    sc_part->add_option("--k", k_part, "collision number");
    auto* sc_flip = app.add_subcommand("flip", "greedy degree-raising flips");
    sc_flip->add_option("--k", k_flip, "collision number (<= 6)");
    auto* sc_counts = app.add_subcommand("counts", "census of ladder counts over S_k");
    sc_counts->add_option("--k", k_counts, "collision number (<= 7)");

    // kidentity / selfenergy / lemma33 / appendix / ladder
    int kid_n = 3, kid_sets = 100;
    double kid_t = 5.0, kid_eta = 0.01;
    auto* sc_kid = app.add_subcommand("kidentity", "simplex-propagator contour identity");
    sc_kid->add_option("--n", kid_n, "number of frequencies");
    sc_kid->add_option("--t", kid_t, "time");
    sc_kid->add_option("--eta", kid_eta, "contour regularization");
    sc_kid->add_option("--sets", kid_sets, "random frequency sets");

    int n_alpha = 10;
    auto* sc_se = app.add_subcommand("selfenergy", "boundary self-energy values");
    sc_se->add_option("--n-alpha", n_alpha, "number of sampled energies");

    std::string l33_case = "logest";
    double l33_a = 0.0;
    auto* sc_l33 = app.add_subcommand("lemma33", "resolvent-integral calibration");
    sc_l33->add_option("--case", l33_case, "logest | 2aint | 3aint | ladderint");
    sc_l33->add_option("--a", l33_a, "denominator deficit exponent");

    double ap_q = 0.7, ap_r = 0.5, ap_angle = 0.7;
    auto* sc_ap = app.add_subcommand("appendix", "two-denominator cutoff integrals");
    sc_ap->add_option("--qnorm", ap_q);
    sc_ap->add_option("--rnorm", ap_r);
    sc_ap->add_option("--angle", ap_angle, "angle between q and r");

    double lad_t = 0.0, lad_eps = 0.1;
    int lad_k = 0;
    bool lad_free = false;
    auto* sc_lad = app.add_subcommand("ladder", "ladder values / free Wigner term");
    sc_lad->add_option("--t", lad_t, "time");
    sc_lad->add_option("--k", lad_k, "collision number (<= 2)");
    sc_lad->add_flag("--free-term", lad_free, "evaluate the free Wigner pairing instead");
    sc_lad->add_option("--eps", lad_eps, "kinetic scale for the free term");

    // kinetic / diffusion / heatfit
    std::vector<double> kin_e;
    auto* sc_kin = app.add_subcommand("kinetic", "shell rates and closed-form D_e");
    sc_kin->add_option("--e", kin_e, "energies (default 0.25 1 4)");

    double dif_e = 1.0;
    int dif_n = 100000;
    auto* sc_dif = app.add_subcommand("diffusion", "Monte Carlo diffusion constant");
    sc_dif->add_option("--e", dif_e, "shell energy");
    sc_dif->add_option("--ntraj", dif_n, "trajectories");

    double heat_e = 1.0, heat_T = 0.0;
    int heat_n = 100000;
    auto* sc_heat = app.add_subcommand("heatfit", "position law vs heat kernel");
    sc_heat->add_option("--e", heat_e, "shell energy");
    sc_heat->add_option("--T", heat_T, "final time (0 = auto, 150 mixing times)");
    sc_heat->add_option("--ntraj", heat_n, "trajectories");

    // wigner / evolve
    int wig_d = 1, wig_N = 256;
    double wig_h = 0.1, wig_sigma = 0.8, wig_eps = 1.0;
    std::string wig_state = "gaussian";
    auto* sc_wig = app.add_subcommand("wigner", "discrete Wigner transform identities");
    sc_wig->add_option("--d", wig_d, "grid dimension (1 or 2)");
    sc_wig->add_option("--N", wig_N, "grid points per axis");
    sc_wig->add_option("--h", wig_h, "grid spacing");
    sc_wig->add_option("--sigma", wig_sigma, "packet width");
    sc_wig->add_option("--eps", wig_eps, "kinetic rescaling");
    sc_wig->add_option("--state", wig_state, "gaussian | twobump | moving");

    int ev_d = 1, ev_N = 0;
    double ev_L = 0.0, ev_lambda = 0.3, ev_t = 1.0, ev_dt = 0.005;
    auto* sc_ev = app.add_subcommand("evolve", "split-step propagation in a bump field");
    sc_ev->add_option("--d", ev_d, "dimension (1, 2 or 3)");
    sc_ev->add_option("--N", ev_N, "grid points per axis (0 = auto)");
    sc_ev->add_option("--L", ev_L, "box edge (0 = auto)");
    sc_ev->add_option("--lambda", ev_lambda, "coupling");
    sc_ev->add_option("--t", ev_t, "final time");
    sc_ev->add_option("--dt", ev_dt, "step size");

    CLI11_PARSE(app, argc, argv);

    try {
        if (show_config) {
            std::cout << g.to_json().dump(2) << "\n";
            if (app.get_subcommands().empty()) return 0;
        }
        if (sc_classify->parsed()) return run_classify(g, perm);
        if (sc_matrix->parsed()) return run_matrix(g, perm);
        if (sc_schedule->parsed()) return run_schedule(g, perm);
        if (sc_exponent->parsed()) return run_exponent(g, perm, c_delta);
        if (sc_ursell->parsed()) return run_ursell(g, n_ursell, mode);
        if (sc_part->parsed()) return run_partitions(g, k_part);
        if (sc_flip->parsed()) return run_flip(g, k_flip);
        if (sc_counts->parsed()) return run_counts(g, k_counts);
        if (sc_kid->parsed()) return run_kidentity(g, kid_n, kid_t, kid_eta, kid_sets);
        if (sc_se->parsed()) return run_selfenergy(g, n_alpha);
        if (sc_l33->parsed()) return run_lemma33(g, l33_case, l33_a);
        if (sc_ap->parsed()) return run_appendix(g, ap_q, ap_r, ap_angle);
        if (sc_lad->parsed()) return run_ladder(g, lad_t, lad_k, lad_free, lad_eps);
        if (sc_kin->parsed()) return run_kinetic(g, kin_e);
        if (sc_dif->parsed()) return run_diffusion(g, dif_e, dif_n);
        if (sc_heat->parsed()) return run_heatfit(g, heat_e, heat_T, heat_n);
        if (sc_wig->parsed())
            return run_wigner(g, wig_d, wig_N, wig_h, wig_sigma, wig_eps, wig_state);
        if (sc_ev->parsed()) return run_evolve(g, ev_d, ev_N, ev_L, ev_lambda, ev_t, ev_dt);
        std::cout << app.help();
        return 0;
    } catch (const ConfigInvalid& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "unexpected error: " << e.what() << "\n";
        return 3;
    }
}
