#include "spectrex/lab.hpp"

#include "spectrex/projective.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace spectrex {

SymTuple random_symmetric_tuple(int g, int n, Rng& rng) {
    std::normal_distribution<double> N01(0.0, 1.0);
    std::vector<Mat> mats;
    for (int c = 0; c < g; ++c) {
        Mat M(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) M(i, j) = N01(rng);
        mats.push_back(0.5 * (M + M.transpose()));
    }
    return SymTuple(mats);
}

bool boundedness_check(const SymTuple& A, const SolverOptions& opt) {
    const int g = A.g();
    for (int i = 0; i < g; ++i) {
        std::vector<Mat> F;
        for (int c = 0; c < g; ++c)
            if (c != i) F.push_back(A[c]);
        const Vec lo = Vec::Constant(g - 1, -1.0), hi = Vec::Constant(g - 1, 1.0);
        for (double s : {1.0, -1.0})
            if (lmi_feasible(s * A[i], F, lo, hi, opt)) return false;
    }
    return true;
}

SymTuple random_defining_tuple(int g, int d, Rng& rng, int max_rejects) {
    if (g >= d * (d + 1) / 2)
        throw std::invalid_argument("random_defining_tuple: g >= d(d+1)/2 never yields a bounded spectrahedron");
    for (int attempt = 0; attempt < max_rejects; ++attempt) {
        SymTuple A = random_symmetric_tuple(g, d, rng);
        if (degenerate_classify(A).kind != Degeneracy::nondegenerate) continue;
        if (!is_irreducible(A)) continue;
        if (!boundedness_check(A)) continue;
        return A;
    }
    throw std::runtime_error("random_defining_tuple: no bounded irreducible tuple after " +
                             std::to_string(max_rejects) + " draws");
}

SymTuple random_interior_point(const SymTuple& A, int n, Rng& rng) {
    const SymTuple dir = random_symmetric_tuple(A.g(), n, rng);
    const double lam = min_eigenvalue(eval_linear(A, dir));
    if (lam >= 0) throw std::invalid_argument("random_interior_point: D_A is unbounded along the sampled direction");
    // L_A(t X) = I + t Lambda_A(X) stays PSD exactly up to t = -1/lam.
    return scale(dir, 0.5 * (-1.0 / lam));
}

std::string to_string(ExperimentMode m) {
    switch (m) {
        case ExperimentMode::classify_sweep: return "classify_sweep";
        case ExperimentMode::carath_sweep: return "carath_sweep";
        case ExperimentMode::estimate_sweep: return "estimate_sweep";
        case ExperimentMode::tolerance_sweep: return "tolerance_sweep";
    }
    return "?";
}

void ExperimentSpec::validate() const {
    if (g < 1) throw std::invalid_argument("spec: g must be positive");
    if (ds.empty() || n0s.empty()) throw std::invalid_argument("spec: d and n0 lists must be nonempty");
    for (int d : ds)
        if (d < 1) throw std::invalid_argument("spec: d values must be positive");
    for (int n : n0s)
        if (n < 1) throw std::invalid_argument("spec: n0 values must be positive");
    if (tuples_per_d < 1 || points_per_tuple < 1) throw std::invalid_argument("spec: counts must be positive");
    if (max_fails < 1) throw std::invalid_argument("spec: max_fails must be positive");
    tolerances.validate();
}

namespace {

ExperimentMode mode_from_string(const std::string& s) {
    for (auto m : {ExperimentMode::classify_sweep, ExperimentMode::carath_sweep, ExperimentMode::estimate_sweep,
                   ExperimentMode::tolerance_sweep})
        if (to_string(m) == s) return m;
    throw std::invalid_argument("spec: unknown mode '" + s + "'");
}

PurifyMode purify_from_string(const std::string& s) {
    if (s == "full") return PurifyMode::full;
    if (s == "frozen") return PurifyMode::frozen;
    if (s == "off") return PurifyMode::off;
    throw std::invalid_argument("spec: unknown purify mode '" + s + "'");
}

std::string purify_string(PurifyMode p) {
    return p == PurifyMode::full ? "full" : p == PurifyMode::frozen ? "frozen" : "off";
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

}  // namespace

ExperimentSpec spec_from_json(const nlohmann::json& j) {
    ExperimentSpec s;
    static const std::set<std::string> known{"mode",     "g",          "d",       "n0",      "tuples_per_d",
                                             "points_per_tuple", "seed", "tolerances", "max_fails", "purify",
                                             "lmi_grid", "ee_grid"};
    for (const auto& [key, _] : j.items())
        if (!known.count(key)) throw std::invalid_argument("unknown experiment key '" + key + "'");
    if (j.contains("mode")) s.mode = mode_from_string(j.at("mode").get<std::string>());
    if (j.contains("g")) s.g = j.at("g").get<int>();
    if (j.contains("d")) s.ds = j.at("d").get<std::vector<int>>();
    if (j.contains("n0")) s.n0s = j.at("n0").get<std::vector<int>>();
    if (j.contains("tuples_per_d")) s.tuples_per_d = j.at("tuples_per_d").get<int>();
    if (j.contains("points_per_tuple")) s.points_per_tuple = j.at("points_per_tuple").get<int>();
    if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("tolerances")) s.tolerances = tolerances_from_json(j.at("tolerances"));
    if (j.contains("max_fails")) s.max_fails = j.at("max_fails").get<int>();
    if (j.contains("purify")) s.purify = purify_from_string(j.at("purify").get<std::string>());
    if (j.contains("lmi_grid")) s.lmi_grid = j.at("lmi_grid").get<std::vector<double>>();
    if (j.contains("ee_grid")) s.ee_grid = j.at("ee_grid").get<std::vector<double>>();
    s.validate();
    return s;
}

nlohmann::json spec_to_json(const ExperimentSpec& s) {
    return {{"mode", to_string(s.mode)},       {"g", s.g},
            {"d", s.ds},                       {"n0", s.n0s},
            {"tuples_per_d", s.tuples_per_d},  {"points_per_tuple", s.points_per_tuple},
            {"seed", s.seed},                  {"tolerances", tolerances_to_json(s.tolerances)},
            {"max_fails", s.max_fails},        {"purify", purify_string(s.purify)},
            {"lmi_grid", s.lmi_grid},          {"ee_grid", s.ee_grid}};
}

Rng trial_rng(std::uint64_t seed, int g, int d, int n0, int tuple, int point) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(g),    static_cast<std::uint32_t>(d),
                      static_cast<std::uint32_t>(n0),   static_cast<std::uint32_t>(tuple),
                      static_cast<std::uint32_t>(point)};
    return Rng(seq);
}

namespace {

TrialRecord classify_trial(const SymTuple& A, const ExperimentSpec& spec, int d, int n0, int t, int p) {
    TrialRecord r;
    r.g = spec.g;
    r.d = d;
    r.n0 = n0;
    r.tuple = t;
    r.point = p;
    r.A = A;
    Rng rng = trial_rng(spec.seed, spec.g, d, n0, t, p);
    try {
        const SymTuple Y0 = to_boundary(A, random_interior_point(A, n0, rng));
        r.dil_dim0 = dilation_subspace(A, Y0, spec.tolerances).dim;
        DilateOptions opt;
        opt.target = Target::matrix_or_arveson;
        opt.max_fails = spec.max_fails;
        opt.purify = spec.purify;
        const DilationTrace tr = dilate_to_extreme(A, Y0, opt, spec.tolerances, rng);
        r.verdict = tr.verdict;
        r.failure = tr.failure_reason;
        r.n = tr.final_level();
        r.steps = static_cast<int>(tr.steps.size());
        r.mu = tr.mu;
        r.report = tr.final_report;
        r.final_point = tr.final_point;
        r.final_min_eig = min_eigenvalue(eval_pencil(A, tr.final_point));
    } catch (const std::exception& e) {
        r.verdict = Verdict::failed;
        r.failure = e.what();
        r.n = n0;
    }
    return r;
}

TrialRecord carath_trial(const SymTuple& A, const ExperimentSpec& spec, int d, int n0, int t, int p) {
    TrialRecord r;
    r.g = spec.g;
    r.d = d;
    r.n0 = n0;
    r.tuple = t;
    r.point = p;
    r.A = A;
    Rng rng = trial_rng(spec.seed, spec.g, d, n0, t, p);
    try {
        const SymTuple X0 = random_interior_point(A, n0, rng);
        CarathOptions opt;
        opt.max_fails = spec.max_fails;
        const CarathExpansion e = carath_expand(A, X0, opt, spec.tolerances, rng);
        const DilationTrace& tr = e.trace;
        r.verdict = tr.verdict;
        r.failure = e.failure;
        r.n = tr.final_level();
        r.steps = static_cast<int>(tr.steps.size());
        r.mu = tr.mu;
        r.dil_dim0 = spec.g * n0;
        r.report = tr.final_report;
        r.final_point = tr.final_point;
        r.final_min_eig = min_eigenvalue(eval_pencil(A, tr.final_point));
        r.residual_point = e.residual_point;
        r.residual_isometry = e.residual_isometry;
        r.terms_free = e.ok && std::all_of(e.terms.begin(), e.terms.end(),
                                           [](const CarathTerm& c) { return c.irreducible && c.arveson; });
        if (!e.ok) r.verdict = Verdict::failed;
    } catch (const std::exception& e) {
        r.verdict = Verdict::failed;
        r.failure = e.what();
        r.n = n0;
    }
    return r;
}

std::vector<ClassifyRow> aggregate_classify(const std::vector<TrialRecord>& trials, int g) {
    std::map<std::tuple<int, int, int>, ClassifyRow> rows;
    for (const auto& t : trials) {
        auto& row = rows[{t.d, t.n0, t.n}];
        row.g = g;
        row.d = t.d;
        row.n0 = t.n0;
        row.n = t.n;
        row.counts = rank_nullity_counts(g, t.d, t.n);
        if (t.report.k > 0) {
            auto& bin = row.kernel[std::min(t.report.k, 6)];
            ++bin.count;
            bin.dil_dims.insert(t.dil_dim0);
        }
        if (t.verdict == Verdict::failed) {
            ++row.fail;
            continue;
        }
        if (t.report.matrix == Flag::yes && t.report.arveson != Flag::yes) ++row.mat_not_arv;
        if (t.report.euclidean == Flag::yes) ++row.euc;
        if (t.report.arveson == Flag::yes) ++row.arv;
    }
    std::vector<ClassifyRow> out;
    for (auto& [key, row] : rows) out.push_back(row);
    return out;
}

std::vector<CarathRow> aggregate_carath(const std::vector<TrialRecord>& trials, int g) {
    std::map<std::pair<int, int>, std::vector<const TrialRecord*>> cells;
    for (const auto& t : trials) cells[{t.d, t.n0}].push_back(&t);
    std::vector<CarathRow> out;
    for (const auto& [key, ts] : cells) {
        CarathRow row;
        row.g = g;
        row.d = key.first;
        row.n0 = key.second;
        row.mu_est = mu_estimate(g, row.d, row.n0);
        std::vector<double> mus;
        std::vector<int> growth;
        for (const TrialRecord* t : ts) {
            if (t->verdict == Verdict::arveson) {
                mus.push_back(t->mu);
                growth.push_back(t->steps);
            } else if (t->report.matrix == Flag::yes) {
                ++row.mat_not_arv;
            } else {
                ++row.fails;
            }
        }
        row.successes = static_cast<int>(mus.size());
        if (!mus.empty()) {
            row.min_growth = *std::min_element(growth.begin(), growth.end());
            row.max_growth = *std::max_element(growth.begin(), growth.end());
            // Integer growth keeps identical trials at exactly zero spread.
            const double cnt = static_cast<double>(growth.size()), gn = static_cast<double>(g * row.n0);
            long long sg = 0;
            for (int x : growth) sg += x;
            row.mean_growth = static_cast<double>(sg) / cnt;
            row.mean_mu = row.mean_growth / gn;
            double v = 0;
            for (int x : growth) v += (x - row.mean_growth) * (x - row.mean_growth);
            row.std_mu = std::sqrt(v / cnt) / gn;
        }
        out.push_back(row);
    }
    return out;
}

}  // namespace

std::vector<SweepRow> tolerance_sweep(const std::vector<TrialRecord>& trials, const ExperimentSpec& spec) {
    std::vector<const TrialRecord*> pts;
    for (const auto& t : trials)
        if (t.verdict != Verdict::failed) pts.push_back(&t);
    std::vector<SweepRow> out;
    for (double lmi : spec.lmi_grid)
        for (double ee : spec.ee_grid) {
            ToleranceConfig cfg = spec.tolerances;
            cfg.post_mag = cfg.post_gap = lmi;
            cfg.ee_mag = cfg.ee_gap = ee;
            SweepRow row;
            row.lmi = lmi;
            row.ee = ee;
            for (const TrialRecord* t : pts) {
                ExtremeReport r;
                try {
                    r = classify(t->A, t->final_point, cfg);
                } catch (const std::invalid_argument&) {
                    ++row.flips;
                    continue;
                }
                if (r.matrix == Flag::yes && r.arveson != Flag::yes) ++row.mat_not_arv;
                if (r.euclidean == Flag::yes) ++row.euc;
                if (r.arveson == Flag::yes) ++row.arv;
                if (r.matrix == Flag::indeterminate || r.arveson == Flag::indeterminate ||
                    r.euclidean == Flag::indeterminate)
                    ++row.indeterminate;
                if (r.euclidean != t->report.euclidean || r.matrix != t->report.matrix ||
                    r.arveson != t->report.arveson)
                    ++row.flips;
            }
            out.push_back(row);
        }
    return out;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
    spec.validate();
    ExperimentResult res;
    res.spec = spec;
    const bool carath = spec.mode == ExperimentMode::carath_sweep || spec.mode == ExperimentMode::estimate_sweep;
    for (int d : spec.ds)
        for (int t = 0; t < spec.tuples_per_d; ++t) {
            Rng trng = trial_rng(spec.seed, spec.g, d, 0, t, -1);
            SymTuple A;
            try {
                A = random_defining_tuple(spec.g, d, trng);
            } catch (const std::exception& e) {
                for (int n0 : spec.n0s)
                    for (int p = 0; p < spec.points_per_tuple; ++p) {
                        TrialRecord r;
                        r.g = spec.g;
                        r.d = d;
                        r.n0 = n0;
                        r.n = n0;
                        r.tuple = t;
                        r.point = p;
                        r.failure = e.what();
                        res.trials.push_back(r);
                    }
                continue;
            }
            for (int n0 : spec.n0s)
                for (int p = 0; p < spec.points_per_tuple; ++p)
                    res.trials.push_back(carath ? carath_trial(A, spec, d, n0, t, p)
                                                : classify_trial(A, spec, d, n0, t, p));
        }
    if (carath) res.carath_rows = aggregate_carath(res.trials, spec.g);
    else res.classify_rows = aggregate_classify(res.trials, spec.g);
    if (spec.mode == ExperimentMode::tolerance_sweep) res.sweep_rows = tolerance_sweep(res.trials, spec);
    return res;
}

namespace {

std::string bin_cell(const ClassifyRow& r, int k) {
    auto it = r.kernel.find(k);
    if (it == r.kernel.end()) return "0";
    std::string s = std::to_string(it->second.count) + ";";
    bool first = true;
    for (int dd : it->second.dil_dims) {
        s += (first ? "" : "/") + std::to_string(dd);
        first = false;
    }
    return s;
}

}  // namespace

std::string rows_csv(const ExperimentResult& r) {
    std::ostringstream os;
    if (!r.sweep_rows.empty()) {
        os << "lmi,ee,mat_not_arv,euc,arv,indeterminate,flips\n";
        for (const auto& s : r.sweep_rows)
            os << fmt(s.lmi) << ',' << fmt(s.ee) << ',' << s.mat_not_arv << ',' << s.euc << ',' << s.arv << ','
               << s.indeterminate << ',' << s.flips << '\n';
        return os.str();
    }
    if (!r.carath_rows.empty()) {
        const bool est = r.spec.mode == ExperimentMode::estimate_sweep;
        os << "g,d,n0,min,max,mean,mean_mu,std_mu,fail,mnota";
        if (est) os << ",mu_est,error";
        os << '\n';
        for (const auto& c : r.carath_rows) {
            os << c.g << ',' << c.d << ',' << c.n0 << ',' << c.min_growth << ',' << c.max_growth << ','
               << fmt(c.mean_growth) << ',' << fmt(c.mean_mu) << ',' << fmt(c.std_mu) << ',' << c.fails << ','
               << c.mat_not_arv;
            if (est) os << ',' << fmt(c.mu_est) << ',' << fmt(c.mean_mu - c.mu_est);
            os << '\n';
        }
        return os.str();
    }
    os << "g,d,n0,n,mnota,euc,arv,arv_ct,mat_ct,k1,k2,k3,k4,k5,k_gt5,fail\n";
    for (const auto& c : r.classify_rows) {
        os << c.g << ',' << c.d << ',' << c.n0 << ',' << c.n << ',' << c.mat_not_arv << ',' << c.euc << ',' << c.arv
           << ',' << c.counts.arv << ',' << c.counts.mat;
        for (int k = 1; k <= 6; ++k) os << ',' << bin_cell(c, k);
        os << ',' << c.fail << '\n';
    }
    return os.str();
}

std::string rows_markdown(const ExperimentResult& r) {
    std::ostringstream os;
    if (!r.sweep_rows.empty()) {
        os << "| LMI tol | EE tol | #MnotA | #Euc | #Arv | #Indet | #Flips |\n|---|---|---|---|---|---|---|\n";
        for (const auto& s : r.sweep_rows)
            os << "| " << fmt(s.lmi) << " | " << fmt(s.ee) << " | " << s.mat_not_arv << " | " << s.euc << " | "
               << s.arv << " | " << s.indeterminate << " | " << s.flips << " |\n";
        return os.str();
    }
    if (!r.carath_rows.empty()) {
        const bool est = r.spec.mode == ExperimentMode::estimate_sweep;
        os << "| g | d | n0 | Min | Max | Mean | Mean mu | Std mu | #Fail | #MnotA |" << (est ? " mu_est | Error |" : "")
           << "\n|---|---|---|---|---|---|---|---|---|---|" << (est ? "---|---|" : "") << "\n";
        for (const auto& c : r.carath_rows) {
            os << "| " << c.g << " | " << c.d << " | " << c.n0 << " | " << c.min_growth << " | " << c.max_growth
               << " | " << fmt(c.mean_growth) << " | " << fmt(c.mean_mu) << " | " << fmt(c.std_mu) << " | " << c.fails
               << " | " << c.mat_not_arv << " |";
            if (est) os << ' ' << fmt(c.mu_est) << " | " << fmt(c.mean_mu - c.mu_est) << " |";
            os << '\n';
        }
        return os.str();
    }
    os << "| g | d | n0 | n | #Mat not Arv | #Euc | #Arv | ArvCT,MatCT | k=1 | 2 | 3 | 4 | 5 | >5 | #Fail |\n"
       << "|---|---|---|---|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const auto& c : r.classify_rows) {
        os << "| " << c.g << " | " << c.d << " | " << c.n0 << " | " << c.n << " | " << c.mat_not_arv << " | " << c.euc
           << " | " << c.arv << " | " << c.counts.arv << ',' << c.counts.mat << " |";
        for (int k = 1; k <= 6; ++k) os << ' ' << bin_cell(c, k) << " |";
        os << ' ' << c.fail << " |\n";
    }
    return os.str();
}

nlohmann::json rows_json(const ExperimentResult& r) {
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& c : r.classify_rows) {
        nlohmann::json hist = nlohmann::json::object();
        for (const auto& [k, b] : c.kernel)
            hist[k == 6 ? ">5" : std::to_string(k)] = {{"count", b.count},
                                                        {"dil_dims", std::vector<int>(b.dil_dims.begin(), b.dil_dims.end())}};
        rows.push_back({{"g", c.g}, {"d", c.d}, {"n0", c.n0}, {"n", c.n}, {"mat_not_arv", c.mat_not_arv},
                        {"euc", c.euc}, {"arv", c.arv}, {"arv_ct", c.counts.arv}, {"mat_ct", c.counts.mat},
                        {"kernel", hist}, {"fail", c.fail}});
    }
    for (const auto& c : r.carath_rows)
        rows.push_back({{"g", c.g}, {"d", c.d}, {"n0", c.n0}, {"min", c.min_growth}, {"max", c.max_growth},
                        {"mean", c.mean_growth}, {"mean_mu", c.mean_mu}, {"std_mu", c.std_mu}, {"mu_est", c.mu_est},
                        {"fail", c.fails}, {"mnota", c.mat_not_arv}, {"successes", c.successes}});
    for (const auto& s : r.sweep_rows)
        rows.push_back({{"lmi", s.lmi}, {"ee", s.ee}, {"mat_not_arv", s.mat_not_arv}, {"euc", s.euc},
                        {"arv", s.arv}, {"indeterminate", s.indeterminate}, {"flips", s.flips}});
    return {{"spec", spec_to_json(r.spec)}, {"rows", rows}};
}

std::string mu_csv(const ExperimentResult& r) {
    std::ostringstream os;
    os << "g,d,n0,tuple,point,verdict,steps,mu\n";
    for (const auto& t : r.trials)
        os << t.g << ',' << t.d << ',' << t.n0 << ',' << t.tuple << ',' << t.point << ',' << to_string(t.verdict) << ','
           << t.steps << ',' << fmt(t.mu) << '\n';
    return os.str();
}

void write_outputs(const ExperimentResult& r, const std::string& dir) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& body) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw std::runtime_error("cannot write " + (fs::path(dir) / name).string());
        f << body;
    };
    put("rows.csv", rows_csv(r));
    put("rows.json", rows_json(r).dump(2) + "\n");
    put("rows.md", rows_markdown(r));
    if (!r.carath_rows.empty()) put("mu.csv", mu_csv(r));
}

}  // namespace spectrex
