#include "spectrex/caratheodory.hpp"
#include "spectrex/dilation.hpp"
#include "spectrex/exact.hpp"
#include "spectrex/extremality.hpp"
#include "spectrex/lab.hpp"
#include "spectrex/projective.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

namespace {

using namespace spectrex;
using nlohmann::json;

json read_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return json::parse(in);
}

void emit(const json& j, const std::string& out) {
    if (out.empty()) {
        std::cout << j.dump(2) << "\n";
        return;
    }
    std::ofstream f(out);
    if (!f) throw std::runtime_error("cannot write " + out);
    f << j.dump(2) << "\n";
}

struct TolFlags {
    std::optional<double> lmi_mag, lmi_gap, ee_mag, ee_gap, purify_eps, psd_slack;
    std::string config;

    void attach(CLI::App* app) {
        app->add_option("--lmi-mag", lmi_mag, "kernel magnitude threshold before purification");
        app->add_option("--lmi-gap", lmi_gap, "kernel gap threshold before purification");
        app->add_option("--ee-mag", ee_mag, "nullspace magnitude threshold for the extreme-point systems");
        app->add_option("--ee-gap", ee_gap, "nullspace gap threshold for the extreme-point systems");
        app->add_option("--purify-eps", purify_eps, "largest entry change allowed by purification");
        app->add_option("--psd-slack", psd_slack, "accepted negative eigenvalue of L_A");
        app->add_option("--config", config, "JSON file with a \"tolerances\" block (or the block itself)");
    }

    ToleranceConfig resolve() const {
        ToleranceConfig cfg;
        if (!config.empty()) {
            const json j = read_json(config);
            cfg = tolerances_from_json(j.contains("tolerances") ? j.at("tolerances") : j, cfg);
        }
        if (lmi_mag) cfg.lmi_mag = *lmi_mag;
        if (lmi_gap) cfg.lmi_gap = *lmi_gap;
        if (ee_mag) cfg.ee_mag = *ee_mag;
        if (ee_gap) cfg.ee_gap = *ee_gap;
        if (purify_eps) cfg.purify_eps = *purify_eps;
        if (psd_slack) cfg.psd_slack = *psd_slack;
        cfg.validate();
        return cfg;
    }
};

std::uint64_t seed_or_env(std::uint64_t seed) {
    if (const char* s = std::getenv("SPECTREX_SEED")) return std::stoull(s);
    return seed;
}

ExperimentSpec load_spec(const std::string& path) {
    ExperimentSpec spec = spec_from_json(read_json(path));
    spec.seed = seed_or_env(spec.seed);
    return spec;
}

PurifyMode parse_purify(const std::string& s) {
    if (s == "full") return PurifyMode::full;
    if (s == "frozen") return PurifyMode::frozen;
    if (s == "off") return PurifyMode::off;
    throw std::invalid_argument("unknown purify mode '" + s + "'");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"spectrex: free spectrahedra, extreme points and dilations"};
    app.require_subcommand(1);

    std::string pencil, point, out, cert_path, spec_path, out_dir, builtin, target = "matrix", purify_mode = "full",
                                                                           solver_trace;
    std::uint64_t seed = 1;
    int frozen = 0, level = 3, budget = 100, max_fails = 10, g = 2, d = 2, n = 2;
    bool two_stage = false;
    TolFlags tol;

    auto* classify_cmd = app.add_subcommand("classify", "classify a point of D_A");
    classify_cmd->add_option("--pencil", pencil, "defining tuple A (JSON)")->required();
    classify_cmd->add_option("--point", point, "point X (JSON)")->required();
    classify_cmd->add_option("--out", out, "write the report here instead of stdout");
    tol.attach(classify_cmd);

    auto* dilate_cmd = app.add_subcommand("dilate", "dilate a point to an extreme point");
    dilate_cmd->add_option("--pencil", pencil)->required();
    dilate_cmd->add_option("--point", point)->required();
    dilate_cmd->add_option("--target", target, "arveson | matrix")->check(CLI::IsMember({"arveson", "matrix"}));
    dilate_cmd->add_option("--seed", seed);
    dilate_cmd->add_option("--purify", purify_mode)->check(CLI::IsMember({"full", "frozen", "off"}));
    dilate_cmd->add_option("--max-fails", max_fails);
    dilate_cmd->add_flag("--two-stage", two_stage, "maximize a random linear functional of gamma after the scale");
    dilate_cmd->add_option("--solver-trace", solver_trace, "append barrier solver progress to this file");
    dilate_cmd->add_option("--out", out);
    tol.attach(dilate_cmd);

    auto* purify_cmd = app.add_subcommand("purify", "snap a numerically singular point onto the boundary");
    purify_cmd->add_option("--pencil", pencil)->required();
    purify_cmd->add_option("--point", point)->required();
    purify_cmd->add_option("--frozen", frozen, "keep the leading n0 x n0 block fixed");
    purify_cmd->add_option("--out", out);
    tol.attach(purify_cmd);

    auto* carath_cmd = app.add_subcommand("carath", "free Caratheodory expansion of a point");
    carath_cmd->add_option("--pencil", pencil)->required();
    carath_cmd->add_option("--point", point)->required();
    carath_cmd->add_option("--seed", seed);
    carath_cmd->add_option("--max-fails", max_fails);
    carath_cmd->add_option("--out", out);
    tol.attach(carath_cmd);

    auto* batch_cmd = app.add_subcommand("carath-batch", "batch Caratheodory expansions; CSV on stdout");
    batch_cmd->add_option("--spec", spec_path)->required();
    batch_cmd->add_option("--out", out_dir, "also write rows.csv, rows.json, rows.md and mu.csv here");

    auto* canon_cmd = app.add_subcommand("canonical-g2d2", "projective map sending a bounded 2x2 pencil to the spin disk");
    canon_cmd->add_option("--pencil", pencil)->required();
    canon_cmd->add_option("--out", out);

    auto* search_cmd = app.add_subcommand("exact-search", "search for an exact matrix-but-not-Arveson point");
    search_cmd->add_option("--pencil", pencil, "rational defining tuple")->required();
    search_cmd->add_option("--n", level, "level of the emitted point");
    search_cmd->add_option("--seed", seed);
    search_cmd->add_option("--budget", budget, "kernel resamples");
    search_cmd->add_option("--out", out);

    auto* verify_cmd = app.add_subcommand("verify", "verify a certificate; exit status 1 on refutation");
    auto* cert_opt = verify_cmd->add_option("--cert", cert_path);
    verify_cmd->add_option("--builtin", builtin)->check(CLI::IsMember({"g3", "g4"}))->excludes(cert_opt);
    verify_cmd->add_option("--out", out);
    tol.attach(verify_cmd);

    auto* exp_cmd = app.add_subcommand("experiment", "run a batch experiment");
    exp_cmd->add_option("--spec", spec_path)->required();
    exp_cmd->add_option("--out", out_dir)->required();

    auto* sweep_cmd = app.add_subcommand("tol-sweep", "tolerance sensitivity over a classification batch");
    sweep_cmd->add_option("--spec", spec_path)->required();
    sweep_cmd->add_option("--out", out_dir, "output directory for the sweep tables");

    auto* sample_cmd = app.add_subcommand("sample", "random bounded pencil and an interior point");
    sample_cmd->add_option("--g", g);
    sample_cmd->add_option("--d", d);
    sample_cmd->add_option("--n", n);
    sample_cmd->add_option("--seed", seed);
    sample_cmd->add_option("--pencil-out", pencil)->required();
    sample_cmd->add_option("--point-out", point)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*classify_cmd) {
            const auto A = read_tuple_file(pencil).numeric;
            const auto X = read_tuple_file(point).numeric;
            emit(report_to_json(classify(A, X, tol.resolve())), out);
        } else if (*dilate_cmd) {
            const auto A = read_tuple_file(pencil).numeric;
            const auto X = read_tuple_file(point).numeric;
            DilateOptions opts;
            opts.target = target == "arveson" ? Target::arveson_only : Target::matrix_or_arveson;
            opts.purify = parse_purify(purify_mode);
            opts.max_fails = max_fails;
            opts.mode = two_stage ? DilationMode::two_stage : DilationMode::keep_gamma;
            std::unique_ptr<std::ofstream> trace;
            if (!solver_trace.empty()) {
                trace = std::make_unique<std::ofstream>(solver_trace, std::ios::app);
                opts.solver.trace = trace.get();
            }
            Rng rng(seed_or_env(seed));
            const auto t = dilate_to_extreme(A, X, opts, tol.resolve(), rng);
            emit(trace_to_json(t), out);
            return t.verdict == Verdict::failed ? 2 : 0;
        } else if (*purify_cmd) {
            const auto A = read_tuple_file(pencil).numeric;
            const auto X = read_tuple_file(point).numeric;
            const auto r = purify(A, X, frozen, tol.resolve());
            emit({{"point", tuple_to_json(r.point)},
                  {"eta", r.eta},
                  {"k_before", r.k_before},
                  {"k_after", r.k_after},
                  {"accuracy_before", r.accuracy_before},
                  {"accuracy_after", r.accuracy_after},
                  {"max_change", r.max_change}},
                 out);
        } else if (*carath_cmd) {
            const auto A = read_tuple_file(pencil).numeric;
            const auto X = read_tuple_file(point).numeric;
            CarathOptions opts;
            opts.max_fails = max_fails;
            Rng rng(seed_or_env(seed));
            const auto e = carath_expand(A, X, opts, tol.resolve(), rng);
            emit(expansion_to_json(e), out);
            return e.ok ? 0 : 2;
        } else if (*batch_cmd) {
            ExperimentSpec spec = load_spec(spec_path);
            if (spec.mode != ExperimentMode::carath_sweep && spec.mode != ExperimentMode::estimate_sweep)
                spec.mode = ExperimentMode::carath_sweep;
            const auto r = run_experiment(spec);
            std::cout << rows_csv(r);
            if (!out_dir.empty()) write_outputs(r, out_dir);
        } else if (*canon_cmd) {
            const auto A = read_tuple_file(pencil).numeric;
            try {
                const auto W = spin_disk_W(A);
                json w = json::array();
                for (int i = 0; i < W.W.rows(); ++i) {
                    json row = json::array();
                    for (int j = 0; j < W.W.cols(); ++j) row.push_back(W.W(i, j));
                    w.push_back(row);
                }
                emit({{"W", w},
                      {"det", W.W.determinant()},
                      {"det_closed_form", spin_disk_det_closed_form(A)},
                      {"condition", W.condition},
                      {"image", tuple_to_json(image_pencil(W.W, A))}},
                     out);
            } catch (const UnboundedPencil& e) {
                json wit = json::array();
                for (int i = 0; i < e.witness().size(); ++i) wit.push_back(e.witness()(i));
                emit({{"error", e.what()}, {"recession_direction", wit}}, out);
                return 2;
            }
        } else if (*search_cmd) {
            const auto doc = read_tuple_file(pencil);
            if (doc.mode != NumericMode::rational) throw std::invalid_argument("exact-search needs a rational pencil");
            Rng rng(seed_or_env(seed));
            ExactSearchOptions opt;
            opt.budget = budget;
            const auto r = exact_search(doc.exact, level, rng, opt);
            json stats = {{"attempts", r.attempts},      {"no_solution", r.no_solution}, {"not_psd", r.not_psd},
                          {"no_beta", r.no_beta},        {"no_root", r.no_root},         {"p2_vanishes", r.p2_vanishes},
                          {"not_extreme", r.not_extreme}};
            if (!r.cert) {
                std::cerr << "no certificate within budget: " << stats.dump() << "\n";
                return 2;
            }
            json j = certificate_to_json(*r.cert);
            j["search"] = stats;
            emit(j, out);
        } else if (*verify_cmd) {
            Certificate cert;
            if (builtin == "g3") cert = builtin_certificate_g3();
            else if (builtin == "g4") cert = builtin_certificate_g4();
            else if (!cert_path.empty()) cert = certificate_from_json(read_json(cert_path));
            else throw std::invalid_argument("verify needs --cert or --builtin");
            const auto r = verify_certificate(cert, tol.resolve());
            emit(certificate_report_to_json(r), out);
            return r.passed ? 0 : 1;
        } else if (*exp_cmd) {
            const auto r = run_experiment(load_spec(spec_path));
            write_outputs(r, out_dir);
            std::cout << rows_markdown(r);
        } else if (*sweep_cmd) {
            ExperimentSpec spec = load_spec(spec_path);
            spec.mode = ExperimentMode::tolerance_sweep;
            const auto r = run_experiment(spec);
            std::cout << rows_markdown(r);
            if (!out_dir.empty()) write_outputs(r, out_dir);
        } else if (*sample_cmd) {
            Rng rng(seed_or_env(seed));
            const auto A = random_defining_tuple(g, d, rng);
            const auto X = random_interior_point(A, n, rng);
            emit(tuple_to_json(A), pencil);
            emit(tuple_to_json(X), point);
        }
    } catch (const std::exception& e) {
        std::cerr << "spectrex: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
