#include "mengerlab/cli.hpp"

#include <omp.h>

#include <CLI11.hpp>
#include <array>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <sstream>

#include "mengerlab/construction.hpp"
#include "mengerlab/harness.hpp"

namespace mengerlab::cli {

namespace {

using nlohmann::json;

void apply_threads(int threads) {
    if (threads <= 0) {
        if (const char* env = std::getenv("MENGERLAB_THREADS")) threads = std::atoi(env);
    }
    if (threads > 0) omp_set_num_threads(threads);
}

std::array<double, 3> parse_triple(const std::string& spec, const char* what) {
    const auto first = spec.find(':');
    const auto second = spec.find(':', first + 1);
    if (first == std::string::npos || second == std::string::npos)
        throw BadParams(std::string(what) + " must be a:b:c");
    return {std::stod(spec.substr(0, first)),
            std::stod(spec.substr(first + 1, second - first - 1)),
            std::stod(spec.substr(second + 1))};
}

ScaleGrid parse_scales(const std::string& spec) {
    const auto t = parse_triple(spec, "scales");
    return ScaleGrid{t[0], t[1], static_cast<int>(t[2])};
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream out(path);
    if (!out) throw BadParams("cannot open output file " + path);
    out << text;
}

json report_to_json(const InequalityReport& rep) {
    json j;
    j["experiment"] = rep.experiment;
    j["hypothesis_met"] = rep.hypothesis_met;
    j["lhs"] = rep.lhs;
    j["rhs"] = rep.rhs;
    j["empirical_C"] = rep.empirical_C;
    j["config"] = rep.config;
    json tables = json::array();
    for (const auto& row : rep.table)
        tables.push_back({row[0], row[1], row[2], row[3]});
    j["tables"] = tables;
    return j;
}

json estimate_to_json(const CurvatureEstimate& est) {
    return json{{"value", est.value},
                {"stderr", est.stderr_},
                {"method", est.method == CurvatureMethod::Exact ? "exact" : "mc"},
                {"tuples", est.tuples_evaluated}};
}

struct GenerateCli {
    GenerateParams params;
    std::uint64_t seed = 1;
    std::string output;
};

int run_generate(const GenerateCli& g) {
    const DiscreteMeasure mu = generate(g.params, g.seed);
    mu.save_csv(g.output);
    std::cout << "wrote " << mu.size() << " points to " << g.output << "\n";
    return 0;
}

}  // namespace

int run(int argc, const char* const* argv) {
    CLI::App app{"discrete integral Menger curvature laboratory"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "OpenMP thread count (env MENGERLAB_THREADS)");

    // ---- generate ----
    GenerateCli gen;
    auto* cmd_gen = app.add_subcommand("generate", "generate a sample measure");
    cmd_gen->add_option("--kind", gen.params.kind,
                        "segment|plane_patch|lipschitz_graph|sphere|four_corner_cantor|cantor_product")
        ->required();
    cmd_gen->add_option("--ambient-dim", gen.params.ambient_dim, "ambient dimension N");
    cmd_gen->add_option("--intrinsic-dim", gen.params.intrinsic_dim, "intrinsic dimension n");
    cmd_gen->add_option("--n-points", gen.params.n_points, "sample count");
    cmd_gen->add_option("--depth", gen.params.depth, "cantor recursion depth");
    cmd_gen->add_option("--lipschitz", gen.params.lipschitz, "slope bound for lipschitz_graph");
    cmd_gen->add_option("--coeff", gen.params.coefficients, "shape coefficients for lipschitz_graph");
    cmd_gen->add_option("--domain-halfwidth", gen.params.domain_halfwidth, "half width of the domain box");
    cmd_gen->add_option("--noise", gen.params.noise, "gaussian jitter sigma");
    cmd_gen->add_option("--seed", gen.seed, "rng seed");
    cmd_gen->add_option("--output", gen.output, "output CSV path")->required();

    // ---- beta ----
    struct {
        std::string input, output = "-", scales = "0.05:2:12";
        int intrinsic_dim = 1, x_index = -1;
        bool all_points = false;
        double k = 4.0, p = 2.0, lambda = 0.01, k0 = 1.0;
    } beta_cli;
    auto* cmd_beta = app.add_subcommand("beta", "beta numbers over a scale grid");
    cmd_beta->add_option("--input", beta_cli.input)->required();
    cmd_beta->add_option("--intrinsic-dim", beta_cli.intrinsic_dim);
    cmd_beta->add_option("--x-index", beta_cli.x_index, "evaluate at one point index");
    cmd_beta->add_flag("--all-points", beta_cli.all_points, "evaluate at every point");
    cmd_beta->add_option("--scales", beta_cli.scales, "min:max:count geometric grid");
    cmd_beta->add_option("--k", beta_cli.k);
    cmd_beta->add_option("--p", beta_cli.p);
    cmd_beta->add_option("--lambda", beta_cli.lambda);
    cmd_beta->add_option("--k0", beta_cli.k0);
    cmd_beta->add_option("--output", beta_cli.output, "CSV output (default stdout)");

    // ---- curvature ----
    struct {
        std::string input, output = "-", integrand = "k1", local;
        int intrinsic_dim = 1;
        double p = 2.0;
        bool exact = false, mc = false;
        std::uint64_t samples = 100000, seed = 1;
    } curv_cli;
    auto* cmd_curv = app.add_subcommand("curvature", "integral Menger curvature");
    cmd_curv->add_option("--input", curv_cli.input)->required();
    cmd_curv->add_option("--intrinsic-dim", curv_cli.intrinsic_dim);
    cmd_curv->add_option("--integrand", curv_cli.integrand, "k1..k6");
    cmd_curv->add_option("--p", curv_cli.p, "exponent (default: the kind's natural p)")
        ->default_val(-1.0);
    cmd_curv->add_flag("--exact", curv_cli.exact);
    cmd_curv->add_flag("--mc", curv_cli.mc);
    cmd_curv->add_option("--samples", curv_cli.samples);
    cmd_curv->add_option("--seed", curv_cli.seed);
    cmd_curv->add_option("--local", curv_cli.local, "x_id:t:kappa localized version");
    cmd_curv->add_option("--output", curv_cli.output, "JSON output (default stdout)");

    // ---- verify ----
    struct {
        std::string experiment, input, output = "-";
        int intrinsic_dim = 1, x_index = 0, grid_count = 12, n_points = 64, depth = 3;
        double p = 2.0, t = 1.0, k = 4.0, k1 = 8.0, k0 = 1.0, lambda = 0.01;
        std::string integrand = "k1", scales;
        std::string flat_kind = "segment", fractal_kind = "four_corner_cantor";
        std::uint64_t seed = 1, mc_samples = 0;
        double ball_radius = 1.0;
    } ver;
    auto* cmd_ver = app.add_subcommand("verify", "inequality experiments");
    cmd_ver->add_option("--experiment", ver.experiment, "pointwise|global|contrast|simplex")
        ->required();
    cmd_ver->add_option("--input", ver.input);
    cmd_ver->add_option("--intrinsic-dim", ver.intrinsic_dim);
    cmd_ver->add_option("--integrand", ver.integrand);
    cmd_ver->add_option("--p", ver.p);
    cmd_ver->add_option("--x-index", ver.x_index);
    cmd_ver->add_option("--t", ver.t);
    cmd_ver->add_option("--k", ver.k);
    cmd_ver->add_option("--k1", ver.k1);
    cmd_ver->add_option("--k0", ver.k0);
    cmd_ver->add_option("--lambda", ver.lambda);
    cmd_ver->add_option("--grid-count", ver.grid_count);
    cmd_ver->add_option("--scales", ver.scales, "min:max:count for the global bound");
    cmd_ver->add_option("--flat-kind", ver.flat_kind);
    cmd_ver->add_option("--fractal-kind", ver.fractal_kind);
    cmd_ver->add_option("--n-points", ver.n_points);
    cmd_ver->add_option("--depth", ver.depth);
    cmd_ver->add_option("--seed", ver.seed);
    cmd_ver->add_option("--mc-samples", ver.mc_samples);
    cmd_ver->add_option("--ball-radius", ver.ball_radius);
    cmd_ver->add_option("--output", ver.output);

    // ---- construct / classify ----
    struct {
        std::string input, output_state, output_graph, output_labels = "-";
        int intrinsic_dim = 1, levels = 24;
        double epsilon = 0.1, alpha = 0.25, k = 4.0, coverage_tol = 1e-9;
    } con;
    auto* cmd_con = app.add_subcommand("construct", "stopping-time graph construction");
    cmd_con->add_option("--input", con.input)->required();
    cmd_con->add_option("--intrinsic-dim", con.intrinsic_dim);
    cmd_con->add_option("--epsilon", con.epsilon);
    cmd_con->add_option("--alpha", con.alpha);
    cmd_con->add_option("--k", con.k);
    cmd_con->add_option("--scales,--levels", con.levels, "number of dyadic scale levels");
    cmd_con->add_option("--coverage-tol", con.coverage_tol);
    cmd_con->add_option("--output-state", con.output_state, "JSON state summary");
    cmd_con->add_option("--output-graph", con.output_graph, "CSV of (u grid, A(u))");

    auto* cmd_cls = app.add_subcommand("classify", "per-point stopping-time labels");
    cmd_cls->add_option("--input", con.input)->required();
    cmd_cls->add_option("--intrinsic-dim", con.intrinsic_dim);
    cmd_cls->add_option("--epsilon", con.epsilon);
    cmd_cls->add_option("--alpha", con.alpha);
    cmd_cls->add_option("--k", con.k);
    cmd_cls->add_option("--scales,--levels", con.levels);
    cmd_cls->add_option("--output", con.output_labels, "CSV output (default stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {  // --help
            std::cout << app.help();
            return 0;
        }
        std::cerr << e.what() << "\n" << app.help();
        return 1;
    }

    try {
        apply_threads(threads);

        if (cmd_gen->parsed()) return run_generate(gen);

        if (cmd_beta->parsed()) {
            const DiscreteMeasure mu = DiscreteMeasure::load_csv(beta_cli.input,
                                                                 beta_cli.intrinsic_dim);
            const ScaleGrid grid = parse_scales(beta_cli.scales);
            std::vector<int> targets;
            if (beta_cli.all_points)
                for (int i = 0; i < mu.size(); ++i) targets.push_back(i);
            else if (beta_cli.x_index >= 0)
                targets.push_back(beta_cli.x_index);
            else
                throw BadParams("beta: give --x-index or --all-points");
            std::ostringstream out;
            out << "point_id,t,beta,delta,delta_tilde,indicator\n";
            for (int i : targets) {
                for (double t : grid.levels()) {
                    const double b = beta_best(mu, mu.point(i), t, beta_cli.k, beta_cli.p).value;
                    const double dv = delta(mu, {mu.point(i), t});
                    const double dt = delta_tilde(mu, {mu.point(i), t}, beta_cli.k0);
                    out << i << "," << t << "," << b << "," << dv << "," << dt << ","
                        << (dt >= beta_cli.lambda ? 1 : 0) << "\n";
                }
            }
            write_text(beta_cli.output, out.str());
            return 0;
        }

        if (cmd_curv->parsed()) {
            const DiscreteMeasure mu = DiscreteMeasure::load_csv(curv_cli.input,
                                                                 curv_cli.intrinsic_dim);
            const IntegrandKind kind = integrand_from_string(curv_cli.integrand);
            const double p = curv_cli.p > 0.0 ? curv_cli.p
                                              : default_exponent(kind, mu.intrinsic_dim());
            json j;
            if (!curv_cli.local.empty()) {
                const auto triple = parse_triple(curv_cli.local, "local");
                LocalRegion region{mu.point(static_cast<int>(triple[0])), triple[1], triple[2]};
                const double value = curvature_local(mu, kind, p, region);
                j = json{{"value", value}, {"stderr", 0.0}, {"method", "local"},
                         {"tuples", 0}};
            } else if (curv_cli.mc) {
                j = estimate_to_json(curvature_mc(mu, kind, p, curv_cli.samples, curv_cli.seed));
            } else {
                j = estimate_to_json(curvature_exact(mu, kind, p));
            }
            write_text(curv_cli.output, j.dump(2) + "\n");
            return 0;
        }

        if (cmd_ver->parsed()) {
            json j;
            const IntegrandKind kind = integrand_from_string(ver.integrand);
            if (ver.experiment == "pointwise") {
                const DiscreteMeasure mu = DiscreteMeasure::load_csv(ver.input, ver.intrinsic_dim);
                j = report_to_json(verify_pointwise_bound(mu, kind, ver.p, ver.x_index, ver.t,
                                                          ver.k, ver.k1, ver.lambda));
            } else if (ver.experiment == "global") {
                const DiscreteMeasure mu = DiscreteMeasure::load_csv(ver.input, ver.intrinsic_dim);
                ScaleGrid grid{mu.resolution(), 2.0 * mu.diameter(), ver.grid_count};
                if (!ver.scales.empty()) grid = parse_scales(ver.scales);
                j = report_to_json(verify_global_bound(mu, kind, ver.p, ver.k, ver.k0,
                                                       ver.lambda, grid));
            } else if (ver.experiment == "contrast") {
                ContrastConfig cfg;
                cfg.flat.kind = ver.flat_kind;
                cfg.flat.n_points = ver.n_points;
                cfg.fractal.kind = ver.fractal_kind;
                cfg.fractal.depth = ver.depth;
                cfg.seed = ver.seed;
                cfg.kind = kind;
                cfg.p = ver.p;
                cfg.k = ver.k;
                cfg.k0 = ver.k0;
                cfg.lambda = ver.lambda;
                cfg.mc_samples = ver.mc_samples;
                const ContrastReport rep = contrast_experiment(cfg);
                j["experiment"] = "contrast";
                j["flat"] = estimate_to_json(rep.flat_curvature);
                j["fractal"] = estimate_to_json(rep.fractal_curvature);
                j["flat_multiscale_beta"] = rep.flat_multiscale_beta;
                j["fractal_multiscale_beta"] = rep.fractal_multiscale_beta;
            } else if (ver.experiment == "simplex") {
                const DiscreteMeasure mu = DiscreteMeasure::load_csv(ver.input, ver.intrinsic_dim);
                const SimplexSearchReport rep = simplex_search_check(
                    mu, {mu.point(ver.x_index), ver.ball_radius}, ver.lambda);
                j = json{{"experiment", "simplex"},
                         {"found", rep.found},
                         {"sigma", rep.sigma},
                         {"c1_empirical", rep.c1_empirical},
                         {"c2_empirical", rep.c2_empirical},
                         {"vertex_ball_masses", rep.vertex_ball_masses}};
            } else {
                throw BadParams("verify: unknown experiment " + ver.experiment);
            }
            write_text(ver.output, j.dump(2) + "\n");
            return 0;
        }

        if (cmd_con->parsed() || cmd_cls->parsed()) {
            const DiscreteMeasure mu = DiscreteMeasure::load_csv(con.input, con.intrinsic_dim);
            StoppingParams params;
            params.epsilon = con.epsilon;
            params.alpha = con.alpha;
            params.k = con.k;
            params.levels = con.levels;
            const StoppingState state = build_stopping_state(mu, params);

            if (cmd_cls->parsed()) {
                std::ostringstream out;
                out << "point_id,label,h,d\n";
                for (int i = 0; i < state.measure().size(); ++i)
                    out << i << "," << label_name(state.label(i)) << "," << state.h(i) << ","
                        << state.d(i) << "\n";
                write_text(con.output_labels, out.str());
                return 0;
            }

            const std::vector<WhitneyCube> cubes = whitney_decompose(state);
            const GraphFunction graph = build_graph(state, cubes);
            const CoverageReport cov = coverage_report(state, graph, con.coverage_tol);

            if (!con.output_state.empty()) {
                json j;
                j["scales"] = state.scales();
                j["delta_threshold"] = params.effective_delta(
                    state.measure().intrinsic_dim(), state.measure().ambient_dim());
                j["cubes"] = cubes.size();
                j["patches"] = graph.patches().size();
                j["coverage"] = cov.coverage;
                j["mass"] = {{"Z", cov.mass_z}, {"F1", cov.mass_f1}, {"F2", cov.mass_f2},
                             {"F3", cov.mass_f3}, {"G", cov.mass_g},
                             {"F_tilde", cov.mass_f_tilde}};
                json labels = json::array();
                for (int i = 0; i < state.measure().size(); ++i)
                    labels.push_back({{"id", i}, {"label", label_name(state.label(i))},
                                      {"h", state.h(i)}, {"d", state.d(i)}});
                j["points"] = labels;
                write_text(con.output_state, j.dump(2) + "\n");
            }
            if (!con.output_graph.empty()) {
                std::ostringstream out;
                const int n = graph.intrinsic_dim();
                const int dim = state.measure().ambient_dim();
                for (int c = 0; c < n; ++c) out << "u" << c << ",";
                for (int c = 0; c < dim; ++c) out << "a" << c << (c + 1 < dim ? "," : "\n");
                for (const auto& u : graph.domain_samples()) {
                    const auto value = graph.evaluate(u);
                    if (!value) continue;
                    for (int c = 0; c < n; ++c) out << u(c) << ",";
                    for (int c = 0; c < dim; ++c)
                        out << (*value)(c) << (c + 1 < dim ? "," : "\n");
                }
                write_text(con.output_graph, out.str());
            }
            std::cout << "coverage " << cov.coverage << " with " << cubes.size()
                      << " cubes and " << graph.patches().size() << " patches\n";
            return 0;
        }
    } catch (const std::exception& e) {
        const char* code = "Error";
        if (dynamic_cast<const TooLarge*>(&e)) code = "TooLarge";
        else if (dynamic_cast<const BadParams*>(&e)) code = "BadParams";
        else if (dynamic_cast<const EmptyMeasure*>(&e)) code = "EmptyMeasure";
        else if (dynamic_cast<const EmptyBall*>(&e)) code = "EmptyBall";
        else if (dynamic_cast<const NoGoodBall*>(&e)) code = "NoGoodBall";
        else if (dynamic_cast<const ProjectionNotInjective*>(&e)) code = "ProjectionNotInjective";
        else if (dynamic_cast<const OutOfDomain*>(&e)) code = "OutOfDomain";
        else if (dynamic_cast<const TooFewPoints*>(&e)) code = "TooFewPoints";
        else if (dynamic_cast<const DegenerateInput*>(&e)) code = "DegenerateInput";
        json err{{"error", code}, {"message", e.what()}};
        std::cerr << err.dump() << "\n";
        return 2;
    }
    return 1;
}

}  // namespace mengerlab::cli
