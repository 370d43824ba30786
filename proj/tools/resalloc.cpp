// Command-line front end: generate instances, run the solvers, print
// certificates, and reproduce the benchmark sweeps.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "resalloc/certificates.hpp"
#include "resalloc/experiment.hpp"
#include "resalloc/format.hpp"
#include "resalloc/json_io.hpp"
#include "resalloc/solvers.hpp"

namespace {

constexpr const char* kVersion = "0.1.0";

using namespace resalloc;

std::filesystem::path resolve_out(const std::string& path) {
    std::filesystem::path p(path);
    if (p.is_relative()) {
        if (const char* base = std::getenv("RESALLOC_OUT_DIR")) p = std::filesystem::path(base) / p;
    }
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    return p;
}

ordered_json argv_meta(int argc, char** argv) {
    ordered_json j;
    ordered_json args = ordered_json::array();
    for (int i = 0; i < argc; ++i) args.push_back(std::string(argv[i]));
    j["argv"] = args;
    j["version"] = kVersion;
    j["generator"] = kGeneratorName;
    return j;
}

void write_sidecar(const std::filesystem::path& out, const ordered_json& meta) {
    write_json_file(meta, out.string() + ".meta.json");
}

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::size_t pos = 0;
    while (pos < csv.size()) {
        const auto comma = csv.find(',', pos);
        const auto token = csv.substr(pos, comma == std::string::npos ? comma : comma - pos);
        out.push_back(std::stod(token));
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    return out;
}

AlphaDistribution parse_dist(const std::string& name) {
    if (name == "uniform") return AlphaDistribution::uniform;
    if (name == "normal" || name == "truncated_normal")
        return AlphaDistribution::truncated_normal;
    throw CLI::ValidationError("--alpha-dist", "must be uniform or normal");
}

struct GenerateArgs {
    std::size_t n = 100;
    double demand = 10000.0;
    double mu = 2.0;
    std::string alpha_dist = "uniform";
    std::uint64_t seed = 1;
    std::string out;
    std::string experiment_id = "resalloc";
    double alpha_lo = 100.0, alpha_hi = 400.0, alpha_mean = 250.0, alpha_sd = 50.0;
};

int cmd_generate(const GenerateArgs& args, int argc, char** argv) {
    ExperimentSpec spec;
    spec.producers = args.n;
    spec.demand = args.demand;
    spec.mus = {args.mu};
    spec.alpha_dist = parse_dist(args.alpha_dist);
    spec.alpha_lo = args.alpha_lo;
    spec.alpha_hi = args.alpha_hi;
    spec.alpha_mean = args.alpha_mean;
    spec.alpha_sd = args.alpha_sd;
    spec.experiment_id = args.experiment_id;
    const auto inst = generate_instance(spec, args.seed);
    const auto report = validate(inst);
    if (!report.ok()) {
        std::cerr << "generated instance failed validation: " << report.violations.front()
                  << "\n";
        return 1;
    }
    const auto out = resolve_out(args.out);
    write_json_file(instance_to_json(inst, instance_meta(spec, args.seed)), out.string());
    write_sidecar(out, argv_meta(argc, argv));
    std::cout << "wrote " << out.string() << " (n=" << inst.size() << ", C="
              << format_double(inst.demand) << ")\n";
    return 0;
}

struct SolveArgs {
    std::string instance;
    std::string method = "composite";
    std::size_t iters = 0;
    double eps = 0.0;
    std::string p0;
    std::string out;
    std::size_t cadence = 0;
    std::optional<double> lipschitz;
    std::size_t cap = 10'000'000;
};

template <class Records>
void write_run_csv(const std::filesystem::path& path, const Records& history) {
    std::string csv = "t,dual_value,primal_avg,duality_gap,infeasibility\n";
    for (const auto& rec : history) {
        csv += format_size(rec.t);
        csv += "," + format_double(rec.dual_value);
        csv += "," + format_double(rec.primal_avg_value);
        csv += "," + format_double(rec.duality_gap);
        csv += "," + format_double(rec.infeasibility);
        csv += "\n";
    }
    std::ofstream outf(path, std::ios::binary);
    if (!outf) throw std::runtime_error("cannot open for writing: " + path.string());
    outf << csv;
}

int cmd_solve(const SolveArgs& args, int argc, char** argv) {
    const auto loaded = load_instance(args.instance);
    if (loaded.is_vector) {
        // Vector instances: composite / accelerated only.
        const auto method = method_from_name(args.method);
        if (!method || *method == Method::subgradient) {
            std::cerr << "vector instances support --method composite|accelerated\n";
            return 1;
        }
        VectorSolverConfig config;
        config.method = *method;
        config.iterations = args.iters;
        config.record_cadence = args.cadence ? args.cadence
                                             : std::max<std::size_t>(1, args.iters / 10000);
        config.lipschitz_override = args.lipschitz;
        const auto run = solve(loaded.vector, config);
        const auto cert = measure(loaded.vector, run);
        const auto out = resolve_out(args.out);
        write_run_csv(out, run.history);
        const auto cert_path = out.parent_path() / (out.stem().string() + ".cert.json");
        write_json_file(certificate_to_json(cert), cert_path.string());
        write_sidecar(out, argv_meta(argc, argv));
        std::cout << "duality_gap=" << format_double(cert.measured_gap)
                  << " bound=" << format_double(cert.gap_bound)
                  << (cert.pass_gap && cert.pass_infeas ? " [pass]" : " [FAIL]") << "\n";
        return cert.pass_gap && cert.pass_infeas ? 0 : 2;
    }

    const auto& inst = loaded.scalar;
    SolverConfig config;
    const auto method = method_from_name(args.method);
    if (!method) {
        std::cerr << "unknown method: " << args.method << "\n";
        return 1;
    }
    config.method = *method;
    config.iterations = args.iters;
    config.epsilon = args.eps;
    config.lipschitz_override = args.lipschitz;
    config.iteration_cap = args.cap;
    if (!args.p0.empty()) {
        auto vals = parse_doubles(args.p0);
        config.start = vals.size() == 1 ? PriceVector(inst.size(), vals[0]) : vals;
    }

    RunResult run;
    if (config.method == Method::subgradient) {
        const auto req = subgradient_requirements(inst, config.epsilon);
        const double planned = std::min(
            req.iterations,
            static_cast<double>(config.iterations ? std::min(config.iterations, config.iteration_cap)
                                                  : config.iteration_cap));
        config.record_cadence =
            args.cadence ? args.cadence
                         : static_cast<std::size_t>(std::max(1.0, std::floor(planned / 10000.0)));
        run = subgradient_solve(inst, config);
    } else {
        config.record_cadence = args.cadence ? args.cadence
                                             : std::max<std::size_t>(1, args.iters / 10000);
        run = solve(inst, config);
    }
    const auto cert = measure(inst, run);

    const auto out = resolve_out(args.out);
    write_run_csv(out, run.history);
    const auto cert_path = out.parent_path() / (out.stem().string() + ".cert.json");
    write_json_file(certificate_to_json(cert), cert_path.string());
    write_sidecar(out, argv_meta(argc, argv));

    std::cout << "method=" << method_name(run.method) << " iterations="
              << format_size(run.iterations)
              << (run.cap_exceeded ? " (capped below the required count)" : "") << "\n";
    std::cout << "duality_gap=" << format_double(cert.measured_gap)
              << " bound=" << format_double(cert.gap_bound) << "\n";
    std::cout << "infeasibility=" << format_double(cert.measured_infeas)
              << " bound=" << format_double(cert.infeas_bound) << "\n";
    if (!cert.bound_applicable) {
        std::cout << "certificate not applicable (run capped below the required iteration count)\n";
        return 0;
    }
    if (!cert.pass_gap || !cert.pass_infeas) {
        std::cerr << "PROVEN BOUND VIOLATED - this indicates an implementation bug\n";
        return 2;
    }
    return 0;
}

struct CertifyArgs {
    std::string instance;
    std::string method = "composite";
    std::size_t iters = 0;
    double eps = 0.0;
};

int cmd_certify(const CertifyArgs& args) {
    const auto loaded = load_instance(args.instance);
    const auto method = method_from_name(args.method);
    if (!method) {
        std::cerr << "unknown method: " << args.method << "\n";
        return 1;
    }
    if (loaded.is_vector) {
        const auto& inst = loaded.vector;
        const double p_max = p_max_bound(inst);
        std::cout << "p_max=" << format_double(p_max) << "\n";
        std::cout << "R=" << format_double(iterate_radius(p_max, inst.size())) << "\n";
        std::cout << "L_psi=" << format_double(inst.gradient_lipschitz()) << "\n";
        const auto b = vector_bounds(inst, args.iters, *method);
        std::cout << "gap_bound=" << format_double(b.gap_bound) << "\n";
        std::cout << "infeas_bound=" << format_double(b.infeas_bound) << "\n";
        return 0;
    }
    const auto& inst = loaded.scalar;
    const double p_max = p_max_bound(inst);
    std::cout << "p_max=" << format_double(p_max) << "\n";
    std::cout << "R=" << format_double(iterate_radius(p_max, inst.size())) << "\n";
    std::cout << "L_psi=" << format_double(inst.gradient_lipschitz()) << "\n";
    switch (*method) {
        case Method::subgradient: {
            const auto req = subgradient_requirements(inst, args.eps);
            std::cout << "stepsize=" << format_double(req.stepsize) << "\n";
            std::cout << "iterations=" << format_double(req.iterations) << "\n";
            std::cout << "gap_bound=" << format_double(args.eps) << "\n";
            std::cout << "infeas_bound=" << format_double(req.infeas_tol) << "\n";
            break;
        }
        case Method::composite: {
            const auto b = composite_bounds(inst, args.iters);
            std::cout << "gap_bound=" << format_double(b.gap_bound) << "\n";
            std::cout << "infeas_bound=" << format_double(b.infeas_bound) << "\n";
            break;
        }
        case Method::accelerated: {
            const auto b = accelerated_bounds(inst, args.iters);
            std::cout << "gap_bound=" << format_double(b.gap_bound) << "\n";
            std::cout << "infeas_bound=" << format_double(b.infeas_bound) << "\n";
            std::cout << "infeas_bound_radius_scaled="
                      << format_double(accelerated_infeas_bound_radius_scaled(inst, args.iters))
                      << "\n";
            break;
        }
    }
    return 0;
}

struct SweepArgs {
    std::size_t n = 100;
    double demand = 10000.0;
    std::string mus = "2";
    std::size_t seeds = 20;
    std::string seed_list;
    std::size_t iters = 1000;
    std::string methods = "composite,accelerated";
    std::string alpha_dist = "uniform";
    std::string out_dir;
    bool svg = false;
    double eps = 1.0;
    std::string experiment_id = "resalloc";
    std::size_t threads = 0;
};

ExperimentSpec spec_from_sweep(const SweepArgs& args) {
    ExperimentSpec spec;
    spec.producers = args.n;
    spec.demand = args.demand;
    spec.mus = parse_doubles(args.mus);
    if (!args.seed_list.empty()) {
        spec.seeds.clear();
        for (double v : parse_doubles(args.seed_list))
            spec.seeds.push_back(static_cast<std::uint64_t>(v));
    } else {
        spec.seeds.clear();
        for (std::size_t s = 1; s <= args.seeds; ++s) spec.seeds.push_back(s);
    }
    spec.methods.clear();
    std::size_t pos = 0;
    const std::string& ms = args.methods;
    while (pos < ms.size()) {
        const auto comma = ms.find(',', pos);
        const auto token = ms.substr(pos, comma == std::string::npos ? comma : comma - pos);
        const auto m = method_from_name(token);
        if (!m) throw CLI::ValidationError("--methods", "unknown method " + token);
        spec.methods.push_back(*m);
        if (comma == std::string::npos) break;
        pos = comma + 1;
    }
    spec.iterations = args.iters;
    spec.alpha_dist = parse_dist(args.alpha_dist);
    spec.epsilon = args.eps;
    spec.experiment_id = args.experiment_id;
    spec.threads = args.threads;
    return spec;
}

std::filesystem::path sweep_out_dir(const std::string& flag) {
    if (!flag.empty()) return resolve_out(flag);
    if (const char* base = std::getenv("RESALLOC_OUT_DIR")) return base;
    return ".";
}

int cmd_sweep(const SweepArgs& args, int argc, char** argv) {
    const auto spec = spec_from_sweep(args);
    const auto result = sweep_mu(spec);
    const auto dir = sweep_out_dir(args.out_dir);
    const auto files = emit_plots(result.experiment, dir, args.svg);
    auto meta = argv_meta(argc, argv);
    write_experiment_metadata(result.experiment, dir, files, kVersion);
    std::size_t failed = 0;
    for (const auto& cell : result.experiment.cells)
        if (cell.failed) {
            ++failed;
            std::cerr << "cell failed: method=" << method_name(cell.method)
                      << " mu=" << format_double(cell.mu) << " seed=" << cell.seed << ": "
                      << cell.error << "\n";
        }
    std::cout << "method        mu        final_gap        final_infeas\n";
    for (const auto& row : result.summary) {
        std::printf("%-12s %-8s %-16s %s\n", method_name(row.method),
                    format_double(row.mu).c_str(), format_double(row.final_duality_gap).c_str(),
                    format_double(row.final_infeasibility).c_str());
    }
    std::cout << "wrote " << files.size() << " files to " << dir.string() << "\n";
    return failed < result.experiment.cells.size() ? 0 : 1;
}

struct CompareArgs {
    std::string instance;
    std::size_t iters = 1000;
    double eps = 1.0;
};

int cmd_compare(const CompareArgs& args) {
    const auto loaded = load_instance(args.instance);
    if (loaded.is_vector) {
        std::cerr << "compare expects a scalar instance\n";
        return 1;
    }
    const auto& inst = loaded.scalar;
    struct Row {
        Method method;
        bool ok = false;
        std::string error;
        double dual_certificate = 0.0;
        Certificate cert;
    };
    std::vector<Row> rows;
    for (Method method : {Method::subgradient, Method::composite, Method::accelerated}) {
        Row row;
        row.method = method;
        try {
            SolverConfig config;
            config.method = method;
            config.iterations = args.iters;
            config.epsilon = args.eps;
            config.record_cadence = std::max<std::size_t>(1, args.iters / 100);
            RunResult run;
            if (method == Method::subgradient) {
                const auto req = subgradient_requirements(inst, args.eps);
                run = subgradient_run(inst, config, req.stepsize, args.iters);
                run.epsilon = args.eps;
                run.required_iterations = req.iterations;
                run.cap_exceeded = static_cast<double>(args.iters) < req.iterations;
            } else {
                run = solve(inst, config);
            }
            row.dual_certificate = run.dual_certificate;
            row.cert = measure(inst, run);
            row.ok = true;
        } catch (const std::exception& e) {
            row.error = e.what();
        }
        rows.push_back(std::move(row));
    }
    std::printf("%-12s %-12s %-16s %-16s %-16s\n", "method", "iterations", "dual_cert",
                "duality_gap", "infeasibility");
    std::size_t succeeded = 0;
    for (const auto& row : rows) {
        if (!row.ok) {
            std::printf("%-12s failed: %s\n", method_name(row.method), row.error.c_str());
            continue;
        }
        ++succeeded;
        std::printf("%-12s %-12s %-16s %-16s %-16s\n", method_name(row.method),
                    format_size(row.cert.iterations).c_str(),
                    format_double(row.dual_certificate).c_str(),
                    format_double(row.cert.measured_gap).c_str(),
                    format_double(row.cert.measured_infeas).c_str());
    }
    return succeeded > 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dual first-order solvers for convex resource allocation"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    GenerateArgs gen;
    auto* generate = app.add_subcommand("generate", "write a random quadratic instance");
    generate->add_option("--n", gen.n, "number of producers");
    generate->add_option("--C", gen.demand, "total demand");
    generate->add_option("--mu", gen.mu, "strong-convexity modulus");
    generate->add_option("--alpha-dist", gen.alpha_dist, "uniform|normal");
    generate->add_option("--alpha-lo", gen.alpha_lo, "lower alpha bound");
    generate->add_option("--alpha-hi", gen.alpha_hi, "upper alpha bound");
    generate->add_option("--alpha-mean", gen.alpha_mean, "normal mean");
    generate->add_option("--alpha-sd", gen.alpha_sd, "normal standard deviation");
    generate->add_option("--seed", gen.seed, "generator seed");
    generate->add_option("--experiment-id", gen.experiment_id, "stream identifier");
    generate->add_option("--out", gen.out, "output instance path")->required();

    SolveArgs sol;
    auto* solve_cmd = app.add_subcommand("solve", "run one method on an instance");
    solve_cmd->add_option("--instance", sol.instance, "instance JSON")->required();
    solve_cmd->add_option("--method", sol.method, "subgradient|composite|accelerated");
    auto* iters_opt = solve_cmd->add_option("--iters", sol.iters, "iteration count");
    auto* eps_opt = solve_cmd->add_option("--eps", sol.eps, "subgradient accuracy target");
    solve_cmd->add_option("--p0", sol.p0, "start prices (scalar or comma list)");
    solve_cmd->add_option("--cadence", sol.cadence, "record every k-th iteration");
    double lipschitz_flag = 0.0;
    auto* lips_opt = solve_cmd->add_option("--L", lipschitz_flag, "override the Lipschitz constant");
    solve_cmd->add_option("--cap", sol.cap, "cap on the derived subgradient iteration count");
    solve_cmd->add_option("--out", sol.out, "output CSV path")->required();

    CertifyArgs cert;
    auto* certify = app.add_subcommand("certify", "print bounds without running");
    certify->add_option("--instance", cert.instance, "instance JSON")->required();
    certify->add_option("--method", cert.method, "subgradient|composite|accelerated");
    certify->add_option("--iters", cert.iters, "iteration count");
    certify->add_option("--eps", cert.eps, "subgradient accuracy target");

    SweepArgs sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "grid of (method, mu, seed) runs");
    sweep_cmd->add_option("--n", sweep.n, "number of producers");
    sweep_cmd->add_option("--C", sweep.demand, "total demand");
    sweep_cmd->add_option("--mu", sweep.mus, "comma list of moduli");
    sweep_cmd->add_option("--seeds", sweep.seeds, "use seeds 1..k");
    sweep_cmd->add_option("--seed-list", sweep.seed_list, "explicit comma list of seeds");
    sweep_cmd->add_option("--iters", sweep.iters, "iterations per run");
    sweep_cmd->add_option("--methods", sweep.methods, "comma list of methods");
    sweep_cmd->add_option("--alpha-dist", sweep.alpha_dist, "uniform|normal");
    sweep_cmd->add_option("--eps", sweep.eps, "subgradient accuracy target");
    sweep_cmd->add_option("--out-dir", sweep.out_dir, "output directory");
    sweep_cmd->add_option("--experiment-id", sweep.experiment_id, "stream identifier");
    sweep_cmd->add_option("--threads", sweep.threads, "worker threads (0 = auto)");
    sweep_cmd->add_flag("--svg", sweep.svg, "also write SVG charts");

    CompareArgs cmp;
    auto* compare = app.add_subcommand("compare", "side-by-side table of all methods");
    compare->add_option("--instance", cmp.instance, "instance JSON")->required();
    compare->add_option("--iters", cmp.iters, "iterations per method");
    compare->add_option("--eps", cmp.eps, "subgradient accuracy target");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (generate->parsed()) return cmd_generate(gen, argc, argv);
        if (solve_cmd->parsed()) {
            if (lips_opt->count()) sol.lipschitz = lipschitz_flag;
            const auto method = method_from_name(sol.method);
            if (!method) {
                std::cerr << "unknown method: " << sol.method << "\n";
                return 1;
            }
            if (*method == Method::subgradient && eps_opt->count() == 0) {
                std::cerr << "--method subgradient requires --eps\n";
                return 1;
            }
            if (*method != Method::subgradient) {
                if (iters_opt->count() == 0 || sol.iters == 0) {
                    std::cerr << "--method " << sol.method
                              << " requires a positive --iters\n";
                    return 1;
                }
            }
            return cmd_solve(sol, argc, argv);
        }
        if (certify->parsed()) {
            const auto method = method_from_name(cert.method);
            if (method && *method == Method::subgradient) {
                if (!(cert.eps > 0.0)) {
                    std::cerr << "certify --method subgradient requires --eps\n";
                    return 1;
                }
            } else if (cert.iters == 0) {
                std::cerr << "certify requires a positive --iters\n";
                return 1;
            }
            return cmd_certify(cert);
        }
        if (sweep_cmd->parsed()) return cmd_sweep(sweep, argc, argv);
        if (compare->parsed()) return cmd_compare(cmp);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
