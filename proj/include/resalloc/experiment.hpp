#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "resalloc/certificates.hpp"
#include "resalloc/format.hpp"
#include "resalloc/instance.hpp"
#include "resalloc/json_io.hpp"
#include "resalloc/rng.hpp"
#include "resalloc/solvers.hpp"

namespace resalloc {

enum class AlphaDistribution { uniform, truncated_normal };

inline const char* alpha_distribution_name(AlphaDistribution d) {
    return d == AlphaDistribution::uniform ? "uniform" : "truncated_normal";
}

/// Configuration of one numerical study: instance family, mu sweep values,
/// seeds, methods and iteration budget. Fully determines every output byte.
struct ExperimentSpec {
    std::size_t producers = 100;
    double demand = 10000.0;
    AlphaDistribution alpha_dist = AlphaDistribution::uniform;
    double alpha_lo = 100.0;
    double alpha_hi = 400.0;
    double alpha_mean = 250.0;
    double alpha_sd = 50.0;
    std::vector<double> mus = {2.0};
    std::vector<std::uint64_t> seeds = {1};
    std::vector<Method> methods = {Method::composite, Method::accelerated};
    std::size_t iterations = 1000;
    std::size_t record_cadence = 0;  // 0: every iteration up to 1e4, then N/1e4
    double epsilon = 1.0;            // subgradient stepsize target when used
    std::string experiment_id = "resalloc";
    std::size_t threads = 0;         // 0: hardware concurrency
};

inline std::size_t effective_cadence(const ExperimentSpec& spec) {
    if (spec.record_cadence > 0) return spec.record_cadence;
    if (spec.iterations <= 10000) return 1;
    return (spec.iterations + 9999) / 10000;
}

namespace detail {

inline std::vector<double> draw_alphas(const ExperimentSpec& spec, std::uint64_t seed) {
    auto rng = experiment_rng(spec.experiment_id, seed);
    std::vector<double> alphas(spec.producers);
    for (auto& a : alphas) {
        a = spec.alpha_dist == AlphaDistribution::uniform
                ? draw_uniform(rng, spec.alpha_lo, spec.alpha_hi)
                : draw_truncated_normal(rng, spec.alpha_mean, spec.alpha_sd, spec.alpha_lo,
                                        spec.alpha_hi);
    }
    return alphas;
}

inline ScalarInstance make_quadratic_instance(const std::vector<double>& alphas, double mu,
                                              double demand) {
    ScalarInstance inst;
    inst.demand = demand;
    inst.costs.reserve(alphas.size());
    for (double a : alphas) inst.costs.push_back(make_quadratic_cost(a, mu));
    return inst;
}

}  // namespace detail

/// Random quadratic instance for (spec, seed): alpha_k from the configured
/// distribution, modulus spec.mus.front(). The alpha draw depends only on
/// (experiment_id, seed), so mu sweeps reuse the same costs.
inline ScalarInstance generate_instance(const ExperimentSpec& spec, std::uint64_t seed) {
    if (spec.producers < 1) throw std::invalid_argument("generate_instance: n >= 1 required");
    if (spec.mus.empty()) throw std::invalid_argument("generate_instance: mu list empty");
    if (!(spec.mus.front() > 0.0))
        throw std::invalid_argument("generate_instance: mu must be positive");
    return detail::make_quadratic_instance(detail::draw_alphas(spec, seed),
                                           spec.mus.front(), spec.demand);
}

/// Sidecar block identifying how an instance was drawn.
inline ordered_json instance_meta(const ExperimentSpec& spec, std::uint64_t seed) {
    ordered_json meta;
    meta["seed"] = seed;
    meta["generator"] = kGeneratorName;
    meta["experiment_id"] = spec.experiment_id;
    meta["alpha_dist"] = alpha_distribution_name(spec.alpha_dist);
    return meta;
}

/// The three per-iteration metric arrays a run produces, on a shared
/// iteration grid.
struct MetricSeries {
    std::vector<std::size_t> iterations;
    std::vector<double> dual_value;
    std::vector<double> infeasibility;
    std::vector<double> duality_gap;
};

inline MetricSeries series_from_history(const std::vector<IterationRecord>& history) {
    MetricSeries s;
    s.iterations.reserve(history.size());
    for (const auto& rec : history) {
        s.iterations.push_back(rec.t);
        s.dual_value.push_back(rec.dual_value);
        s.infeasibility.push_back(rec.infeasibility);
        s.duality_gap.push_back(rec.duality_gap);
    }
    return s;
}

struct ExperimentCell {
    Method method = Method::composite;
    double mu = 0.0;
    std::uint64_t seed = 0;
    bool failed = false;
    std::string error;
    MetricSeries series;
    Certificate certificate;
};

struct MeanSeries {
    Method method = Method::composite;
    double mu = 0.0;
    MetricSeries series;
};

struct ExperimentResult {
    ExperimentSpec spec;
    std::size_t cadence = 1;
    std::vector<ExperimentCell> cells;   // ordered by (method, mu, seed)
    std::vector<MeanSeries> means;       // ordered by (method, mu)
};

namespace detail {

inline ExperimentCell run_cell(const ExperimentSpec& spec, Method method, double mu,
                               std::uint64_t seed, std::size_t cadence) {
    ExperimentCell cell;
    cell.method = method;
    cell.mu = mu;
    cell.seed = seed;
    try {
        const auto inst =
            make_quadratic_instance(draw_alphas(spec, seed), mu, spec.demand);
        SolverConfig config;
        config.method = method;
        config.iterations = spec.iterations;
        config.record_cadence = cadence;
        RunResult run;
        if (method == Method::subgradient) {
            // Fixed length so every cell shares the iteration grid; the
            // stepsize implied by the requested accuracy.
            const auto req = subgradient_requirements(inst, spec.epsilon);
            run = subgradient_run(inst, config, req.stepsize, spec.iterations);
            run.epsilon = spec.epsilon;
            run.required_iterations = req.iterations;
            run.cap_exceeded = static_cast<double>(spec.iterations) < req.iterations;
        } else {
            run = solve(inst, config);
        }
        cell.series = series_from_history(run.history);
        cell.certificate = measure(inst, run);
    } catch (const std::exception& e) {
        cell.failed = true;
        cell.error = e.what();
    }
    return cell;
}

inline void accumulate_mean(MeanSeries& mean, const std::vector<const ExperimentCell*>& cells) {
    if (cells.empty()) return;
    const auto& grid = cells.front()->series.iterations;
    mean.series.iterations = grid;
    const std::size_t len = grid.size();
    mean.series.dual_value.assign(len, 0.0);
    mean.series.infeasibility.assign(len, 0.0);
    mean.series.duality_gap.assign(len, 0.0);
    for (const auto* cell : cells)
        for (std::size_t i = 0; i < len; ++i) {
            mean.series.dual_value[i] += cell->series.dual_value[i];
            mean.series.infeasibility[i] += cell->series.infeasibility[i];
            mean.series.duality_gap[i] += cell->series.duality_gap[i];
        }
    const double inv = 1.0 / static_cast<double>(cells.size());
    for (std::size_t i = 0; i < len; ++i) {
        mean.series.dual_value[i] *= inv;
        mean.series.infeasibility[i] *= inv;
        mean.series.duality_gap[i] *= inv;
    }
}

}  // namespace detail

/// Runs every (method, mu, seed) cell, in parallel, each cell independent
/// and deterministic; means are merged in fixed key order afterwards.
inline ExperimentResult run_experiment(const ExperimentSpec& spec) {
    if (spec.seeds.empty()) throw std::invalid_argument("run_experiment: seeds empty");
    if (spec.mus.empty()) throw std::invalid_argument("run_experiment: mu list empty");
    if (spec.methods.empty()) throw std::invalid_argument("run_experiment: methods empty");
    ExperimentResult result;
    result.spec = spec;
    result.cadence = effective_cadence(spec);

    struct Key {
        Method method;
        double mu;
        std::uint64_t seed;
    };
    std::vector<Key> keys;
    for (Method method : spec.methods)
        for (double mu : spec.mus)
            for (std::uint64_t seed : spec.seeds) keys.push_back({method, mu, seed});
    result.cells.resize(keys.size());

    std::atomic<std::size_t> cursor{0};
    const std::size_t worker_count =
        std::max<std::size_t>(1, spec.threads ? spec.threads
                                              : std::thread::hardware_concurrency());
    auto worker = [&] {
        for (;;) {
            const std::size_t i = cursor.fetch_add(1);
            if (i >= keys.size()) return;
            result.cells[i] = detail::run_cell(spec, keys[i].method, keys[i].mu,
                                               keys[i].seed, result.cadence);
        }
    };
    if (worker_count == 1 || keys.size() == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t i = 0; i < std::min(worker_count, keys.size()); ++i)
            pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (Method method : spec.methods)
        for (double mu : spec.mus) {
            std::vector<const ExperimentCell*> group;
            for (const auto& cell : result.cells)
                if (cell.method == method && cell.mu == mu && !cell.failed)
                    group.push_back(&cell);
            MeanSeries mean;
            mean.method = method;
            mean.mu = mu;
            detail::accumulate_mean(mean, group);
            result.means.push_back(std::move(mean));
        }
    return result;
}

struct SweepSummaryRow {
    Method method = Method::composite;
    double mu = 0.0;
    double final_duality_gap = 0.0;
    double final_infeasibility = 0.0;
    double final_dual_value = 0.0;
};

/// Mu sweep: run_experiment over the full mu list plus a final-gap summary.
struct SweepResult {
    ExperimentResult experiment;
    std::vector<SweepSummaryRow> summary;
};

inline SweepResult sweep_mu(const ExperimentSpec& spec) {
    SweepResult out;
    out.experiment = run_experiment(spec);
    for (const auto& mean : out.experiment.means) {
        if (mean.series.iterations.empty()) continue;
        out.summary.push_back({mean.method, mean.mu, mean.series.duality_gap.back(),
                               mean.series.infeasibility.back(),
                               mean.series.dual_value.back()});
    }
    return out;
}

namespace detail {

inline std::string mu_suffix(double mu) { return "_mu" + format_double(mu); }

inline void write_text_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
    out << body;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

/// Minimal SVG line chart; log-scaled y axis drops nonpositive points.
inline std::string render_svg(const std::string& title,
                              const std::vector<std::string>& names,
                              const std::vector<const std::vector<std::size_t>*>& grids,
                              const std::vector<const std::vector<double>*>& series,
                              bool log_scale) {
    const double width = 720, height = 480, ml = 70, mr = 20, mt = 40, mb = 45;
    static const char* palette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                    "#ff7f0e", "#8c564b"};
    double x_max = 1.0, y_min = 1e300, y_max = -1e300;
    for (std::size_t s = 0; s < series.size(); ++s) {
        if (!grids[s]->empty())
            x_max = std::max(x_max, static_cast<double>(grids[s]->back()));
        for (double v : *series[s]) {
            if (log_scale && !(v > 0.0)) continue;
            y_min = std::min(y_min, v);
            y_max = std::max(y_max, v);
        }
    }
    if (y_min > y_max) {
        y_min = log_scale ? 1e-1 : 0.0;
        y_max = 1.0;
    }
    if (y_min == y_max) {
        y_min = log_scale ? y_min * 0.5 : y_min - 1.0;
        y_max = log_scale ? y_max * 2.0 : y_max + 1.0;
    }
    const double ly_min = log_scale ? std::log10(y_min) : y_min;
    const double ly_max = log_scale ? std::log10(y_max) : y_max;
    auto sx = [&](double t) { return ml + (width - ml - mr) * t / x_max; };
    auto sy = [&](double v) {
        const double lv = log_scale ? std::log10(v) : v;
        return height - mb - (height - mt - mb) * (lv - ly_min) / (ly_max - ly_min);
    };
    std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" +
                      format_double(width) + "\" height=\"" + format_double(height) +
                      "\" viewBox=\"0 0 " + format_double(width) + " " +
                      format_double(height) + "\">\n";
    svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg += "<text x=\"" + format_double(width / 2) +
           "\" y=\"24\" text-anchor=\"middle\" font-family=\"sans-serif\" "
           "font-size=\"16\">" + title + (log_scale ? " (log scale)" : "") + "</text>\n";
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(height - mb) +
           "\" x2=\"" + format_double(width - mr) + "\" y2=\"" +
           format_double(height - mb) + "\" stroke=\"black\"/>\n";
    svg += "<line x1=\"" + format_double(ml) + "\" y1=\"" + format_double(mt) +
           "\" x2=\"" + format_double(ml) + "\" y2=\"" + format_double(height - mb) +
           "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + format_double(ml - 6) + "\" y=\"" + format_double(mt + 4) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_double(y_max) + "</text>\n";
    svg += "<text x=\"" + format_double(ml - 6) + "\" y=\"" + format_double(height - mb) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_double(y_min) + "</text>\n";
    svg += "<text x=\"" + format_double(width - mr) + "\" y=\"" +
           format_double(height - mb + 16) +
           "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
           format_double(x_max) + "</text>\n";
    for (std::size_t s = 0; s < series.size(); ++s) {
        std::string points;
        for (std::size_t i = 0; i < series[s]->size(); ++i) {
            const double v = (*series[s])[i];
            if (log_scale && !(v > 0.0)) continue;  // dropped, kept in CSV
            points += format_double(sx(static_cast<double>((*grids[s])[i]))) + "," +
                      format_double(sy(v)) + " ";
        }
        const char* color = palette[s % 6];
        svg += "<polyline fill=\"none\" stroke=\"" + std::string(color) +
               "\" stroke-width=\"1.5\" points=\"" + points + "\"/>\n";
        svg += "<text x=\"" + format_double(width - mr - 8) + "\" y=\"" +
               format_double(mt + 18.0 * static_cast<double>(s)) +
               "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"12\" "
               "fill=\"" + color + "\">" + names[s] + "</text>\n";
    }
    svg += "</svg>\n";
    return svg;
}

}  // namespace detail

/// Writes the three figure CSVs (one column of mean values per method) for
/// each mu, plus optional SVG charts. Multi-mu specs get _mu<value> suffixes.
inline std::vector<std::filesystem::path> emit_plots(const ExperimentResult& result,
                                                     const std::filesystem::path& dir,
                                                     bool with_svg = false) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const bool suffixed = result.spec.mus.size() > 1;
    struct MetricDef {
        const char* file;
        const char* title;
        const std::vector<double>& (*pick)(const MetricSeries&);
    };
    static const MetricDef metrics[] = {
        {"dual_value_log", "Dual value",
         [](const MetricSeries& s) -> const std::vector<double>& { return s.dual_value; }},
        {"infeasibility_log", "Inexactness of constraints",
         [](const MetricSeries& s) -> const std::vector<double>& { return s.infeasibility; }},
        {"duality_gap_log", "Value of duality gap",
         [](const MetricSeries& s) -> const std::vector<double>& { return s.duality_gap; }},
    };
    for (double mu : result.spec.mus) {
        std::vector<const MeanSeries*> group;
        for (const auto& mean : result.means)
            if (mean.mu == mu && !mean.series.iterations.empty()) group.push_back(&mean);
        if (group.empty()) continue;
        const std::string suffix = suffixed ? detail::mu_suffix(mu) : "";
        for (const auto& metric : metrics) {
            std::string csv = "iteration";
            for (const auto* mean : group) csv += std::string(",") + method_name(mean->method);
            csv += "\n";
            const auto& grid = group.front()->series.iterations;
            for (std::size_t i = 0; i < grid.size(); ++i) {
                csv += format_size(grid[i]);
                for (const auto* mean : group)
                    csv += "," + format_double(metric.pick(mean->series)[i]);
                csv += "\n";
            }
            const auto path = dir / (std::string(metric.file) + suffix + ".csv");
            detail::write_text_file(path, csv);
            written.push_back(path);
            if (with_svg) {
                std::vector<std::string> names;
                std::vector<const std::vector<std::size_t>*> grids;
                std::vector<const std::vector<double>*> values;
                for (const auto* mean : group) {
                    names.push_back(method_name(mean->method));
                    grids.push_back(&mean->series.iterations);
                    values.push_back(&metric.pick(mean->series));
                }
                const auto svg_path = dir / (std::string(metric.file) + suffix + ".svg");
                detail::write_text_file(
                    svg_path, detail::render_svg(metric.title, names, grids, values, true));
                written.push_back(svg_path);
            }
        }
    }
    return written;
}

inline ordered_json spec_to_json(const ExperimentSpec& spec) {
    ordered_json j;
    j["n"] = spec.producers;
    j["C"] = spec.demand;
    j["alpha_dist"] = alpha_distribution_name(spec.alpha_dist);
    j["alpha_lo"] = spec.alpha_lo;
    j["alpha_hi"] = spec.alpha_hi;
    j["alpha_mean"] = spec.alpha_mean;
    j["alpha_sd"] = spec.alpha_sd;
    j["mu"] = spec.mus;
    j["seeds"] = spec.seeds;
    ordered_json methods = ordered_json::array();
    for (Method m : spec.methods) methods.push_back(method_name(m));
    j["methods"] = methods;
    j["iterations"] = spec.iterations;
    j["record_cadence"] = spec.record_cadence;
    j["epsilon"] = spec.epsilon;
    j["experiment_id"] = spec.experiment_id;
    j["generator"] = kGeneratorName;
    return j;
}

/// Sidecar describing the experiment well enough to reproduce it bit for bit.
inline void write_experiment_metadata(const ExperimentResult& result,
                                      const std::filesystem::path& dir,
                                      const std::vector<std::filesystem::path>& files,
                                      const std::string& version) {
    ordered_json j;
    j["spec"] = spec_to_json(result.spec);
    j["cadence"] = result.cadence;
    j["version"] = version;
    ordered_json names = ordered_json::array();
    for (const auto& f : files) names.push_back(f.filename().string());
    j["files"] = names;
    ordered_json cells = ordered_json::array();
    for (const auto& cell : result.cells) {
        ordered_json c;
        c["method"] = method_name(cell.method);
        c["mu"] = cell.mu;
        c["seed"] = cell.seed;
        c["failed"] = cell.failed;
        if (cell.failed) c["error"] = cell.error;
        cells.push_back(c);
    }
    j["cells"] = cells;
    write_json_file(j, (dir / "metadata.json").string());
}

}  // namespace resalloc
