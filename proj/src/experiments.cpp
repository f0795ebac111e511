#include "graphlasso/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "graphlasso/error.hpp"
#include "graphlasso/plots.hpp"

namespace graphlasso {

namespace {

// Independent RNG streams per seed.
enum Stream : std::uint32_t { kSupport = 1, kNoise = 2, kMask = 3 };

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::vector<Eigen::Index> random_subset(Eigen::Index n, Eigen::Index count, std::mt19937_64& rng) {
    std::vector<Eigen::Index> indices(static_cast<std::size_t>(n));
    std::iota(indices.begin(), indices.end(), Eigen::Index{0});
    std::shuffle(indices.begin(), indices.end(), rng);
    indices.resize(static_cast<std::size_t>(count));
    return indices;
}

Eigen::Index rounded_count(double fraction, Eigen::Index n) {
    return static_cast<Eigen::Index>(std::llround(fraction * static_cast<double>(n)));
}

}  // namespace

void SignalModel::validate() const {
    if (!(sparsity_fraction > 0.0 && sparsity_fraction <= 1.0)) {
        throw InvalidArgument("sparsity_fraction must lie in (0, 1]");
    }
    if (!(amplitude_low < amplitude_high)) {
        throw InvalidArgument("amplitude_low must be below amplitude_high");
    }
    if (!(noise_sigma >= 0.0)) throw InvalidArgument("noise_sigma must be non-negative");
}

SignalModel SignalModel::for_trial(int trial) const {
    SignalModel copy = *this;
    copy.seed = splitmix64(seed + static_cast<std::uint64_t>(trial) * 0xD1B54A32D192ED03ULL);
    return copy;
}

Eigen::VectorXd generate_sparse_signal(const SignalModel& model, Eigen::Index n) {
    model.validate();
    if (n < 1) throw InvalidArgument("signal length must be positive");
    const Eigen::Index count = rounded_count(model.sparsity_fraction, n);
    if (count == 0) throw InvalidArgument("sparsity_fraction * n rounds to zero nonzeros");

    auto rng = make_stream(model.seed, kSupport);
    const auto support = random_subset(n, count, rng);
    std::uniform_real_distribution<double> amplitude(model.amplitude_low, model.amplitude_high);
    Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i : support) {
        double v = 0.0;
        // A zero draw would shrink the support below `count`.
        while (v == 0.0) v = amplitude(rng);
        x[i] = v;
    }
    return x;
}

Eigen::VectorXd synthesize_measurements(const Eigen::VectorXd& x0, const FourierBasis& basis,
                                        const SignalModel& model) {
    model.validate();
    if (x0.size() != basis.size()) throw InvalidArgument("signal and basis sizes differ");
    Eigen::VectorXd coefficients = x0;
    if (model.noise_sigma > 0.0) {
        auto rng = make_stream(model.seed, kNoise);
        std::normal_distribution<double> noise(0.0, model.noise_sigma);
        for (Eigen::Index i = 0; i < coefficients.size(); ++i) coefficients[i] += noise(rng);
    }
    return basis.inverse(coefficients);
}

MaskedMeasurements apply_mask(const Eigen::VectorXd& f0, double fraction, std::uint64_t seed) {
    if (!(fraction >= 0.0 && fraction < 1.0)) {
        throw InvalidArgument("mask fraction must lie in [0, 1)");
    }
    MaskedMeasurements out{f0, Eigen::VectorXd::Ones(f0.size())};
    const Eigen::Index removed = rounded_count(fraction, f0.size());
    if (removed == 0) return out;
    auto rng = make_stream(seed, kMask);
    for (Eigen::Index i : random_subset(f0.size(), removed, rng)) {
        out.mask[i] = 0.0;
        out.measurements[i] = 0.0;
    }
    return out;
}

RecoveryError recovery_error(const Eigen::VectorXd& x, const Eigen::VectorXd& x0) {
    if (x.size() != x0.size()) throw InvalidArgument("recovery_error: dimension mismatch");
    const double x_norm = x.norm();
    const double truth_norm = x0.norm();
    if (x_norm == 0.0) throw InvalidArgument("recovery_error: recovered vector is zero");
    if (truth_norm == 0.0) throw InvalidArgument("recovery_error: true vector is zero");
    const double distance = (x - x0).norm();
    return {distance / x_norm, distance / truth_norm};
}

std::vector<double> log_grid(double low, double high, int points) {
    if (!(low > 0.0) || !(high >= low) || points < 1) {
        throw InvalidArgument("log grid needs 0 < low <= high and at least one point");
    }
    std::vector<double> grid;
    grid.reserve(static_cast<std::size_t>(points));
    const double a = std::log10(low);
    const double b = std::log10(high);
    for (int i = 0; i < points; ++i) {
        const double t = points == 1 ? 0.0 : static_cast<double>(i) / (points - 1);
        grid.push_back(std::pow(10.0, a + t * (b - a)));
    }
    return grid;
}

std::vector<double> default_lambda_grid() { return log_grid(1e-2, 1e3, 15); }

WeightedGraph resolve_graph(const GraphSource& source) {
    if (const auto* cfg = std::get_if<CommunityGraphConfig>(&source)) {
        return generate_community_graph(*cfg);
    }
    return load_edge_list(std::get<std::filesystem::path>(source));
}

void ExperimentConfig::validate() const {
    signal.validate();
    solver.validate();
    if (lambda_grid.empty()) throw InvalidArgument("lambda grid must not be empty");
    for (double l : lambda_grid) {
        if (!(l > 0.0) || !std::isfinite(l)) throw InvalidArgument("lambda values must be positive");
    }
    if (!(mask_fraction >= 0.0 && mask_fraction < 1.0)) {
        throw InvalidArgument("mask_fraction must lie in [0, 1)");
    }
    if (trials < 1) throw InvalidArgument("trials must be at least 1");
    if (models.empty()) throw InvalidArgument("at least one model is required");
    if (threads < 0) throw InvalidArgument("threads must be non-negative");
}

const ModelSummary* ExperimentReport::summary(Model model) const {
    for (const auto& s : summaries) {
        if (s.model == model) return &s;
    }
    return nullptr;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

struct TrialData {
    Eigen::VectorXd truth;
    std::optional<RecoveryProblem> problem;  // lambda is replaced per cell
};

struct CellOutput {
    CellResult cell;
    std::optional<SolveResult> detail;  // kept for trial 0 only
};

CellOutput run_cell(Model model, double lambda, int trial, const TrialData& data,
                    const SolverConfig& solver) {
    CellOutput out;
    CellResult& cell = out.cell;
    cell.model = model;
    cell.lambda = lambda;
    cell.trial = trial;
    try {
        const RecoveryProblem problem = data.problem->with_fidelity_weight(lambda);
        SolveResult result = solve(model, problem, solver);
        cell.converged = result.converged;
        cell.stop_reason = to_string(result.stop_reason);
        cell.outer_iterations = result.outer_iterations;
        cell.inner_iterations = result.total_inner_iterations;
        cell.wall_seconds = result.wall_time.count();
        cell.error = recovery_error(result.solution, data.truth);
        if (trial == 0) out.detail = std::move(result);
    } catch (const std::exception& e) {
        cell.failed = true;
        cell.failure = e.what();
        cell.error = {std::numeric_limits<double>::infinity(),
                      std::numeric_limits<double>::infinity()};
    }
    return out;
}

template <typename Fn>
void parallel_for(std::size_t count, int threads, Fn&& fn) {
    std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                      : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, count);
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

ModelSummary summarize(Model model, const std::vector<double>& grid,
                       const std::vector<CellResult>& cells, int trials) {
    ModelSummary summary;
    summary.model = model;
    double time_total = 0.0;
    int time_count = 0;
    for (double lambda : grid) {
        LambdaSummary s;
        s.lambda = lambda;
        double primary_sum = 0.0;
        double reference = 0.0;
        double seconds = 0.0;
        for (const auto& c : cells) {
            if (c.model != model || c.lambda != lambda) continue;
            if (c.failed) {
                ++s.failures;
                continue;
            }
            primary_sum += c.error.primary;
            reference += c.error.reference;
            seconds += c.wall_seconds;
        }
        const int ok = trials - s.failures;
        const double inf = std::numeric_limits<double>::infinity();
        s.mean_error = s.failures > 0 ? inf : primary_sum / trials;
        s.mean_error_reference = s.failures > 0 ? inf : reference / trials;
        s.mean_wall_seconds = ok > 0 ? seconds / ok : 0.0;
        time_total += seconds;
        time_count += ok;
        summary.per_lambda.push_back(s);
    }
    for (std::size_t i = 1; i < summary.per_lambda.size(); ++i) {
        if (summary.per_lambda[i].mean_error <
            summary.per_lambda[summary.best_index].mean_error) {
            summary.best_index = i;
        }
    }
    summary.mean_wall_seconds = time_count > 0 ? time_total / time_count : 0.0;
    return summary;
}

}  // namespace

ExperimentReport run_benchmark(const ExperimentConfig& config) {
    config.validate();
    const WeightedGraph graph = resolve_graph(config.graph);
    const auto basis =
        std::make_shared<const FourierBasis>(eigendecompose(build_laplacian(graph)));
    const Eigen::Index n = basis->size();

    std::vector<TrialData> trials(static_cast<std::size_t>(config.trials));
    for (int t = 0; t < config.trials; ++t) {
        const SignalModel model = config.signal.for_trial(t);
        TrialData& data = trials[static_cast<std::size_t>(t)];
        data.truth = generate_sparse_signal(model, n);
        const Eigen::VectorXd f0 = synthesize_measurements(data.truth, *basis, model);
        const double lambda = config.lambda_grid.front();
        if (config.mask_fraction > 0.0) {
            MaskedMeasurements masked = apply_mask(f0, config.mask_fraction, model.seed);
            data.problem.emplace(basis, std::move(masked.measurements), lambda,
                                 std::move(masked.mask));
        } else {
            data.problem.emplace(basis, f0, lambda);
        }
    }

    const std::size_t per_model = config.lambda_grid.size() * trials.size();
    const std::size_t total = per_model * config.models.size();
    std::vector<CellOutput> outputs(total);
    parallel_for(total, config.threads, [&](std::size_t index) {
        const std::size_t m = index / per_model;
        const std::size_t l = (index % per_model) / trials.size();
        const std::size_t t = index % trials.size();
        outputs[index] = run_cell(config.models[m], config.lambda_grid[l], static_cast<int>(t),
                                  trials[t], config.solver);
    });

    ExperimentReport report;
    report.mask_fraction = config.mask_fraction;
    report.trials = config.trials;
    report.spectrum = basis->spectrum();
    report.cells.reserve(total);
    for (const auto& o : outputs) report.cells.push_back(o.cell);

    for (Model model : config.models) {
        report.summaries.push_back(
            summarize(model, config.lambda_grid, report.cells, config.trials));
        const ModelSummary& s = report.summaries.back();
        const std::size_t m = report.summaries.size() - 1;
        const std::size_t index = m * per_model + s.best_index * trials.size();
        if (outputs[index].detail) {
            report.exemplars.push_back(
                {model, s.best().lambda, trials.front().truth, std::move(*outputs[index].detail)});
        }
    }
    const ModelSummary* standard = report.summary(Model::Standard);
    const ModelSummary* ratio = report.summary(Model::Ratio);
    if (standard && ratio && standard->mean_wall_seconds > 0.0) {
        report.runtime_ratio = ratio->mean_wall_seconds / standard->mean_wall_seconds;
    }
    return report;
}

// ---------------------------------------------------------------------------
// Output

namespace {

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("write failed for " + path.string());
}

nlohmann::json number(double v) {
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

void emit_report(const ExperimentReport& report, const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);

    const auto cells_path = directory / "report.csv";
    auto cells = open_output(cells_path);
    cells << "model,lambda,trial,error,error_reference,failed,converged,stop_reason,"
             "outer_iterations,inner_iterations\n";
    for (const auto& c : report.cells) {
        cells << to_string(c.model) << ',' << c.lambda << ',' << c.trial << ',' << c.error.primary
              << ',' << c.error.reference << ',' << c.failed << ',' << c.converged << ','
              << (c.failed ? "failed" : c.stop_reason) << ',' << c.outer_iterations << ','
              << c.inner_iterations << '\n';
    }
    finish(cells, cells_path);

    const auto summary_path = directory / "summary.csv";
    auto summary = open_output(summary_path);
    summary << "model,lambda,mean_error,mean_error_reference,failures,best\n";
    for (const auto& s : report.summaries) {
        for (std::size_t i = 0; i < s.per_lambda.size(); ++i) {
            const auto& l = s.per_lambda[i];
            summary << to_string(s.model) << ',' << l.lambda << ',' << l.mean_error << ','
                    << l.mean_error_reference << ',' << l.failures << ','
                    << (i == s.best_index ? 1 : 0) << '\n';
        }
    }
    finish(summary, summary_path);

    nlohmann::json doc;
    doc["mask_fraction"] = report.mask_fraction;
    doc["trials"] = report.trials;
    for (const auto& s : report.summaries) {
        nlohmann::json m;
        m["best_lambda"] = s.best().lambda;
        m["best_mean_error"] = number(s.best().mean_error);
        m["best_mean_error_reference"] = number(s.best().mean_error_reference);
        for (const auto& l : s.per_lambda) {
            m["per_lambda"].push_back({{"lambda", l.lambda},
                                       {"mean_error", number(l.mean_error)},
                                       {"mean_error_reference", number(l.mean_error_reference)},
                                       {"failures", l.failures}});
        }
        doc["models"][to_string(s.model)] = std::move(m);
    }
    for (const auto& c : report.cells) {
        nlohmann::json j{{"model", to_string(c.model)},
                         {"lambda", c.lambda},
                         {"trial", c.trial},
                         {"error", number(c.error.primary)},
                         {"error_reference", number(c.error.reference)},
                         {"converged", c.converged},
                         {"outer_iterations", c.outer_iterations},
                         {"inner_iterations", c.inner_iterations}};
        if (c.failed) j["failure"] = c.failure;
        doc["cells"].push_back(std::move(j));
    }
    const auto json_path = directory / "report.json";
    auto json_out = open_output(json_path);
    json_out << doc.dump(2) << '\n';
    finish(json_out, json_path);

    nlohmann::json timing;
    timing["runtime_ratio"] = report.runtime_ratio ? number(*report.runtime_ratio) : nullptr;
    for (const auto& s : report.summaries) {
        timing["mean_wall_seconds"][to_string(s.model)] = s.mean_wall_seconds;
    }
    for (const auto& c : report.cells) {
        timing["cells"].push_back({{"model", to_string(c.model)},
                                   {"lambda", c.lambda},
                                   {"trial", c.trial},
                                   {"wall_seconds", c.wall_seconds}});
    }
    const auto timing_path = directory / "timing.json";
    auto timing_out = open_output(timing_path);
    timing_out << timing.dump(2) << '\n';
    finish(timing_out, timing_path);
}

std::vector<std::filesystem::path> emit_plots(const ExperimentReport& report,
                                              const std::filesystem::path& directory) {
    std::filesystem::create_directories(directory);
    std::vector<std::filesystem::path> written;
    if (report.spectrum.size() > 0) {
        written.push_back(directory / "spectrum.svg");
        plots::spectrum_svg(report.spectrum, written.back());
    }
    for (const auto& ex : report.exemplars) {
        const std::string name = to_string(ex.model);
        std::ostringstream title;
        title << name << " recovery, lambda = " << ex.lambda;
        written.push_back(directory / ("recovery_" + name + ".svg"));
        plots::recovery_svg(ex.truth, ex.result.solution, title.str(), written.back());
        const auto energy_path = directory / ("energy_" + name + ".svg");
        if (plots::energy_svg(ex.result.trace, name + " total energy", energy_path)) {
            written.push_back(energy_path);
        }
    }
    return written;
}

}  // namespace graphlasso
