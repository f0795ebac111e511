// graphlasso command line: graph generation, spectra, single recoveries and benchmark sweeps.

#include <CLI11.hpp>
#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "graphlasso/error.hpp"
#include "graphlasso/experiments.hpp"
#include "graphlasso/plots.hpp"

namespace fs = std::filesystem;
using namespace graphlasso;

namespace {

struct Options {
    CommunityGraphConfig graph{};
    std::string graph_path;
    SignalModel signal{};
    double lambda = 10.0;
    std::vector<double> lambda_grid = default_lambda_grid();
    double inpaint_mask_fraction = 0.4;
    double mask_fraction = 0.0;
    int trials = 10;
    std::string model = "both";
    std::string out_dir = ".";
    SolverConfig solver{};
    int threads = 0;
    std::string config_path;
};

std::string json_scalar(const std::string& key, const nlohmann::json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number_integer()) return std::to_string(v.get<long long>());
    if (v.is_number()) {
        std::ostringstream out;
        out << std::setprecision(std::numeric_limits<double>::max_digits10) << v.get<double>();
        return out.str();
    }
    throw InvalidArgument("config: unsupported value for '" + key + "'");
}

// Keys are long flag names without the leading dashes. Flags given on the command line win.
void apply_config(CLI::App* cmd, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config " + path);
    nlohmann::json doc;
    try {
        doc = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw InvalidArgument(std::string("config: ") + e.what());
    }
    if (!doc.is_object()) throw InvalidArgument("config: top level must be an object");
    for (const auto& [key, value] : doc.items()) {
        CLI::Option* opt = key == "config" ? nullptr : cmd->get_option_no_throw("--" + key);
        if (opt == nullptr) {
            throw InvalidArgument("config: '" + key + "' is not an option of " + cmd->get_name());
        }
        if (opt->count() > 0) continue;
        std::vector<std::string> inputs;
        if (value.is_array()) {
            for (const auto& v : value) inputs.push_back(json_scalar(key, v));
        } else {
            inputs.push_back(json_scalar(key, value));
        }
        opt->clear();
        opt->add_result(inputs);
        try {
            opt->run_callback();
        } catch (const CLI::Error& e) {
            throw InvalidArgument("config: " + key + ": " + e.what());
        }
    }
}

void add_config(CLI::App* cmd, Options& o) {
    cmd->add_option("--config", o.config_path,
                    "JSON file with flag values; explicit flags take precedence")
        ->check(CLI::ExistingFile);
}

void add_generator(CLI::App* cmd, Options& o) {
    cmd->add_option("--nodes", o.graph.node_count, "Number of nodes")->capture_default_str();
    cmd->add_option("--communities", o.graph.community_count, "Number of communities")
        ->capture_default_str();
    cmd->add_option("--mixing", o.graph.mixing, "Expected fraction of inter-community edges")
        ->capture_default_str();
    cmd->add_option("--mean-degree", o.graph.mean_degree, "Expected node degree")
        ->capture_default_str();
}

void add_graph_source(CLI::App* cmd, Options& o) {
    add_generator(cmd, o);
    cmd->add_option("--graph", o.graph_path, "Edge-list file (overrides the generator flags)")
        ->check(CLI::ExistingFile);
}

void add_signal(CLI::App* cmd, Options& o) {
    cmd->add_option("--sparsity", o.signal.sparsity_fraction, "Fraction of nonzero coefficients")
        ->capture_default_str();
    cmd->add_option("--sigma", o.signal.noise_sigma, "Spectral noise standard deviation")
        ->capture_default_str();
}

void add_solver(CLI::App* cmd, Options& o) {
    cmd->add_option("--model", o.model, "Solver model")
        ->check(CLI::IsMember({"l1", "l1l2", "both"}))
        ->capture_default_str();
    cmd->add_option("--max-outer", o.solver.max_outer, "Outer iteration cap")->capture_default_str();
    cmd->add_option("--max-inner", o.solver.max_inner, "Inner iteration cap")->capture_default_str();
    cmd->add_option("--tol", o.solver.outer_tolerance, "Relative energy tolerance")
        ->capture_default_str();
}

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--seed", o.graph.seed, "Random seed")->capture_default_str();
    cmd->add_option("--out-dir", o.out_dir, "Output directory")->capture_default_str();
    add_config(cmd, o);
}

std::vector<Model> selected_models(const std::string& name) {
    if (name == "both") return {Model::Standard, Model::Ratio};
    return {parse_model(name)};
}

GraphSource graph_source(const Options& o) {
    if (!o.graph_path.empty()) return fs::path(o.graph_path);
    return o.graph;
}

fs::path out_dir(const Options& o) {
    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    return dir;
}

int run_gen_graph(const Options& o) {
    const auto dir = out_dir(o);
    const WeightedGraph g = generate_community_graph(o.graph);
    save_edge_list(g, dir / "graph.txt");
    std::cout << "wrote " << (dir / "graph.txt").string() << " (" << g.node_count() << " nodes, "
              << g.edge_count() << " edges, " << (g.is_connected() ? "connected" : "disconnected")
              << ")\n";
    return 0;
}

int run_spectrum(const Options& o) {
    const auto dir = out_dir(o);
    const FourierBasis basis = eigendecompose(build_laplacian(resolve_graph(graph_source(o))));
    save_spectrum_csv(basis, dir / "spectrum.csv");
    plots::spectrum_svg(basis.spectrum(), dir / "spectrum.svg");
    std::cout << "wrote spectrum.csv, spectrum.svg to " << dir.string() << " (lambda_max "
              << basis.spectrum()[basis.size() - 1] << ")\n";
    return 0;
}

void write_solution_csv(const Eigen::VectorXd& truth, const Eigen::VectorXd& x,
                        const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    out << std::setprecision(std::numeric_limits<double>::max_digits10);
    out << "index,truth,estimate\n";
    for (Eigen::Index i = 0; i < x.size(); ++i) out << i << ',' << truth[i] << ',' << x[i] << '\n';
}

int run_recover(const Options& o, double mask_fraction) {
    const auto dir = out_dir(o);
    auto basis = std::make_shared<const FourierBasis>(
        eigendecompose(build_laplacian(resolve_graph(graph_source(o)))));
    SignalModel signal = o.signal;
    signal.seed = o.graph.seed;
    signal.validate();
    const Eigen::VectorXd x0 = generate_sparse_signal(signal, basis->size());
    const Eigen::VectorXd f0 = synthesize_measurements(x0, *basis, signal);

    std::optional<RecoveryProblem> problem;
    if (mask_fraction > 0.0) {
        const auto masked = apply_mask(f0, mask_fraction, signal.seed);
        problem.emplace(basis, masked.measurements, o.lambda, masked.mask);
    } else {
        problem.emplace(basis, f0, o.lambda);
    }

    for (Model model : selected_models(o.model)) {
        const SolveResult r = solve(model, *problem, o.solver);
        const std::string tag = to_string(model);
        write_solution_csv(x0, r.solution, dir / ("solution_" + tag + ".csv"));
        save_trace_csv(r, dir / ("trace_" + tag + ".csv"));
        plots::recovery_svg(x0, r.solution, tag + " recovery", dir / ("recovery_" + tag + ".svg"));
        plots::energy_svg(r.trace, tag + " energy", dir / ("energy_" + tag + ".svg"));
        std::cout << tag << ": stop=" << to_string(r.stop_reason)
                  << " outer=" << r.outer_iterations << " inner=" << r.total_inner_iterations
                  << " time=" << r.wall_time.count() << "s";
        if (r.solution.norm() > 0.0) {
            const RecoveryError err = recovery_error(r.solution, x0);
            std::cout << " error=" << err.primary << " error_ref=" << err.reference;
        } else {
            std::cout << " error=undefined (zero solution)";
        }
        std::cout << '\n';
    }
    return 0;
}

int run_bench(const Options& o) {
    const auto dir = out_dir(o);
    ExperimentConfig cfg;
    cfg.graph = graph_source(o);
    cfg.signal = o.signal;
    cfg.signal.seed = o.graph.seed;
    cfg.lambda_grid = o.lambda_grid;
    cfg.mask_fraction = o.mask_fraction;
    cfg.trials = o.trials;
    cfg.models = selected_models(o.model);
    cfg.solver = o.solver;
    cfg.threads = o.threads;
    const ExperimentReport report = run_benchmark(cfg);
    emit_report(report, dir);
    emit_plots(report, dir);
    for (const auto& s : report.summaries) {
        const auto& best = s.best();
        std::cout << to_string(s.model) << ": best lambda=" << best.lambda
                  << " mean error=" << best.mean_error
                  << " (ref " << best.mean_error_reference << ", failures " << best.failures
                  << ")\n";
    }
    if (report.runtime_ratio) std::cout << "runtime ratio l1l2/l1: " << *report.runtime_ratio << '\n';
    std::cout << "report written to " << dir.string() << '\n';
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparse recovery of graph signals with l1 and l1/l2 penalties"};
    app.require_subcommand(1);
    Options o;

    auto* gen = app.add_subcommand("gen-graph", "Generate a community graph edge list");
    add_generator(gen, o);
    add_common(gen, o);

    auto* spec = app.add_subcommand("spectrum", "Laplacian spectrum as CSV and SVG");
    add_graph_source(spec, o);
    add_common(spec, o);

    auto* rec = app.add_subcommand("recover", "Recover one synthetic sparse spectral signal");
    add_graph_source(rec, o);
    add_signal(rec, o);
    rec->add_option("--lambda", o.lambda, "Fidelity weight")->capture_default_str();
    add_solver(rec, o);
    add_common(rec, o);

    auto* inp = app.add_subcommand("inpaint", "Recover from partially observed measurements");
    add_graph_source(inp, o);
    add_signal(inp, o);
    inp->add_option("--lambda", o.lambda, "Fidelity weight")->capture_default_str();
    inp->add_option("--mask-fraction", o.inpaint_mask_fraction, "Fraction of unobserved nodes")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    add_solver(inp, o);
    add_common(inp, o);

    auto* bench = app.add_subcommand("bench", "Lambda sweep over seeded trials with reports");
    add_graph_source(bench, o);
    add_signal(bench, o);
    bench->add_option("--lambda-grid", o.lambda_grid, "Comma-separated fidelity weights")
        ->delimiter(',');
    bench->add_option("--mask-fraction", o.mask_fraction, "Fraction of unobserved nodes")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    bench->add_option("--trials", o.trials, "Seeded trials per lambda")->capture_default_str();
    bench->add_option("--threads", o.threads, "Worker threads (0 = hardware)")->capture_default_str();
    add_solver(bench, o);
    add_common(bench, o);

    CLI11_PARSE(app, argc, argv);

    try {
        for (CLI::App* cmd : app.get_subcommands()) {
            if (!o.config_path.empty()) apply_config(cmd, o.config_path);
        }
        if (gen->parsed()) return run_gen_graph(o);
        if (spec->parsed()) return run_spectrum(o);
        if (rec->parsed()) return run_recover(o, 0.0);
        if (inp->parsed()) return run_recover(o, o.inpaint_mask_fraction);
        return run_bench(o);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
