// relayq command line: experiment runner, spec validator, and quantizer
// designer for the relay CSI feedback study.
//
//   relayq run --spec scenarios/loss_ratio_vs_snr.json --out out/loss_ratio
//   relayq validate --spec my_experiment.json
//   relayq design --dist rayleigh --snr-db 20 --levels 7 --method general

#include <cmath>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "relayq/errors.hpp"
#include "relayq/experiment.hpp"
#include "relayq/quantizer.hpp"
#include "relayq/version.hpp"

namespace {

constexpr int kExitSpecError = 2;
constexpr int kExitNumericalError = 3;

relayq::ExperimentSpec load_spec(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw relayq::SpecValidationError(path, "cannot open spec file");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw relayq::SpecValidationError(path, std::string("invalid JSON: ") + e.what());
    }
    return relayq::ExperimentSpec::from_json(j);
}

relayq::DistributionSpec dist_from_name(const std::string& name) {
    relayq::DistributionSpec d;
    if (name == "uniform")
        d.kind = relayq::DistributionSpec::Kind::Uniform;
    else if (name == "rayleigh")
        d.kind = relayq::DistributionSpec::Kind::Rayleigh;
    else {
        d.kind = relayq::DistributionSpec::Kind::Csv;
        d.csv_path = name;
    }
    return d;
}

int run_command(const std::string& spec_path, const std::string& out_dir, int threads) {
    const relayq::ExperimentSpec spec = load_spec(spec_path);
    const relayq::RunSummary summary = relayq::run(spec, out_dir, threads);
    for (const auto& w : summary.warnings)
        std::cerr << "warning [" << w.code << "] " << w.message << "\n";
    std::cout << "wrote " << summary.csv_path << " (" << summary.n_rows << " rows)\n"
              << "manifest " << summary.manifest_path << " spec_hash " << summary.spec_hash
              << "\n";
    return 0;
}

int validate_command(const std::string& spec_path) {
    const relayq::ExperimentSpec spec = load_spec(spec_path);
    const auto warnings = relayq::validate_spec(spec);
    for (const auto& w : warnings)
        std::cout << "warning [" << w.code << "] " << w.message << "\n";
    std::cout << "spec ok: " << relayq::scenario_name(spec.scenario) << "\n";
    return 0;
}

int design_command(const std::string& dist_name, double snr_db, int levels,
                   const std::string& method, std::optional<double> kappa) {
    const relayq::ChannelDistribution dist = dist_from_name(dist_name).make();
    const double gamma = std::pow(10.0, snr_db / 10.0);
    relayq::QuantizationVector q;
    if (method == "uniform")
        q = relayq::design_uniform(levels, gamma);
    else if (method == "general")
        q = relayq::design_general(levels, gamma, dist, kappa);
    else if (method == "fixed-point")
        q = relayq::design_fixed_point(levels, gamma, dist);
    else if (method == "max-entropy")
        q = relayq::design_max_entropy(levels, dist);
    else
        throw relayq::SpecValidationError("--method", "unknown method: " + method);
    std::cout << relayq::to_json(q).dump(2) << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"CSI quantizer design and relay sum-rate experiments"};
    app.set_version_flag("--version", relayq::kVersion);
    app.require_subcommand(1);

    std::string spec_path, out_dir;
    int threads = 1;
    auto* cmd_run = app.add_subcommand("run", "run an experiment spec and write CSV artifacts");
    cmd_run->add_option("--spec", spec_path, "experiment JSON file")->required();
    cmd_run->add_option("--out", out_dir, "output directory")->required();
    cmd_run->add_option("--threads", threads, "Monte Carlo worker threads")
        ->check(CLI::PositiveNumber);

    std::string v_spec_path;
    auto* cmd_validate = app.add_subcommand("validate", "check an experiment spec");
    cmd_validate->add_option("--spec", v_spec_path, "experiment JSON file")->required();

    std::string dist_name = "rayleigh", method = "general";
    double snr_db = 20.0, kappa = 0.0;
    int levels = 7;
    auto* cmd_design = app.add_subcommand("design", "print a designed quantization vector");
    cmd_design->add_option("--dist", dist_name, "uniform | rayleigh | <csv path>");
    cmd_design->add_option("--snr-db", snr_db, "average SNR in dB");
    cmd_design->add_option("--levels", levels, "number of nonzero levels N")
        ->check(CLI::Range(1, 1 << 24));
    cmd_design->add_option("--method", method, "uniform | general | fixed-point | max-entropy");
    cmd_design->add_option("--kappa", kappa, "override kappa in the product equation");

    CLI11_PARSE(app, argc, argv);

    try {
        if (cmd_run->parsed())
            return run_command(spec_path, out_dir, threads);
        if (cmd_validate->parsed())
            return validate_command(v_spec_path);
        return design_command(dist_name, snr_db, levels, method,
                              cmd_design->count("--kappa") ? std::optional<double>(kappa)
                                                           : std::nullopt);
    } catch (const relayq::NoConvergenceError& e) {
        std::cerr << "numerical failure: " << e.what() << " (residual " << e.last_residual
                  << ")\n";
        return kExitNumericalError;
    } catch (const relayq::QuadratureFailureError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const relayq::DesignInfeasibleError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const relayq::DegenerateKappaError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return kExitNumericalError;
    } catch (const relayq::Error& e) {
        std::cerr << "spec error: " << e.what() << "\n";
        return kExitSpecError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitSpecError;
    }
}
