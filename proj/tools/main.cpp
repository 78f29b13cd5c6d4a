#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "coag/commands.hpp"

int main(int argc, char** argv) {
    CLI::App app{"sectional solver for the coagulation equation with singular kernels"};
    app.require_subcommand(1);

    int threads_flag = 0;
    auto* opt_threads = app.add_option(
        "--threads", threads_flag, "worker threads (overrides COAG_THREADS and the config)");
    opt_threads->check(CLI::PositiveNumber);

    std::string run_config, run_out = "out";
    auto* run = app.add_subcommand("run", "integrate one configuration and write a bundle");
    run->add_option("config", run_config, "JSON configuration file")->required();
    run->add_option("-o,--out", run_out, "output directory")->capture_default_str();

    std::string study_config, study_out = "study";
    std::vector<double> n_values;
    auto* study =
        app.add_subcommand("study", "theta = 0 and theta = 1 runs across truncation levels");
    study->add_option("config", study_config, "JSON configuration file")->required();
    study->add_option("--n", n_values, "comma-separated truncation levels")
        ->required()
        ->delimiter(',');
    study->add_option("-o,--out", study_out, "output directory")->capture_default_str();

    std::string cmp_dir, cmp_oracle, cmp_out = "comparison.csv";
    auto* compare =
        app.add_subcommand("compare", "error norms of a bundle against a closed-form oracle");
    compare->add_option("trajectory", cmp_dir, "bundle directory written by run")->required();
    compare
        ->add_option("--oracle", cmp_oracle,
                     "constant-exact | moments:constant | moments:additive | "
                     "moments:multiplicative | dir:<bundle>")
        ->required();
    compare->add_option("-o,--out", cmp_out, "comparison CSV path")->capture_default_str();

    std::string audit_config, audit_out = "kernel_audit.json";
    double sample_min = 1e-6, sample_max = 1e6;
    int sample_points = 100;
    auto* audit =
        app.add_subcommand("audit-kernel", "sample the growth hypotheses of the configured kernel");
    audit->add_option("config", audit_config, "JSON configuration file")->required();
    audit->add_option("--sample-min", sample_min, "smallest sampled volume")
        ->capture_default_str();
    audit->add_option("--sample-max", sample_max, "largest sampled volume")
        ->capture_default_str();
    audit->add_option("--sample-points", sample_points, "log-spaced points per axis")
        ->capture_default_str();
    audit->add_option("-o,--out", audit_out, "audit JSON path")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? coag::exit_ok : coag::exit_config_error;
    }

    // precedence: --threads flag, then COAG_THREADS, then the config file
    int threads = 0;
    if (opt_threads->count() > 0) threads = threads_flag;
    else if (std::getenv("COAG_THREADS") != nullptr) threads = coag::threads_from_env();

    if (run->parsed()) return coag::run_command(run_config, run_out, threads);
    if (study->parsed()) return coag::study_command(study_config, n_values, study_out, threads);
    if (compare->parsed()) return coag::compare_command(cmp_dir, cmp_oracle, cmp_out);
    if (audit->parsed())
        return coag::audit_kernel_command(audit_config, sample_min, sample_max, sample_points,
                                          audit_out);
    return coag::exit_config_error;
}
