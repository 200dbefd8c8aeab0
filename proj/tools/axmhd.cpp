// Command-line front end.
//
//   axmhd run      --config FILE            time-step and write artifacts
//   axmhd check    --config FILE            operator property checks
//   axmhd converge --config FILE --case C   manufactured refinement study
//   axmhd replay   --checkpoint F --t-end T resume from a checkpoint
//
// Exit codes: 0 success, 1 bad config or failed check, 2 I/O failure,
// 3 blow-up abort.  AXMHD_OUTPUT_DIR overrides the configured output
// directory when set.

#include <cstdio>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "axmhd/checks.hpp"
#include "axmhd/config.hpp"
#include "axmhd/convergence.hpp"
#include "axmhd/runner.hpp"

namespace {

int do_run(const std::string& config_path) {
    axmhd::RunConfig cfg = axmhd::parse_config_file(config_path);
    axmhd::RunOutcome out = axmhd::run_command(cfg);
    std::cout << "run: " << out.message << " (t=" << out.final_t
              << ", steps=" << out.steps << ", output=" << out.output_dir << ")\n";
    return out.exit_code;
}

int do_check(const std::string& config_path) {
    axmhd::RunConfig cfg = axmhd::parse_config_file(config_path);
    return axmhd::check_command(cfg, std::cout);
}

int do_converge(const std::string& config_path, const std::string& case_name) {
    axmhd::RunConfig cfg = axmhd::parse_config_file(config_path);
    axmhd::ConvergenceTable table = axmhd::converge_command(case_name, cfg.nu);
    axmhd::print_convergence(table, std::cout);
    return table.pass ? 0 : 1;
}

int do_replay(const std::string& checkpoint, double t_end, const std::string& out_dir) {
    axmhd::RunOutcome out = axmhd::replay_command(checkpoint, t_end, out_dir);
    std::cout << "replay: " << out.message << " (t=" << out.final_t
              << ", steps=" << out.steps << ", output=" << out.output_dir << ")\n";
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"axisymmetric MHD simulator and diagnostics"};
    app.require_subcommand(1);

    std::string config_path, case_name, checkpoint, out_dir;
    double t_end = 0;

    CLI::App* run = app.add_subcommand("run", "time-step a configured problem");
    run->add_option("--config", config_path, "config file")->required();

    CLI::App* check = app.add_subcommand("check", "operator property checks");
    check->add_option("--config", config_path, "config file")->required();

    CLI::App* converge = app.add_subcommand("converge", "manufactured refinement study");
    converge->add_option("--config", config_path, "config file")->required();
    converge->add_option("--case", case_name, "diffusion | advection | full")->required();

    CLI::App* replay = app.add_subcommand("replay", "resume from a checkpoint");
    replay->add_option("--checkpoint", checkpoint, "checkpoint or snapshot file")->required();
    replay->add_option("--t-end", t_end, "new end time")->required();
    replay->add_option("--output-dir", out_dir, "output directory override");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return do_run(config_path);
        if (check->parsed()) return do_check(config_path);
        if (converge->parsed()) return do_converge(config_path, case_name);
        if (replay->parsed()) return do_replay(checkpoint, t_end, out_dir);
    } catch (const axmhd::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const axmhd::IoError& e) {
        std::cerr << "io error: " << e.what() << '\n';
        return 2;
    } catch (const axmhd::FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return 2;
    } catch (const axmhd::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
