#include <iostream>
#include <string>

#include <CLI11.hpp>

#include <kempf/commands.hpp>
#include <kempf/version.hpp>

namespace {

void add_common_flags(CLI::App* cmd, kempf::cli::options& opt) {
    cmd->add_option("--input", opt.input_path, "path to the run document (JSON)")->required();
    cmd->add_option("--output", opt.output_path, "report destination; '-' is stdout");
    cmd->add_option("--csv", opt.csv_path, "also write a per-sample CSV trace");
    cmd->add_option("--tol-res", opt.tol_res, "balancing residual tolerance");
    cmd->add_option("--tol-pd", opt.tol_pd, "nondegeneracy tolerance (relative)");
    cmd->add_option("--seed", opt.seed, "RNG seed for sampling experiments");
    cmd->add_option("--samples", opt.samples, "number of random samples");
    cmd->add_option("--radius", opt.radius, "relative weight-ball radius");
    cmd->add_option("--grid", opt.grid, "grid points per weight axis");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"kempf: balancing conditions and solvers for weighted point "
                 "configurations under torus moment maps"};
    app.set_version_flag("--version", std::string(kempf::version));
    app.require_subcommand(1);

    kempf::cli::options opt;
    for (const char* name : {"check", "solve", "heights", "bisect", "certify", "sample"})
        add_common_flags(app.add_subcommand(name), opt);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    return kempf::cli::run_command(app.get_subcommands().front()->get_name(), opt, std::cout,
                                   std::cerr);
}
