#include "emacfem/runner.hpp"

#include <CLI11.hpp>

#include <iostream>

namespace {

int dispatch(const std::string& verb, const std::string& path) {
    using namespace emacfem;
    if (verb == "mesh-info") {
        std::cout << mesh_info(path).dump(2) << "\n";
        return 0;
    }
    const RunConfig config = parse_config(path);
    if (verb == "run") {
        const RunResult r = run(config);
        std::cout << r.summary.dump(2) << "\n";
    } else if (verb == "sweep") {
        const SweepResult r = run_sweep(config);
        std::cout << r.summary.dump(2) << "\n";
    } else if (verb == "compare") {
        const CompareResult r = compare_schemes(config);
        std::cout << r.summary.dump(2) << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Incompressible flow solver: filtered implicit time stepping with the "
                 "energy-momentum-angular-momentum conserving nonlinear form"};
    app.require_subcommand(1);

    std::string config_path, mesh_path;
    auto* cmd_run = app.add_subcommand("run", "Run one simulation from a JSON config");
    cmd_run->add_option("config", config_path, "JSON config file")->required();
    auto* cmd_sweep = app.add_subcommand("sweep", "Run a refinement sweep from a JSON config");
    cmd_sweep->add_option("config", config_path, "JSON config file")->required();
    auto* cmd_compare =
        app.add_subcommand("compare", "Run filtered and unfiltered schemes side by side");
    cmd_compare->add_option("config", config_path, "JSON config file")->required();
    auto* cmd_info = app.add_subcommand("mesh-info", "Validate a mesh file and print its stats");
    cmd_info->add_option("path", mesh_path, "mesh file (ASCII v2.2)")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    const std::string verb = app.get_subcommands().front()->get_name();
    try {
        return dispatch(verb, verb == "mesh-info" ? mesh_path : config_path);
    } catch (const emacfem::config_error& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const emacfem::solver_error& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return 3;
    } catch (const emacfem::io_error& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
