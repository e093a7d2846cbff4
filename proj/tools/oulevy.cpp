#include "commands.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <stdexcept>

using namespace oulevy::cli;

namespace {

void add_common(CLI::App* cmd, CommonFlags& flags)
{
    cmd->add_option("--config", flags.config, "INI file, or a preset: gaussian52-small, z3-exponential");
    cmd->add_option("--seed", flags.seed, "64-bit master seed");
    cmd->add_option("--replicas", flags.replicas, "Monte Carlo replicas (at least 1000)");
    cmd->add_option("--out", flags.out, "output directory (default: stdout)");
    cmd->add_option("--threads", flags.threads, "worker threads (OU_LEVY_THREADS overrides; 0 = all cores)");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulation laboratory for Ornstein-Uhlenbeck processes driven by jump noise"};
    app.require_subcommand(1);

    CommonFlags flags;
    TraceFlags trace;
    std::string suite;

    auto* verify = app.add_subcommand("verify", "run a property suite and print a JSON report");
    verify->add_option("suite", suite, "cm | mecke | mineka | lemma31 | decomposition | gradient | all")->required();
    add_common(verify, flags);

    auto* decay = app.add_subcommand("tv-decay", "TV decay table (CSV)");
    add_common(decay, flags);

    auto* bounds = app.add_subcommand("bounds", "bound curves on the time grid (CSV)");
    add_common(bounds, flags);

    auto* traces = app.add_subcommand("couple-trace", "Mineka coupling transcripts (JSON lines)");
    add_common(traces, flags);
    traces->add_option("--horizon", trace.horizon, "coupling horizon t (default: first grid time)");
    traces->add_option("--count", trace.count, "number of transcripts");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_usage;
    }

    try {
        if (verify->parsed())
            return cmd_verify(suite, flags);
        if (decay->parsed())
            return cmd_tv_decay(flags);
        if (bounds->parsed())
            return cmd_bounds(flags);
        return cmd_couple_trace(flags, trace);
    } catch (const std::invalid_argument& e) {
        std::cerr << "oulevy: " << e.what() << '\n';
        return exit_usage;
    } catch (const std::exception& e) {
        std::cerr << "oulevy: " << e.what() << '\n';
        return exit_runtime;
    }
}
