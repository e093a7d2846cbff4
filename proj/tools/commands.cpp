#include "commands.hpp"

#include "oulevy/config.hpp"
#include "oulevy/experiments.hpp"
#include "oulevy/report.hpp"
#include "oulevy/suites.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <thread>

namespace oulevy::cli {

namespace {

ExperimentConfig load(const CommonFlags& flags)
{
    if (flags.config.empty())
        throw std::invalid_argument("--config is required (a file or one of the presets)");
    const auto presets = preset_names();
    ExperimentConfig cfg = std::find(presets.begin(), presets.end(), flags.config) != presets.end() &&
                                   !std::filesystem::exists(flags.config)
                               ? preset_config(flags.config)
                               : load_config(flags.config);
    if (flags.seed)
        cfg.run.seed = flags.seed;
    if (flags.replicas)
        cfg.run.replicas = *flags.replicas;
    if (cfg.run.replicas < min_tv_samples)
        throw std::invalid_argument("replicas must be at least " + std::to_string(min_tv_samples));
    return cfg;
}

std::string output_dir(const CommonFlags& flags, const ExperimentConfig* cfg)
{
    if (!flags.out.empty())
        return flags.out;
    return cfg ? cfg->output.directory : std::string();
}

void emit(const std::string& dir, const std::string& file, const std::string& text)
{
    if (dir.empty()) {
        std::cout << text << std::flush;
        return;
    }
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    const auto path = std::filesystem::path(dir) / file;
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out << text;
    out.close();
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
}

} // namespace

unsigned resolve_threads(unsigned requested)
{
    if (const char* env = std::getenv("OU_LEVY_THREADS"); env && *env) {
        char* end = nullptr;
        const unsigned long v = std::strtoul(env, &end, 10);
        if (*end != '\0' || v == 0)
            throw std::invalid_argument(std::string("OU_LEVY_THREADS must be a positive integer, got '") + env + "'");
        return static_cast<unsigned>(v);
    }
    if (requested > 0)
        return requested;
    return std::max(1u, std::thread::hardware_concurrency());
}

int cmd_verify(const std::string& suite, const CommonFlags& flags)
{
    std::optional<ExperimentConfig> cfg;
    if (!flags.config.empty())
        cfg = load(flags);
    SuiteOptions options;
    options.threads = resolve_threads(flags.threads);
    const auto seed = flags.seed ? flags.seed : (cfg ? cfg->run.seed : std::nullopt);
    if (!seed)
        throw std::invalid_argument("--seed is required (no entropy default)");
    options.seed = *seed;
    if (flags.replicas)
        options.replicas = *flags.replicas;
    else if (cfg)
        options.replicas = cfg->run.replicas;
    const auto reports = run_suite(suite, options);
    emit(output_dir(flags, cfg ? &*cfg : nullptr), "verify_" + suite + ".json",
         suite_report_json(reports, options.seed, options.replicas));
    const bool pass = std::all_of(reports.begin(), reports.end(), [](const SuiteReport& r) { return r.pass(); });
    return pass ? exit_ok : exit_failed;
}

int cmd_tv_decay(const CommonFlags& flags)
{
    const ExperimentConfig cfg = load(flags);
    const DecayTable table = tv_decay(cfg, resolve_threads(flags.threads));
    emit(output_dir(flags, &cfg), "tv_decay.csv", decay_csv(table));
    return exit_ok;
}

int cmd_bounds(const CommonFlags& flags)
{
    const ExperimentConfig cfg = load(flags);
    emit(output_dir(flags, &cfg), "bounds.csv", bounds_csv(bound_tables(cfg, resolve_threads(flags.threads))));
    return exit_ok;
}

int cmd_couple_trace(const CommonFlags& flags, const TraceFlags& trace)
{
    const ExperimentConfig cfg = load(flags);
    if (!trace.horizon && cfg.run.times.empty())
        throw std::invalid_argument("couple-trace needs --horizon or a non-empty run.times");
    const double t = trace.horizon.value_or(cfg.run.times.front());
    std::string text;
    for (const auto& tr : coupling_traces(cfg, t, trace.count, resolve_threads(flags.threads)))
        text += transcript_json_line(tr) + '\n';
    emit(output_dir(flags, &cfg), "couple_trace.jsonl", text);
    return exit_ok;
}

} // namespace oulevy::cli
