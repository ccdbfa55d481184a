#include "corciar/corciar.h"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace
{

constexpr int kExitConfig = 1;
constexpr int kExitRuntime = 2;

int
exit_code(corciar_status s)
{
    return s == CORCIAR_ERR_CONFIG || s == CORCIAR_ERR_ARGUMENT ? kExitConfig : kExitRuntime;
}

int
report(corciar_status s, const std::string& what)
{
    std::cerr << "corciar: " << what << ": " << corciar_last_error() << '\n';
    return exit_code(s);
}

/// "1..10", "1,2,5" or a mix such as "1..3,7".
std::vector<std::uint64_t>
parse_seed_list(const std::string& text)
{
    std::vector<std::uint64_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ','))
    {
        if (item.empty())
        {
            throw CLI::ValidationError("--seeds", "empty seed in list");
        }
        const auto dots = item.find("..");
        if (dots == std::string::npos)
        {
            out.push_back(std::stoull(item));
            continue;
        }
        const auto lo = std::stoull(item.substr(0, dots));
        const auto hi = std::stoull(item.substr(dots + 2));
        if (hi < lo)
        {
            throw CLI::ValidationError("--seeds", "range end below start: " + item);
        }
        for (auto s = lo; s <= hi; ++s)
        {
            out.push_back(s);
        }
    }
    if (out.empty())
    {
        throw CLI::ValidationError("--seeds", "no seeds given");
    }
    return out;
}

int
write_output(const std::string& path, const char* text)
{
    if (path.empty())
    {
        std::fputs(text, stdout);
        return 0;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
    {
        std::cerr << "corciar: cannot open output file " << path << '\n';
        return kExitRuntime;
    }
    out << text;
    return 0;
}

corciar_status
load_config(const std::string& path, corciar_config** cfg)
{
    if (path.empty())
    {
        return corciar_config_default(cfg);
    }
    return corciar_config_load(path.c_str(), cfg);
}

struct RunOptions
{
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string trace;
    std::string routes;
    std::vector<std::string> settings;
};

int
apply_settings(corciar_config* cfg, const std::vector<std::string>& settings)
{
    for (const auto& kv : settings)
    {
        const auto eq = kv.find('=');
        if (eq == std::string::npos)
        {
            std::cerr << "corciar: --set expects key=value, got " << kv << '\n';
            return kExitConfig;
        }
        const auto s = corciar_config_set(cfg, kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
        if (s != CORCIAR_OK)
        {
            return report(s, "invalid setting " + kv);
        }
    }
    return 0;
}

int
cmd_run(const RunOptions& o)
{
    corciar_config* cfg = nullptr;
    if (auto s = load_config(o.config, &cfg); s != CORCIAR_OK)
    {
        report(s, "config error");
        return kExitConfig;
    }
    if (int rc = apply_settings(cfg, o.settings))
    {
        corciar_config_free(cfg);
        return rc;
    }
    if (o.seed)
    {
        corciar_config_set_seed(cfg, *o.seed);
    }
    std::string scenario = "run";
    if (!o.config.empty())
    {
        scenario = o.config.substr(o.config.find_last_of('/') + 1);
        if (const auto dot = scenario.rfind('.'); dot != std::string::npos && dot > 0)
        {
            scenario.resize(dot);
        }
    }
    corciar_result* res = nullptr;
    const auto s = corciar_run(cfg, scenario.c_str(), o.trace.empty() ? nullptr : o.trace.c_str(),
                               o.routes.empty() ? nullptr : o.routes.c_str(), &res);
    corciar_config_free(cfg);
    if (s != CORCIAR_OK)
    {
        return report(s, "run failed");
    }
    char* csv = nullptr;
    corciar_result_csv(res, 1, &csv);
    const double c = corciar_result_cor(res);
    if (c > 1.0)
    {
        std::cerr << "corciar: baseline throughput exceeds CoRCiaR (cor " << c << "); classified as clamped to 1\n";
    }
    corciar_result_free(res);
    const int rc = write_output(o.out, csv);
    corciar_string_free(csv);
    return rc;
}

struct SweepOptions
{
    std::string config;
    std::vector<int> hops;
    std::vector<int> nodes;
    bool full{false};
    std::string seeds{"1..10"};
    std::string out;
    unsigned threads{0};
    std::vector<std::string> settings;
};

int
cmd_sweep(SweepOptions o)
{
    if (!o.hops.empty() && !o.nodes.empty())
    {
        std::cerr << "corciar: give either --hops or --nodes, not both\n";
        return kExitConfig;
    }
    corciar_axis axis = CORCIAR_AXIS_HOPS;
    std::vector<int> values = o.hops;
    if (o.hops.empty())
    {
        axis = CORCIAR_AXIS_NODES;
        values = o.nodes.empty() ? std::vector<int>{20, 40, 60} : o.nodes;
        if (o.full)
        {
            for (int extra : {80, 100})
            {
                if (std::find(values.begin(), values.end(), extra) == values.end())
                {
                    values.push_back(extra);
                }
            }
        }
    }
    std::vector<std::uint64_t> seeds;
    try
    {
        seeds = parse_seed_list(o.seeds);
    }
    catch (const std::exception& e)
    {
        std::cerr << "corciar: invalid --seeds: " << e.what() << '\n';
        return kExitConfig;
    }
    corciar_config* cfg = nullptr;
    if (auto s = load_config(o.config, &cfg); s != CORCIAR_OK)
    {
        report(s, "config error");
        return kExitConfig;
    }
    if (int rc = apply_settings(cfg, o.settings))
    {
        corciar_config_free(cfg);
        return rc;
    }
    unsigned threads = o.threads;
    if (threads == 0)
    {
        threads = std::max(1u, std::thread::hardware_concurrency());
    }
    char* csv = nullptr;
    std::size_t failed = 0;
    const auto s = corciar_sweep(cfg, axis, values.data(), values.size(), seeds.data(), seeds.size(), threads, &csv,
                                 &failed);
    corciar_config_free(cfg);
    if (failed > 0)
    {
        std::cerr << "corciar: " << failed << " sweep cell(s) failed and were skipped:\n" << corciar_last_error();
    }
    if (s != CORCIAR_OK)
    {
        return report(s, "sweep failed");
    }
    const int rc = write_output(o.out, csv);
    corciar_string_free(csv);
    return rc;
}

int
cmd_channel_table(const std::string& out)
{
    char* csv = nullptr;
    if (auto s = corciar_channel_table_csv(&csv); s != CORCIAR_OK)
    {
        return report(s, "channel table failed");
    }
    const int rc = write_output(out, csv);
    corciar_string_free(csv);
    return rc;
}

} // namespace

int
main(int argc, char** argv)
{
    CLI::App app{"Multi-radio multi-channel mesh simulator: AODV baseline vs CoRCiaR"};
    app.set_version_flag("--version", std::string{corciar_version()});
    app.require_subcommand(1);

    RunOptions run;
    auto* run_cmd = app.add_subcommand("run", "Run one scenario (both protocol phases by default) and print CSV");
    run_cmd->add_option("config_file", run.config, "Scenario config file (same as --config)");
    run_cmd->add_option("--config", run.config, "Scenario config file; default: built-in defaults");
    run_cmd->add_option("--seed", run.seed, "Run seed (integer); default: the config's seed (1)");
    run_cmd->add_option("--out", run.out, "CSV output file; default: standard output");
    run_cmd->add_option("--trace", run.trace, "Event trace file (one `time node action` line per event); default: none");
    run_cmd->add_option("--dump-routes", run.routes, "Final route tables as CSV; default: none");
    run_cmd->add_option("--set", run.settings, "Override a config key, key=value (repeatable); default: none");

    SweepOptions sweep;
    auto* sweep_cmd = app.add_subcommand("sweep", "Run a hop-count or node-count sweep over seeds and print CSV");
    sweep_cmd->add_option("--config", sweep.config, "Base scenario config file; default: built-in defaults");
    sweep_cmd->add_option("--hops", sweep.hops, "Chain hop counts (comma list); a chain of h+1 nodes each; default: none")
        ->delimiter(',');
    sweep_cmd->add_option("--nodes", sweep.nodes, "Random-topology node counts (comma list); default: 20,40,60")
        ->delimiter(',');
    sweep_cmd->add_flag("--full", sweep.full, "Add 80 and 100 nodes to the node sweep; default: off");
    sweep_cmd->add_option("--seeds", sweep.seeds, "Seeds as a range a..b or comma list; default: 1..10");
    sweep_cmd->add_option("--threads", sweep.threads, "Worker threads (count); default: 0 = hardware concurrency");
    sweep_cmd->add_option("--out", sweep.out, "CSV output file; default: standard output");
    sweep_cmd->add_option("--set", sweep.settings, "Override a config key, key=value (repeatable); default: none");

    std::string table_out;
    auto* table_cmd =
        app.add_subcommand("channel-table", "Print channel separation classes, overlap factors and RTS/CTS decisions");
    table_cmd->add_option("--out", table_out, "CSV output file; default: standard output");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError& e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : kExitConfig;
    }

    if (run_cmd->parsed())
    {
        return cmd_run(run);
    }
    if (sweep_cmd->parsed())
    {
        return cmd_sweep(sweep);
    }
    return cmd_channel_table(table_out);
}
