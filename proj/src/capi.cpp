#include "corciar/corciar.h"

#include "corciar/config.hpp"
#include "corciar/experiment.hpp"
#include "corciar/metrics.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

struct corciar_config
{
    corciar::ScenarioConfig cfg;
};

struct corciar_result
{
    corciar::experiment::ScenarioResult res;
};

namespace
{

thread_local std::string g_last_error;

corciar_status
fail(corciar_status status, std::string message)
{
    g_last_error = std::move(message);
    return status;
}

std::string
describe(const corciar::ConfigError& e)
{
    std::ostringstream os;
    bool first = true;
    for (const auto& issue : e.issues())
    {
        if (!first)
        {
            os << '\n';
        }
        first = false;
        if (issue.line > 0)
        {
            os << "line " << issue.line << ": ";
        }
        os << issue.message;
    }
    return os.str();
}

char*
dup_string(const std::string& s)
{
    auto* out = static_cast<char*>(std::malloc(s.size() + 1));
    if (out)
    {
        std::memcpy(out, s.c_str(), s.size() + 1);
    }
    return out;
}

/// Runs fn, mapping exceptions to status codes.
template <class Fn>
corciar_status
guarded(Fn&& fn)
{
    try
    {
        g_last_error.clear();
        return fn();
    }
    catch (const corciar::ConfigError& e)
    {
        return fail(CORCIAR_ERR_CONFIG, describe(e));
    }
    catch (const std::invalid_argument& e)
    {
        return fail(CORCIAR_ERR_ARGUMENT, e.what());
    }
    catch (const std::out_of_range& e)
    {
        return fail(CORCIAR_ERR_ARGUMENT, e.what());
    }
    catch (const std::exception& e)
    {
        return fail(CORCIAR_ERR_RUNTIME, e.what());
    }
    catch (...)
    {
        return fail(CORCIAR_ERR_RUNTIME, "unknown error");
    }
}

double
or_nan(const std::optional<double>& v)
{
    return v ? *v : std::numeric_limits<double>::quiet_NaN();
}

} // namespace

extern "C" {

const char*
corciar_last_error(void)
{
    return g_last_error.c_str();
}

const char*
corciar_version(void)
{
    return "1.0.0";
}

void
corciar_string_free(char* s)
{
    std::free(s);
}

corciar_status
corciar_config_default(corciar_config** out)
{
    if (!out)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "out must not be NULL");
    }
    return guarded([&] {
        *out = new corciar_config{};
        return CORCIAR_OK;
    });
}

corciar_status
corciar_config_parse(const char* text, corciar_config** out)
{
    if (!text || !out)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "text and out must not be NULL");
    }
    *out = nullptr;
    return guarded([&] {
        auto cfg = corciar::parse_config(text);
        *out = new corciar_config{std::move(cfg)};
        return CORCIAR_OK;
    });
}

corciar_status
corciar_config_load(const char* path, corciar_config** out)
{
    if (!path || !out)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "path and out must not be NULL");
    }
    *out = nullptr;
    std::ifstream in(path, std::ios::binary);
    if (!in)
    {
        return fail(CORCIAR_ERR_IO, std::string{"cannot open config file "} + path);
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();
    return corciar_config_parse(text.c_str(), out);
}

corciar_status
corciar_config_set(corciar_config* cfg, const char* key, const char* value)
{
    if (!cfg || !key || !value)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "cfg, key and value must not be NULL");
    }
    return guarded([&] {
        corciar::ScenarioConfig next = cfg->cfg;
        corciar::apply_setting(next, key, value);
        corciar::validate_config(next);
        cfg->cfg = std::move(next);
        return CORCIAR_OK;
    });
}

corciar_status
corciar_config_set_seed(corciar_config* cfg, uint64_t seed)
{
    if (!cfg)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "cfg must not be NULL");
    }
    cfg->cfg.seed = seed;
    return CORCIAR_OK;
}

corciar_status
corciar_config_serialize(const corciar_config* cfg, char** out)
{
    if (!cfg || !out)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "cfg and out must not be NULL");
    }
    return guarded([&] {
        *out = dup_string(corciar::serialize_config(cfg->cfg));
        return CORCIAR_OK;
    });
}

void
corciar_config_free(corciar_config* cfg)
{
    delete cfg;
}

corciar_status
corciar_run(const corciar_config* cfg,
            const char* scenario,
            const char* trace_path,
            const char* routes_path,
            corciar_result** out)
{
    if (!cfg || !out)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "cfg and out must not be NULL");
    }
    *out = nullptr;
    std::ofstream trace;
    if (trace_path)
    {
        trace.open(trace_path, std::ios::binary | std::ios::trunc);
        if (!trace)
        {
            return fail(CORCIAR_ERR_IO, std::string{"cannot open trace file "} + trace_path);
        }
    }
    return guarded([&] {
        auto res = corciar::experiment::run_scenario(cfg->cfg, scenario ? scenario : "run",
                                                     trace_path ? &trace : nullptr);
        if (routes_path)
        {
            std::ofstream routes(routes_path, std::ios::binary | std::ios::trunc);
            if (!routes)
            {
                return fail(CORCIAR_ERR_IO, std::string{"cannot open route dump file "} + routes_path);
            }
            routes << corciar::experiment::route_dump(res);
        }
        *out = new corciar_result{std::move(res)};
        return CORCIAR_OK;
    });
}

size_t
corciar_result_phase_count(const corciar_result* res)
{
    return res ? res->res.phases.size() : 0;
}

corciar_status
corciar_result_phase(const corciar_result* res, size_t index, corciar_summary* out)
{
    if (!res || !out || index >= res->res.phases.size())
    {
        return fail(CORCIAR_ERR_ARGUMENT, "invalid result, index or output");
    }
    const auto& p = res->res.phases[index];
    corciar_summary s{};
    std::strncpy(s.protocol, p.protocol_label.c_str(), sizeof s.protocol - 1);
    s.n_nodes = static_cast<uint32_t>(p.n_nodes);
    s.n_hops = p.n_hops;
    s.throughput_kbps = p.summary.throughput_kbps;
    s.delivery_ratio = or_nan(p.summary.delivery_ratio);
    s.mean_delay_ms = or_nan(p.summary.mean_e2e_delay_ms);
    s.mean_rtt_ms = or_nan(p.summary.mean_rtt_ms);
    for (const auto& f : p.flows)
    {
        s.packets_sent += f.stats.packets_sent;
        s.packets_received += f.stats.packets_received_at_gateway;
    }
    *out = s;
    return CORCIAR_OK;
}

corciar_status
corciar_result_counters(const corciar_result* res, size_t index, corciar_counters* out)
{
    if (!res || !out || index >= res->res.phases.size())
    {
        return fail(CORCIAR_ERR_ARGUMENT, "invalid result, index or output");
    }
    const auto& c = res->res.phases[index].counters;
    *out = corciar_counters{c.events,       c.collisions, c.interference_corruptions,
                            c.cts_deferrals, c.mac_failures, c.queue_drops,
                            c.route_discoveries, c.no_route, c.out_of_range_receptions};
    return CORCIAR_OK;
}

double
corciar_result_cor(const corciar_result* res)
{
    return res ? or_nan(res->res.cor) : std::numeric_limits<double>::quiet_NaN();
}

uint64_t
corciar_result_trace_hash(const corciar_result* res, size_t index)
{
    if (!res || index >= res->res.phases.size())
    {
        return 0;
    }
    return res->res.phases[index].trace_hash;
}

int
corciar_result_conserved(const corciar_result* res)
{
    if (!res)
    {
        return 0;
    }
    for (const auto& p : res->res.phases)
    {
        for (const auto& f : p.flows)
        {
            if (!f.stats.conserved())
            {
                return 0;
            }
        }
    }
    return 1;
}

corciar_status
corciar_result_csv(const corciar_result* res, int with_header, char** out)
{
    if (!res || !out)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "res and out must not be NULL");
    }
    return guarded([&] {
        *out = dup_string(corciar::experiment::to_csv(res->res, with_header != 0));
        return CORCIAR_OK;
    });
}

void
corciar_result_free(corciar_result* res)
{
    delete res;
}

corciar_status
corciar_sweep(const corciar_config* base,
              corciar_axis axis,
              const int* values,
              size_t n_values,
              const uint64_t* seeds,
              size_t n_seeds,
              unsigned threads,
              char** csv_out,
              size_t* failed_cells)
{
    if (!base || !values || !seeds || !csv_out || n_values == 0 || n_seeds == 0)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "sweep needs a config, nonempty axis and seed lists, and an output");
    }
    if (axis != CORCIAR_AXIS_HOPS && axis != CORCIAR_AXIS_NODES)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "unknown sweep axis");
    }
    *csv_out = nullptr;
    return guarded([&] {
        corciar::validate_config(base->cfg);
        const auto sweep_axis =
            axis == CORCIAR_AXIS_HOPS ? corciar::experiment::SweepAxis::Hops : corciar::experiment::SweepAxis::Nodes;
        auto res = corciar::experiment::run_sweep(base->cfg, sweep_axis, std::span<const int>(values, n_values),
                                                  std::span<const std::uint64_t>(seeds, n_seeds), threads);
        if (failed_cells)
        {
            *failed_cells = res.failed;
        }
        std::string errors;
        for (const auto& e : res.errors)
        {
            errors += e;
            errors += '\n';
        }
        g_last_error = errors;
        if (res.failed == res.cells)
        {
            return CORCIAR_ERR_RUNTIME;
        }
        *csv_out = dup_string(res.csv);
        return CORCIAR_OK;
    });
}

corciar_status
corciar_channel_table_csv(char** out)
{
    if (!out)
    {
        return fail(CORCIAR_ERR_ARGUMENT, "out must not be NULL");
    }
    return guarded([&] {
        *out = dup_string(corciar::experiment::channel_table_csv());
        return CORCIAR_OK;
    });
}

const char*
corciar_csv_header(void)
{
    static const std::string header = corciar::experiment::csv_header();
    return header.c_str();
}

double
corciar_cor(double after_kbps, double before_kbps)
{
    return or_nan(corciar::metrics::cor(after_kbps, before_kbps));
}

} // extern "C"
