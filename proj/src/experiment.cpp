#include "corciar/experiment.hpp"

#include "corciar/channel_model.hpp"
#include "corciar/mac.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

namespace corciar::experiment
{

const engine::PhaseResult*
ScenarioResult::phase(std::string_view label) const
{
    for (const auto& p : phases)
    {
        if (p.protocol_label == label)
        {
            return &p;
        }
    }
    return nullptr;
}

std::string
format_number(double v)
{
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    std::string s{buf};
    if (s == "-0.000000")
    {
        s = "0.000000";
    }
    return s;
}

namespace
{

std::string
opt_number(const std::optional<double>& v)
{
    return v ? format_number(*v) : std::string{};
}

} // namespace

ScenarioResult
run_scenario(const ScenarioConfig& config, std::string scenario, std::ostream* trace)
{
    validate_config(config);
    ScenarioResult res;
    res.scenario = std::move(scenario);
    res.config = config;
    res.topology = engine::build_topology(config);
    engine::assign_channels(res.topology, config.channel_plan, config.radios_per_node, config.tx_range_m);

    if (config.protocol == ProtocolChoice::AodvHop || config.protocol == ProtocolChoice::Both)
    {
        engine::PhaseOptions opt;
        opt.metric = routing::Metric::HopCount;
        opt.label = std::string{kBaselineLabel};
        opt.naive_mac = config.baseline_mac == BaselineMac::Naive;
        opt.trace = trace;
        res.phases.push_back(engine::simulate(config, res.topology, opt));
    }
    if (config.protocol == ProtocolChoice::Corciar || config.protocol == ProtocolChoice::Both)
    {
        engine::PhaseOptions opt;
        opt.metric = routing::Metric::AvgRtt;
        opt.label = std::string{kCorciarLabel};
        opt.trace = trace;
        if (!res.phases.empty())
        {
            opt.seed_costs = &res.phases.front().link_costs;
        }
        auto phase = engine::simulate(config, res.topology, opt);
        res.phases.push_back(std::move(phase));
    }
    if (res.phases.size() == 2)
    {
        const double base = res.phases[0].summary.throughput_kbps;
        const double ours = res.phases[1].summary.throughput_kbps;
        if (auto c = metrics::cor(base, ours))
        {
            res.cor = *c;
        }
        else if (base <= 0.0)
        {
            res.cor = 0.0;
        }
        if (res.cor)
        {
            res.collision_class = metrics::classify_collision(*res.cor).cls;
        }
    }
    return res;
}

std::string
csv_header()
{
    return "scenario,seed,protocol,n_nodes,n_hops,throughput_kbps,delivery_ratio,mean_delay_ms,mean_rtt_ms,cor,"
           "collision_class";
}

std::vector<std::string>
csv_rows(const ScenarioResult& result)
{
    std::vector<std::string> rows;
    for (const auto& p : result.phases)
    {
        std::ostringstream os;
        os << result.scenario << ',' << result.config.seed << ',' << p.protocol_label << ',' << p.n_nodes << ','
           << p.n_hops << ',' << format_number(p.summary.throughput_kbps) << ','
           << opt_number(p.summary.delivery_ratio) << ',' << opt_number(p.summary.mean_e2e_delay_ms) << ','
           << opt_number(p.summary.mean_rtt_ms) << ',' << opt_number(result.cor) << ',';
        if (result.collision_class)
        {
            os << metrics::to_string(*result.collision_class);
        }
        rows.push_back(os.str());
    }
    return rows;
}

std::string
to_csv(const ScenarioResult& result, bool with_header)
{
    std::string out;
    if (with_header)
    {
        out += csv_header();
        out += '\n';
    }
    for (const auto& row : csv_rows(result))
    {
        out += row;
        out += '\n';
    }
    return out;
}

std::string
route_dump(const ScenarioResult& result)
{
    std::ostringstream os;
    os << "node,destination,next_hop,hop_count,rtt_cost_ms,expires_at\n";
    for (const auto& p : result.phases)
    {
        os << "# protocol=" << p.protocol_label << '\n';
        for (const auto& row : p.routes)
        {
            os << row.node << ',' << row.entry.destination << ',' << row.entry.next_hop << ','
               << row.entry.hop_count << ',' << format_number(row.entry.rtt_cost_ms) << ','
               << format_number(row.entry.expires_at) << '\n';
        }
    }
    return os.str();
}

namespace
{

struct Cell
{
    std::size_t value_index;
    std::uint64_t seed;
    std::optional<ScenarioResult> result;
    std::string error;
};

ScenarioConfig
cell_config(const ScenarioConfig& base, SweepAxis axis, int value, std::uint64_t seed)
{
    ScenarioConfig cfg = base;
    cfg.seed = seed;
    if (axis == SweepAxis::Hops)
    {
        cfg.topology = TopologySpec{TopologyKind::Chain, value + 1, std::nullopt};
    }
    else
    {
        cfg.topology = TopologySpec{TopologyKind::Random, value, std::nullopt};
    }
    return cfg;
}

std::string
axis_label(SweepAxis axis, int value)
{
    return (axis == SweepAxis::Hops ? "hops=" : "nodes=") + std::to_string(value);
}

} // namespace

SweepResult
run_sweep(const ScenarioConfig& base,
          SweepAxis axis,
          std::span<const int> values,
          std::span<const std::uint64_t> seeds,
          unsigned threads,
          bool keep_results)
{
    std::vector<Cell> cells;
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        for (auto s : seeds)
        {
            cells.push_back(Cell{i, s, std::nullopt, {}});
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k = next++; k < cells.size(); k = next++)
        {
            Cell& c = cells[k];
            const int v = values[c.value_index];
            try
            {
                c.result = run_scenario(cell_config(base, axis, v, c.seed), axis_label(axis, v));
            }
            catch (const std::exception& e)
            {
                c.error = axis_label(axis, v) + " seed " + std::to_string(c.seed) + ": " + e.what();
            }
        }
    };
    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(cells.size())));
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < n_threads; ++t)
    {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool)
    {
        t.join();
    }

    SweepResult out;
    out.cells = cells.size();
    std::string csv = csv_header() + "\n";
    for (std::size_t i = 0; i < values.size(); ++i)
    {
        std::vector<std::string> labels;
        std::map<std::string, std::vector<const engine::PhaseResult*>> by_label;
        std::vector<double> cors;
        for (const auto& c : cells)
        {
            if (c.value_index != i)
            {
                continue;
            }
            if (!c.result)
            {
                ++out.failed;
                out.errors.push_back(c.error);
                continue;
            }
            for (const auto& row : csv_rows(*c.result))
            {
                csv += row;
                csv += '\n';
            }
            for (const auto& p : c.result->phases)
            {
                if (!by_label.count(p.protocol_label))
                {
                    labels.push_back(p.protocol_label);
                }
                by_label[p.protocol_label].push_back(&p);
            }
            if (c.result->cor)
            {
                cors.push_back(*c.result->cor);
            }
        }
        const auto med_cor = metrics::median(cors);
        for (const auto& label : labels)
        {
            std::vector<double> thr, dr, delay, rtt, nodes;
            for (const auto* p : by_label[label])
            {
                thr.push_back(p->summary.throughput_kbps);
                nodes.push_back(static_cast<double>(p->n_nodes));
                if (p->summary.delivery_ratio)
                {
                    dr.push_back(*p->summary.delivery_ratio);
                }
                if (p->summary.mean_e2e_delay_ms)
                {
                    delay.push_back(*p->summary.mean_e2e_delay_ms);
                }
                if (p->summary.mean_rtt_ms)
                {
                    rtt.push_back(*p->summary.mean_rtt_ms);
                }
            }
            std::ostringstream os;
            os << axis_label(axis, values[i]) << ",,median:" << label << ','
               << static_cast<std::size_t>(metrics::median(nodes).value_or(0.0)) << ",,"
               << opt_number(metrics::median(thr)) << ',' << opt_number(metrics::median(dr)) << ','
               << opt_number(metrics::median(delay)) << ',' << opt_number(metrics::median(rtt)) << ','
               << opt_number(med_cor) << ',';
            if (med_cor)
            {
                os << metrics::to_string(metrics::classify_collision(*med_cor).cls);
            }
            csv += os.str();
            csv += '\n';
        }
    }
    out.csv = std::move(csv);
    if (keep_results)
    {
        for (auto& c : cells)
        {
            if (c.result)
            {
                out.results.push_back(std::move(*c.result));
            }
        }
    }
    return out;
}

std::string
channel_table_csv()
{
    using channel::ChannelId;
    std::ostringstream os;
    os << "c1,c2,separation,class,factor,qos_literal,qos_symmetric,dt_literal,dt_symmetric\n";
    for (int a = 1; a <= channel::kChannelCount; ++a)
    {
        for (int b = 1; b <= channel::kChannelCount; ++b)
        {
            const ChannelId c1{a};
            const ChannelId c2{b};
            const ChannelId local[] = {c2};
            auto d = [&](mac::TrafficClass cls, mac::RtsMode mode) {
                return mac::to_string(mac::handle_rts(cls, c1, local, mode));
            };
            os << a << ',' << b << ',' << channel::separation(c1, c2) << ','
               << channel::to_string(channel::classify(c1, c2)) << ','
               << format_number(channel::interference_factor(c1, c2)) << ','
               << d(mac::TrafficClass::Qos, mac::RtsMode::Literal) << ','
               << d(mac::TrafficClass::Qos, mac::RtsMode::Symmetric) << ','
               << d(mac::TrafficClass::DelayTolerant, mac::RtsMode::Literal) << ','
               << d(mac::TrafficClass::DelayTolerant, mac::RtsMode::Symmetric) << '\n';
        }
    }
    return os.str();
}

} // namespace corciar::experiment
