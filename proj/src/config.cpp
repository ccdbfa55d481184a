#include "corciar/config.hpp"

#include <algorithm>
#include <charconv>
#include <climits>
#include <map>
#include <set>
#include <sstream>

namespace corciar
{

std::string_view
to_string(ProtocolChoice p) noexcept
{
    switch (p)
    {
    case ProtocolChoice::AodvHop:
        return "aodv_hop";
    case ProtocolChoice::Corciar:
        return "corciar";
    case ProtocolChoice::Both:
        return "both";
    }
    return "?";
}

std::string_view
to_string(TopologyKind k) noexcept
{
    switch (k)
    {
    case TopologyKind::Chain:
        return "chain";
    case TopologyKind::Random:
        return "random";
    case TopologyKind::Fig3:
        return "fig3";
    }
    return "?";
}

namespace
{

std::string
join_issues(const std::vector<ConfigIssue>& issues)
{
    std::ostringstream os;
    for (std::size_t i = 0; i < issues.size(); ++i)
    {
        if (i)
        {
            os << "; ";
        }
        if (issues[i].line > 0)
        {
            os << "line " << issues[i].line << ": ";
        }
        os << issues[i].message;
    }
    return os.str();
}

[[noreturn]] void
fail(std::string message)
{
    throw ConfigError({ConfigIssue{0, std::move(message)}});
}

std::string_view
trim(std::string_view s)
{
    const auto ws = " \t\r\n";
    const auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos)
    {
        return {};
    }
    const auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

std::vector<std::string_view>
split(std::string_view s, char sep)
{
    std::vector<std::string_view> parts;
    std::size_t start = 0;
    while (true)
    {
        const auto pos = s.find(sep, start);
        parts.push_back(trim(s.substr(start, pos - start)));
        if (pos == std::string_view::npos)
        {
            break;
        }
        start = pos + 1;
    }
    return parts;
}

double
parse_double(std::string_view key, std::string_view v)
{
    v = trim(v);
    double out = 0.0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    {
        fail(std::string(key) + " must be a number, got '" + std::string(v) + "'");
    }
    return out;
}

long long
parse_int(std::string_view key, std::string_view v)
{
    v = trim(v);
    long long out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    {
        fail(std::string(key) + " must be an integer, got '" + std::string(v) + "'");
    }
    return out;
}

std::uint64_t
parse_u64(std::string_view key, std::string_view v)
{
    v = trim(v);
    std::uint64_t out = 0;
    auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size() || v.empty())
    {
        fail(std::string(key) + " must be a nonnegative integer, got '" + std::string(v) + "'");
    }
    return out;
}

// "name(args)" -> args, or nullopt if the shape does not match.
std::optional<std::string_view>
call_args(std::string_view v, std::string_view name)
{
    if (v.size() < name.size() + 2 || v.substr(0, name.size()) != name)
    {
        return std::nullopt;
    }
    auto rest = trim(v.substr(name.size()));
    if (rest.size() < 2 || rest.front() != '(' || rest.back() != ')')
    {
        return std::nullopt;
    }
    return rest.substr(1, rest.size() - 2);
}

TopologySpec
parse_topology(std::string_view v)
{
    TopologySpec t;
    if (v == "fig3")
    {
        t.kind = TopologyKind::Fig3;
        t.nodes = 8;
        return t;
    }
    if (auto args = call_args(v, "chain"))
    {
        t.kind = TopologyKind::Chain;
        t.nodes = static_cast<int>(parse_int("topology", *args));
        return t;
    }
    if (auto args = call_args(v, "random"))
    {
        auto parts = split(*args, ',');
        if (parts.size() > 2)
        {
            fail("topology random takes (n) or (n, seed)");
        }
        t.kind = TopologyKind::Random;
        t.nodes = static_cast<int>(parse_int("topology", parts[0]));
        if (parts.size() == 2)
        {
            t.seed = parse_u64("topology seed", parts[1]);
        }
        return t;
    }
    fail("topology must be chain(n), random(n), random(n, seed) or fig3, got '" + std::string(v) +
         "'");
}

std::vector<int>
parse_channel_list(std::string_view v)
{
    std::vector<int> out;
    for (auto p : split(v, ','))
    {
        out.push_back(static_cast<int>(parse_int("channel_plan", p)));
    }
    return out;
}

ChannelPlan
parse_channel_plan(std::string_view v)
{
    ChannelPlan plan;
    if (v == "pcl")
    {
        plan.kind = ChannelPlan::Kind::Pcl;
        return plan;
    }
    if (v.substr(0, 6) == "links:")
    {
        plan.kind = ChannelPlan::Kind::Links;
        plan.links = parse_channel_list(v.substr(6));
        return plan;
    }
    plan.kind = ChannelPlan::Kind::PerNode;
    for (auto node : split(v, ';'))
    {
        plan.per_node.push_back(parse_channel_list(node));
    }
    return plan;
}

FlowPlan
parse_flows(std::string_view v)
{
    FlowPlan plan;
    if (v == "auto" || v.empty())
    {
        return plan;
    }
    if (auto args = call_args(v, "random"))
    {
        plan.random_count = static_cast<int>(parse_int("flows", *args));
        if (plan.random_count < 1)
        {
            fail("flows random(k) needs k >= 1");
        }
        return plan;
    }
    for (auto item : split(v, ','))
    {
        const auto arrow = item.find("->");
        if (arrow == std::string_view::npos)
        {
            fail("flows entries must look like src->dst, got '" + std::string(item) + "'");
        }
        FlowSpec f;
        f.src = static_cast<NodeId>(parse_u64("flows", item.substr(0, arrow)));
        f.dst = static_cast<NodeId>(parse_u64("flows", item.substr(arrow + 2)));
        plan.flows.push_back(f);
    }
    return plan;
}

Interferer
parse_interferer(std::string_view v)
{
    auto parts = split(v, ',');
    if (parts.size() != 4 && parts.size() != 5)
    {
        fail("interferer must be x,y,channel,duty[,burst_s]");
    }
    Interferer i;
    i.x = parse_double("interferer x", parts[0]);
    i.y = parse_double("interferer y", parts[1]);
    i.channel = static_cast<int>(parse_int("interferer channel", parts[2]));
    i.duty = parse_double("interferer duty", parts[3]);
    if (parts.size() == 5)
    {
        i.burst_s = parse_double("interferer burst_s", parts[4]);
    }
    return i;
}

std::string
fmt_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string
fmt_list(const std::vector<int>& xs)
{
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i)
    {
        if (i)
        {
            out += ',';
        }
        out += std::to_string(xs[i]);
    }
    return out;
}

bool
valid_channel(int c)
{
    return c >= 1 && c <= channel::kChannelCount;
}

} // namespace

ConfigError::ConfigError(std::vector<ConfigIssue> issues)
    : std::runtime_error(join_issues(issues)),
      m_issues(std::move(issues))
{
}

void
apply_setting(ScenarioConfig& c, std::string_view key, std::string_view value)
{
    value = trim(value);
    if (key == "topology")
    {
        c.topology = parse_topology(value);
    }
    else if (key == "radios_per_node")
    {
        c.radios_per_node = static_cast<int>(parse_int(key, value));
    }
    else if (key == "channel_plan")
    {
        c.channel_plan = parse_channel_plan(value);
    }
    else if (key == "rts_mode")
    {
        if (value == "literal")
        {
            c.rts_mode = mac::RtsMode::Literal;
        }
        else if (value == "symmetric")
        {
            c.rts_mode = mac::RtsMode::Symmetric;
        }
        else
        {
            fail("rts_mode must be literal or symmetric");
        }
    }
    else if (key == "traffic_class")
    {
        if (value == "qos")
        {
            c.traffic_class = mac::TrafficClass::Qos;
        }
        else if (value == "delay_tolerant")
        {
            c.traffic_class = mac::TrafficClass::DelayTolerant;
        }
        else
        {
            fail("traffic_class must be qos or delay_tolerant");
        }
    }
    else if (key == "baseline_mac")
    {
        if (value == "channel_check")
        {
            c.baseline_mac = BaselineMac::ChannelCheck;
        }
        else if (value == "naive")
        {
            c.baseline_mac = BaselineMac::Naive;
        }
        else
        {
            fail("baseline_mac must be channel_check or naive");
        }
    }
    else if (key == "protocol")
    {
        if (value == "aodv_hop")
        {
            c.protocol = ProtocolChoice::AodvHop;
        }
        else if (value == "corciar")
        {
            c.protocol = ProtocolChoice::Corciar;
        }
        else if (value == "both")
        {
            c.protocol = ProtocolChoice::Both;
        }
        else
        {
            fail("protocol must be aodv_hop, corciar or both");
        }
    }
    else if (key == "sim_time_s")
    {
        c.sim_time_s = parse_double(key, value);
    }
    else if (key == "packet_size_bytes")
    {
        c.packet_size_bytes = static_cast<int>(parse_int(key, value));
    }
    else if (key == "data_rate_bps")
    {
        c.data_rate_bps = parse_double(key, value);
    }
    else if (key == "alpha")
    {
        c.alpha = parse_double(key, value);
    }
    else if (key == "delta")
    {
        c.delta = parse_double(key, value);
    }
    else if (key == "theta")
    {
        c.theta = parse_double(key, value);
    }
    else if (key == "window")
    {
        c.window = static_cast<int>(parse_int(key, value));
    }
    else if (key == "flows")
    {
        c.flows = parse_flows(value);
    }
    else if (key == "seed")
    {
        c.seed = parse_u64(key, value);
    }
    else if (key == "tx_range_m")
    {
        c.tx_range_m = parse_double(key, value);
    }
    else if (key == "interference_range_m")
    {
        c.interference_range_m = parse_double(key, value);
    }
    else if (key == "queue_capacity")
    {
        c.queue_capacity = static_cast<int>(parse_int(key, value));
    }
    else if (key == "hello_interval_s")
    {
        c.hello_interval_s = parse_double(key, value);
    }
    else if (key == "beacon_interval_s")
    {
        c.beacon_interval_s = parse_double(key, value);
    }
    else if (key == "flow_start_s")
    {
        c.flow_start_s = parse_double(key, value);
    }
    else if (key == "interferer")
    {
        c.interferers.push_back(parse_interferer(value));
    }
    else
    {
        fail("unknown key '" + std::string(key) + "'");
    }
}

void
validate_config(const ScenarioConfig& c)
{
    std::vector<ConfigIssue> issues;
    auto check = [&](bool ok, std::string msg) {
        if (!ok)
        {
            issues.push_back({0, std::move(msg)});
        }
    };

    const int n = c.topology.nodes;
    check(n >= 2, "topology needs at least 2 nodes");
    check(c.topology.kind != TopologyKind::Fig3 || n == 8, "fig3 topology has exactly 8 nodes");
    check(c.radios_per_node >= 1, "radios_per_node must be >= 1");
    check(c.sim_time_s >= 0.0, "sim_time_s must be >= 0 s");
    check(c.packet_size_bytes >= 1, "packet_size_bytes must be >= 1 byte");
    check(c.data_rate_bps > 0.0, "data_rate_bps must be > 0 bit/s");
    check(c.alpha >= 0.0 && c.alpha <= 1.0, "alpha must be in [0,1]");
    check(c.delta > 0.0 && c.delta < 1.0, "delta must be in (0,1)");
    check(c.theta >= 0.0 && c.theta <= 1.0, "theta must be in [0,1]");
    check(c.window >= 1, "window must be >= 1 packet");
    check(c.tx_range_m > 0.0, "tx_range_m must be > 0 m");
    check(c.interference_range_m >= c.tx_range_m, "interference_range_m must be >= tx_range_m");
    check(c.queue_capacity >= 1, "queue_capacity must be >= 1 frame");
    check(c.hello_interval_s > 0.0, "hello_interval_s must be > 0 s");
    check(c.beacon_interval_s > 0.0, "beacon_interval_s must be > 0 s");
    check(c.flow_start_s >= 0.0, "flow_start_s must be >= 0 s");

    switch (c.channel_plan.kind)
    {
    case ChannelPlan::Kind::Pcl:
        break;
    case ChannelPlan::Kind::Links:
        check(c.topology.kind == TopologyKind::Chain, "channel_plan links: needs a chain topology");
        check(!c.channel_plan.links.empty(), "channel_plan links: needs at least one channel");
        check(c.radios_per_node >= 2 || c.channel_plan.links.size() == 1 ||
                  std::all_of(c.channel_plan.links.begin(),
                              c.channel_plan.links.end(),
                              [&](int ch) { return ch == c.channel_plan.links.front(); }),
              "channel_plan links: with distinct channels needs radios_per_node >= 2");
        for (int ch : c.channel_plan.links)
        {
            check(valid_channel(ch), "channel_plan channel " + std::to_string(ch) + " outside 1..11");
        }
        break;
    case ChannelPlan::Kind::PerNode:
        check(!c.channel_plan.per_node.empty(), "channel_plan needs at least one node entry");
        for (const auto& node : c.channel_plan.per_node)
        {
            check(!node.empty(), "channel_plan node entry is empty");
            check(static_cast<int>(node.size()) <= c.radios_per_node,
                  "channel_plan node entry has more channels than radios_per_node");
            std::set<int> distinct(node.begin(), node.end());
            check(distinct.size() == node.size(), "channel_plan node entry repeats a channel");
            for (int ch : node)
            {
                check(valid_channel(ch),
                      "channel_plan channel " + std::to_string(ch) + " outside 1..11");
            }
        }
        break;
    }

    check(c.flows.random_count >= 0, "flows random(k) needs k >= 1");
    check(c.flows.random_count < n, "flows random(k) needs k < node count");
    for (const auto& f : c.flows.flows)
    {
        check(static_cast<int>(f.src) < n && static_cast<int>(f.dst) < n,
              "flow " + std::to_string(f.src) + "->" + std::to_string(f.dst) +
                  " names a node outside the topology");
        check(f.src != f.dst, "flow source and destination must differ");
    }
    for (const auto& i : c.interferers)
    {
        check(valid_channel(i.channel), "interferer channel outside 1..11");
        check(i.duty > 0.0 && i.duty < 1.0, "interferer duty must be in (0,1)");
        check(i.burst_s > 0.0, "interferer burst_s must be > 0 s");
    }

    if (!issues.empty())
    {
        throw ConfigError(std::move(issues));
    }
}

ScenarioConfig
parse_config(std::string_view text)
{
    ScenarioConfig config;
    std::vector<ConfigIssue> issues;
    std::map<std::string, int> seen;

    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const auto eol = text.find('\n', pos);
        auto line = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        if (const auto hash = line.find('#'); hash != std::string_view::npos)
        {
            line = line.substr(0, hash);
        }
        line = trim(line);
        if (line.empty())
        {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
        {
            issues.push_back({line_no, "expected 'key = value'"});
            continue;
        }
        const std::string key(trim(line.substr(0, eq)));
        const auto value = trim(line.substr(eq + 1));
        if (key != "interferer")
        {
            auto [it, fresh] = seen.emplace(key, line_no);
            if (!fresh)
            {
                issues.push_back({line_no,
                                  "duplicate key '" + key + "' (first set on line " +
                                      std::to_string(it->second) + ")"});
                continue;
            }
        }
        try
        {
            apply_setting(config, key, value);
        }
        catch (const ConfigError& e)
        {
            for (const auto& issue : e.issues())
            {
                issues.push_back({line_no, issue.message});
            }
        }
    }

    try
    {
        validate_config(config);
    }
    catch (const ConfigError& e)
    {
        for (auto issue : e.issues())
        {
            for (const auto& [key, line] : seen)
            {
                if (issue.message.rfind(key + " ", 0) == 0)
                {
                    issue.line = line;
                    break;
                }
            }
            issues.push_back(std::move(issue));
        }
    }
    std::stable_sort(issues.begin(), issues.end(), [](const ConfigIssue& a, const ConfigIssue& b) {
        return (a.line == 0 ? INT_MAX : a.line) < (b.line == 0 ? INT_MAX : b.line);
    });
    if (!issues.empty())
    {
        throw ConfigError(std::move(issues));
    }
    return config;
}

std::string
serialize_config(const ScenarioConfig& c)
{
    std::ostringstream os;
    os << "topology = ";
    switch (c.topology.kind)
    {
    case TopologyKind::Chain:
        os << "chain(" << c.topology.nodes << ")";
        break;
    case TopologyKind::Random:
        os << "random(" << c.topology.nodes;
        if (c.topology.seed)
        {
            os << ", " << *c.topology.seed;
        }
        os << ")";
        break;
    case TopologyKind::Fig3:
        os << "fig3";
        break;
    }
    os << "\nradios_per_node = " << c.radios_per_node << "\nchannel_plan = ";
    switch (c.channel_plan.kind)
    {
    case ChannelPlan::Kind::Pcl:
        os << "pcl";
        break;
    case ChannelPlan::Kind::Links:
        os << "links:" << fmt_list(c.channel_plan.links);
        break;
    case ChannelPlan::Kind::PerNode:
        for (std::size_t i = 0; i < c.channel_plan.per_node.size(); ++i)
        {
            os << (i ? ";" : "") << fmt_list(c.channel_plan.per_node[i]);
        }
        break;
    }
    os << "\nrts_mode = " << (c.rts_mode == mac::RtsMode::Literal ? "literal" : "symmetric");
    os << "\ntraffic_class = "
       << (c.traffic_class == mac::TrafficClass::Qos ? "qos" : "delay_tolerant");
    os << "\nbaseline_mac = " << (c.baseline_mac == BaselineMac::Naive ? "naive" : "channel_check");
    os << "\nprotocol = " << to_string(c.protocol);
    os << "\nsim_time_s = " << fmt_double(c.sim_time_s);
    os << "\npacket_size_bytes = " << c.packet_size_bytes;
    os << "\ndata_rate_bps = " << fmt_double(c.data_rate_bps);
    os << "\nalpha = " << fmt_double(c.alpha);
    os << "\ndelta = " << fmt_double(c.delta);
    os << "\ntheta = " << fmt_double(c.theta);
    os << "\nwindow = " << c.window;
    os << "\nflows = ";
    if (c.flows.random_count > 0)
    {
        os << "random(" << c.flows.random_count << ")";
    }
    else if (c.flows.flows.empty())
    {
        os << "auto";
    }
    else
    {
        for (std::size_t i = 0; i < c.flows.flows.size(); ++i)
        {
            os << (i ? ", " : "") << c.flows.flows[i].src << "->" << c.flows.flows[i].dst;
        }
    }
    os << "\nseed = " << c.seed;
    os << "\ntx_range_m = " << fmt_double(c.tx_range_m);
    os << "\ninterference_range_m = " << fmt_double(c.interference_range_m);
    os << "\nqueue_capacity = " << c.queue_capacity;
    os << "\nhello_interval_s = " << fmt_double(c.hello_interval_s);
    os << "\nbeacon_interval_s = " << fmt_double(c.beacon_interval_s);
    os << "\nflow_start_s = " << fmt_double(c.flow_start_s);
    for (const auto& i : c.interferers)
    {
        os << "\ninterferer = " << fmt_double(i.x) << "," << fmt_double(i.y) << "," << i.channel
           << "," << fmt_double(i.duty) << "," << fmt_double(i.burst_s);
    }
    os << "\n";
    return os.str();
}

} // namespace corciar
