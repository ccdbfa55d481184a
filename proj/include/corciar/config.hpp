#pragma once

#include "corciar/mac.hpp"
#include "corciar/types.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace corciar
{

enum class TopologyKind
{
    Chain,
    Random,
    Fig3, // 8-node mesh with a direct and a 3-hop path between node 5 and gateway 4
};

struct TopologySpec
{
    TopologyKind kind{TopologyKind::Chain};
    int nodes{6};
    /// Placement seed for random topologies; the run seed when unset.
    std::optional<std::uint64_t> seed;

    friend bool operator==(const TopologySpec&, const TopologySpec&) = default;
};

/**
 * How radios get their channels.
 *
 * Pcl: greedy preferable-channel-list assignment from the gateway outwards.
 * PerNode: explicit channel list per node, the list of lists cycling if
 * shorter than the node count. Links (chains only): link k between node k and
 * k+1 uses links[k % size]; each node carries the channels of its two links.
 */
struct ChannelPlan
{
    enum class Kind
    {
        Pcl,
        PerNode,
        Links,
    };

    Kind kind{Kind::Pcl};
    std::vector<std::vector<int>> per_node;
    std::vector<int> links;

    friend bool operator==(const ChannelPlan&, const ChannelPlan&) = default;
};

struct FlowSpec
{
    NodeId src{0};
    NodeId dst{0};

    friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
};

/// Explicit flows, or random_count seeded sources towards the gateway.
/// Neither given: one flow from the node farthest (by hops) from the gateway.
struct FlowPlan
{
    std::vector<FlowSpec> flows;
    int random_count{0};

    friend bool operator==(const FlowPlan&, const FlowPlan&) = default;
};

/// A non-cooperating emitter: bursts on one channel regardless of carrier sense.
struct Interferer
{
    double x{0.0};
    double y{0.0};
    int channel{1};
    double duty{0.5};
    double burst_s{0.008};

    friend bool operator==(const Interferer&, const Interferer&) = default;
};

enum class ProtocolChoice
{
    AodvHop,
    Corciar,
    Both,
};

/// MAC used by the hop-count baseline phase: the same channel-checking
/// RTS/CTS as CoRCiaR, or plain RTS/CTS that answers every RTS it can.
enum class BaselineMac
{
    ChannelCheck,
    Naive,
};

std::string_view to_string(ProtocolChoice p) noexcept;
std::string_view to_string(TopologyKind k) noexcept;

struct ScenarioConfig
{
    TopologySpec topology;
    int radios_per_node{2};
    ChannelPlan channel_plan;
    mac::RtsMode rts_mode{mac::RtsMode::Symmetric};
    mac::TrafficClass traffic_class{mac::TrafficClass::Qos};
    ProtocolChoice protocol{ProtocolChoice::Both};
    BaselineMac baseline_mac{BaselineMac::ChannelCheck};

    double sim_time_s{100.0};
    int packet_size_bytes{1000};
    double data_rate_bps{1e6};
    double alpha{0.5};
    double delta{0.125};
    double theta{0.1};
    int window{4};
    FlowPlan flows;
    std::uint64_t seed{1};

    double tx_range_m{250.0};
    double interference_range_m{550.0};
    int queue_capacity{50};
    double hello_interval_s{1.0};
    double beacon_interval_s{0.1};
    double flow_start_s{2.0};
    std::vector<Interferer> interferers;

    friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;
};

struct ConfigIssue
{
    int line{0}; // 0 when the problem is not tied to one line
    std::string message;
};

/// Raised with every problem found; a config is never partially accepted.
class ConfigError : public std::runtime_error
{
  public:
    explicit ConfigError(std::vector<ConfigIssue> issues);

    const std::vector<ConfigIssue>& issues() const noexcept
    {
        return m_issues;
    }

  private:
    std::vector<ConfigIssue> m_issues;
};

/// Parses `key = value` lines (`#` starts a comment) into a validated config.
ScenarioConfig parse_config(std::string_view text);

/// Canonical text form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const ScenarioConfig& config);

/// Checks ranges and cross-field consistency; throws ConfigError.
void validate_config(const ScenarioConfig& config);

/// Applies one `key = value` setting on top of an existing config.
void apply_setting(ScenarioConfig& config, std::string_view key, std::string_view value);

} // namespace corciar
