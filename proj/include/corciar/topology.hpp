#pragma once

#include "corciar/config.hpp"
#include "corciar/types.hpp"

#include <optional>
#include <vector>

namespace corciar::engine
{

struct Position
{
    double x{0.0};
    double y{0.0};
};

double distance(Position a, Position b) noexcept;

struct NodeSpec
{
    NodeId id{0};
    Position pos;
    std::vector<int> channels; // one per radio
};

inline constexpr double kAreaWidth = 1500.0;
inline constexpr double kAreaHeight = 800.0;
inline constexpr double kChainSpacing = 150.0;

struct Topology
{
    std::vector<NodeSpec> nodes;
    NodeId gateway{0};
    double width{kAreaWidth};
    double height{kAreaHeight};

    std::size_t size() const noexcept
    {
        return nodes.size();
    }
};

/// Nodes at x = 0, 150, 300, ... on y = 0; the last node is the gateway.
Topology build_chain(int n);

/**
 * Uniform placement in the 1500 m x 800 m area, redrawn until the disc graph
 * at tx_range is connected. Node 0 is the gateway. Throws std::runtime_error
 * after 10000 failed draws.
 */
Topology build_random(int n, std::uint64_t seed, double tx_range = 250.0);

/// 8-node mesh: source 5 reaches gateway 4 directly or over 5-7-6-4.
Topology build_fig3();

Topology build_topology(const ScenarioConfig& config);

/// Undirected disc-graph adjacency at the given range, neighbors ascending.
std::vector<std::vector<NodeId>> disc_neighbors(const Topology& topo, double range);

bool disc_connected(const Topology& topo, double range);

/// Fills every node's radio channels according to the plan.
void assign_channels(Topology& topo, const ChannelPlan& plan, int radios_per_node, double tx_range);

/// Lowest channel both nodes carry, if any.
std::optional<int> common_channel(const NodeSpec& a, const NodeSpec& b);

/// A usable radio link: within tx range and sharing a channel.
struct LinkSpec
{
    NodeId to{0};
    int channel{1};
};

std::vector<std::vector<LinkSpec>> radio_links(const Topology& topo, double tx_range);

/// Breadth-first hop distances over radio links; -1 when unreachable.
std::vector<int> hop_distances(const std::vector<std::vector<LinkSpec>>& links, NodeId from);

/// Resolves the flow plan to concrete (src, dst) pairs.
std::vector<FlowSpec> resolve_flows(const ScenarioConfig& config, const Topology& topo);

} // namespace corciar::engine
