#pragma once

#include "corciar/config.hpp"
#include "corciar/metrics.hpp"
#include "corciar/routing.hpp"
#include "corciar/topology.hpp"

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace corciar::engine
{

/// Directed link (from, to) -> average per-hop RTT in ms.
using LinkCostTable = std::map<std::pair<NodeId, NodeId>, double>;

struct RouteDumpRow
{
    NodeId node{0};
    routing::RouteEntry entry;
};

struct EngineCounters
{
    std::uint64_t events{0};
    std::uint64_t rts_sent{0};
    std::uint64_t cts_sent{0};
    std::uint64_t payload_sent{0};
    std::uint64_t collisions{0};               // corrupted by a co-channel transmission
    std::uint64_t interference_corruptions{0}; // corrupted by an overlapping other channel
    std::uint64_t cts_deferrals{0};            // RTS refused by the receiver's channel check
    std::uint64_t mac_failures{0};             // retry limit reached
    std::uint64_t queue_drops{0};
    std::uint64_t route_drops{0};
    std::uint64_t route_discoveries{0};
    std::uint64_t no_route{0};
    std::uint64_t hellos_delivered{0};
    std::uint64_t transport_retransmissions{0};
    std::uint64_t out_of_range_receptions{0}; // must stay 0
};

struct FlowOutcome
{
    FlowSpec spec;
    metrics::FlowStats stats;
    std::vector<NodeId> route; // last route the source used
};

struct PhaseResult
{
    std::string protocol_label;
    routing::Metric metric{routing::Metric::HopCount};
    std::vector<FlowOutcome> flows;
    metrics::RunSummary summary;
    LinkCostTable link_costs;
    std::vector<RouteDumpRow> routes;
    routing::PotentialField potential;
    EngineCounters counters;
    std::uint64_t trace_hash{0};
    std::size_t n_nodes{0};
    int n_hops{0};
};

struct PhaseOptions
{
    routing::Metric metric{routing::Metric::HopCount};
    std::string label{"aodv_hop"};
    /// Answer every RTS the receiver is free for, without the channel check.
    bool naive_mac{false};
    /// Link costs carried in from an earlier phase (seed the link estimators).
    const LinkCostTable* seed_costs{nullptr};
    /// Receives one `time node action` line per dispatched event when set.
    std::ostream* trace{nullptr};
};

/**
 * Runs one protocol phase of a scenario on a prepared topology (channels
 * already assigned) and returns its metrics. Deterministic in (config, seed).
 */
PhaseResult simulate(const ScenarioConfig& config, const Topology& topo, const PhaseOptions& options);

} // namespace corciar::engine
