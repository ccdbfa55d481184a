#pragma once

#include "corciar/types.hpp"

#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

namespace corciar::routing
{

inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

struct RouteEntry
{
    NodeId destination{0};
    NodeId next_hop{0};
    int hop_count{0};
    double rtt_cost_ms{0.0};
    std::uint64_t seq_no{0};
    double expires_at{0.0};
};

/// One active entry per destination; expired entries are never returned.
class RouteTable
{
  public:
    void install(const RouteEntry& entry);
    const RouteEntry* lookup(NodeId destination, double now) const;
    /// Extends the lifetime of a route that is in use.
    void refresh(NodeId destination, double now, double lifetime);
    void erase(NodeId destination);
    /// Drops every route through next_hop; returns the affected destinations.
    std::vector<NodeId> invalidate_via(NodeId next_hop);
    const std::map<NodeId, RouteEntry>& entries() const noexcept
    {
        return m_entries;
    }

  private:
    std::map<NodeId, RouteEntry> m_entries;
};

/// EWMA of round-trip samples; the first sample seeds the average.
struct RttEstimator
{
    double average_rtt_ms{0.0};
    double delta{0.125};
    bool seeded{false};
};

/// (ack_time - send_time) in milliseconds; negative intervals are a fault.
double rtt_sample(double send_time, double ack_time);

/// difference = sample - average; average += delta * difference.
RttEstimator update_average_rtt(RttEstimator est, double sample_ms);

struct NeighborRecord
{
    NodeId neighbor{0};
    double last_hello_at{-kUnreachable};
    double advertised_cum_rtt_ms{kUnreachable};
    RttEstimator link_estimator;
};

bool is_active(const NeighborRecord& rec, double now, double hello_timeout) noexcept;

class NeighborTable
{
  public:
    explicit NeighborTable(double delta = 0.125)
        : m_delta{delta}
    {
    }

    /// Creates or refreshes the sender's record.
    NeighborRecord& process_hello(NodeId sender, double advertised_cum_rtt_ms, double now);

    /// Feeds one per-hop RTT sample (ms) for the link towards neighbor.
    void record_link_sample(NodeId neighbor, double sample_ms);

    /// Seeds a link estimator with a known average (cost carried over between runs).
    void seed_link_cost(NodeId neighbor, double average_ms);

    /// Neighbors whose hellos stopped within the last call; each is reported once.
    std::vector<NodeId> expire(double now, double hello_timeout);

    const NeighborRecord* find(NodeId neighbor) const;
    std::vector<NeighborRecord> records() const;
    bool active(NodeId neighbor, double now, double hello_timeout) const;

  private:
    NeighborRecord& record(NodeId neighbor);

    double m_delta;
    std::map<NodeId, NeighborRecord> m_records;
    std::map<NodeId, bool> m_reported_inactive;
};

/**
 * Cumulative RTT from node towards the gateway: 0 at the gateway, otherwise
 * the minimum over active neighbors of link average plus the neighbor's
 * advertised value. Returns kUnreachable if no neighbor qualifies.
 */
double cumulative_rtt(NodeId node,
                      NodeId gateway,
                      std::span<const NeighborRecord> neighbors,
                      double now,
                      double hello_timeout);

/// Delay-to-gateway potential V(v) per node, in ms.
struct PotentialField
{
    NodeId gateway{0};
    std::map<NodeId, double> value_by_node;

    double value(NodeId v) const;
};

/// V(v) - V(w).
double force(const PotentialField& field, NodeId v, NodeId w);

/**
 * The candidate with minimum potential (minimum remaining delay to the
 * gateway); ties go to the lowest node id. Empty candidates: no route.
 */
std::optional<NodeId> next_hop_select(const PotentialField& field,
                                      NodeId v,
                                      std::span<const NodeId> candidates);

/// Directed graph over nodes 0..n-1 with a per-link RTT cost in ms.
struct LinkGraph
{
    struct Link
    {
        NodeId to;
        double rtt_ms;
    };

    std::vector<std::vector<Link>> out;

    explicit LinkGraph(std::size_t n = 0)
        : out(n)
    {
    }

    std::size_t size() const noexcept
    {
        return out.size();
    }

    void add_link(NodeId from, NodeId to, double rtt_ms);
    void add_edge(NodeId a, NodeId b, double rtt_ms); // both directions
};

/**
 * Synchronous distance-vector rounds of cumulative_rtt until no value changes.
 * Each round every node recomputes from its neighbors' previous-round
 * advertisements, as HELLO piggybacking does once per interval.
 */
PotentialField converge_distance_vector(const LinkGraph& graph, NodeId gateway, int max_rounds = 0);

enum class Metric
{
    HopCount,
    AvgRtt,
};

std::string_view to_string(Metric m) noexcept;

struct DiscoveredRoute
{
    std::vector<NodeId> path; // src ... dst
    double cost{0.0};         // hops or ms, per metric
    std::uint64_t rreq_id{0};
};

/**
 * RREQ flood from src with duplicate suppression by (originator, rreq_id).
 * Each rebroadcast is delayed by the link's metric cost, so the first copy to
 * reach a node came over its cheapest path; the destination answers that copy
 * and the RREP retraces the reverse path. Ties go to the lowest forwarder id.
 */
std::optional<DiscoveredRoute> aodv_discover(const LinkGraph& graph,
                                             NodeId src,
                                             NodeId dst,
                                             Metric metric,
                                             std::uint64_t rreq_id = 1);

} // namespace corciar::routing
