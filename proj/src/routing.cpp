#include "corciar/routing.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <sstream>
#include <tuple>

namespace corciar::routing
{

void
RouteTable::install(const RouteEntry& entry)
{
    m_entries[entry.destination] = entry;
}

const RouteEntry*
RouteTable::lookup(NodeId destination, double now) const
{
    auto it = m_entries.find(destination);
    if (it == m_entries.end() || now >= it->second.expires_at)
    {
        return nullptr;
    }
    return &it->second;
}

void
RouteTable::refresh(NodeId destination, double now, double lifetime)
{
    auto it = m_entries.find(destination);
    if (it != m_entries.end() && now < it->second.expires_at)
    {
        it->second.expires_at = std::max(it->second.expires_at, now + lifetime);
    }
}

void
RouteTable::erase(NodeId destination)
{
    m_entries.erase(destination);
}

std::vector<NodeId>
RouteTable::invalidate_via(NodeId next_hop)
{
    std::vector<NodeId> lost;
    for (auto it = m_entries.begin(); it != m_entries.end();)
    {
        if (it->second.next_hop == next_hop)
        {
            lost.push_back(it->first);
            it = m_entries.erase(it);
        }
        else
        {
            ++it;
        }
    }
    return lost;
}

double
rtt_sample(double send_time, double ack_time)
{
    if (ack_time < send_time)
    {
        std::ostringstream os;
        os << "negative RTT interval: sent " << send_time << ", acked " << ack_time;
        throw SimulationFault(os.str());
    }
    return (ack_time - send_time) * 1000.0;
}

RttEstimator
update_average_rtt(RttEstimator est, double sample_ms)
{
    if (!est.seeded)
    {
        est.average_rtt_ms = sample_ms;
        est.seeded = true;
        return est;
    }
    const double difference = sample_ms - est.average_rtt_ms;
    est.average_rtt_ms = est.average_rtt_ms + est.delta * difference;
    return est;
}

bool
is_active(const NeighborRecord& rec, double now, double hello_timeout) noexcept
{
    return now - rec.last_hello_at <= hello_timeout;
}

NeighborRecord&
NeighborTable::record(NodeId neighbor)
{
    auto [it, inserted] = m_records.try_emplace(neighbor);
    if (inserted)
    {
        it->second.neighbor = neighbor;
        it->second.link_estimator.delta = m_delta;
    }
    return it->second;
}

NeighborRecord&
NeighborTable::process_hello(NodeId sender, double advertised_cum_rtt_ms, double now)
{
    auto& rec = record(sender);
    rec.last_hello_at = now;
    rec.advertised_cum_rtt_ms = advertised_cum_rtt_ms;
    m_reported_inactive[sender] = false;
    return rec;
}

void
NeighborTable::record_link_sample(NodeId neighbor, double sample_ms)
{
    auto& rec = record(neighbor);
    rec.link_estimator = update_average_rtt(rec.link_estimator, sample_ms);
}

void
NeighborTable::seed_link_cost(NodeId neighbor, double average_ms)
{
    auto& rec = record(neighbor);
    rec.link_estimator.average_rtt_ms = average_ms;
    rec.link_estimator.seeded = true;
}

std::vector<NodeId>
NeighborTable::expire(double now, double hello_timeout)
{
    std::vector<NodeId> gone;
    for (auto& [id, rec] : m_records)
    {
        if (rec.last_hello_at == -kUnreachable)
        {
            continue; // never heard from; nothing to expire
        }
        bool& reported = m_reported_inactive[id];
        if (!is_active(rec, now, hello_timeout) && !reported)
        {
            reported = true;
            gone.push_back(id);
        }
    }
    return gone;
}

const NeighborRecord*
NeighborTable::find(NodeId neighbor) const
{
    auto it = m_records.find(neighbor);
    return it == m_records.end() ? nullptr : &it->second;
}

std::vector<NeighborRecord>
NeighborTable::records() const
{
    std::vector<NeighborRecord> out;
    out.reserve(m_records.size());
    for (const auto& [id, rec] : m_records)
    {
        out.push_back(rec);
    }
    return out;
}

bool
NeighborTable::active(NodeId neighbor, double now, double hello_timeout) const
{
    const auto* rec = find(neighbor);
    return rec != nullptr && is_active(*rec, now, hello_timeout);
}

double
cumulative_rtt(NodeId node,
               NodeId gateway,
               std::span<const NeighborRecord> neighbors,
               double now,
               double hello_timeout)
{
    if (node == gateway)
    {
        return 0.0;
    }
    double best = kUnreachable;
    for (const auto& rec : neighbors)
    {
        if (!is_active(rec, now, hello_timeout) || !rec.link_estimator.seeded)
        {
            continue;
        }
        best = std::min(best, rec.link_estimator.average_rtt_ms + rec.advertised_cum_rtt_ms);
    }
    return best;
}

double
PotentialField::value(NodeId v) const
{
    auto it = value_by_node.find(v);
    if (it == value_by_node.end())
    {
        throw std::out_of_range("node not present in potential field");
    }
    return it->second;
}

double
force(const PotentialField& field, NodeId v, NodeId w)
{
    return field.value(v) - field.value(w);
}

std::optional<NodeId>
next_hop_select(const PotentialField& field, NodeId /*v*/, std::span<const NodeId> candidates)
{
    std::optional<NodeId> best;
    double best_v = kUnreachable;
    for (NodeId w : candidates)
    {
        const double vw = field.value(w);
        if (!best || vw < best_v || (vw == best_v && w < *best))
        {
            best = w;
            best_v = vw;
        }
    }
    return best;
}

void
LinkGraph::add_link(NodeId from, NodeId to, double rtt_ms)
{
    out.at(from).push_back(Link{to, rtt_ms});
}

void
LinkGraph::add_edge(NodeId a, NodeId b, double rtt_ms)
{
    add_link(a, b, rtt_ms);
    add_link(b, a, rtt_ms);
}

PotentialField
converge_distance_vector(const LinkGraph& graph, NodeId gateway, int max_rounds)
{
    const std::size_t n = graph.size();
    if (max_rounds <= 0)
    {
        max_rounds = static_cast<int>(n) + 1;
    }
    std::vector<double> advertised(n, kUnreachable);
    advertised.at(gateway) = 0.0;

    constexpr double kNow = 0.0;
    constexpr double kTimeout = 1.0;
    for (int round = 0; round < max_rounds; ++round)
    {
        std::vector<double> next(n, kUnreachable);
        for (NodeId v = 0; v < n; ++v)
        {
            std::vector<NeighborRecord> recs;
            for (const auto& link : graph.out[v])
            {
                NeighborRecord rec;
                rec.neighbor = link.to;
                rec.last_hello_at = kNow;
                rec.advertised_cum_rtt_ms = advertised[link.to];
                rec.link_estimator.average_rtt_ms = link.rtt_ms;
                rec.link_estimator.seeded = true;
                recs.push_back(rec);
            }
            next[v] = cumulative_rtt(v, gateway, recs, kNow, kTimeout);
        }
        const bool stable = next == advertised;
        advertised = std::move(next);
        if (stable)
        {
            break;
        }
    }

    PotentialField field;
    field.gateway = gateway;
    for (NodeId v = 0; v < n; ++v)
    {
        field.value_by_node[v] = advertised[v];
    }
    return field;
}

std::string_view
to_string(Metric m) noexcept
{
    return m == Metric::HopCount ? "hop_count" : "avg_rtt";
}

std::optional<DiscoveredRoute>
aodv_discover(const LinkGraph& graph, NodeId src, NodeId dst, Metric metric, std::uint64_t rreq_id)
{
    if (src == dst)
    {
        throw std::invalid_argument("route discovery needs src != dst");
    }
    const std::size_t n = graph.size();
    if (src >= n || dst >= n)
    {
        throw std::out_of_range("route discovery endpoint outside graph");
    }

    // (arrival cost, forwarder, receiver)
    using Arrival = std::tuple<double, NodeId, NodeId>;
    std::priority_queue<Arrival, std::vector<Arrival>, std::greater<>> inflight;
    std::vector<std::set<std::pair<NodeId, std::uint64_t>>> rreq_cache(n);
    std::vector<NodeId> reverse_hop(n, src);
    std::vector<double> cost_at(n, kUnreachable);

    const auto key = std::make_pair(src, rreq_id);
    rreq_cache[src].insert(key);
    cost_at[src] = 0.0;
    auto rebroadcast = [&](NodeId from) {
        for (const auto& link : graph.out[from])
        {
            const double step = metric == Metric::HopCount ? 1.0 : link.rtt_ms;
            inflight.emplace(cost_at[from] + step, from, link.to);
        }
    };
    rebroadcast(src);

    bool reached = false;
    while (!inflight.empty())
    {
        auto [cost, from, at] = inflight.top();
        inflight.pop();
        if (!rreq_cache[at].insert(key).second)
        {
            continue; // duplicate RREQ
        }
        reverse_hop[at] = from;
        cost_at[at] = cost;
        if (at == dst)
        {
            reached = true;
            break;
        }
        rebroadcast(at);
    }
    if (!reached)
    {
        return std::nullopt;
    }

    DiscoveredRoute route;
    route.cost = cost_at[dst];
    route.rreq_id = rreq_id;
    for (NodeId v = dst; v != src; v = reverse_hop[v])
    {
        route.path.push_back(v);
    }
    route.path.push_back(src);
    std::reverse(route.path.begin(), route.path.end());
    return route;
}

} // namespace corciar::routing
