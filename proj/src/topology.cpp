#include "corciar/topology.hpp"

#include "corciar/channel_model.hpp"

#include <algorithm>
#include <cmath>
#include <queue>
#include <set>
#include <sstream>

namespace corciar::engine
{

double
distance(Position a, Position b) noexcept
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

Topology
build_chain(int n)
{
    if (n < 2)
    {
        throw std::invalid_argument("chain needs at least 2 nodes");
    }
    Topology t;
    for (int i = 0; i < n; ++i)
    {
        t.nodes.push_back(NodeSpec{static_cast<NodeId>(i), {i * kChainSpacing, 0.0}, {}});
    }
    t.gateway = static_cast<NodeId>(n - 1);
    return t;
}

std::vector<std::vector<NodeId>>
disc_neighbors(const Topology& topo, double range)
{
    const auto n = topo.size();
    std::vector<std::vector<NodeId>> adj(n);
    for (std::size_t a = 0; a < n; ++a)
    {
        for (std::size_t b = 0; b < n; ++b)
        {
            if (a != b && distance(topo.nodes[a].pos, topo.nodes[b].pos) <= range)
            {
                adj[a].push_back(static_cast<NodeId>(b));
            }
        }
    }
    return adj;
}

bool
disc_connected(const Topology& topo, double range)
{
    const auto adj = disc_neighbors(topo, range);
    std::vector<bool> seen(topo.size(), false);
    std::vector<NodeId> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty())
    {
        const NodeId v = stack.back();
        stack.pop_back();
        for (NodeId w : adj[v])
        {
            if (!seen[w])
            {
                seen[w] = true;
                ++count;
                stack.push_back(w);
            }
        }
    }
    return count == topo.size();
}

Topology
build_random(int n, std::uint64_t seed, double tx_range)
{
    if (n < 2)
    {
        throw std::invalid_argument("random topology needs at least 2 nodes");
    }
    constexpr int kMaxDraws = 10000;
    Rng rng = make_rng(seed, rng_stream::kPlacement);
    std::uniform_real_distribution<double> ux(0.0, kAreaWidth);
    std::uniform_real_distribution<double> uy(0.0, kAreaHeight);
    for (int attempt = 0; attempt < kMaxDraws; ++attempt)
    {
        Topology t;
        for (int i = 0; i < n; ++i)
        {
            const double x = ux(rng);
            const double y = uy(rng);
            t.nodes.push_back(NodeSpec{static_cast<NodeId>(i), {x, y}, {}});
        }
        t.gateway = 0;
        if (disc_connected(t, tx_range))
        {
            return t;
        }
    }
    std::ostringstream os;
    os << "no connected placement of " << n << " nodes in " << kAreaWidth << " m x " << kAreaHeight
       << " m after " << kMaxDraws << " draws (density too low for " << tx_range << " m range)";
    throw std::runtime_error(os.str());
}

Topology
build_fig3()
{
    // 4 x 2 grid, 200 m pitch. Direct 5-4 link; 5-7-6-4 goes round the top row.
    static constexpr Position kPos[8] = {
        {200.0, 400.0}, // 0
        {800.0, 400.0}, // 1
        {200.0, 600.0}, // 2
        {800.0, 600.0}, // 3
        {600.0, 400.0}, // 4 gateway
        {400.0, 400.0}, // 5 source
        {600.0, 600.0}, // 6
        {400.0, 600.0}, // 7
    };
    Topology t;
    for (NodeId i = 0; i < 8; ++i)
    {
        t.nodes.push_back(NodeSpec{i, kPos[i], {}});
    }
    t.gateway = 4;
    return t;
}

Topology
build_topology(const ScenarioConfig& config)
{
    switch (config.topology.kind)
    {
    case TopologyKind::Chain:
        return build_chain(config.topology.nodes);
    case TopologyKind::Random:
        return build_random(config.topology.nodes,
                            config.topology.seed.value_or(config.seed),
                            config.tx_range_m);
    case TopologyKind::Fig3:
        return build_fig3();
    }
    throw std::logic_error("unknown topology kind");
}

namespace
{

// Greedy preferable-channel-list assignment, breadth-first from the gateway.
// A node's first radio joins its BFS parent's last radio so every node stays
// linked; each further radio takes the best-ranked channel after the node's
// own channels and those of already-assigned neighbors are marked Low.
void
assign_pcl(Topology& topo, int radios, double tx_range)
{
    using channel::ChannelId;
    using channel::ChannelObservation;

    const auto adj = disc_neighbors(topo, tx_range);
    const auto n = topo.size();
    std::vector<int> parent(n, -1);
    std::vector<bool> seen(n, false);
    std::vector<NodeId> order;
    std::queue<NodeId> q;
    q.push(topo.gateway);
    seen[topo.gateway] = true;
    while (!q.empty())
    {
        const NodeId v = q.front();
        q.pop();
        order.push_back(v);
        for (NodeId w : adj[v])
        {
            if (!seen[w])
            {
                seen[w] = true;
                parent[w] = static_cast<int>(v);
                q.push(w);
            }
        }
    }
    // Nodes not reachable from the gateway still get channels.
    for (NodeId v = 0; v < n; ++v)
    {
        if (!seen[v])
        {
            order.push_back(v);
        }
    }

    std::vector<bool> assigned(n, false);
    for (NodeId v : order)
    {
        auto& node = topo.nodes[v];
        node.channels.clear();
        channel::PclTable table;
        for (NodeId w : adj[v])
        {
            if (assigned[w])
            {
                for (int ch : topo.nodes[w].channels)
                {
                    table.apply(ChannelObservation::neighbor_took(ChannelId{ch}));
                }
            }
        }
        for (int r = 0; r < radios; ++r)
        {
            int pick = 0;
            if (r == 0 && parent[v] >= 0)
            {
                pick = topo.nodes[parent[v]].channels.back();
            }
            else
            {
                table.apply(ChannelObservation::rollover());
                for (int own : node.channels)
                {
                    table.apply(ChannelObservation::neighbor_took(ChannelId{own}));
                }
                pick = table.select().value();
            }
            if (std::find(node.channels.begin(), node.channels.end(), pick) == node.channels.end())
            {
                node.channels.push_back(pick);
            }
            table.apply(ChannelObservation::self_selected(ChannelId{pick}));
        }
        assigned[v] = true;
    }
}

} // namespace

void
assign_channels(Topology& topo, const ChannelPlan& plan, int radios_per_node, double tx_range)
{
    switch (plan.kind)
    {
    case ChannelPlan::Kind::Pcl:
        assign_pcl(topo, radios_per_node, tx_range);
        break;
    case ChannelPlan::Kind::PerNode:
        for (std::size_t i = 0; i < topo.size(); ++i)
        {
            topo.nodes[i].channels = plan.per_node[i % plan.per_node.size()];
        }
        break;
    case ChannelPlan::Kind::Links: {
        const auto& links = plan.links;
        const std::size_t n = topo.size();
        for (std::size_t i = 0; i < n; ++i)
        {
            std::vector<int> chans;
            if (i > 0)
            {
                chans.push_back(links[(i - 1) % links.size()]);
            }
            if (i + 1 < n)
            {
                const int next = links[i % links.size()];
                if (chans.empty() || chans.front() != next)
                {
                    chans.push_back(next);
                }
            }
            topo.nodes[i].channels = std::move(chans);
        }
        break;
    }
    }
}

std::optional<int>
common_channel(const NodeSpec& a, const NodeSpec& b)
{
    std::optional<int> best;
    for (int ca : a.channels)
    {
        if (std::find(b.channels.begin(), b.channels.end(), ca) != b.channels.end())
        {
            if (!best || ca < *best)
            {
                best = ca;
            }
        }
    }
    return best;
}

std::vector<std::vector<LinkSpec>>
radio_links(const Topology& topo, double tx_range)
{
    const auto adj = disc_neighbors(topo, tx_range);
    std::vector<std::vector<LinkSpec>> links(topo.size());
    for (std::size_t v = 0; v < topo.size(); ++v)
    {
        for (NodeId w : adj[v])
        {
            if (auto ch = common_channel(topo.nodes[v], topo.nodes[w]))
            {
                links[v].push_back(LinkSpec{w, *ch});
            }
        }
    }
    return links;
}

std::vector<int>
hop_distances(const std::vector<std::vector<LinkSpec>>& links, NodeId from)
{
    std::vector<int> dist(links.size(), -1);
    std::queue<NodeId> q;
    dist[from] = 0;
    q.push(from);
    while (!q.empty())
    {
        const NodeId v = q.front();
        q.pop();
        for (const auto& l : links[v])
        {
            if (dist[l.to] < 0)
            {
                dist[l.to] = dist[v] + 1;
                q.push(l.to);
            }
        }
    }
    return dist;
}

std::vector<FlowSpec>
resolve_flows(const ScenarioConfig& config, const Topology& topo)
{
    if (!config.flows.flows.empty())
    {
        return config.flows.flows;
    }
    const auto links = radio_links(topo, config.tx_range_m);
    const auto dist = hop_distances(links, topo.gateway);
    std::vector<NodeId> candidates;
    for (NodeId v = 0; v < topo.size(); ++v)
    {
        if (v != topo.gateway && dist[v] > 0)
        {
            candidates.push_back(v);
        }
    }
    std::vector<FlowSpec> flows;
    if (config.flows.random_count > 0)
    {
        Rng rng = make_rng(config.seed, rng_stream::kFlows);
        std::shuffle(candidates.begin(), candidates.end(), rng);
        const auto k = std::min<std::size_t>(candidates.size(), config.flows.random_count);
        for (std::size_t i = 0; i < k; ++i)
        {
            flows.push_back(FlowSpec{candidates[i], topo.gateway});
        }
        std::sort(flows.begin(), flows.end(), [](const FlowSpec& a, const FlowSpec& b) {
            return a.src < b.src;
        });
        return flows;
    }
    if (config.topology.kind == TopologyKind::Chain)
    {
        return {FlowSpec{0, topo.gateway}};
    }
    // Farthest reachable node by hops; lowest id on ties.
    NodeId far = topo.gateway;
    int far_d = 0;
    for (NodeId v : candidates)
    {
        if (dist[v] > far_d)
        {
            far = v;
            far_d = dist[v];
        }
    }
    if (far == topo.gateway)
    {
        return {};
    }
    return {FlowSpec{far, topo.gateway}};
}

} // namespace corciar::engine
