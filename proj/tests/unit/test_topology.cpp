#include "corciar/topology.hpp"

#include <doctest.h>

using namespace corciar;
using namespace corciar::engine;

TEST_CASE("two-node chain")
{
    const auto t = build_chain(2);
    REQUIRE(t.size() == 2);
    CHECK(t.nodes[0].pos.x == 0.0);
    CHECK(t.nodes[1].pos.x == 150.0);
    CHECK(t.gateway == 1);
    CHECK(disc_neighbors(t, 250.0)[0] == std::vector<NodeId>{1});
}

TEST_CASE("six-node chain ranges")
{
    const auto t = build_chain(6);
    const double d = distance(t.nodes[0].pos, t.nodes[3].pos);
    CHECK(d == doctest::Approx(450.0));
    CHECK(d > 250.0);
    CHECK(d < 550.0);
    CHECK(t.gateway == 5);
}

TEST_CASE("eleven-node chain fits the area")
{
    const auto t = build_chain(11);
    for (const auto& n : t.nodes)
    {
        CHECK(n.pos.x <= kAreaWidth);
    }
}

TEST_CASE("random placement is seeded, connected and inside the area")
{
    const auto a = build_random(20, 7);
    const auto b = build_random(20, 7);
    REQUIRE(a.size() == 20);
    CHECK(a.gateway == 0);
    for (std::size_t i = 0; i < a.size(); ++i)
    {
        CHECK(a.nodes[i].pos.x == b.nodes[i].pos.x);
        CHECK(a.nodes[i].pos.y == b.nodes[i].pos.y);
        CHECK(a.nodes[i].pos.x >= 0.0);
        CHECK(a.nodes[i].pos.x <= kAreaWidth);
        CHECK(a.nodes[i].pos.y >= 0.0);
        CHECK(a.nodes[i].pos.y <= kAreaHeight);
    }
    CHECK(disc_connected(a, 250.0));
}

TEST_CASE("disconnected placements are rejected")
{
    Topology t;
    t.nodes = {{0, {0.0, 0.0}, {}}, {1, {600.0, 0.0}, {}}};
    CHECK_FALSE(disc_connected(t, 250.0));
    CHECK_THROWS_AS(build_random(2, 1, 1.0), std::runtime_error);
}

TEST_CASE("fig3 mesh")
{
    const auto t = build_fig3();
    REQUIRE(t.size() == 8);
    CHECK(t.gateway == 4);
    const auto nb = disc_neighbors(t, 250.0);
    auto has = [&](NodeId a, NodeId b) {
        return std::find(nb[a].begin(), nb[a].end(), b) != nb[a].end();
    };
    CHECK(has(5, 4));
    CHECK(has(5, 7));
    CHECK(has(7, 6));
    CHECK(has(6, 4));
    CHECK_FALSE(has(7, 4));
    CHECK_FALSE(has(5, 6));
}

TEST_CASE("link plans give each chain node the channels of its links")
{
    auto t = build_chain(4);
    ChannelPlan plan;
    plan.kind = ChannelPlan::Kind::Links;
    plan.links = {1, 6, 11};
    assign_channels(t, plan, 2, 250.0);
    CHECK(t.nodes[0].channels == std::vector<int>{1});
    CHECK(common_channel(t.nodes[0], t.nodes[1]) == 1);
    CHECK(common_channel(t.nodes[1], t.nodes[2]) == 6);
    CHECK(common_channel(t.nodes[2], t.nodes[3]) == 11);
}

TEST_CASE("per-node plans cycle")
{
    auto t = build_chain(3);
    ChannelPlan plan;
    plan.kind = ChannelPlan::Kind::PerNode;
    plan.per_node = {{1, 6}};
    assign_channels(t, plan, 2, 250.0);
    for (const auto& n : t.nodes)
    {
        CHECK(n.channels == std::vector<int>{1, 6});
    }
}

TEST_CASE("pcl assignment connects a chain with distinct channels per radio")
{
    auto t = build_chain(6);
    assign_channels(t, ChannelPlan{}, 2, 250.0);
    const auto links = radio_links(t, 250.0);
    const auto hops = hop_distances(links, t.gateway);
    for (int h : hops)
    {
        CHECK(h >= 0);
    }
    for (const auto& n : t.nodes)
    {
        CHECK(n.channels.size() <= 2);
        if (n.channels.size() == 2)
        {
            CHECK(n.channels[0] != n.channels[1]);
        }
    }
}

TEST_CASE("default flows start at the node farthest from the gateway")
{
    ScenarioConfig c;
    c.topology = {TopologyKind::Chain, 5, std::nullopt};
    auto t = build_topology(c);
    assign_channels(t, c.channel_plan, c.radios_per_node, c.tx_range_m);
    const auto flows = resolve_flows(c, t);
    REQUIRE(flows.size() == 1);
    CHECK(flows[0] == FlowSpec{0, 4});
}
