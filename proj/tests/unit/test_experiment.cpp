#include "corciar/experiment.hpp"

#include <doctest.h>

#include <sstream>
#include <string>
#include <vector>

using namespace corciar;
using namespace corciar::experiment;

namespace
{

std::vector<std::string>
lines_of(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line))
    {
        out.push_back(line);
    }
    return out;
}

ScenarioConfig
short_chain(int n)
{
    ScenarioConfig c;
    c.topology = {TopologyKind::Chain, n, std::nullopt};
    c.channel_plan.kind = ChannelPlan::Kind::Links;
    c.channel_plan.links = {1, 6, 11};
    c.sim_time_s = 10.0;
    return c;
}

} // namespace

TEST_CASE("csv header is fixed")
{
    CHECK(csv_header() ==
          "scenario,seed,protocol,n_nodes,n_hops,throughput_kbps,delivery_ratio,mean_delay_ms,mean_rtt_ms,cor,"
          "collision_class");
}

TEST_CASE("a run with both protocols gives two rows")
{
    const auto r = run_scenario(short_chain(3), "chain3");
    REQUIRE(r.phases.size() == 2);
    CHECK(r.phases[0].protocol_label == kBaselineLabel);
    CHECK(r.phases[1].protocol_label == kCorciarLabel);
    const auto lines = lines_of(to_csv(r));
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == csv_header());
    CHECK(lines[1].rfind("chain3,1,aodv_hop,3,2,", 0) == 0);
    CHECK(lines[2].rfind("chain3,1,corciar,3,2,", 0) == 0);
    REQUIRE(r.cor);
    CHECK(*r.cor == doctest::Approx(1.0));
    CHECK(r.collision_class == metrics::CollisionClass::PerfectlyElastic);
}

TEST_CASE("single protocol runs have no cor")
{
    auto c = short_chain(3);
    c.protocol = ProtocolChoice::Corciar;
    const auto r = run_scenario(c, "solo");
    REQUIRE(r.phases.size() == 1);
    CHECK(r.phases[0].protocol_label == kCorciarLabel);
    CHECK_FALSE(r.cor.has_value());
    const auto lines = lines_of(to_csv(r, false));
    REQUIRE(lines.size() == 1);
}

TEST_CASE("csv output is byte-stable")
{
    const auto c = short_chain(4);
    CHECK(to_csv(run_scenario(c, "x")) == to_csv(run_scenario(c, "x")));
}

TEST_CASE("route dump lists each phase")
{
    const auto r = run_scenario(short_chain(3), "chain3");
    const auto lines = lines_of(route_dump(r));
    REQUIRE_FALSE(lines.empty());
    CHECK(lines[0] == "node,destination,next_hop,hop_count,rtt_cost_ms,expires_at");
    CHECK(std::count(lines.begin(), lines.end(), "# protocol=aodv_hop") == 1);
    CHECK(std::count(lines.begin(), lines.end(), "# protocol=corciar") == 1);
}

TEST_CASE("sweep rows are ordered by axis, seed and protocol with medians")
{
    const std::vector<int> hops{2, 3};
    const std::vector<std::uint64_t> seeds{1, 2, 3};
    auto base = short_chain(3);
    base.sim_time_s = 5.0;
    const auto s = run_sweep(base, SweepAxis::Hops, hops, seeds, 2);
    CHECK(s.cells == 6);
    CHECK(s.failed == 0);
    const auto lines = lines_of(s.csv);
    REQUIRE(lines.size() == 1 + 2 * (3 * 2 + 2));
    CHECK(lines[1].rfind("hops=2,1,aodv_hop,3,2,", 0) == 0);
    CHECK(lines[2].rfind("hops=2,1,corciar,", 0) == 0);
    CHECK(lines[3].rfind("hops=2,2,aodv_hop,", 0) == 0);
    CHECK(lines[7].rfind("hops=2,,median:aodv_hop,3,,", 0) == 0);
    CHECK(lines[8].rfind("hops=2,,median:corciar,", 0) == 0);
    CHECK(lines[9].rfind("hops=3,1,aodv_hop,4,3,", 0) == 0);

    const auto again = run_sweep(base, SweepAxis::Hops, hops, seeds, 1);
    CHECK(again.csv == s.csv);
}

TEST_CASE("sweep row count for four hop values and ten seeds")
{
    const std::vector<int> hops{2, 4, 6, 8};
    std::vector<std::uint64_t> seeds;
    for (std::uint64_t i = 1; i <= 10; ++i)
    {
        seeds.push_back(i);
    }
    auto base = short_chain(3);
    base.sim_time_s = 0.5;
    const auto s = run_sweep(base, SweepAxis::Hops, hops, seeds, 1);
    const auto lines = lines_of(s.csv);
    std::size_t data = 0;
    for (const auto& l : lines)
    {
        if (l.find(",median:") == std::string::npos && l != csv_header())
        {
            ++data;
        }
    }
    CHECK(data == 80);
}

TEST_CASE("failed sweep cells are reported and skipped")
{
    ScenarioConfig base;
    base.topology = {TopologyKind::Random, 20, std::nullopt};
    base.tx_range_m = 20.0;
    base.interference_range_m = 40.0;
    base.sim_time_s = 1.0;
    const std::vector<int> nodes{20};
    const std::vector<std::uint64_t> seeds{1};
    const auto s = run_sweep(base, SweepAxis::Nodes, nodes, seeds, 1);
    CHECK(s.failed == 1);
    CHECK(s.errors.size() == 1);
}

TEST_CASE("channel table cells")
{
    const auto lines = lines_of(channel_table_csv());
    REQUIRE(lines.size() == 122);
    CHECK(lines[0] == "c1,c2,separation,class,factor,qos_literal,qos_symmetric,dt_literal,dt_symmetric");
    CHECK(lines[1] == "1,1,0,SelfSame,1.000000,Defer,Defer,Defer,Defer");
    CHECK(lines[6] == "1,6,5,Orthogonal,0.000000,Defer,SendCts,Defer,SendCts");
    CHECK(lines[5] == "1,5,4,PartialAcceptable,0.200000,Defer,Defer,Defer,SendCts");
}

TEST_CASE("number formatting")
{
    CHECK(format_number(0.869701) == "0.869701");
    CHECK(format_number(-0.0) == "0.000000");
    CHECK(format_number(483.133) == "483.133000");
}
