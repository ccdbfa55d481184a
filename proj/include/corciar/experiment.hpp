#pragma once

#include "corciar/config.hpp"
#include "corciar/metrics.hpp"
#include "corciar/simulator.hpp"
#include "corciar/topology.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace corciar::experiment
{

inline constexpr std::string_view kBaselineLabel = "aodv_hop";
inline constexpr std::string_view kCorciarLabel = "corciar";

struct ScenarioResult
{
    std::string scenario;
    ScenarioConfig config;
    engine::Topology topology;
    std::vector<engine::PhaseResult> phases;
    /// Raw baseline / CoRCiaR ratio; absent unless both phases ran.
    std::optional<double> cor;
    std::optional<metrics::CollisionClass> collision_class;

    const engine::PhaseResult* phase(std::string_view label) const;
};

/**
 * Runs a scenario. With protocol=both the baseline (AODV, hop count) runs
 * first; the CoRCiaR phase then starts from the same seed with its link
 * estimators seeded from the baseline's measured per-hop RTTs.
 */
ScenarioResult run_scenario(const ScenarioConfig& config, std::string scenario, std::ostream* trace = nullptr);

std::string csv_header();
/// One line per phase, without trailing newline characters.
std::vector<std::string> csv_rows(const ScenarioResult& result);
std::string to_csv(const ScenarioResult& result, bool with_header = true);

/// node,destination,next_hop,hop_count,rtt_cost_ms,expires_at per phase.
std::string route_dump(const ScenarioResult& result);

enum class SweepAxis
{
    Hops,
    Nodes,
};

struct SweepResult
{
    std::string csv;
    std::size_t cells{0};
    std::size_t failed{0};
    std::vector<std::string> errors;
    std::vector<ScenarioResult> results; // successful cells in output order
};

/**
 * One scenario per (axis value, seed); hops h runs a chain of h + 1 nodes,
 * nodes n a connected random placement. Cells run on up to `threads` workers;
 * the CSV is assembled in (axis, seed, protocol) order followed by
 * `median:<protocol>` rows per axis value.
 */
SweepResult run_sweep(const ScenarioConfig& base,
                      SweepAxis axis,
                      std::span<const int> values,
                      std::span<const std::uint64_t> seeds,
                      unsigned threads = 1,
                      bool keep_results = false);

/// c1,c2,separation,class,factor,qos_literal,qos_symmetric,dt_literal,dt_symmetric
std::string channel_table_csv();

/// Fixed six-decimal rendering used for every CSV number.
std::string format_number(double v);

} // namespace corciar::experiment
