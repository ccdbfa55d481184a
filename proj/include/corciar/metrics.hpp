#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace corciar::metrics
{

struct FlowStats
{
    std::uint64_t packets_sent{0};
    std::uint64_t packets_received_at_gateway{0};
    std::uint64_t bytes_received{0};
    std::vector<double> e2e_delays_ms;
    std::vector<double> rtt_samples_ms;
    std::uint64_t drops_queue{0};
    std::uint64_t drops_retry{0};
    std::uint64_t in_flight_at_end{0};

    /// sent == received + queue drops + retry drops + in flight.
    bool conserved() const noexcept
    {
        return packets_sent ==
               packets_received_at_gateway + drops_queue + drops_retry + in_flight_at_end;
    }
};

struct RunSummary
{
    std::string protocol_label;
    double throughput_kbps{0.0};
    std::optional<double> delivery_ratio;
    std::optional<double> mean_e2e_delay_ms;
    std::optional<double> mean_rtt_ms;
};

enum class CollisionClass
{
    PerfectlyElastic,
    PartiallyElastic,
    Inelastic,
};

std::string_view to_string(CollisionClass c) noexcept;

struct CorReport
{
    double before_kbps{0.0}; // CoRCiaR throughput
    double after_kbps{0.0};  // baseline throughput
    double cor{0.0};
    double energy_ratio{0.0};
    CollisionClass collision_class{CollisionClass::Inelastic};
    bool clamped{false}; // raw ratio exceeded 1
};

/// received / sent, absent when nothing was sent.
std::optional<double> delivery_ratio(const FlowStats& stats);

/// Gateway bytes * 8 / duration / 1000.
double throughput_kbps(std::uint64_t bytes_received, double duration_s);
double throughput_kbps(std::span<const FlowStats> flows, double duration_s);

/**
 * Coefficient of restitution between two throughputs: after / before.
 * "after" is the baseline throughput and "before" the CoRCiaR throughput.
 * Absent when before is zero.
 */
std::optional<double> cor(double after_kbps, double before_kbps);

/// Kinetic-energy ratio, cor squared.
double energy_ratio(double cor);

struct Classification
{
    CollisionClass cls;
    bool clamped;
};

/// 1 -> PerfectlyElastic, 0 -> Inelastic, otherwise PartiallyElastic; values
/// above 1 are clamped to 1 and flagged.
Classification classify_collision(double cor);

std::optional<CorReport> make_cor_report(double baseline_kbps, double corciar_kbps);

std::optional<double> mean(std::span<const double> xs);
std::optional<double> median(std::vector<double> xs);

RunSummary summarize(std::span<const FlowStats> flows, double duration_s, std::string protocol_label);

} // namespace corciar::metrics
