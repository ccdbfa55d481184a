#include "corciar/metrics.hpp"

#include <algorithm>
#include <stdexcept>

namespace corciar::metrics
{

std::string_view
to_string(CollisionClass c) noexcept
{
    switch (c)
    {
    case CollisionClass::PerfectlyElastic:
        return "PerfectlyElastic";
    case CollisionClass::PartiallyElastic:
        return "PartiallyElastic";
    case CollisionClass::Inelastic:
        return "Inelastic";
    }
    return "?";
}

std::optional<double>
delivery_ratio(const FlowStats& stats)
{
    if (stats.packets_sent == 0)
    {
        return std::nullopt;
    }
    return static_cast<double>(stats.packets_received_at_gateway) /
           static_cast<double>(stats.packets_sent);
}

double
throughput_kbps(std::uint64_t bytes_received, double duration_s)
{
    if (duration_s <= 0.0)
    {
        throw std::invalid_argument("duration must be positive");
    }
    return static_cast<double>(bytes_received) * 8.0 / duration_s / 1000.0;
}

double
throughput_kbps(std::span<const FlowStats> flows, double duration_s)
{
    std::uint64_t bytes = 0;
    for (const auto& f : flows)
    {
        bytes += f.bytes_received;
    }
    return throughput_kbps(bytes, duration_s);
}

std::optional<double>
cor(double after_kbps, double before_kbps)
{
    if (before_kbps <= 0.0)
    {
        return std::nullopt;
    }
    return after_kbps / before_kbps;
}

double
energy_ratio(double c)
{
    return c * c;
}

Classification
classify_collision(double c)
{
    const bool clamped = c > 1.0;
    if (clamped)
    {
        c = 1.0;
    }
    if (c == 1.0)
    {
        return {CollisionClass::PerfectlyElastic, clamped};
    }
    if (c <= 0.0)
    {
        return {CollisionClass::Inelastic, false};
    }
    return {CollisionClass::PartiallyElastic, false};
}

std::optional<CorReport>
make_cor_report(double baseline_kbps, double corciar_kbps)
{
    auto c = cor(baseline_kbps, corciar_kbps);
    if (!c)
    {
        return std::nullopt;
    }
    CorReport r;
    r.after_kbps = baseline_kbps;
    r.before_kbps = corciar_kbps;
    r.cor = *c;
    r.energy_ratio = energy_ratio(*c);
    const auto cls = classify_collision(*c);
    r.collision_class = cls.cls;
    r.clamped = cls.clamped;
    return r;
}

std::optional<double>
mean(std::span<const double> xs)
{
    if (xs.empty())
    {
        return std::nullopt;
    }
    double sum = 0.0;
    for (double x : xs)
    {
        sum += x;
    }
    return sum / static_cast<double>(xs.size());
}

std::optional<double>
median(std::vector<double> xs)
{
    if (xs.empty())
    {
        return std::nullopt;
    }
    std::sort(xs.begin(), xs.end());
    const std::size_t mid = xs.size() / 2;
    if (xs.size() % 2 == 1)
    {
        return xs[mid];
    }
    return 0.5 * (xs[mid - 1] + xs[mid]);
}

RunSummary
summarize(std::span<const FlowStats> flows, double duration_s, std::string protocol_label)
{
    RunSummary s;
    s.protocol_label = std::move(protocol_label);
    s.throughput_kbps = throughput_kbps(flows, duration_s);

    FlowStats total;
    std::vector<double> delays;
    std::vector<double> rtts;
    for (const auto& f : flows)
    {
        total.packets_sent += f.packets_sent;
        total.packets_received_at_gateway += f.packets_received_at_gateway;
        delays.insert(delays.end(), f.e2e_delays_ms.begin(), f.e2e_delays_ms.end());
        rtts.insert(rtts.end(), f.rtt_samples_ms.begin(), f.rtt_samples_ms.end());
    }
    s.delivery_ratio = delivery_ratio(total);
    s.mean_e2e_delay_ms = mean(delays);
    s.mean_rtt_ms = mean(rtts);
    return s;
}

} // namespace corciar::metrics
