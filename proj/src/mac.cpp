#include "corciar/mac.hpp"

#include <algorithm>
#include <sstream>

namespace corciar::mac
{

std::string_view
to_string(FrameKind kind) noexcept
{
    switch (kind)
    {
    case FrameKind::Rts:
        return "RTS";
    case FrameKind::Cts:
        return "CTS";
    case FrameKind::Data:
        return "DATA";
    case FrameKind::Ack:
        return "ACK";
    case FrameKind::Hello:
        return "HELLO";
    case FrameKind::Rreq:
        return "RREQ";
    case FrameKind::Rrep:
        return "RREP";
    }
    return "?";
}

std::string_view
to_string(CtsDecision d) noexcept
{
    return d == CtsDecision::SendCts ? "SendCts" : "Defer";
}

namespace
{

[[noreturn]] void
time_fault(const char* field, double prev, double now)
{
    std::ostringstream os;
    os << "non-monotone queue timestamp: " << field << " would move from " << prev << " to "
       << now;
    throw SimulationFault(os.str());
}

// Pseudocode equality test against one local channel. The offsets are the
// separations the rule admits (5, or 5 and 4 for delay-tolerant traffic).
bool
literal_pass(int c1, int c, std::span<const int> offsets)
{
    for (int off : offsets)
    {
        const int partner = c <= 6 ? c + off : (c + off) % channel::kChannelCount;
        if (c1 == partner)
        {
            return true;
        }
    }
    return false;
}

CtsDecision
admit(ChannelId c1,
      std::span<const ChannelId> local_channels,
      RtsMode mode,
      std::span<const int> literal_offsets,
      bool allow_partial)
{
    for (ChannelId c : local_channels)
    {
        if (c == c1)
        {
            return CtsDecision::Defer;
        }
        bool pass = false;
        if (mode == RtsMode::Literal)
        {
            pass = literal_pass(c1.value(), c.value(), literal_offsets);
        }
        else
        {
            const int sep = channel::separation(c1, c);
            pass = sep >= channel::kOrthogonalSeparation ||
                   (allow_partial && sep == channel::kOrthogonalSeparation - 1);
        }
        if (!pass)
        {
            return CtsDecision::Defer;
        }
    }
    return CtsDecision::SendCts;
}

} // namespace

void
advance_to_head(QueueTimestamps& ts, double now)
{
    if (now < ts.t_i)
    {
        time_fault("t_h", ts.t_i, now);
    }
    ts.t_h = now;
    ts.t_next = now;
}

void
release_to_medium(QueueTimestamps& ts, double now)
{
    if (now < ts.t_h)
    {
        time_fault("t_next", ts.t_h, now);
    }
    ts.t_next = now;
}

double
transmission_delay(int size_bytes, double rate_bps)
{
    if (rate_bps <= 0.0)
    {
        throw std::invalid_argument("rate_bps must be positive");
    }
    return static_cast<double>(size_bytes) * 8.0 / rate_bps;
}

HopDelay
hop_delay(const QueueTimestamps& ts, int size_bytes, double rate_bps)
{
    HopDelay d;
    d.queue = ts.t_h - ts.t_i;
    d.contention = ts.t_next - ts.t_h;
    d.transmission = transmission_delay(size_bytes, rate_bps);
    d.total = d.queue + d.contention + d.transmission;
    return d;
}

double
weighted_hop_cost(const QueueTimestamps& ts, double alpha)
{
    if (alpha < 0.0 || alpha > 1.0)
    {
        throw std::invalid_argument("alpha must be in [0,1]");
    }
    return (1.0 - alpha) * (ts.t_h - ts.t_i) + alpha * (ts.t_next - ts.t_h);
}

CtsDecision
handle_rts_qos(ChannelId c1, std::span<const ChannelId> local_channels, RtsMode mode)
{
    static constexpr int kOffsets[] = {5};
    return admit(c1, local_channels, mode, kOffsets, false);
}

CtsDecision
handle_rts_delay_tolerant(ChannelId c1, std::span<const ChannelId> local_channels, RtsMode mode)
{
    static constexpr int kOffsets[] = {5, 4};
    return admit(c1, local_channels, mode, kOffsets, true);
}

CtsDecision
handle_rts(TrafficClass cls, ChannelId c1, std::span<const ChannelId> local_channels, RtsMode mode)
{
    return cls == TrafficClass::Qos ? handle_rts_qos(c1, local_channels, mode)
                                    : handle_rts_delay_tolerant(c1, local_channels, mode);
}

BackoffStep
backoff_next(const BackoffState& state,
             AccessOutcome outcome,
             const BackoffParams& params,
             Rng& rng)
{
    BackoffStep step;
    if (outcome == AccessOutcome::Success)
    {
        step.state = BackoffState{params.cw_min, 0};
        return step;
    }
    std::uniform_int_distribution<int> draw(0, state.cw);
    step.wait_slots = draw(rng);
    step.state.cw = std::min(2 * state.cw + 1, params.cw_max);
    step.state.retries = state.retries + 1;
    if (step.state.retries > params.retry_limit)
    {
        step.discard = true;
        step.state = BackoffState{params.cw_min, 0};
    }
    return step;
}

} // namespace corciar::mac
