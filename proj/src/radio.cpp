#include "corciar/radio.hpp"

namespace corciar::engine
{

std::string_view
to_string(ReceptionOutcome o) noexcept
{
    switch (o)
    {
    case ReceptionOutcome::Received:
        return "Received";
    case ReceptionOutcome::CorruptedByInterference:
        return "CorruptedByInterference";
    case ReceptionOutcome::OutOfRange:
        return "OutOfRange";
    }
    return "?";
}

bool
disturbs(const Transmission& t, Position at, int channel, const RadioModel& model) noexcept
{
    if (distance(t.sender_pos, at) > model.interference_range)
    {
        return false;
    }
    return model.profile.factor(t.channel - channel) > model.theta;
}

bool
overlaps(const Transmission& a, const Transmission& b) noexcept
{
    return a.start < b.end && b.start < a.end;
}

ReceptionOutcome
transmit_outcome(const Transmission& frame,
                 Position receiver_pos,
                 std::span<const Transmission> others,
                 const RadioModel& model)
{
    if (distance(frame.sender_pos, receiver_pos) > model.tx_range)
    {
        return ReceptionOutcome::OutOfRange;
    }
    for (const auto& t : others)
    {
        if (t.id == frame.id || !overlaps(frame, t))
        {
            continue;
        }
        if (disturbs(t, receiver_pos, frame.channel, model))
        {
            return ReceptionOutcome::CorruptedByInterference;
        }
    }
    return ReceptionOutcome::Received;
}

} // namespace corciar::engine
