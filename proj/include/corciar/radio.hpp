#pragma once

#include "corciar/channel_model.hpp"
#include "corciar/topology.hpp"

#include <optional>
#include <span>
#include <string_view>

namespace corciar::engine
{

/// Binary-disc propagation: reception inside tx_range, interference inside
/// interference_range when the channel overlap factor exceeds theta.
struct RadioModel
{
    double tx_range{250.0};
    double interference_range{550.0};
    double data_rate_bps{1e6};
    double theta{0.1};
    channel::InterferenceProfile profile{channel::InterferenceProfile::linear()};

    double airtime(int size_bytes) const noexcept
    {
        return static_cast<double>(size_bytes) * 8.0 / data_rate_bps;
    }
};

/// One frame (or interferer burst) on the air.
struct Transmission
{
    std::uint64_t id{0};
    NodeId sender{0};
    Position sender_pos;
    int channel{1};
    double start{0.0};
    double end{0.0};
    std::optional<NodeId> receiver;
    Position receiver_pos;
};

enum class ReceptionOutcome
{
    Received,
    CorruptedByInterference,
    OutOfRange,
};

std::string_view to_string(ReceptionOutcome o) noexcept;

/// Whether transmission t disturbs reception on channel at position at.
bool disturbs(const Transmission& t, Position at, int channel, const RadioModel& model) noexcept;

/// Whether the two transmissions share any airtime.
bool overlaps(const Transmission& a, const Transmission& b) noexcept;

/**
 * Fate of frame at a receiver at receiver_pos. Received iff the receiver is in
 * tx range and no other transmission overlapping the frame's airtime lies
 * within interference range of the receiver with overlap factor above theta.
 */
ReceptionOutcome transmit_outcome(const Transmission& frame,
                                  Position receiver_pos,
                                  std::span<const Transmission> others,
                                  const RadioModel& model);

} // namespace corciar::engine
