#pragma once

#include "corciar/channel_model.hpp"
#include "corciar/types.hpp"

#include <cstddef>
#include <deque>
#include <span>
#include <string_view>

namespace corciar::mac
{

using channel::ChannelId;

enum class FrameKind
{
    Rts,
    Cts,
    Data,
    Ack,
    Hello,
    Rreq,
    Rrep,
};

std::string_view to_string(FrameKind kind) noexcept;

inline constexpr int kRtsBytes = 20;
inline constexpr int kCtsBytes = 14;
inline constexpr int kAckBytes = 14;
inline constexpr int kDefaultPacketBytes = 1000;
inline constexpr std::size_t kDefaultQueueCapacity = 50;

struct Frame
{
    FrameKind kind{FrameKind::Data};
    NodeId src{0};
    NodeId dst{0};
    ChannelId channel{1};
    int size_bytes{kDefaultPacketBytes};
    std::uint32_t flow_id{0};
    std::uint64_t seq{0};
};

/**
 * Per-frame timing instrumentation at one hop.
 *
 * t_i: arrival at the node queue, t_h: frame reaches the head of the queue,
 * t_next: frame handed to the physical medium. Always t_i <= t_h <= t_next.
 */
struct QueueTimestamps
{
    double t_i{0.0};
    double t_h{0.0};
    double t_next{0.0};
};

/// Sets t_h; throws SimulationFault if time would run backwards.
void advance_to_head(QueueTimestamps& ts, double now);
/// Sets t_next; throws SimulationFault if time would run backwards.
void release_to_medium(QueueTimestamps& ts, double now);

struct HopDelay
{
    double queue{0.0};
    double contention{0.0};
    double transmission{0.0};
    double total{0.0};
};

double transmission_delay(int size_bytes, double rate_bps);
HopDelay hop_delay(const QueueTimestamps& ts, int size_bytes, double rate_bps);

/// (1 - alpha) * queue delay + alpha * contention delay, in seconds.
double weighted_hop_cost(const QueueTimestamps& ts, double alpha);

enum class RtsMode
{
    Literal,
    Symmetric,
};

enum class CtsDecision
{
    SendCts,
    Defer,
};

std::string_view to_string(CtsDecision d) noexcept;

/**
 * Receiver-side admission of an RTS on channel c1 for loss-intolerant
 * traffic. local_channels are the receiver's channels to check against; the
 * decision is SendCts only if every one of them passes.
 *
 * Literal mode applies the equality tests c1 == c + 5 (c in 1..6) and
 * c1 == (c + 5) mod 11 (c in 7..11). Symmetric mode requires separation >= 5.
 */
CtsDecision handle_rts_qos(ChannelId c1, std::span<const ChannelId> local_channels, RtsMode mode);

/// As handle_rts_qos, but separation exactly 4 is also admitted.
CtsDecision handle_rts_delay_tolerant(ChannelId c1,
                                      std::span<const ChannelId> local_channels,
                                      RtsMode mode);

enum class TrafficClass
{
    Qos,
    DelayTolerant,
};

CtsDecision handle_rts(TrafficClass cls,
                       ChannelId c1,
                       std::span<const ChannelId> local_channels,
                       RtsMode mode);

struct BackoffParams
{
    int cw_min{31};
    int cw_max{1023};
    double slot_time{20e-6};
    int retry_limit{7};
};

struct BackoffState
{
    int cw{31};
    int retries{0};
};

enum class AccessOutcome
{
    Busy,
    Deferred,
    Success,
};

struct BackoffStep
{
    int wait_slots{0};
    BackoffState state;
    /// Retry limit exceeded: the frame is discarded and routing is told.
    bool discard{false};
};

BackoffStep backoff_next(const BackoffState& state,
                         AccessOutcome outcome,
                         const BackoffParams& params,
                         Rng& rng);

enum class EnqueueResult
{
    Accepted,
    DroppedQueueFull,
};

/**
 * Bounded FIFO that stamps t_i on arrival and t_h when an entry reaches the
 * head. The head entry stays queued while it is being served.
 */
template <class Payload>
class FrameQueue
{
  public:
    struct Entry
    {
        Payload payload;
        QueueTimestamps ts;
    };

    explicit FrameQueue(std::size_t capacity = kDefaultQueueCapacity)
        : m_capacity{capacity}
    {
    }

    EnqueueResult enqueue(Payload payload, double now)
    {
        ++m_offered;
        if (m_entries.size() >= m_capacity)
        {
            ++m_dropped;
            return EnqueueResult::DroppedQueueFull;
        }
        Entry e{std::move(payload), QueueTimestamps{now, now, now}};
        m_entries.push_back(std::move(e));
        return EnqueueResult::Accepted;
    }

    bool empty() const noexcept
    {
        return m_entries.empty();
    }

    std::size_t size() const noexcept
    {
        return m_entries.size();
    }

    std::size_t capacity() const noexcept
    {
        return m_capacity;
    }

    Entry& head()
    {
        return m_entries.front();
    }

    const Entry& head() const
    {
        return m_entries.front();
    }

    /// Removes the head; the next entry (if any) reaches the head at now.
    Entry pop(double now)
    {
        Entry e = std::move(m_entries.front());
        m_entries.pop_front();
        ++m_departed;
        if (!m_entries.empty())
        {
            advance_to_head(m_entries.front().ts, now);
        }
        return e;
    }

    std::uint64_t offered() const noexcept
    {
        return m_offered;
    }

    std::uint64_t dropped() const noexcept
    {
        return m_dropped;
    }

    std::uint64_t departed() const noexcept
    {
        return m_departed;
    }

  private:
    std::size_t m_capacity;
    std::deque<Entry> m_entries;
    std::uint64_t m_offered{0};
    std::uint64_t m_dropped{0};
    std::uint64_t m_departed{0};
};

} // namespace corciar::mac
