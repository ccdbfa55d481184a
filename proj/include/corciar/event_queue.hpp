#pragma once

#include "corciar/types.hpp"

#include <cstdint>
#include <functional>
#include <limits>
#include <string_view>
#include <vector>

namespace corciar::engine
{

enum class EventAction
{
    FrameArrival,
    TimerFire,
    HelloTick,
    BeaconTick,
    FlowSendWindow,
    RtoExpiry,
    SimEnd,
};

std::string_view to_string(EventAction a) noexcept;

/// Node field for events not tied to a node (interferers, end of run).
inline constexpr NodeId kNoNode = std::numeric_limits<NodeId>::max();

struct SimEvent
{
    double time{0.0};
    std::uint64_t ordinal{0};
    EventAction action{EventAction::TimerFire};
    NodeId node{kNoNode};
    std::function<void()> handler;
};

/**
 * Single-threaded event calendar. Events dispatch in (time, ordinal) order,
 * where ordinal is the insertion counter, so equal-time events keep their
 * scheduling order.
 */
class EventQueue
{
  public:
    using Observer = std::function<void(const SimEvent&)>;

    /// Throws SimulationFault when time lies in the past.
    void schedule(double time, EventAction action, NodeId node, std::function<void()> handler);

    /// Dispatches every event with time <= t_end; returns how many ran.
    std::uint64_t run_until(double t_end);

    double now() const noexcept
    {
        return m_now;
    }

    std::size_t pending() const noexcept
    {
        return m_heap.size();
    }

    void set_observer(Observer observer)
    {
        m_observer = std::move(observer);
    }

  private:
    struct Later
    {
        bool operator()(const SimEvent& a, const SimEvent& b) const noexcept
        {
            if (a.time != b.time)
            {
                return a.time > b.time;
            }
            return a.ordinal > b.ordinal;
        }
    };

    std::vector<SimEvent> m_heap;
    std::uint64_t m_next_ordinal{0};
    double m_now{0.0};
    Observer m_observer;
};

} // namespace corciar::engine
