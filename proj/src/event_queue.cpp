#include "corciar/event_queue.hpp"

#include <algorithm>
#include <sstream>

namespace corciar::engine
{

std::string_view
to_string(EventAction a) noexcept
{
    switch (a)
    {
    case EventAction::FrameArrival:
        return "FrameArrival";
    case EventAction::TimerFire:
        return "TimerFire";
    case EventAction::HelloTick:
        return "HelloTick";
    case EventAction::BeaconTick:
        return "BeaconTick";
    case EventAction::FlowSendWindow:
        return "FlowSendWindow";
    case EventAction::RtoExpiry:
        return "RtoExpiry";
    case EventAction::SimEnd:
        return "SimEnd";
    }
    return "?";
}

void
EventQueue::schedule(double time, EventAction action, NodeId node, std::function<void()> handler)
{
    if (time < m_now)
    {
        std::ostringstream os;
        os << "event " << to_string(action) << " scheduled at " << time << " before now " << m_now;
        throw SimulationFault(os.str());
    }
    m_heap.push_back(SimEvent{time, m_next_ordinal++, action, node, std::move(handler)});
    std::push_heap(m_heap.begin(), m_heap.end(), Later{});
}

std::uint64_t
EventQueue::run_until(double t_end)
{
    if (t_end < m_now)
    {
        throw SimulationFault("run_until target lies in the past");
    }
    std::uint64_t dispatched = 0;
    while (!m_heap.empty() && m_heap.front().time <= t_end)
    {
        std::pop_heap(m_heap.begin(), m_heap.end(), Later{});
        SimEvent ev = std::move(m_heap.back());
        m_heap.pop_back();
        m_now = ev.time;
        if (m_observer)
        {
            m_observer(ev);
        }
        ++dispatched;
        if (ev.handler)
        {
            ev.handler();
        }
    }
    m_now = t_end;
    return dispatched;
}

} // namespace corciar::engine
