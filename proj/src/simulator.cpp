#include "corciar/simulator.hpp"

#include "corciar/channel_model.hpp"
#include "corciar/event_queue.hpp"
#include "corciar/mac.hpp"
#include "corciar/radio.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <set>

namespace corciar::engine
{

namespace
{

constexpr double kSifs = 10e-6;
constexpr double kDifs = 50e-6;
constexpr int kHelloBytes = 32;
constexpr int kTransportAckBytes = 40;
constexpr int kRreqBytes = 24;
constexpr double kRouteLifetime = 10.0;
constexpr double kDiscoveryRetry = 1.0;
constexpr int kDiscoveryAttempts = 3;
constexpr double kNoRouteHoldoff = 3.0;
constexpr int kHelloMissLimit = 3;
constexpr double kInitialRto = 1.0;
constexpr double kMinRto = 0.1;
constexpr double kMaxRto = 10.0;
constexpr int kTransportRetries = 7;
constexpr double kUnmeasuredLinkMs = 1000.0;
constexpr std::size_t kControlQueueCapacity = 64;

enum class PacketKind
{
    Data,
    TransportAck,
    Hello,
};

struct Packet
{
    PacketKind kind{PacketKind::Data};
    NodeId origin{0};
    NodeId target{0};
    NodeId hop_dst{0};
    std::uint32_t flow{0};
    std::uint64_t seq{0};
    int size_bytes{0};
    int ttl{0};
    double advertised_ms{routing::kUnreachable};
};

enum class RadioPhase
{
    Idle,
    Contending,
    WaitCts,
    WaitAck,
};

struct Radio
{
    int channel{1};
    mac::FrameQueue<Packet> data;
    mac::FrameQueue<Packet> control;
    mac::BackoffState backoff;
    RadioPhase phase{RadioPhase::Idle};
    bool serving_control{false};
    std::uint64_t timer_gen{0};
    std::uint64_t exchange{0};
    std::uint64_t mac_seq{0};
    std::uint64_t current_mac_seq{0};
    bool last_deferred{false};
    bool post_backoff{false};
    double tx_until{-1.0};
    double reserved_until{-1.0};
    double nav_until{-1.0};
    NodeId reserved_for{kNoNode};
    std::map<NodeId, std::uint64_t> last_delivered; // per-sender duplicate filter

    Radio(int ch, std::size_t capacity)
        : channel{ch},
          data{capacity},
          control{kControlQueueCapacity}
    {
    }

    mac::FrameQueue<Packet>& serving()
    {
        return serving_control ? control : data;
    }
};

struct Node
{
    NodeSpec spec;
    std::vector<Radio> radios;
    std::map<NodeId, int> radio_for; // neighbor -> radio index of the shared link
    routing::RouteTable routes;
    routing::NeighborTable neighbors;
    double potential{routing::kUnreachable};
    channel::PclTable pcl;
    std::uint64_t rreq_id{0};
};

enum class TxKind
{
    Rts,
    Cts,
    Payload,
    MacAck,
    Jam,
};

struct ActiveTx
{
    Transmission tx;
    TxKind kind{TxKind::Jam};
    int from_radio{-1};
    int to_radio{-1};
    std::uint64_t exchange{0};
    std::uint64_t mac_seq{0};
    int payload_bytes{0};
    bool collided{false};
    bool interfered{false};
    Packet packet;
};

enum class Loss
{
    None,
    Queue,
    Retry,
};

struct SeqState
{
    double first_send{0.0};
    int retx{0};
    bool received{false};
    bool done{false};
    bool abandoned{false};
    Loss last_loss{Loss::None};
    std::uint64_t rto_gen{0};
};

struct FlowState
{
    FlowSpec spec;
    std::uint32_t id{0};
    std::vector<SeqState> seqs;
    std::size_t outstanding{0};
    double rto{kInitialRto};
    routing::RttEstimator est;
    metrics::FlowStats stats;
    bool discovering{false};
    int attempts{0};
    std::vector<NodeId> path;
    std::vector<NodeId> last_path;
};

void
fnv_mix(std::uint64_t& h, const void* data, std::size_t n)
{
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i)
    {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
}

class Simulator
{
  public:
    Simulator(const ScenarioConfig& config, const Topology& topo, const PhaseOptions& options)
        : m_cfg{config},
          m_topo{topo},
          m_opt{options},
          m_rng{make_rng(config.seed, rng_stream::kMac)}
    {
        m_model.tx_range = config.tx_range_m;
        m_model.interference_range = config.interference_range_m;
        m_model.data_rate_bps = config.data_rate_bps;
        m_model.theta = config.theta;
        m_hello_timeout = kHelloMissLimit * config.hello_interval_s;

        const auto links = radio_links(topo, config.tx_range_m);
        m_nodes.reserve(topo.size());
        for (const auto& spec : topo.nodes)
        {
            Node n{spec, {}, {}, {}, routing::NeighborTable{config.delta}, routing::kUnreachable, {}, 0};
            for (int ch : spec.channels)
            {
                n.radios.emplace_back(ch, static_cast<std::size_t>(config.queue_capacity));
            }
            m_nodes.push_back(std::move(n));
        }
        for (std::size_t v = 0; v < links.size(); ++v)
        {
            auto& node = m_nodes[v];
            for (const auto& l : links[v])
            {
                for (std::size_t r = 0; r < node.radios.size(); ++r)
                {
                    if (node.radios[r].channel == l.channel)
                    {
                        node.radio_for.emplace(l.to, static_cast<int>(r));
                        break;
                    }
                }
            }
        }
        m_nodes[topo.gateway].potential = 0.0;

        if (options.seed_costs)
        {
            for (const auto& [link, cost] : *options.seed_costs)
            {
                if (link.first < m_nodes.size() && m_nodes[link.first].radio_for.count(link.second))
                {
                    m_nodes[link.first].neighbors.seed_link_cost(link.second, cost);
                }
            }
        }

        const auto specs = resolve_flows(config, topo);
        for (std::size_t i = 0; i < specs.size(); ++i)
        {
            FlowState f;
            f.spec = specs[i];
            f.id = static_cast<std::uint32_t>(i);
            f.est.delta = config.delta;
            m_flows.push_back(std::move(f));
        }

        m_queue.set_observer([this](const SimEvent& ev) { observe(ev); });
    }

    PhaseResult run()
    {
        const double end = m_cfg.sim_time_s;
        std::uniform_real_distribution<double> offset(0.0, m_cfg.hello_interval_s);
        for (auto& node : m_nodes)
        {
            const NodeId u = node.spec.id;
            const double t0 = offset(m_rng);
            m_queue.schedule(t0, EventAction::HelloTick, u, [this, u] { hello_tick(u); });
        }
        if (m_cfg.channel_plan.kind == ChannelPlan::Kind::Pcl)
        {
            for (auto& node : m_nodes)
            {
                const NodeId u = node.spec.id;
                m_queue.schedule(m_cfg.beacon_interval_s, EventAction::BeaconTick, u, [this, u] {
                    beacon_tick(u);
                });
            }
        }
        for (std::size_t i = 0; i < m_cfg.interferers.size(); ++i)
        {
            std::uniform_real_distribution<double> first(0.0, 1.0);
            const double t0 = first(m_rng);
            m_queue.schedule(t0, EventAction::TimerFire, kNoNode, [this, i] { jam_burst(i); });
        }
        for (auto& f : m_flows)
        {
            const std::uint32_t id = f.id;
            m_queue.schedule(m_cfg.flow_start_s, EventAction::FlowSendWindow, f.spec.src, [this, id] {
                send_window(m_flows[id]);
            });
        }
        m_queue.schedule(end, EventAction::SimEnd, kNoNode, {});
        m_queue.run_until(end);
        return collect();
    }

  private:
    // ---- tracing -------------------------------------------------------
    void observe(const SimEvent& ev)
    {
        ++m_counters.events;
        char line[96];
        const std::string_view action = to_string(ev.action);
        int len;
        if (ev.node == kNoNode)
        {
            len = std::snprintf(line, sizeof line, "%.9f - %.*s\n", ev.time,
                                static_cast<int>(action.size()), action.data());
        }
        else
        {
            len = std::snprintf(line, sizeof line, "%.9f %u %.*s\n", ev.time, ev.node,
                                static_cast<int>(action.size()), action.data());
        }
        fnv_mix(m_hash, line, static_cast<std::size_t>(len));
        if (m_opt.trace)
        {
            m_opt.trace->write(line, len);
        }
    }

    double now() const
    {
        return m_queue.now();
    }

    int draw_slots(int cw)
    {
        std::uniform_int_distribution<int> d(0, cw);
        return d(m_rng);
    }

    // ---- physical layer ------------------------------------------------
    std::uint64_t start_tx(NodeId from,
                           int from_radio,
                           TxKind kind,
                           std::optional<NodeId> to,
                           int to_radio,
                           int channel,
                           Position pos,
                           int size_bytes,
                           double duration)
    {
        ActiveTx a;
        a.kind = kind;
        a.from_radio = from_radio;
        a.to_radio = to_radio;
        a.tx.id = ++m_next_tx;
        a.tx.sender = from;
        a.tx.sender_pos = pos;
        a.tx.channel = channel;
        a.tx.start = now();
        a.tx.end = now() + (duration > 0.0 ? duration : m_model.airtime(size_bytes));
        a.tx.receiver = to;
        if (to)
        {
            a.tx.receiver_pos = m_nodes[*to].spec.pos;
            if (distance(pos, a.tx.receiver_pos) > m_model.tx_range)
            {
                ++m_counters.out_of_range_receptions;
            }
        }
        for (auto& [id, b] : m_active)
        {
            if (b.tx.end <= now())
            {
                continue;
            }
            if (b.tx.receiver && disturbs(a.tx, b.tx.receiver_pos, b.tx.channel, m_model))
            {
                (a.tx.channel == b.tx.channel ? b.collided : b.interfered) = true;
            }
            if (a.tx.receiver && disturbs(b.tx, a.tx.receiver_pos, a.tx.channel, m_model))
            {
                (a.tx.channel == b.tx.channel ? a.collided : a.interfered) = true;
            }
        }
        if (from != kNoNode && from_radio >= 0)
        {
            m_nodes[from].radios[from_radio].tx_until = a.tx.end;
        }
        const std::uint64_t id = a.tx.id;
        const double t_end = a.tx.end;
        const NodeId at = to ? *to : from;
        m_active.emplace(id, std::move(a));
        m_queue.schedule(t_end, EventAction::FrameArrival, at, [this, id] { tx_end(id); });
        return id;
    }

    /// Latest end of an ongoing transmission that disturbs channel at u.
    std::optional<double> medium_busy_until(NodeId u, int channel) const
    {
        std::optional<double> until;
        const Position pos = m_nodes[u].spec.pos;
        for (const auto& [id, b] : m_active)
        {
            if (b.tx.end <= now())
            {
                continue;
            }
            if (disturbs(b.tx, pos, channel, m_model))
            {
                until = std::max(until.value_or(b.tx.end), b.tx.end);
            }
        }
        return until;
    }

    /// Channels in use around v, other than the radio that received the RTS.
    std::vector<channel::ChannelId> active_channels_at(NodeId v, int rx_radio) const
    {
        std::set<int> chans;
        const Node& node = m_nodes[v];
        for (std::size_t k = 0; k < node.radios.size(); ++k)
        {
            if (static_cast<int>(k) == rx_radio)
            {
                continue;
            }
            const Radio& r = node.radios[k];
            if (r.phase == RadioPhase::WaitCts || r.phase == RadioPhase::WaitAck ||
                r.reserved_until > now() || r.tx_until > now())
            {
                chans.insert(r.channel);
            }
        }
        for (const auto& [id, b] : m_active)
        {
            if (b.tx.end <= now())
            {
                continue;
            }
            if (distance(b.tx.sender_pos, node.spec.pos) <= m_model.interference_range)
            {
                chans.insert(b.tx.channel);
            }
        }
        std::vector<channel::ChannelId> out;
        for (int c : chans)
        {
            out.emplace_back(c);
        }
        return out;
    }

    // ---- MAC -------------------------------------------------------------
    double payload_airtime(const Packet& p) const
    {
        return m_model.airtime(p.size_bytes);
    }

    void schedule_access(NodeId u, int r, double delay)
    {
        Radio& R = m_nodes[u].radios[r];
        const std::uint64_t gen = ++R.timer_gen;
        m_queue.schedule(now() + delay, EventAction::TimerFire, u, [this, u, r, gen] {
            attempt_access(u, r, gen);
        });
    }

    void serve_next(NodeId u, int r)
    {
        Radio& R = m_nodes[u].radios[r];
        if (R.phase != RadioPhase::Idle || (R.control.empty() && R.data.empty()))
        {
            return;
        }
        R.serving_control = !R.control.empty();
        R.current_mac_seq = ++R.mac_seq;
        R.phase = RadioPhase::Contending;
        double delay = kDifs;
        if (R.post_backoff)
        {
            delay += draw_slots(R.backoff.cw) * m_backoff.slot_time;
            R.post_backoff = false;
        }
        schedule_access(u, r, delay);
    }

    void attempt_access(NodeId u, int r, std::uint64_t gen)
    {
        Node& node = m_nodes[u];
        Radio& R = node.radios[r];
        if (R.timer_gen != gen || R.phase != RadioPhase::Contending)
        {
            return;
        }
        double wait_until = now();
        if (R.reserved_until > now())
        {
            wait_until = R.reserved_until;
        }
        if (R.tx_until > now())
        {
            wait_until = std::max(wait_until, R.tx_until);
        }
        if (R.nav_until > now())
        {
            wait_until = std::max(wait_until, R.nav_until);
        }
        if (auto busy = medium_busy_until(u, R.channel))
        {
            wait_until = std::max(wait_until, *busy);
        }
        if (wait_until > now())
        {
            const int slots = draw_slots(R.backoff.cw);
            schedule_access(u, r, wait_until - now() + kDifs + slots * m_backoff.slot_time);
            return;
        }
        const Packet& p = R.serving().head().payload;
        const NodeId v = p.hop_dst;
        const auto it = m_nodes[v].radio_for.find(u);
        const int rv = it == m_nodes[v].radio_for.end() ? -1 : it->second;
        ++R.exchange;
        R.last_deferred = false;
        R.phase = RadioPhase::WaitCts;
        ++m_counters.rts_sent;
        const std::uint64_t txid =
            start_tx(u, r, TxKind::Rts, v, rv, R.channel, node.spec.pos, mac::kRtsBytes, 0.0);
        auto& a = m_active.at(txid);
        a.exchange = R.exchange;
        a.payload_bytes = p.size_bytes;
        const double timeout = a.tx.end + kSifs + m_model.airtime(mac::kCtsBytes) + m_backoff.slot_time;
        const std::uint64_t tgen = ++R.timer_gen;
        m_queue.schedule(timeout, EventAction::TimerFire, u, [this, u, r, tgen] { timeout_fired(u, r, tgen); });
    }

    void tx_end(std::uint64_t id)
    {
        auto node_handle = m_active.extract(id);
        ActiveTx a = std::move(node_handle.mapped());
        if (a.tx.receiver && (a.collided || a.interfered))
        {
            if (a.collided)
            {
                ++m_counters.collisions;
            }
            else
            {
                ++m_counters.interference_corruptions;
            }
        }
        const bool ok = a.tx.receiver && !a.collided && !a.interfered && a.to_radio >= 0;
        if (a.kind == TxKind::Rts || a.kind == TxKind::Cts)
        {
            set_nav(a);
        }
        switch (a.kind)
        {
        case TxKind::Jam:
            return;
        case TxKind::Rts:
            if (ok)
            {
                on_rts(a);
            }
            return;
        case TxKind::Cts:
            if (ok)
            {
                on_cts(a);
            }
            return;
        case TxKind::Payload:
            if (ok)
            {
                on_payload(a);
            }
            return;
        case TxKind::MacAck:
            if (ok)
            {
                on_mac_ack(a);
            }
            return;
        }
    }

    /// Radios that overhear an RTS or CTS on their channel defer until the exchange ends.
    void set_nav(const ActiveTx& a)
    {
        const double data_air = m_model.airtime(a.payload_bytes);
        const double ack_air = m_model.airtime(mac::kAckBytes);
        double until = now() + kSifs + data_air + kSifs + ack_air;
        if (a.kind == TxKind::Rts)
        {
            until += kSifs + m_model.airtime(mac::kCtsBytes);
        }
        for (auto& node : m_nodes)
        {
            if (distance(node.spec.pos, a.tx.sender_pos) > m_model.tx_range)
            {
                continue;
            }
            for (std::size_t k = 0; k < node.radios.size(); ++k)
            {
                Radio& R = node.radios[k];
                if (R.channel != a.tx.channel || (node.spec.id == a.tx.sender && static_cast<int>(k) == a.from_radio) ||
                    (a.tx.receiver && node.spec.id == *a.tx.receiver && static_cast<int>(k) == a.to_radio))
                {
                    continue;
                }
                R.nav_until = std::max(R.nav_until, until);
            }
        }
    }

    void on_rts(const ActiveTx& a)
    {
        const NodeId u = a.tx.sender;
        const NodeId v = *a.tx.receiver;
        const int rv = a.to_radio;
        Radio& Rv = m_nodes[v].radios[rv];
        if (Rv.phase == RadioPhase::WaitCts || Rv.phase == RadioPhase::WaitAck || Rv.tx_until > now() ||
            Rv.nav_until > now() || (Rv.reserved_until > now() && Rv.reserved_for != u))
        {
            return;
        }
        auto decision = mac::CtsDecision::SendCts;
        if (!m_opt.naive_mac)
        {
            const auto locals = active_channels_at(v, rv);
            decision = mac::handle_rts(m_cfg.traffic_class, channel::ChannelId{a.tx.channel}, locals, m_cfg.rts_mode);
        }
        if (decision == mac::CtsDecision::Defer)
        {
            ++m_counters.cts_deferrals;
            Radio& Ru = m_nodes[u].radios[a.from_radio];
            if (Ru.phase == RadioPhase::WaitCts && Ru.exchange == a.exchange)
            {
                Ru.last_deferred = true;
            }
            return;
        }
        const double cts_air = m_model.airtime(mac::kCtsBytes);
        const double data_air = m_model.airtime(a.payload_bytes);
        const double ack_air = m_model.airtime(mac::kAckBytes);
        Rv.reserved_until = now() + kSifs + cts_air + kSifs + data_air + kSifs + ack_air + m_backoff.slot_time;
        Rv.reserved_for = u;
        const int ru = a.from_radio;
        const std::uint64_t exchange = a.exchange;
        const int payload = a.payload_bytes;
        m_queue.schedule(now() + kSifs, EventAction::TimerFire, v, [this, u, v, ru, rv, exchange, payload] {
            Radio& R = m_nodes[v].radios[rv];
            ++m_counters.cts_sent;
            const auto txid = start_tx(v, rv, TxKind::Cts, u, ru, R.channel, m_nodes[v].spec.pos,
                                       mac::kCtsBytes, 0.0);
            auto& c = m_active.at(txid);
            c.exchange = exchange;
            c.payload_bytes = payload;
        });
    }

    void on_cts(const ActiveTx& a)
    {
        const NodeId u = *a.tx.receiver;
        const int r = a.to_radio;
        Radio& R = m_nodes[u].radios[r];
        if (R.phase != RadioPhase::WaitCts || R.exchange != a.exchange)
        {
            return;
        }
        ++R.timer_gen;
        const std::uint64_t exchange = a.exchange;
        const NodeId v = a.tx.sender;
        const int rv = a.from_radio;
        m_queue.schedule(now() + kSifs, EventAction::TimerFire, u, [this, u, r, v, rv, exchange] {
            Radio& R = m_nodes[u].radios[r];
            if (R.phase != RadioPhase::WaitCts || R.exchange != exchange)
            {
                return;
            }
            auto& entry = R.serving().head();
            mac::release_to_medium(entry.ts, now());
            R.phase = RadioPhase::WaitAck;
            ++m_counters.payload_sent;
            const auto txid = start_tx(u, r, TxKind::Payload, v, rv, R.channel, m_nodes[u].spec.pos,
                                       entry.payload.size_bytes, 0.0);
            auto& d = m_active.at(txid);
            d.exchange = exchange;
            d.mac_seq = R.current_mac_seq;
            d.packet = entry.payload;
            const double timeout =
                d.tx.end + kSifs + m_model.airtime(mac::kAckBytes) + m_backoff.slot_time;
            const std::uint64_t tgen = ++R.timer_gen;
            m_queue.schedule(timeout, EventAction::TimerFire, u, [this, u, r, tgen] {
                timeout_fired(u, r, tgen);
            });
        });
    }

    void on_payload(const ActiveTx& a)
    {
        const NodeId u = a.tx.sender;
        const NodeId v = *a.tx.receiver;
        const int rv = a.to_radio;
        const int ru = a.from_radio;
        const std::uint64_t exchange = a.exchange;
        m_queue.schedule(now() + kSifs, EventAction::TimerFire, v, [this, u, v, ru, rv, exchange] {
            Radio& R = m_nodes[v].radios[rv];
            const auto txid = start_tx(v, rv, TxKind::MacAck, u, ru, R.channel, m_nodes[v].spec.pos,
                                       mac::kAckBytes, 0.0);
            m_active.at(txid).exchange = exchange;
        });
        Radio& Rv = m_nodes[v].radios[rv];
        auto [it, fresh] = Rv.last_delivered.try_emplace(u, a.mac_seq);
        if (!fresh)
        {
            if (it->second == a.mac_seq)
            {
                return;
            }
            it->second = a.mac_seq;
        }
        deliver(v, u, a.packet);
    }

    void on_mac_ack(const ActiveTx& a)
    {
        const NodeId u = *a.tx.receiver;
        const int r = a.to_radio;
        Radio& R = m_nodes[u].radios[r];
        if (R.phase != RadioPhase::WaitAck || R.exchange != a.exchange)
        {
            return;
        }
        ++R.timer_gen;
        auto entry = R.serving().pop(now());
        R.phase = RadioPhase::Idle;
        R.backoff = mac::BackoffState{m_backoff.cw_min, 0};
        R.post_backoff = true;
        if (entry.payload.kind == PacketKind::Hello)
        {
            const double sample_ms =
                (2.0 * mac::weighted_hop_cost(entry.ts, m_cfg.alpha) + (now() - entry.ts.t_next)) * 1000.0;
            m_nodes[u].neighbors.record_link_sample(entry.payload.hop_dst, sample_ms);
        }
        serve_next(u, r);
    }

    void timeout_fired(NodeId u, int r, std::uint64_t gen)
    {
        Radio& R = m_nodes[u].radios[r];
        if (R.timer_gen != gen || (R.phase != RadioPhase::WaitCts && R.phase != RadioPhase::WaitAck))
        {
            return;
        }
        const auto outcome = R.last_deferred ? mac::AccessOutcome::Deferred : mac::AccessOutcome::Busy;
        const auto step = mac::backoff_next(R.backoff, outcome, m_backoff, m_rng);
        R.backoff = step.state;
        if (!step.discard)
        {
            R.phase = RadioPhase::Contending;
            schedule_access(u, r, kDifs + step.wait_slots * m_backoff.slot_time);
            return;
        }
        ++m_counters.mac_failures;
        auto entry = R.serving().pop(now());
        R.phase = RadioPhase::Idle;
        R.backoff = mac::BackoffState{m_backoff.cw_min, 0};
        const Packet& p = entry.payload;
        if (p.kind == PacketKind::Hello)
        {
            m_nodes[u].neighbors.record_link_sample(p.hop_dst, routing::rtt_sample(entry.ts.t_i, now()));
        }
        else
        {
            note_loss(p, Loss::Retry);
            link_break(u, p.hop_dst);
        }
        serve_next(u, r);
    }

    // ---- network layer -------------------------------------------------
    bool enqueue(NodeId u, NodeId next, Packet p, bool control)
    {
        Node& node = m_nodes[u];
        const auto it = node.radio_for.find(next);
        if (it == node.radio_for.end())
        {
            ++m_counters.route_drops;
            note_loss(p, Loss::Retry);
            return false;
        }
        const int r = it->second;
        Radio& R = node.radios[r];
        p.hop_dst = next;
        auto& q = control ? R.control : R.data;
        const bool was_empty = q.empty();
        const PacketKind kind = p.kind;
        Packet copy = p;
        if (q.enqueue(std::move(p), now()) == mac::EnqueueResult::DroppedQueueFull)
        {
            if (kind != PacketKind::Hello)
            {
                ++m_counters.queue_drops;
                note_loss(copy, Loss::Queue);
            }
            return false;
        }
        (void)was_empty;
        serve_next(u, r);
        return true;
    }

    void note_loss(const Packet& p, Loss loss)
    {
        if (p.kind != PacketKind::Data || p.flow >= m_flows.size())
        {
            return;
        }
        auto& f = m_flows[p.flow];
        if (p.seq < f.seqs.size())
        {
            f.seqs[p.seq].last_loss = loss;
        }
    }

    void deliver(NodeId v, NodeId from, const Packet& p)
    {
        if (p.kind == PacketKind::Hello)
        {
            ++m_counters.hellos_delivered;
            m_nodes[v].neighbors.process_hello(from, p.advertised_ms, now());
            return;
        }
        if (p.target == v)
        {
            if (p.kind == PacketKind::TransportAck)
            {
                on_source_ack(p);
            }
            else
            {
                on_gateway_data(v, p);
            }
            return;
        }
        forward(v, p);
    }

    /// Route error: the originator's route to target is dropped so it rediscovers.
    void route_error(NodeId origin, NodeId target)
    {
        m_nodes[origin].routes.erase(target);
        for (auto& f : m_flows)
        {
            if ((f.spec.src == origin && f.spec.dst == target) || (f.spec.dst == origin && f.spec.src == target))
            {
                f.path.clear();
            }
        }
    }

    void forward(NodeId v, Packet p)
    {
        auto& routes = m_nodes[v].routes;
        const auto* entry = routes.lookup(p.target, now());
        if (!entry || p.ttl <= 0)
        {
            ++m_counters.route_drops;
            note_loss(p, Loss::Retry);
            route_error(p.origin, p.target);
            return;
        }
        const NodeId next = entry->next_hop;
        routes.refresh(p.target, now(), kRouteLifetime);
        --p.ttl;
        enqueue(v, next, p, false);
    }

    void link_break(NodeId u, NodeId v)
    {
        m_nodes[u].routes.invalidate_via(v);
        for (auto& f : m_flows)
        {
            for (std::size_t i = 0; i + 1 < f.path.size(); ++i)
            {
                if ((f.path[i] == u && f.path[i + 1] == v) || (f.path[i] == v && f.path[i + 1] == u))
                {
                    f.path.clear();
                    break;
                }
            }
        }
    }

    void hello_tick(NodeId u)
    {
        Node& node = m_nodes[u];
        for (NodeId gone : node.neighbors.expire(now(), m_hello_timeout))
        {
            link_break(u, gone);
        }
        if (u != m_topo.gateway)
        {
            const auto recs = node.neighbors.records();
            node.potential = routing::cumulative_rtt(u, m_topo.gateway, recs, now(), m_hello_timeout);
        }
        for (const auto& [w, r] : node.radio_for)
        {
            Packet p;
            p.kind = PacketKind::Hello;
            p.origin = u;
            p.target = w;
            p.size_bytes = kHelloBytes;
            p.advertised_ms = node.potential;
            enqueue(u, w, p, true);
        }
        m_queue.schedule(now() + m_cfg.hello_interval_s, EventAction::HelloTick, u, [this, u] { hello_tick(u); });
    }

    void beacon_tick(NodeId u)
    {
        Node& node = m_nodes[u];
        node.pcl.apply(channel::ChannelObservation::rollover());
        node.pcl.apply(channel::ChannelObservation::self_selected(channel::ChannelId{node.radios.front().channel}));
        for (const auto& [w, r] : node.radio_for)
        {
            for (const auto& rw : m_nodes[w].radios)
            {
                if (rw.channel != node.radios.front().channel)
                {
                    node.pcl.apply(channel::ChannelObservation::neighbor_took(channel::ChannelId{rw.channel}));
                }
            }
        }
        m_queue.schedule(now() + m_cfg.beacon_interval_s, EventAction::BeaconTick, u, [this, u] { beacon_tick(u); });
    }

    void jam_burst(std::size_t i)
    {
        const auto& jam = m_cfg.interferers[i];
        start_tx(kNoNode, -1, TxKind::Jam, std::nullopt, -1, jam.channel, Position{jam.x, jam.y}, 0, jam.burst_s);
        double gap = 0.0;
        if (jam.duty < 1.0)
        {
            const double mean_off = jam.burst_s * (1.0 - jam.duty) / jam.duty;
            std::exponential_distribution<double> off(1.0 / mean_off);
            gap = off(m_rng);
        }
        m_queue.schedule(now() + jam.burst_s + gap, EventAction::TimerFire, kNoNode, [this, i] { jam_burst(i); });
    }

    // ---- route discovery (control plane) -------------------------------
    routing::LinkGraph usable_graph() const
    {
        routing::LinkGraph g(m_nodes.size());
        for (const auto& node : m_nodes)
        {
            const NodeId u = node.spec.id;
            for (const auto& [w, r] : node.radio_for)
            {
                if (!node.neighbors.active(w, now(), m_hello_timeout) ||
                    !m_nodes[w].neighbors.active(u, now(), m_hello_timeout))
                {
                    continue;
                }
                double cost = kUnmeasuredLinkMs;
                if (const auto* rec = node.neighbors.find(w); rec && rec->link_estimator.seeded)
                {
                    cost = rec->link_estimator.average_rtt_ms;
                }
                g.add_link(u, w, cost);
            }
        }
        return g;
    }

    void discover(FlowState& f)
    {
        if (f.discovering)
        {
            return;
        }
        f.discovering = true;
        const std::uint32_t id = f.id;
        Node& src = m_nodes[f.spec.src];
        ++m_counters.route_discoveries;
        const auto route =
            routing::aodv_discover(usable_graph(), f.spec.src, f.spec.dst, m_opt.metric, ++src.rreq_id);
        if (route)
        {
            const double hop = kDifs + m_model.airtime(kRreqBytes);
            const double latency = 2.0 * static_cast<double>(route->path.size() - 1) * hop;
            auto found = *route;
            m_queue.schedule(now() + latency, EventAction::TimerFire, f.spec.src, [this, id, found] {
                auto& fl = m_flows[id];
                install(fl, found);
                fl.discovering = false;
                fl.attempts = 0;
                send_window(fl);
            });
            return;
        }
        ++f.attempts;
        double retry = kDiscoveryRetry;
        if (f.attempts >= kDiscoveryAttempts)
        {
            ++m_counters.no_route;
            f.attempts = 0;
            retry = kNoRouteHoldoff;
        }
        m_queue.schedule(now() + retry, EventAction::FlowSendWindow, f.spec.src, [this, id] {
            auto& fl = m_flows[id];
            fl.discovering = false;
            send_window(fl);
        });
    }

    double link_cost(NodeId a, NodeId b) const
    {
        const auto* rec = m_nodes[a].neighbors.find(b);
        return rec && rec->link_estimator.seeded ? rec->link_estimator.average_rtt_ms : kUnmeasuredLinkMs;
    }

    void install(FlowState& f, const routing::DiscoveredRoute& route)
    {
        const auto& path = route.path;
        const std::size_t n = path.size();
        std::vector<double> suffix(n, 0.0);
        for (std::size_t i = n - 1; i-- > 0;)
        {
            suffix[i] = suffix[i + 1] + link_cost(path[i], path[i + 1]);
        }
        std::vector<double> prefix(n, 0.0);
        for (std::size_t i = 1; i < n; ++i)
        {
            prefix[i] = prefix[i - 1] + link_cost(path[i], path[i - 1]);
        }
        const double expires = now() + kRouteLifetime;
        for (std::size_t i = 0; i < n; ++i)
        {
            auto& routes = m_nodes[path[i]].routes;
            if (i + 1 < n)
            {
                routes.install(routing::RouteEntry{path.back(), path[i + 1], static_cast<int>(n - 1 - i),
                                                   suffix[i], route.rreq_id, expires});
            }
            if (i > 0)
            {
                routes.install(routing::RouteEntry{path.front(), path[i - 1], static_cast<int>(i), prefix[i],
                                                   route.rreq_id, expires});
            }
        }
        f.path = path;
        f.last_path = path;
    }

    // ---- transport -----------------------------------------------------
    void send_window(FlowState& f)
    {
        if (!m_nodes[f.spec.src].routes.lookup(f.spec.dst, now()))
        {
            discover(f);
            return;
        }
        while (f.outstanding < static_cast<std::size_t>(m_cfg.window))
        {
            const std::uint64_t seq = f.seqs.size();
            SeqState s;
            s.first_send = now();
            f.seqs.push_back(s);
            ++f.stats.packets_sent;
            ++f.outstanding;
            send_copy(f, seq);
        }
    }

    void send_copy(FlowState& f, std::uint64_t seq)
    {
        auto& s = f.seqs[seq];
        const std::uint64_t gen = ++s.rto_gen;
        const std::uint32_t id = f.id;
        const double timeout = std::min(std::ldexp(f.rto, s.retx), kMaxRto);
        m_queue.schedule(now() + timeout, EventAction::RtoExpiry, f.spec.src, [this, id, seq, gen] {
            rto_expired(id, seq, gen);
        });
        auto& routes = m_nodes[f.spec.src].routes;
        const auto* entry = routes.lookup(f.spec.dst, now());
        Packet p;
        p.kind = PacketKind::Data;
        p.origin = f.spec.src;
        p.target = f.spec.dst;
        p.flow = f.id;
        p.seq = seq;
        p.size_bytes = m_cfg.packet_size_bytes;
        p.ttl = static_cast<int>(m_nodes.size());
        if (!entry)
        {
            s.last_loss = Loss::Retry;
            discover(f);
            return;
        }
        const NodeId next = entry->next_hop;
        routes.refresh(f.spec.dst, now(), kRouteLifetime);
        enqueue(f.spec.src, next, p, false);
    }

    void rto_expired(std::uint32_t id, std::uint64_t seq, std::uint64_t gen)
    {
        auto& f = m_flows[id];
        auto& s = f.seqs[seq];
        if (s.done || s.rto_gen != gen)
        {
            return;
        }
        if (s.retx >= kTransportRetries)
        {
            s.done = true;
            s.abandoned = true;
            --f.outstanding;
            if (!s.received)
            {
                if (s.last_loss == Loss::Queue)
                {
                    ++f.stats.drops_queue;
                }
                else
                {
                    ++f.stats.drops_retry;
                }
            }
            send_window(f);
            return;
        }
        ++s.retx;
        ++m_counters.transport_retransmissions;
        send_copy(f, seq);
    }

    void on_gateway_data(NodeId v, const Packet& p)
    {
        auto& f = m_flows[p.flow];
        auto& s = f.seqs[p.seq];
        if (s.abandoned)
        {
            return;
        }
        if (!s.received)
        {
            s.received = true;
            ++f.stats.packets_received_at_gateway;
            f.stats.bytes_received += static_cast<std::uint64_t>(p.size_bytes);
            f.stats.e2e_delays_ms.push_back(routing::rtt_sample(s.first_send, now()));
        }
        auto& routes = m_nodes[v].routes;
        const auto* entry = routes.lookup(p.origin, now());
        if (!entry)
        {
            ++m_counters.route_drops;
            route_error(p.origin, v);
            return;
        }
        Packet ack;
        ack.kind = PacketKind::TransportAck;
        ack.origin = v;
        ack.target = p.origin;
        ack.flow = p.flow;
        ack.seq = p.seq;
        ack.size_bytes = kTransportAckBytes;
        ack.ttl = static_cast<int>(m_nodes.size());
        const NodeId next = entry->next_hop;
        routes.refresh(p.origin, now(), kRouteLifetime);
        enqueue(v, next, ack, false);
    }

    void on_source_ack(const Packet& p)
    {
        auto& f = m_flows[p.flow];
        auto& s = f.seqs[p.seq];
        if (s.done)
        {
            return;
        }
        s.done = true;
        --f.outstanding;
        if (s.retx == 0)
        {
            const double sample = routing::rtt_sample(s.first_send, now());
            f.stats.rtt_samples_ms.push_back(sample);
            f.est = routing::update_average_rtt(f.est, sample);
            f.rto = std::clamp(2.0 * f.est.average_rtt_ms / 1000.0, kMinRto, kMaxRto);
        }
        send_window(f);
    }

    // ---- results -------------------------------------------------------
    PhaseResult collect()
    {
        PhaseResult res;
        res.protocol_label = m_opt.label;
        res.metric = m_opt.metric;
        res.n_nodes = m_nodes.size();
        std::vector<metrics::FlowStats> stats;
        for (auto& f : m_flows)
        {
            std::uint64_t in_flight = 0;
            for (const auto& s : f.seqs)
            {
                if (!s.done && !s.received)
                {
                    ++in_flight;
                }
            }
            f.stats.in_flight_at_end = in_flight;
            stats.push_back(f.stats);
            res.flows.push_back(FlowOutcome{f.spec, f.stats, f.last_path});
        }
        if (!m_flows.empty() && !m_flows.front().last_path.empty())
        {
            res.n_hops = static_cast<int>(m_flows.front().last_path.size()) - 1;
        }
        if (m_cfg.sim_time_s > 0.0)
        {
            res.summary = metrics::summarize(stats, m_cfg.sim_time_s, m_opt.label);
        }
        else
        {
            res.summary.protocol_label = m_opt.label;
        }
        res.potential.gateway = m_topo.gateway;
        for (const auto& node : m_nodes)
        {
            const NodeId u = node.spec.id;
            res.potential.value_by_node[u] = node.potential;
            for (const auto& rec : node.neighbors.records())
            {
                if (rec.link_estimator.seeded)
                {
                    res.link_costs[{u, rec.neighbor}] = rec.link_estimator.average_rtt_ms;
                }
            }
            for (const auto& [dst, entry] : node.routes.entries())
            {
                res.routes.push_back(RouteDumpRow{u, entry});
            }
        }
        res.counters = m_counters;
        res.trace_hash = m_hash;
        return res;
    }

    const ScenarioConfig& m_cfg;
    const Topology& m_topo;
    const PhaseOptions& m_opt;
    Rng m_rng;
    RadioModel m_model;
    mac::BackoffParams m_backoff;
    double m_hello_timeout{3.0};
    EventQueue m_queue;
    std::vector<Node> m_nodes;
    std::vector<FlowState> m_flows;
    std::map<std::uint64_t, ActiveTx> m_active;
    std::uint64_t m_next_tx{0};
    EngineCounters m_counters;
    std::uint64_t m_hash{0xcbf29ce484222325ULL};
};

} // namespace

PhaseResult
simulate(const ScenarioConfig& config, const Topology& topo, const PhaseOptions& options)
{
    Simulator sim(config, topo, options);
    return sim.run();
}

} // namespace corciar::engine
