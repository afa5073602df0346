#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "binclock/circuit.hpp"
#include "binclock/devices.hpp"
#include "binclock/trace.hpp"

namespace binclock {

struct SimConfig {
    SimTime gate_delay = 10ns;
    SimTime counter_delay = 20ns;
    SimTime t_end{};
    std::vector<std::string> watched; // empty: the circuit's own watch list
    std::size_t event_cap = 10'000;   // events allowed at one instant
};

class OscillationError : public std::runtime_error {
public:
    OscillationError(SimTime at, std::vector<std::string> nets)
        : std::runtime_error(describe(at, nets)), time_(at), nets_(std::move(nets))
    {
    }

    SimTime time() const noexcept { return time_; }
    const std::vector<std::string>& nets() const noexcept { return nets_; }

private:
    static std::string describe(SimTime at, const std::vector<std::string>& nets)
    {
        std::string s = "event storm at t=" + std::to_string(at.count()) + "ns on nets:";
        for (const auto& n : nets)
            s += " " + n;
        return s;
    }

    SimTime time_;
    std::vector<std::string> nets_;
};

struct EngineStats {
    std::uint64_t events = 0;
    std::uint64_t steps = 0;
    std::uint64_t evaluations = 0;
    std::uint64_t wakeups_cancelled = 0;
};

// Discrete-event kernel. Each step pops every queued entry at the earliest
// instant, applies them, resolves the touched nets (including diode-OR
// fan-out), then evaluates every affected device once in elaboration order.
// Device outputs are scheduled at now + delay; ties are FIFO by insertion.
// The circuit must outlive the engine.
class Engine {
public:
    Engine(const Circuit& circuit, SimConfig config) : circuit_(&circuit), config_(std::move(config))
    {
        if (config_.gate_delay.count() < 1 || config_.counter_delay.count() < 1)
            throw std::invalid_argument("gate and counter delays must be at least 1 ns");
        if (config_.event_cap == 0)
            throw std::invalid_argument("event cap must be positive");

        nets_.resize(circuit.nets.size());
        for (std::size_t i = 0; i < circuit.nets.size(); ++i)
            nets_[i].slots.assign(circuit.nets[i].slot_count(), Level::Unknown);

        channel_of_.assign(circuit.nets.size(), -1);
        if (config_.watched.empty()) {
            for (NetId id : circuit.watches)
                add_watch(id);
        } else {
            for (const auto& name : config_.watched)
                add_watch(circuit.net_id(name));
        }

        devices_.resize(circuit.devices.size());
        for (std::uint32_t d = 0; d < circuit.devices.size(); ++d) {
            const auto& dev = circuit.devices[d];
            auto& rt = devices_[d];
            rt.projected.assign(dev.pins.size(), Level::Unknown);
            switch (dev.kind) {
            case DeviceKind::Counter4:
                rt.counter.value = std::get<CounterConfig>(dev.config).init;
                for (int b = 0; b < 4; ++b)
                    drive(d, pins::kQ0 + b, rt.counter.q(b), SimTime{0});
                break;
            case DeviceKind::Button:
                drive(d, 0, detail::invert(std::get<ButtonDeviceConfig>(dev.config).bounce.closed_level), SimTime{0});
                break;
            case DeviceKind::ClockSource:
                push_wakeup(d, clock_transition_time(std::get<ClockSourceConfig>(dev.config).spec, 0));
                break;
            default: break;
            }
        }
    }

    /// Queues an external drive. Targets must be undriven nets, nets driven
    /// only by buttons, or wired-OR nets (which get an extra external slot).
    void inject(const Event& e)
    {
        if (e.time < now_ || e.time.count() < 0)
            throw std::invalid_argument("cannot inject an event in the past (t=" + std::to_string(e.time.count()) +
                                        "ns, now=" + std::to_string(now_.count()) + "ns)");
        if (e.net.index >= circuit_->nets.size())
            throw std::invalid_argument("inject: net index out of range");
        const NetInfo& net = circuit_->nets[e.net.index];
        if (net.resolution == Resolution::Single) {
            for (const auto& drv : net.drivers)
                if (circuit_->devices[drv.device].kind != DeviceKind::Button)
                    throw std::invalid_argument("inject: net '" + net.name + "' is driven by device '" +
                                                circuit_->devices[drv.device].name + "'");
        }
        push_net(e.net, -1, e.level, e.time);
    }

    /// Processes one delta step at the earliest pending instant.
    /// Returns false when nothing is pending.
    bool step()
    {
        if (queue_.empty())
            return false;
        const SimTime t = queue_.top().time;
        if (t != instant_) {
            instant_ = t;
            instant_events_ = 0;
            instant_nets_.clear();
        }
        now_ = t;
        woken_.clear();
        dirty_.clear();
        affected_.clear();

        while (!queue_.empty() && queue_.top().time == t) {
            Pending p = queue_.top();
            queue_.pop();
            ++stats_.events;
            ++instant_events_;
            if (p.wakeup) {
                if (p.generation == devices_[p.target].generation)
                    woken_.push_back(p.target);
            } else {
                apply(p);
            }
        }
        if (instant_events_ > config_.event_cap)
            throw_storm();

        propagate();

        affected_.insert(affected_.end(), woken_.begin(), woken_.end());
        std::sort(affected_.begin(), affected_.end());
        affected_.erase(std::unique(affected_.begin(), affected_.end()), affected_.end());
        std::sort(woken_.begin(), woken_.end());
        for (std::uint32_t d : affected_)
            evaluate(d, std::binary_search(woken_.begin(), woken_.end(), d));
        ++stats_.steps;
        return true;
    }

    /// Steps through every instant at or before `t_end`; later entries stay queued.
    void run_until(SimTime t_end)
    {
        while (!queue_.empty() && queue_.top().time <= t_end)
            step();
    }

    SimTime now() const noexcept { return now_; }

    std::optional<SimTime> next_time() const
    {
        if (queue_.empty())
            return std::nullopt;
        return queue_.top().time;
    }

    std::size_t pending() const noexcept { return queue_.size(); }

    Level level(NetId net) const { return nets_.at(net.index).level; }
    Level level(std::string_view name) const { return level(circuit_->net_id(name)); }

    const Trace& trace() const noexcept { return trace_; }
    Trace take_trace() { return std::move(trace_); }
    const EngineStats& stats() const noexcept { return stats_; }
    const SimConfig& config() const noexcept { return config_; }

    CounterHalf counter_state(std::uint32_t device) const { return devices_.at(device).counter; }

    SchmittRcState schmitt_state(std::uint32_t device) const
    {
        const auto& s = devices_.at(device).schmitt;
        return SchmittRcState{s.v, s.output, s.pending};
    }

private:
    struct Pending {
        SimTime time;
        std::uint64_t seq;
        std::uint32_t target; // net index, or device index for wakeups
        std::int32_t slot;    // driver slot; -1 for external drive
        std::uint32_t generation;
        Level level;
        bool wakeup;
    };

    struct Later {
        bool operator()(const Pending& a, const Pending& b) const noexcept
        {
            return std::tie(a.time, a.seq) > std::tie(b.time, b.seq);
        }
    };

    struct NetRt {
        Level level = Level::Unknown;
        Level single = Level::Unknown;
        std::vector<Level> slots;
        Level external = Level::Unknown;
        bool external_driven = false;
        bool dirty = false;
    };

    struct SchmittRt {
        double v = 0.0;
        SimTime v_time{};
        Level drive = Level::Unknown;
        Level output = Level::Unknown;
        std::optional<SimTime> pending;
    };

    struct DeviceRt {
        CounterHalf counter;
        SchmittRt schmitt;
        std::uint64_t clock_k = 0;
        std::uint32_t generation = 0;
        std::vector<Level> projected; // last level scheduled per output pin
    };

    void add_watch(NetId id)
    {
        channel_of_[id.index] = static_cast<int>(trace_.add_channel(id, circuit_->nets[id.index].name));
    }

    void push_net(NetId net, std::int32_t slot, Level level, SimTime when)
    {
        queue_.push(Pending{when, seq_++, net.index, slot, 0, level, false});
    }

    void push_wakeup(std::uint32_t device, SimTime when)
    {
        queue_.push(Pending{when, seq_++, device, 0, devices_[device].generation, Level::Unknown, true});
    }

    void drive(std::uint32_t device, int pin, Level level, SimTime when)
    {
        const auto& dev = circuit_->devices[device];
        if (!dev.pins[pin])
            return;
        auto& proj = devices_[device].projected[pin];
        if (proj == level)
            return;
        proj = level;
        push_net(*dev.pins[pin], static_cast<std::int32_t>(dev.slots[pin]), level, when);
    }

    void mark_dirty(std::uint32_t net)
    {
        if (!nets_[net].dirty) {
            nets_[net].dirty = true;
            dirty_.push_back(net);
        }
    }

    void apply(const Pending& p)
    {
        NetRt& net = nets_[p.target];
        if (circuit_->nets[p.target].resolution == Resolution::Single) {
            net.single = p.level;
        } else if (p.slot < 0) {
            net.external = p.level;
            net.external_driven = true;
        } else {
            net.slots[static_cast<std::size_t>(p.slot)] = p.level;
        }
        mark_dirty(p.target);
    }

    Level resolve(std::uint32_t idx) const
    {
        const NetRt& net = nets_[idx];
        if (circuit_->nets[idx].resolution == Resolution::Single)
            return net.single;
        if (net.slots.empty() && !net.external_driven)
            return Level::Unknown;
        bool unknown = false;
        for (Level l : net.slots) {
            if (l == Level::High)
                return Level::High;
            unknown |= l == Level::Unknown;
        }
        if (net.external_driven) {
            if (net.external == Level::High)
                return Level::High;
            unknown |= net.external == Level::Unknown;
        }
        return unknown ? Level::Unknown : Level::Low;
    }

    void propagate()
    {
        std::size_t iterations = 0;
        for (std::size_t i = 0; i < dirty_.size(); ++i) {
            const std::uint32_t idx = dirty_[i];
            nets_[idx].dirty = false;
            if (++iterations > config_.event_cap)
                throw_storm();
            const Level next = resolve(idx);
            if (next == nets_[idx].level)
                continue;
            nets_[idx].level = next;
            if (instant_nets_.size() < 64)
                instant_nets_.push_back(idx);
            if (channel_of_[idx] >= 0)
                trace_.record(static_cast<std::size_t>(channel_of_[idx]), now_, next);
            const NetInfo& info = circuit_->nets[idx];
            affected_.insert(affected_.end(), info.readers.begin(), info.readers.end());
            for (const auto& diode : info.diode_fanout) {
                nets_[diode.target.index].slots[diode.slot] = next;
                mark_dirty(diode.target.index);
            }
        }
    }

    [[noreturn]] void throw_storm() const
    {
        std::vector<std::string> names;
        for (auto idx : instant_nets_)
            names.push_back(circuit_->nets[idx].name);
        std::sort(names.begin(), names.end());
        names.erase(std::unique(names.begin(), names.end()), names.end());
        throw OscillationError(now_, std::move(names));
    }

    Level input(std::uint32_t device, int pin) const
    {
        const auto& p = circuit_->devices[device].pins[pin];
        return p ? nets_[p->index].level : Level::Unknown;
    }

    void evaluate(std::uint32_t d, bool woken)
    {
        ++stats_.evaluations;
        const DeviceInstance& dev = circuit_->devices[d];
        DeviceRt& rt = devices_[d];
        switch (dev.kind) {
        case DeviceKind::And2: {
            const auto& cfg = std::get<AndConfig>(dev.config);
            drive(d, pins::kY, and2_eval(input(d, pins::kA), input(d, pins::kB)),
                  now_ + cfg.delay.value_or(config_.gate_delay));
            break;
        }
        case DeviceKind::Counter4: {
            const auto& cfg = std::get<CounterConfig>(dev.config);
            const Level mr = dev.pins[pins::kMr] ? input(d, pins::kMr) : Level::Low;
            const CounterHalf next = counter_half_step(rt.counter, input(d, pins::kCp), mr);
            const bool changed = next.value != rt.counter.value;
            rt.counter = next;
            if (changed) {
                const SimTime when = now_ + cfg.delay.value_or(config_.counter_delay);
                for (int b = 0; b < 4; ++b)
                    drive(d, pins::kQ0 + b, next.q(b), when);
            }
            break;
        }
        case DeviceKind::Schmitt: evaluate_schmitt(d, woken); break;
        case DeviceKind::ClockSource: {
            if (!woken)
                break;
            const auto& spec = std::get<ClockSourceConfig>(dev.config).spec;
            drive(d, 0, clock_transition_level(rt.clock_k), now_);
            ++rt.clock_k;
            push_wakeup(d, clock_transition_time(spec, rt.clock_k));
            break;
        }
        case DeviceKind::Button:
        case DeviceKind::Led: break;
        }
    }

    void evaluate_schmitt(std::uint32_t d, bool woken)
    {
        const DeviceInstance& dev = circuit_->devices[d];
        const auto& cfg = std::get<SchmittConfig>(dev.config);
        const SchmittParams& p = cfg.params;
        DeviceRt& rt = devices_[d];
        SchmittRt& s = rt.schmitt;

        s.v = rc_relax(s.v, s.drive, now_ - s.v_time, p.tau);
        s.v_time = now_;
        if (woken) {
            // The wakeup instant is rounded up, so the node is at or past the
            // threshold; pin it there to keep the comparison exact.
            s.pending.reset();
            if (s.drive == Level::High)
                s.v = std::max(s.v, p.vt_hi);
            else if (s.drive == Level::Low)
                s.v = std::min(s.v, p.vt_lo);
        }

        const Level in = input(d, pins::kIn);
        if (in != s.drive) {
            s.drive = in;
            if (s.pending) {
                s.pending.reset();
                ++stats_.wakeups_cancelled;
            }
            ++rt.generation;
        }
        if (p.tau.count() == 0 && is_known(s.drive))
            s.v = s.drive == Level::High ? 1.0 : 0.0;

        const Level out = schmitt_output(s.output, s.v, p.vt_hi, p.vt_lo);
        if (out != s.output) {
            s.output = out;
            drive(d, pins::kOut, out, now_ + cfg.delay.value_or(config_.gate_delay));
        }

        if (s.pending || p.tau.count() == 0 || !is_known(s.drive))
            return;
        const bool flips = (s.drive == Level::High && s.output != Level::Low) ||
                           (s.drive == Level::Low && s.output != Level::High);
        if (!flips)
            return;
        if (auto dt = schmitt_crossing_time(SchmittRcState{s.v, s.output, {}}, s.drive, p.tau, p.vt_hi, p.vt_lo)) {
            s.pending = now_ + *dt;
            push_wakeup(d, *s.pending);
        }
    }

    const Circuit* circuit_;
    SimConfig config_;
    std::vector<NetRt> nets_;
    std::vector<DeviceRt> devices_;
    std::vector<int> channel_of_;
    Trace trace_;
    std::priority_queue<Pending, std::vector<Pending>, Later> queue_;
    std::uint64_t seq_ = 0;
    SimTime now_{0};
    SimTime instant_{-1};
    std::size_t instant_events_ = 0;
    std::vector<std::uint32_t> instant_nets_;
    std::vector<std::uint32_t> dirty_;
    std::vector<std::uint32_t> affected_;
    std::vector<std::uint32_t> woken_;
    EngineStats stats_;
};

/// One-shot simulation: injects the (time-sorted) stimuli and runs to
/// config.t_end.
inline Trace run(const Circuit& circuit, std::span<const Event> stimuli, const SimConfig& config)
{
    if (!std::is_sorted(stimuli.begin(), stimuli.end(),
                        [](const Event& a, const Event& b) { return a.time < b.time; }))
        throw std::invalid_argument("stimuli must be sorted by time");
    Engine engine(circuit, config);
    for (const auto& e : stimuli)
        engine.inject(e);
    engine.run_until(config.t_end);
    return engine.take_trace();
}

} // namespace binclock
