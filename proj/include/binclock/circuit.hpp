#pragma once

#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "binclock/devices.hpp"
#include "binclock/lint.hpp"
#include "binclock/netlist.hpp"

namespace binclock {

class NetlistError : public std::runtime_error {
public:
    explicit NetlistError(std::vector<Diagnostic> diags)
        : std::runtime_error(summary(diags)), diagnostics_(std::move(diags))
    {
    }

    const std::vector<Diagnostic>& diagnostics() const noexcept { return diagnostics_; }

private:
    static std::string summary(const std::vector<Diagnostic>& diags)
    {
        for (const auto& d : diags)
            if (d.severity == Severity::Error)
                return format_diagnostic(d);
        return "netlist error";
    }

    std::vector<Diagnostic> diagnostics_;
};

struct DriverRef {
    std::uint32_t device = 0;
    int pin = 0;
};

struct DiodeRef {
    NetId target{};
    std::uint32_t slot = 0;
};

struct NetInfo {
    std::string name;
    Resolution resolution = Resolution::Single;
    std::vector<DriverRef> drivers;     // output pins; driver slot i
    std::vector<NetId> diode_sources;   // slots drivers.size() + j
    std::vector<DiodeRef> diode_fanout; // or-nets this net feeds through a diode
    std::vector<std::uint32_t> readers; // devices with an input here, ascending

    std::size_t slot_count() const noexcept { return drivers.size() + diode_sources.size(); }
};

// Per-kind device parameters, already typed and defaulted.
struct CounterConfig {
    std::uint8_t init = 0;
    std::optional<SimTime> delay;
};
struct AndConfig {
    std::optional<SimTime> delay;
};
struct SchmittConfig {
    SchmittParams params;
    std::optional<SimTime> delay;
};
struct ButtonDeviceConfig {
    BounceSpec bounce;
};
struct ClockSourceConfig {
    ClockSourceSpec spec;
};
struct LedConfig {};

using DeviceConfig =
    std::variant<CounterConfig, AndConfig, SchmittConfig, ButtonDeviceConfig, ClockSourceConfig, LedConfig>;

struct DeviceInstance {
    std::string name;
    DeviceKind kind = DeviceKind::And2;
    std::vector<std::optional<NetId>> pins; // indexed like pins_of(kind)
    std::vector<std::uint32_t> slots;       // driver slot in the pin's net (outputs)
    DeviceConfig config;
};

// Elaborated, immutable connectivity graph. Device order is declaration
// order and fixes evaluation order inside a delta step.
struct Circuit {
    std::vector<NetInfo> nets;
    std::vector<DeviceInstance> devices;
    std::vector<NetId> watches;

    const NetInfo& net(NetId id) const { return nets.at(id.index); }

    std::optional<NetId> find_net(std::string_view name) const
    {
        for (std::size_t i = 0; i < nets.size(); ++i)
            if (nets[i].name == name)
                return NetId{static_cast<std::uint32_t>(i)};
        return std::nullopt;
    }

    std::optional<std::uint32_t> find_device(std::string_view name) const
    {
        for (std::size_t i = 0; i < devices.size(); ++i)
            if (devices[i].name == name)
                return static_cast<std::uint32_t>(i);
        return std::nullopt;
    }

    NetId net_id(std::string_view name) const
    {
        if (auto id = find_net(name))
            return *id;
        throw std::out_of_range("no net named '" + std::string(name) + "'");
    }
};

struct ElaborateOptions {
    bool skip_lint = false; // test harness only: allows structurally unsafe circuits
};

namespace detail {

inline std::optional<SimTime> delay_param(const ComponentDecl& c)
{
    if (!c.param("delay_ns"))
        return std::nullopt;
    return SimTime{c.integer("delay_ns", 0)};
}

inline DeviceConfig make_config(const ComponentDecl& c)
{
    switch (c.kind) {
    case DeviceKind::Counter4: return CounterConfig{static_cast<std::uint8_t>(c.integer("init", 0)), delay_param(c)};
    case DeviceKind::And2: return AndConfig{delay_param(c)};
    case DeviceKind::Schmitt: {
        SchmittParams p;
        p.tau = SimTime{static_cast<std::int64_t>(std::llround(c.number("tau_us", 4700.0) * 1e3))};
        p.vt_hi = c.number("vt_hi", 0.6);
        p.vt_lo = c.number("vt_lo", 0.4);
        return SchmittConfig{p, delay_param(c)};
    }
    case DeviceKind::Button: {
        BounceSpec b;
        b.n_bounces = static_cast<int>(c.integer("bounce_n", 0));
        b.bounce_window = SimTime{static_cast<std::int64_t>(std::llround(c.number("bounce_window_us", 2000.0) * 1e3))};
        b.seed = c.unsigned64("seed", 0);
        return ButtonDeviceConfig{b};
    }
    case DeviceKind::ClockSource:
        return ClockSourceConfig{ClockSourceSpec{c.number("freq_hz", 1.0), c.number("duty", 0.5)}};
    case DeviceKind::Led: return LedConfig{};
    }
    return LedConfig{};
}

} // namespace detail

/// Builds the circuit graph. Throws NetlistError if the netlist does not
/// validate or (unless skipped) if the linter reports errors; warnings pass.
inline Circuit elaborate(const Netlist& nl, ElaborateOptions opts = {})
{
    auto diags = validate_netlist(nl);
    if (!has_errors(diags) && !opts.skip_lint) {
        auto lint = lint_netlist(nl);
        diags.insert(diags.end(), lint.begin(), lint.end());
    }
    if (has_errors(diags))
        throw NetlistError(std::move(diags));

    Circuit c;
    std::map<std::string, std::uint32_t, std::less<>> dev_index;
    for (const auto& decl : nl.components) {
        DeviceInstance d;
        d.name = decl.name;
        d.kind = decl.kind;
        d.pins.assign(pins_of(decl.kind).size(), std::nullopt);
        d.slots.assign(pins_of(decl.kind).size(), 0);
        d.config = detail::make_config(decl);
        dev_index.emplace(decl.name, static_cast<std::uint32_t>(c.devices.size()));
        c.devices.push_back(std::move(d));
    }

    std::map<std::string, NetId, std::less<>> net_index;
    for (const auto& decl : nl.nets) {
        net_index.emplace(decl.name, NetId{static_cast<std::uint32_t>(c.nets.size())});
        c.nets.push_back(NetInfo{decl.name, decl.resolution, {}, {}, {}, {}});
    }

    for (std::size_t ni = 0; ni < nl.nets.size(); ++ni) {
        const NetId id{static_cast<std::uint32_t>(ni)};
        NetInfo& net = c.nets[ni];
        for (const auto& m : nl.nets[ni].members) {
            if (!m.is_pin())
                continue;
            const std::uint32_t di = dev_index.at(m.name);
            DeviceInstance& dev = c.devices[di];
            const int pi = *pin_index(dev.kind, m.pin);
            dev.pins[pi] = id;
            if (pins_of(dev.kind)[pi].dir == PinDir::Output) {
                dev.slots[pi] = static_cast<std::uint32_t>(net.drivers.size());
                net.drivers.push_back(DriverRef{di, pi});
            } else {
                net.readers.push_back(di);
            }
        }
        std::sort(net.readers.begin(), net.readers.end());
        net.readers.erase(std::unique(net.readers.begin(), net.readers.end()), net.readers.end());
    }
    for (std::size_t ni = 0; ni < nl.nets.size(); ++ni) {
        for (const auto& m : nl.nets[ni].members) {
            if (m.is_pin())
                continue;
            const NetId src = net_index.at(m.name);
            NetInfo& target = c.nets[ni];
            target.diode_sources.push_back(src);
            c.nets[src.index].diode_fanout.push_back(DiodeRef{NetId{static_cast<std::uint32_t>(ni)}, 0});
        }
    }
    // Diode slots follow the driver slots.
    for (std::size_t si = 0; si < c.nets.size(); ++si) {
        for (auto& ref : c.nets[si].diode_fanout) {
            const NetInfo& target = c.nets[ref.target.index];
            for (std::size_t j = 0; j < target.diode_sources.size(); ++j)
                if (target.diode_sources[j].index == si)
                    ref.slot = static_cast<std::uint32_t>(target.drivers.size() + j);
        }
    }

    for (const auto& w : nl.watches)
        c.watches.push_back(net_index.at(w.net));
    return c;
}

} // namespace binclock
