#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "binclock/netlist.hpp"

namespace binclock {

namespace detail {

// A Schmitt stage without an RC network has no memory of its own.
inline bool is_combinational(const ComponentDecl& c)
{
    return c.kind == DeviceKind::And2 || (c.kind == DeviceKind::Schmitt && c.number("tau_us", 4700.0) == 0.0);
}

inline std::string join(const std::vector<std::string>& parts)
{
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i)
            out += ", ";
        out += parts[i];
    }
    return out;
}

} // namespace detail

/// Electrical rule check over a netlist that validates cleanly:
///  - multiple-drivers (error): more than one output pin on a single net
///  - floating-input (error): a required input pin left unconnected
///  - unconnected-reset (warning): a counter whose mr pin is unconnected
///  - combinational-cycle (error): a loop of nets closed only through
///    and2 gates, RC-less Schmitt stages and diodes; such loops have no
///    state element to stop the engine from ringing.
inline std::vector<Diagnostic> lint_netlist(const Netlist& nl)
{
    std::vector<Diagnostic> out;

    std::map<std::string, std::size_t> net_index;
    for (std::size_t i = 0; i < nl.nets.size(); ++i)
        net_index.emplace(nl.nets[i].name, i);
    std::map<std::string, const ComponentDecl*> comps;
    for (const auto& c : nl.components)
        comps.emplace(c.name, &c);

    // (component, pin) -> net index
    std::map<std::pair<std::string, std::string>, std::size_t> pin_net;
    for (std::size_t i = 0; i < nl.nets.size(); ++i)
        for (const auto& m : nl.nets[i].members)
            if (m.is_pin())
                pin_net.emplace(std::pair{m.name, m.pin}, i);

    for (const auto& n : nl.nets) {
        if (n.resolution != Resolution::Single)
            continue;
        const NetMember* first = nullptr;
        for (const auto& m : n.members) {
            if (!m.is_pin())
                continue;
            auto cit = comps.find(m.name);
            if (cit == comps.end())
                continue;
            auto idx = pin_index(cit->second->kind, m.pin);
            if (!idx || pins_of(cit->second->kind)[*idx].dir != PinDir::Output)
                continue;
            if (!first) {
                first = &m;
                continue;
            }
            out.push_back(Diagnostic{Severity::Error, std::string(diag::kMultipleDrivers),
                                     "net '" + n.name + "' is driven by both " + first->text() + " and " + m.text() +
                                         " (mark it 'or' for a diode-OR node)",
                                     m.loc});
        }
    }

    for (const auto& c : nl.components) {
        for (const auto& p : pins_of(c.kind)) {
            if (p.dir != PinDir::Input)
                continue;
            bool connected = pin_net.contains(std::pair{c.name, std::string(p.name)});
            if (connected)
                continue;
            if (p.required)
                out.push_back(Diagnostic{Severity::Error, std::string(diag::kFloatingInput),
                                         "input " + c.name + "." + std::string(p.name) + " is not connected", c.loc});
            else if (c.kind == DeviceKind::Counter4 && p.name == "mr")
                out.push_back(Diagnostic{Severity::Warning, std::string(diag::kUnconnectedReset),
                                         "counter " + c.name + " has no master reset connection", c.loc});
        }
    }

    // Net-level dependency graph through combinational elements.
    const std::size_t n_nets = nl.nets.size();
    std::vector<std::vector<std::size_t>> succ(n_nets);
    for (const auto& c : nl.components) {
        if (!detail::is_combinational(c))
            continue;
        std::vector<std::size_t> ins;
        std::vector<std::size_t> outs;
        for (const auto& p : pins_of(c.kind)) {
            auto it = pin_net.find(std::pair{c.name, std::string(p.name)});
            if (it == pin_net.end())
                continue;
            (p.dir == PinDir::Input ? ins : outs).push_back(it->second);
        }
        for (auto i : ins)
            for (auto o : outs)
                succ[i].push_back(o);
    }
    for (std::size_t i = 0; i < n_nets; ++i)
        for (const auto& m : nl.nets[i].members)
            if (!m.is_pin())
                if (auto it = net_index.find(m.name); it != net_index.end())
                    succ[it->second].push_back(i);

    // Tarjan's strongly connected components.
    std::vector<int> index(n_nets, -1), low(n_nets, 0);
    std::vector<bool> on_stack(n_nets, false);
    std::vector<std::size_t> stack;
    std::vector<std::vector<std::size_t>> cycles;
    int counter = 0;
    std::function<void(std::size_t)> connect = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (auto w : succ[v]) {
            if (index[w] < 0) {
                connect(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] != index[v])
            return;
        std::vector<std::size_t> scc;
        std::size_t w = 0;
        do {
            w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            scc.push_back(w);
        } while (w != v);
        bool self_loop = std::find(succ[v].begin(), succ[v].end(), v) != succ[v].end();
        if (scc.size() > 1 || self_loop) {
            std::sort(scc.begin(), scc.end());
            cycles.push_back(std::move(scc));
        }
    };
    for (std::size_t v = 0; v < n_nets; ++v)
        if (index[v] < 0)
            connect(v);

    std::sort(cycles.begin(), cycles.end());
    for (const auto& scc : cycles) {
        std::vector<std::string> names;
        for (auto i : scc)
            names.push_back(nl.nets[i].name);
        out.push_back(Diagnostic{Severity::Error, std::string(diag::kCombinationalCycle),
                                 "combinational cycle with no counter or RC stage through nets " + detail::join(names),
                                 nl.nets[scc.front()].loc});
    }

    std::stable_sort(out.begin(), out.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::pair{a.loc.line, a.loc.column} < std::pair{b.loc.line, b.loc.column};
    });
    return out;
}

} // namespace binclock
