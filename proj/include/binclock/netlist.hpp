#pragma once

// Line-oriented ".bcn" netlist format:
//
//   # comment
//   comp <name> <kind> [key=value ...]
//   net <name> [or] <member> ...
//   watch <net>
//
// A member is either a pin reference "<component>.<pin>" or, inside an `or`
// net only, the bare name of another net. A bare net member is a diode from
// that net into the wired-OR node. `or` nets are the only nets that may carry
// more than one driver.

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace binclock {

// ---------------------------------------------------------------------------
// Diagnostics
// ---------------------------------------------------------------------------

enum class Severity { Error, Warning };

struct SourceLoc {
    int line = 0; // 1-based; 0 when the declaration was not parsed from text
    int column = 0;
};

struct Diagnostic {
    Severity severity = Severity::Error;
    std::string code;
    std::string message;
    SourceLoc loc;
};

namespace diag {
inline constexpr std::string_view kSyntax = "syntax";
inline constexpr std::string_view kUnknownKind = "unknown-kind";
inline constexpr std::string_view kDuplicateName = "duplicate-name";
inline constexpr std::string_view kMalformedParam = "malformed-param";
inline constexpr std::string_view kDanglingPin = "dangling-pin";
inline constexpr std::string_view kUnknownNet = "unknown-net";
inline constexpr std::string_view kPinReused = "pin-reused";
inline constexpr std::string_view kMalformedNet = "malformed-net";
// lint
inline constexpr std::string_view kMultipleDrivers = "multiple-drivers";
inline constexpr std::string_view kFloatingInput = "floating-input";
inline constexpr std::string_view kUnconnectedReset = "unconnected-reset";
inline constexpr std::string_view kCombinationalCycle = "combinational-cycle";
} // namespace diag

inline std::string format_diagnostic(const Diagnostic& d)
{
    std::ostringstream os;
    os << (d.severity == Severity::Error ? "error" : "warning") << ' ' << d.code << ' ' << d.loc.line << ':'
       << d.loc.column << ' ' << d.message;
    return os.str();
}

inline bool has_errors(std::span<const Diagnostic> diags)
{
    return std::any_of(diags.begin(), diags.end(), [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

// ---------------------------------------------------------------------------
// Component kinds, pins, parameters
// ---------------------------------------------------------------------------

enum class DeviceKind : std::uint8_t { Counter4, And2, Schmitt, Button, ClockSource, Led };

enum class PinDir : std::uint8_t { Input, Output };

struct PinSpec {
    std::string_view name;
    PinDir dir;
    bool required; // inputs only: must be connected
};

enum class ParamType : std::uint8_t { Integer, Unsigned64, Number };

struct ParamSpec {
    std::string_view key;
    ParamType type;
    double min;
    double max;
    bool min_open = false; // exclusive lower bound
    bool max_open = false;
};

namespace pins {
// counter4
inline constexpr int kCp = 0, kMr = 1, kQ0 = 2;
// and2
inline constexpr int kA = 0, kB = 1, kY = 2;
// schmitt
inline constexpr int kIn = 0, kOut = 1;
} // namespace pins

namespace detail {
using enum PinDir;
inline constexpr std::array<PinSpec, 6> kCounterPins{{{"cp", Input, true},
                                                      {"mr", Input, false},
                                                      {"q0", Output, false},
                                                      {"q1", Output, false},
                                                      {"q2", Output, false},
                                                      {"q3", Output, false}}};
inline constexpr std::array<PinSpec, 3> kAndPins{{{"a", Input, true}, {"b", Input, true}, {"y", Output, false}}};
inline constexpr std::array<PinSpec, 2> kSchmittPins{{{"in", Input, true}, {"out", Output, false}}};
inline constexpr std::array<PinSpec, 1> kOutOnly{{{"out", Output, false}}};
inline constexpr std::array<PinSpec, 1> kLedPins{{{"in", Input, true}}};

inline constexpr double kMaxDelayNs = 1e12;
using enum ParamType;
inline constexpr std::array<ParamSpec, 2> kCounterParams{{{"delay_ns", Integer, 0, kMaxDelayNs},
                                                         {"init", Integer, 0, 15}}};
inline constexpr std::array<ParamSpec, 1> kAndParams{{{"delay_ns", Integer, 0, kMaxDelayNs}}};
inline constexpr std::array<ParamSpec, 4> kSchmittParams{{{"delay_ns", Integer, 0, kMaxDelayNs},
                                                         {"tau_us", Number, 0, 1e9},
                                                         {"vt_hi", Number, 0, 1, true, true},
                                                         {"vt_lo", Number, 0, 1, true, true}}};
inline constexpr std::array<ParamSpec, 3> kButtonParams{{{"bounce_n", Integer, 0, 100'000},
                                                        {"bounce_window_us", Number, 0, 1e9, true},
                                                        {"seed", Unsigned64, 0, 0}}};
inline constexpr std::array<ParamSpec, 2> kClockParams{{{"duty", Number, 0, 1, true, true},
                                                       {"freq_hz", Number, 0, 1e9, true}}};
} // namespace detail

inline std::span<const PinSpec> pins_of(DeviceKind kind) noexcept
{
    switch (kind) {
    case DeviceKind::Counter4: return detail::kCounterPins;
    case DeviceKind::And2: return detail::kAndPins;
    case DeviceKind::Schmitt: return detail::kSchmittPins;
    case DeviceKind::Button:
    case DeviceKind::ClockSource: return detail::kOutOnly;
    case DeviceKind::Led: return detail::kLedPins;
    }
    return {};
}

inline std::span<const ParamSpec> params_of(DeviceKind kind) noexcept
{
    switch (kind) {
    case DeviceKind::Counter4: return detail::kCounterParams;
    case DeviceKind::And2: return detail::kAndParams;
    case DeviceKind::Schmitt: return detail::kSchmittParams;
    case DeviceKind::Button: return detail::kButtonParams;
    case DeviceKind::ClockSource: return detail::kClockParams;
    case DeviceKind::Led: return {};
    }
    return {};
}

inline std::optional<int> pin_index(DeviceKind kind, std::string_view pin) noexcept
{
    auto ps = pins_of(kind);
    for (std::size_t i = 0; i < ps.size(); ++i)
        if (ps[i].name == pin)
            return static_cast<int>(i);
    return std::nullopt;
}

inline constexpr std::array<std::pair<std::string_view, DeviceKind>, 6> kKindNames{{
    {"counter4", DeviceKind::Counter4},
    {"and2", DeviceKind::And2},
    {"schmitt", DeviceKind::Schmitt},
    {"button", DeviceKind::Button},
    {"clocksrc", DeviceKind::ClockSource},
    {"led", DeviceKind::Led},
}};

inline std::string_view kind_name(DeviceKind kind) noexcept
{
    for (auto [name, k] : kKindNames)
        if (k == kind)
            return name;
    return "?";
}

inline std::optional<DeviceKind> parse_kind(std::string_view name) noexcept
{
    for (auto [n, k] : kKindNames)
        if (n == name)
            return k;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Netlist document
// ---------------------------------------------------------------------------

enum class Resolution : std::uint8_t { Single, WiredOr };

struct ComponentDecl {
    std::string name;
    DeviceKind kind = DeviceKind::And2;
    std::map<std::string, std::string> params;
    SourceLoc loc;
    std::map<std::string, SourceLoc> param_locs;

    std::optional<std::string_view> param(std::string_view key) const
    {
        auto it = params.find(std::string(key));
        if (it == params.end())
            return std::nullopt;
        return std::string_view(it->second);
    }

    // Typed accessors assume the netlist has been validated.
    double number(std::string_view key, double fallback) const
    {
        auto v = param(key);
        if (!v)
            return fallback;
        double out = fallback;
        std::from_chars(v->data(), v->data() + v->size(), out);
        return out;
    }

    std::int64_t integer(std::string_view key, std::int64_t fallback) const
    {
        auto v = param(key);
        if (!v)
            return fallback;
        std::int64_t out = fallback;
        std::from_chars(v->data(), v->data() + v->size(), out);
        return out;
    }

    std::uint64_t unsigned64(std::string_view key, std::uint64_t fallback) const
    {
        auto v = param(key);
        if (!v)
            return fallback;
        std::uint64_t out = fallback;
        std::from_chars(v->data(), v->data() + v->size(), out);
        return out;
    }

    friend bool operator==(const ComponentDecl& a, const ComponentDecl& b)
    {
        return a.name == b.name && a.kind == b.kind && a.params == b.params;
    }
};

struct NetMember {
    std::string name; // component name, or source net name for a diode member
    std::string pin;  // empty for a diode member
    SourceLoc loc;

    bool is_pin() const noexcept { return !pin.empty(); }
    std::string text() const { return is_pin() ? name + "." + pin : name; }

    friend bool operator==(const NetMember& a, const NetMember& b) { return a.name == b.name && a.pin == b.pin; }
};

struct NetDecl {
    std::string name;
    Resolution resolution = Resolution::Single;
    std::vector<NetMember> members;
    SourceLoc loc;

    friend bool operator==(const NetDecl& a, const NetDecl& b)
    {
        return a.name == b.name && a.resolution == b.resolution && a.members == b.members;
    }
};

struct WatchDecl {
    std::string net;
    SourceLoc loc;

    friend bool operator==(const WatchDecl& a, const WatchDecl& b) { return a.net == b.net; }
};

struct Netlist {
    std::vector<ComponentDecl> components;
    std::vector<NetDecl> nets;
    std::vector<WatchDecl> watches;

    const ComponentDecl* find_component(std::string_view name) const
    {
        for (const auto& c : components)
            if (c.name == name)
                return &c;
        return nullptr;
    }

    const NetDecl* find_net(std::string_view name) const
    {
        for (const auto& n : nets)
            if (n.name == name)
                return &n;
        return nullptr;
    }

    friend bool operator==(const Netlist&, const Netlist&) = default;
};

struct ParseResult {
    std::optional<Netlist> netlist;
    std::vector<Diagnostic> diagnostics;

    bool ok() const noexcept { return netlist.has_value(); }
};

// ---------------------------------------------------------------------------
// Validation (reference resolution and parameter checks)
// ---------------------------------------------------------------------------

namespace detail {

inline bool is_identifier(std::string_view s) noexcept
{
    if (s.empty())
        return false;
    auto head = [](char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; };
    auto tail = [&](char c) { return head(c) || (c >= '0' && c <= '9'); };
    if (!head(s.front()))
        return false;
    return std::all_of(s.begin() + 1, s.end(), tail);
}

template <typename T>
bool parse_full(std::string_view s, T& out) noexcept
{
    if (s.empty())
        return false;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size();
}

// Returns an error message, or empty if the value is acceptable.
inline std::string check_param_value(const ParamSpec& spec, std::string_view value)
{
    double v = 0;
    switch (spec.type) {
    case ParamType::Unsigned64: {
        std::uint64_t u = 0;
        if (!parse_full(value, u))
            return "expected an unsigned 64-bit integer";
        return {};
    }
    case ParamType::Integer: {
        std::int64_t i = 0;
        if (!parse_full(value, i))
            return "expected an integer";
        v = static_cast<double>(i);
        break;
    }
    case ParamType::Number:
        if (!parse_full(value, v) || !std::isfinite(v))
            return "expected a number";
        break;
    }
    bool low_ok = spec.min_open ? v > spec.min : v >= spec.min;
    bool high_ok = spec.max_open ? v < spec.max : v <= spec.max;
    if (!low_ok || !high_ok) {
        std::ostringstream os;
        os << "value out of range " << (spec.min_open ? '(' : '[') << spec.min << ", " << spec.max
           << (spec.max_open ? ')' : ']');
        return os.str();
    }
    return {};
}

inline SourceLoc param_loc(const ComponentDecl& c, const std::string& key)
{
    auto it = c.param_locs.find(key);
    return it == c.param_locs.end() ? c.loc : it->second;
}

} // namespace detail

/// Semantic checks shared by the parser and programmatic builders: unique
/// names, parameter keys and values, member references, pin reuse, watches.
inline std::vector<Diagnostic> validate_netlist(const Netlist& nl)
{
    std::vector<Diagnostic> out;
    auto error = [&](std::string_view code, std::string message, SourceLoc loc) {
        out.push_back(Diagnostic{Severity::Error, std::string(code), std::move(message), loc});
    };

    std::map<std::string, const ComponentDecl*> comps;
    for (const auto& c : nl.components) {
        if (!detail::is_identifier(c.name))
            error(diag::kSyntax, "invalid component name '" + c.name + "'", c.loc);
        if (!comps.emplace(c.name, &c).second)
            error(diag::kDuplicateName, "component '" + c.name + "' is declared twice", c.loc);

        auto specs = params_of(c.kind);
        for (const auto& [key, value] : c.params) {
            auto it = std::find_if(specs.begin(), specs.end(), [&](const ParamSpec& s) { return s.key == key; });
            if (it == specs.end()) {
                error(diag::kMalformedParam,
                      "unknown parameter '" + key + "' for " + std::string(kind_name(c.kind)),
                      detail::param_loc(c, key));
                continue;
            }
            if (auto msg = detail::check_param_value(*it, value); !msg.empty())
                error(diag::kMalformedParam, "parameter '" + key + "': " + msg, detail::param_loc(c, key));
        }
        if (c.kind == DeviceKind::Schmitt && c.number("vt_lo", 0.4) >= c.number("vt_hi", 0.6))
            error(diag::kMalformedParam, "schmitt '" + c.name + "' needs vt_lo < vt_hi", c.loc);
        if (c.kind == DeviceKind::Button) {
            double window_ns = c.number("bounce_window_us", 2000.0) * 1e3;
            if (window_ns < 2.0 * static_cast<double>(c.integer("bounce_n", 0)) || window_ns < 1.0)
                error(diag::kMalformedParam, "button '" + c.name + "' bounce window too short for bounce_n", c.loc);
        }
        if (c.kind == DeviceKind::ClockSource && 1e9 / c.number("freq_hz", 1.0) < 2.0)
            error(diag::kMalformedParam, "clocksrc '" + c.name + "' period below 2 ns", c.loc);
    }

    std::map<std::string, const NetDecl*> nets;
    for (const auto& n : nl.nets) {
        if (!detail::is_identifier(n.name))
            error(diag::kSyntax, "invalid net name '" + n.name + "'", n.loc);
        if (!nets.emplace(n.name, &n).second)
            error(diag::kDuplicateName, "net '" + n.name + "' is declared twice", n.loc);
    }

    std::map<std::pair<std::string, std::string>, std::string> pin_owner;
    for (const auto& n : nl.nets) {
        std::set<std::string> diode_sources;
        for (const auto& m : n.members) {
            if (!m.is_pin()) {
                if (n.resolution != Resolution::WiredOr)
                    error(diag::kMalformedNet, "bare net member '" + m.name + "' is only allowed in an or net", m.loc);
                else if (m.name == n.name)
                    error(diag::kMalformedNet, "net '" + n.name + "' lists itself as a member", m.loc);
                else if (!nets.contains(m.name))
                    error(diag::kUnknownNet, "no net named '" + m.name + "'", m.loc);
                else if (!diode_sources.insert(m.name).second)
                    error(diag::kMalformedNet, "net '" + m.name + "' listed twice in '" + n.name + "'", m.loc);
                continue;
            }
            auto cit = comps.find(m.name);
            if (cit == comps.end()) {
                error(diag::kDanglingPin, "pin '" + m.text() + "' refers to unknown component", m.loc);
                continue;
            }
            if (!pin_index(cit->second->kind, m.pin)) {
                error(diag::kDanglingPin,
                      "component '" + m.name + "' (" + std::string(kind_name(cit->second->kind)) + ") has no pin '" +
                          m.pin + "'",
                      m.loc);
                continue;
            }
            auto [it, fresh] = pin_owner.emplace(std::pair{m.name, m.pin}, n.name);
            if (!fresh)
                error(diag::kPinReused, "pin '" + m.text() + "' already connected to net '" + it->second + "'", m.loc);
        }
    }

    std::set<std::string> watched;
    for (const auto& w : nl.watches) {
        if (!nets.contains(w.net))
            error(diag::kUnknownNet, "watch of unknown net '" + w.net + "'", w.loc);
        else if (!watched.insert(w.net).second)
            error(diag::kDuplicateName, "net '" + w.net + "' is watched twice", w.loc);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

namespace detail {

struct Token {
    std::string_view text;
    int column; // 1-based
};

inline std::vector<Token> tokenize_line(std::string_view line)
{
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < line.size()) {
        char c = line[i];
        if (c == '#')
            break;
        if (c == ' ' || c == '\t' || c == '\r') {
            ++i;
            continue;
        }
        std::size_t start = i;
        while (i < line.size() && line[i] != ' ' && line[i] != '\t' && line[i] != '\r' && line[i] != '#')
            ++i;
        out.push_back(Token{line.substr(start, i - start), static_cast<int>(start) + 1});
    }
    return out;
}

} // namespace detail

inline ParseResult parse_netlist(std::string_view text)
{
    ParseResult result;
    auto& diags = result.diagnostics;
    auto error = [&](std::string_view code, std::string message, SourceLoc loc) {
        diags.push_back(Diagnostic{Severity::Error, std::string(code), std::move(message), loc});
    };

    Netlist nl;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        std::size_t eol = text.find('\n', pos);
        if (eol == std::string_view::npos)
            eol = text.size();
        std::string_view line = text.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;

        auto toks = detail::tokenize_line(line);
        if (toks.empty())
            continue;
        auto loc_of = [&](const detail::Token& t) { return SourceLoc{line_no, t.column}; };
        std::string_view directive = toks[0].text;

        if (directive == "comp") {
            if (toks.size() < 3) {
                error(diag::kSyntax, "expected 'comp <name> <kind> [key=value ...]'", loc_of(toks[0]));
                continue;
            }
            if (!detail::is_identifier(toks[1].text)) {
                error(diag::kSyntax, "invalid component name '" + std::string(toks[1].text) + "'", loc_of(toks[1]));
                continue;
            }
            auto kind = parse_kind(toks[2].text);
            if (!kind) {
                error(diag::kUnknownKind, "unknown component kind '" + std::string(toks[2].text) + "'",
                      loc_of(toks[2]));
                continue;
            }
            ComponentDecl c{std::string(toks[1].text), *kind, {}, loc_of(toks[0]), {}};
            bool ok = true;
            for (std::size_t i = 3; i < toks.size(); ++i) {
                auto eq = toks[i].text.find('=');
                if (eq == std::string_view::npos || eq == 0 || eq + 1 == toks[i].text.size()) {
                    error(diag::kMalformedParam, "expected key=value, got '" + std::string(toks[i].text) + "'",
                          loc_of(toks[i]));
                    ok = false;
                    continue;
                }
                std::string key(toks[i].text.substr(0, eq));
                if (c.params.contains(key)) {
                    error(diag::kMalformedParam, "parameter '" + key + "' given twice", loc_of(toks[i]));
                    ok = false;
                    continue;
                }
                c.params.emplace(key, std::string(toks[i].text.substr(eq + 1)));
                c.param_locs.emplace(key, loc_of(toks[i]));
            }
            if (ok)
                nl.components.push_back(std::move(c));
        } else if (directive == "net") {
            if (toks.size() < 2 || !detail::is_identifier(toks[1].text)) {
                error(diag::kSyntax, "expected 'net <name> [or] <member> ...'", loc_of(toks[0]));
                continue;
            }
            NetDecl n{std::string(toks[1].text), Resolution::Single, {}, loc_of(toks[0])};
            std::size_t i = 2;
            if (i < toks.size() && toks[i].text == "or") {
                n.resolution = Resolution::WiredOr;
                ++i;
            }
            bool ok = true;
            for (; i < toks.size(); ++i) {
                std::string_view t = toks[i].text;
                auto dot = t.find('.');
                NetMember m;
                m.loc = loc_of(toks[i]);
                if (dot == std::string_view::npos) {
                    m.name = std::string(t);
                } else {
                    m.name = std::string(t.substr(0, dot));
                    m.pin = std::string(t.substr(dot + 1));
                }
                if (!detail::is_identifier(m.name) || (dot != std::string_view::npos && !detail::is_identifier(m.pin))) {
                    error(diag::kSyntax, "malformed net member '" + std::string(t) + "'", m.loc);
                    ok = false;
                    continue;
                }
                n.members.push_back(std::move(m));
            }
            if (ok)
                nl.nets.push_back(std::move(n));
        } else if (directive == "watch") {
            if (toks.size() != 2 || !detail::is_identifier(toks[1].text)) {
                error(diag::kSyntax, "expected 'watch <net>'", loc_of(toks[0]));
                continue;
            }
            nl.watches.push_back(WatchDecl{std::string(toks[1].text), loc_of(toks[1])});
        } else {
            error(diag::kSyntax, "unknown directive '" + std::string(directive) + "'", loc_of(toks[0]));
        }
    }

    auto semantic = validate_netlist(nl);
    diags.insert(diags.end(), semantic.begin(), semantic.end());
    std::stable_sort(diags.begin(), diags.end(), [](const Diagnostic& a, const Diagnostic& b) {
        return std::pair{a.loc.line, a.loc.column} < std::pair{b.loc.line, b.loc.column};
    });
    if (!has_errors(diags))
        result.netlist = std::move(nl);
    return result;
}

// ---------------------------------------------------------------------------
// Formatter
// ---------------------------------------------------------------------------

/// Canonical text: components, then nets, then watches, one per line,
/// parameters in key order, single spaces.
inline std::string format_netlist(const Netlist& nl)
{
    std::string out;
    for (const auto& c : nl.components) {
        out += "comp ";
        out += c.name;
        out += ' ';
        out += kind_name(c.kind);
        for (const auto& [k, v] : c.params) {
            out += ' ';
            out += k;
            out += '=';
            out += v;
        }
        out += '\n';
    }
    for (const auto& n : nl.nets) {
        out += "net ";
        out += n.name;
        if (n.resolution == Resolution::WiredOr)
            out += " or";
        for (const auto& m : n.members) {
            out += ' ';
            out += m.text();
        }
        out += '\n';
    }
    for (const auto& w : nl.watches) {
        out += "watch ";
        out += w.net;
        out += '\n';
    }
    return out;
}

} // namespace binclock
