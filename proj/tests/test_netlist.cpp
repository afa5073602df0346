#include <gtest/gtest.h>

#include <random>

#include "binclock/binclock.hpp"
#include "test_support.hpp"

using namespace binclock;
using namespace binclock::testing;

namespace {

std::vector<std::string> codes(const std::vector<Diagnostic>& ds)
{
    std::vector<std::string> out;
    for (const auto& d : ds)
        out.push_back(d.code);
    return out;
}

} // namespace

TEST(Parse, MinimalFragment)
{
    const auto r = parse_netlist("comp G1 and2\nnet n1 G1.a");
    ASSERT_TRUE(r.netlist);
    EXPECT_TRUE(r.diagnostics.empty());
    ASSERT_EQ(r.netlist->components.size(), 1u);
    ASSERT_EQ(r.netlist->nets.size(), 1u);
    EXPECT_EQ(r.netlist->components[0].kind, DeviceKind::And2);
    EXPECT_EQ(r.netlist->nets[0].members[0].text(), "G1.a");
    EXPECT_EQ(r.netlist->nets[0].loc.line, 2);
}

TEST(Parse, UnknownKindAtLineOne)
{
    const auto r = parse_netlist("comp G1 nand9");
    EXPECT_FALSE(r.netlist);
    ASSERT_EQ(r.diagnostics.size(), 1u);
    EXPECT_EQ(r.diagnostics[0].code, diag::kUnknownKind);
    EXPECT_EQ(r.diagnostics[0].loc.line, 1);
    EXPECT_EQ(r.diagnostics[0].loc.column, 9);
    EXPECT_EQ(format_diagnostic(r.diagnostics[0]), "error unknown-kind 1:9 unknown component kind 'nand9'");
}

TEST(Parse, CommentsWhitespaceAndCrLf)
{
    const auto r = parse_netlist("# header\r\n\tcomp  c counter4   init=3 # trailing\r\n\nnet q c.q0\r\nwatch q");
    ASSERT_TRUE(r.netlist);
    EXPECT_EQ(r.netlist->components[0].integer("init", 0), 3);
    EXPECT_EQ(r.netlist->components[0].loc.column, 2);
    EXPECT_EQ(r.netlist->watches[0].loc.line, 5);
}

TEST(Parse, DiagnosticCorpus)
{
    struct Case {
        const char* file;
        std::string_view code;
        int line, column;
    };
    const Case cases[] = {
        {"parse/bad_syntax.bcn", diag::kSyntax, 2, 1},
        {"parse/unknown_kind.bcn", diag::kUnknownKind, 1, 8},
        {"parse/duplicate_name.bcn", diag::kDuplicateName, 2, 1},
        {"parse/malformed_param.bcn", diag::kMalformedParam, 1, 17},
        {"parse/dangling_pin.bcn", diag::kDanglingPin, 2, 7},
        {"parse/unknown_net.bcn", diag::kUnknownNet, 3, 7},
        {"parse/pin_reused.bcn", diag::kPinReused, 3, 8},
        {"parse/malformed_net.bcn", diag::kMalformedNet, 2, 11},
    };
    for (const auto& c : cases) {
        const auto r = parse_netlist(read_text(data(c.file)));
        EXPECT_FALSE(r.netlist) << c.file;
        ASSERT_EQ(r.diagnostics.size(), 1u) << c.file;
        EXPECT_EQ(r.diagnostics[0].code, c.code) << c.file;
        EXPECT_EQ(r.diagnostics[0].severity, Severity::Error) << c.file;
        EXPECT_EQ(r.diagnostics[0].loc.line, c.line) << c.file;
        EXPECT_EQ(r.diagnostics[0].loc.column, c.column) << c.file;
    }
}

TEST(Parse, MoreErrors)
{
    auto first_code = [](std::string_view text) {
        auto r = parse_netlist(text);
        EXPECT_FALSE(r.netlist) << text;
        return r.diagnostics.empty() ? std::string() : r.diagnostics[0].code;
    };
    EXPECT_EQ(first_code("comp a"), diag::kSyntax);
    EXPECT_EQ(first_code("comp 9a and2"), diag::kSyntax);
    EXPECT_EQ(first_code("comp a and2 delay_ns"), diag::kMalformedParam);
    EXPECT_EQ(first_code("comp a and2 delay_ns=1 delay_ns=2"), diag::kMalformedParam);
    EXPECT_EQ(first_code("comp a and2 speed=3"), diag::kMalformedParam);
    EXPECT_EQ(first_code("comp a and2 delay_ns=-1"), diag::kMalformedParam);
    EXPECT_EQ(first_code("comp a and2 delay_ns=1.5"), diag::kMalformedParam);
    EXPECT_EQ(first_code("comp s schmitt vt_hi=0.3 vt_lo=0.4"), diag::kMalformedParam);
    EXPECT_EQ(first_code("comp b button bounce_n=5 bounce_window_us=0.001"), diag::kMalformedParam);
    EXPECT_EQ(first_code("comp k clocksrc freq_hz=1e9"), diag::kMalformedParam);
    EXPECT_EQ(first_code("comp k clocksrc duty=1"), diag::kMalformedParam);
    EXPECT_EQ(first_code("net n nobody.y"), diag::kDanglingPin);
    EXPECT_EQ(first_code("net n a..b"), diag::kSyntax);
    EXPECT_EQ(first_code("net n or n"), diag::kMalformedNet);
    EXPECT_EQ(first_code("net m\nnet n or m m"), diag::kMalformedNet);
    EXPECT_EQ(first_code("net n or ghost"), diag::kUnknownNet);
    EXPECT_EQ(first_code("net n\nnet n"), diag::kDuplicateName);
    EXPECT_EQ(first_code("net n\nwatch n\nwatch n"), diag::kDuplicateName);
    EXPECT_EQ(first_code("watch"), diag::kSyntax);
}

TEST(Parse, DiagnosticsSortedByPosition)
{
    const auto r = parse_netlist("comp a nand\nnet n ghost.y\ncomp b xor\n");
    EXPECT_EQ(codes(r.diagnostics), (std::vector<std::string>{"unknown-kind", "dangling-pin", "unknown-kind"}));
}

TEST(Format, EmptyNetlist)
{
    EXPECT_EQ(format_netlist(Netlist{}), "");
    const auto r = parse_netlist("");
    ASSERT_TRUE(r.netlist);
    EXPECT_EQ(*r.netlist, Netlist{});
}

TEST(Format, ReferenceMatchesGoldenAsset)
{
    const std::string text = format_netlist(build_clock_circuit());
    EXPECT_EQ(text, read_text(asset("reference_clock.bcn")));
    const auto r = parse_netlist(text);
    ASSERT_TRUE(r.netlist);
    EXPECT_EQ(*r.netlist, build_clock_circuit());
}

TEST(Format, RandomRoundTrip)
{
    std::mt19937_64 rng(77);
    for (int i = 0; i < 1000; ++i) {
        const Netlist nl = random_valid_netlist(rng);
        ASSERT_TRUE(validate_netlist(nl).empty()) << format_netlist(nl);
        const auto r = parse_netlist(format_netlist(nl));
        ASSERT_TRUE(r.netlist) << format_netlist(nl);
        EXPECT_EQ(*r.netlist, nl);
    }
}

TEST(Format, RoundTripUpToWhitespace)
{
    const auto a = parse_netlist("comp   x   counter4  init=2\n\n  net q   x.q0 # c\nwatch   q\n");
    ASSERT_TRUE(a.netlist);
    EXPECT_EQ(format_netlist(*a.netlist), "comp x counter4 init=2\nnet q x.q0\nwatch q\n");
}

TEST(Lint, Examples)
{
    auto lint_of = [](std::string_view text) {
        auto r = parse_netlist(text);
        EXPECT_TRUE(r.netlist) << text;
        return lint_netlist(*r.netlist);
    };
    EXPECT_EQ(codes(lint_of("comp g1 and2\ncomp g2 and2\nnet n g1.y g2.y\nnet i g1.a g1.b g2.a g2.b")),
              (std::vector<std::string>{"multiple-drivers"}));
    EXPECT_EQ(codes(lint_of("comp g and2\nnet i g.a")), (std::vector<std::string>{"floating-input"}));
    EXPECT_TRUE(lint_of("comp g1 and2\ncomp g2 and2\nnet n or g1.y g2.y\nnet i g1.a g1.b g2.a g2.b").empty());
    const auto warn = lint_of("comp c counter4\nnet k c.cp");
    ASSERT_EQ(warn.size(), 1u);
    EXPECT_EQ(warn[0].severity, Severity::Warning);
    EXPECT_FALSE(has_errors(warn));
}

TEST(Lint, CyclesThroughStateAreAllowed)
{
    // Counter in the loop: fine. RC Schmitt in the loop: fine. Diode-only loop: flagged.
    const char* counter_loop = "comp c counter4\ncomp g and2\nnet q c.q0 g.a g.b\nnet r g.y c.cp c.mr\n";
    const char* rc_loop = "comp s schmitt\ncomp g and2\ncomp b button\nnet a b.out g.a\nnet y g.y s.in\nnet o s.out g.b\n";
    const char* diode_loop = "net a or b\nnet b or a\n";
    for (const char* text : {counter_loop, rc_loop}) {
        const auto r = parse_netlist(text);
        ASSERT_TRUE(r.netlist);
        EXPECT_TRUE(lint_netlist(*r.netlist).empty()) << text;
    }
    const auto r = parse_netlist(diode_loop);
    ASSERT_TRUE(r.netlist);
    EXPECT_EQ(codes(lint_netlist(*r.netlist)), (std::vector<std::string>{"combinational-cycle"}));
}

TEST(Lint, ReferenceClockIsClean)
{
    EXPECT_TRUE(lint_netlist(build_clock_circuit()).empty());
    ClockCircuitConfig raw;
    raw.debounce = false;
    EXPECT_TRUE(lint_netlist(build_clock_circuit(raw)).empty());
}

TEST(Elaborate, MinimalFragment)
{
    const auto r = parse_netlist("comp G1 and2\nnet n1 G1.a\nnet n2 G1.b\nnet n3 G1.y");
    ASSERT_TRUE(r.netlist);
    const Circuit c = elaborate(*r.netlist);
    ASSERT_EQ(c.devices.size(), 1u);
    EXPECT_EQ(c.devices[0].pins[pins::kA], c.find_net("n1"));
    EXPECT_EQ(c.devices[0].pins[pins::kB], c.find_net("n2"));
    EXPECT_EQ(c.devices[0].pins[pins::kY], c.find_net("n3"));
    EXPECT_EQ(c.net(c.net_id("n1")).readers, std::vector<std::uint32_t>{0});
    ASSERT_EQ(c.net(c.net_id("n3")).drivers.size(), 1u);
    EXPECT_THROW((void)c.net_id("nope"), std::out_of_range);
}

TEST(Elaborate, WiredOrSlots)
{
    const auto r = parse_netlist("comp g1 and2\ncomp g2 and2\ncomp b button\nnet i b.out g1.a g1.b g2.a g2.b\n"
                                 "net src g1.y\nnet n or g2.y src\n");
    ASSERT_TRUE(r.netlist);
    const Circuit c = elaborate(*r.netlist);
    const NetInfo& n = c.net(c.net_id("n"));
    EXPECT_EQ(n.resolution, Resolution::WiredOr);
    EXPECT_EQ(n.slot_count(), 2u);
    ASSERT_EQ(n.diode_sources.size(), 1u);
    const NetInfo& src = c.net(c.net_id("src"));
    ASSERT_EQ(src.diode_fanout.size(), 1u);
    EXPECT_EQ(src.diode_fanout[0].target, c.net_id("n"));
    EXPECT_EQ(src.diode_fanout[0].slot, 1u);
}

TEST(Elaborate, ReferenceShape)
{
    const Circuit c = elaborate(build_clock_circuit());
    std::map<DeviceKind, int> counts;
    for (const auto& d : c.devices) {
        ++counts[d.kind];
        if (d.kind == DeviceKind::Counter4) {
            EXPECT_TRUE(d.pins[pins::kCp]) << d.name;
            EXPECT_TRUE(d.pins[pins::kMr]) << d.name;
        }
    }
    EXPECT_EQ(counts[DeviceKind::Counter4], 6);
    EXPECT_EQ(counts[DeviceKind::And2], 7);
    EXPECT_EQ(counts[DeviceKind::Schmitt], 4);
    EXPECT_EQ(counts[DeviceKind::Button], 2);
    EXPECT_EQ(counts[DeviceKind::ClockSource], 1);
    EXPECT_EQ(counts[DeviceKind::Led], 17);
    EXPECT_EQ(c.watches.size(), 17u);
}

TEST(Elaborate, RejectsLintErrorsUnlessSkipped)
{
    const auto r = parse_netlist(read_text(data("zero_delay_loop.bcn")));
    ASSERT_TRUE(r.netlist);
    try {
        (void)elaborate(*r.netlist);
        FAIL() << "expected NetlistError";
    } catch (const NetlistError& e) {
        EXPECT_EQ(codes(e.diagnostics()), (std::vector<std::string>{"combinational-cycle"}));
    }
    EXPECT_NO_THROW((void)elaborate(*r.netlist, ElaborateOptions{true}));

    Netlist bad;
    bad.watches.push_back(WatchDecl{"ghost", {}});
    EXPECT_THROW((void)elaborate(bad, ElaborateOptions{true}), NetlistError);
}

TEST(Elaborate, Deterministic)
{
    const Netlist nl = build_clock_circuit();
    const Circuit a = elaborate(nl);
    const Circuit b = elaborate(nl);
    ASSERT_EQ(a.nets.size(), b.nets.size());
    for (std::size_t i = 0; i < a.nets.size(); ++i) {
        EXPECT_EQ(a.nets[i].name, b.nets[i].name);
        EXPECT_EQ(a.nets[i].readers, b.nets[i].readers);
        EXPECT_EQ(a.nets[i].diode_sources, b.nets[i].diode_sources);
    }
    for (std::size_t i = 0; i < a.devices.size(); ++i) {
        EXPECT_EQ(a.devices[i].name, nl.components[i].name);
        EXPECT_EQ(a.devices[i].pins, b.devices[i].pins);
    }
}
