#include <random>

#include <gtest/gtest.h>

#include "gridhop/fixtures.hpp"
#include "gridhop/network.hpp"
#include "gridhop/security.hpp"
#include "oracle.hpp"

using namespace gridhop;

namespace {

Network two_bus_ncp() {
    Network net;
    net.buses = {{"a", BusKind::substation_busbar, std::nullopt, {}}, {"b", BusKind::feeder_node, std::nullopt, {}}};
    net.sources = {{"s", "a", 10.0, 1, 100.0, SourceKind::grid_infeed, {}}};
    net.devices = {{"k", DeviceKind::ncp, {"a", "b"}, SwitchPosition::closed, 0.0, {}}};
    return net;
}

SwitchState random_state(const Network& net, std::mt19937_64& rng) {
    SwitchState s;
    for (const auto& d : net.devices) {
        if (d.has_switch()) s.switches[d.id] = rng() % 2 ? SwitchPosition::closed : SwitchPosition::open;
    }
    return s;
}

std::set<std::string> closed_ids(const Network& net, const SwitchState& s) {
    std::set<std::string> out;
    for (const auto& d : net.devices)
        if (s.closed(d)) out.insert(d.id);
    return out;
}

bool codes_equal(const ValidationReport& r, std::vector<std::string> expected) {
    std::vector<std::string> got;
    for (const auto& v : r.violations) got.push_back(v.code);
    return got == expected;
}

} // namespace

TEST(Validate, BundledFixturesAreClean) {
    for (const auto& [name, doc] : fixtures::all()) {
        EXPECT_TRUE(validate_network(doc.network).ok()) << name;
        for (const auto& [scenario, values] : doc.demand_scenarios)
            EXPECT_TRUE(validate_network(apply_scenario(doc.network, values)).ok()) << name << " " << scenario;
    }
}

TEST(Validate, DanglingBranchBus) {
    auto net = fixtures::fig2().network;
    net.branches[0].to_bus = "NOWHERE";
    const auto r = validate_network(net);
    EXPECT_TRUE(codes_equal(r, {"dangling-reference"}));
    EXPECT_EQ(r.violations[0].element, "FDR_A2");
}

TEST(Validate, Hop1DeclaredClosed) {
    auto net = fixtures::fig2().network;
    net.devices[1].kind = DeviceKind::hop1;
    net.devices[1].converter_rating = 1.0;
    net.devices[1].normal_state = SwitchPosition::closed;
    EXPECT_TRUE(codes_equal(validate_network(net), {"kind-state-mismatch"}));
}

TEST(Validate, StructuralDefects) {
    auto net = fixtures::fig2().network;
    net.demands[0].id = net.demands[1].id;
    EXPECT_TRUE(codes_equal(validate_network(net), {"duplicate-id"}));

    net = fixtures::fig2().network;
    net.branches[0].rating = 0.0;
    EXPECT_TRUE(codes_equal(validate_network(net), {"nonpositive-rating"}));

    net = fixtures::fig2().network;
    net.demands[0].magnitude = -1.0;
    EXPECT_TRUE(codes_equal(validate_network(net), {"negative-value"}));

    net = fixtures::fig2().network;
    net.branches[0].to_bus = net.branches[0].from_bus;
    EXPECT_TRUE(codes_equal(validate_network(net), {"self-loop"}));

    net = fixtures::fig2().network;
    net.devices[1].kind = DeviceKind::sop;
    net.devices[1].converter_rating = 0.0;
    EXPECT_TRUE(codes_equal(validate_network(net), {"nonpositive-rating"}));

    net = fixtures::fig2().network;
    net.devices[0].terminals.push_back("B_BB");
    EXPECT_FALSE(validate_network(net).ok());
}

TEST(Validate, TopologyDefects) {
    auto net = fixtures::fig2().network;
    net.devices[1].kind = DeviceKind::ncp;
    net.devices[1].normal_state = SwitchPosition::closed;
    EXPECT_TRUE(codes_equal(validate_network(net), {"not-radial"}));

    net = fixtures::fig3().network;
    net.buses[0].fault_level_limit = 230.0;
    EXPECT_TRUE(codes_equal(validate_network(net), {"fault-level"}));

    net = fixtures::fig2().network;
    net.devices[0].kind = DeviceKind::nop;
    net.devices[0].normal_state = SwitchPosition::open;
    const auto r = validate_network(net);
    ASSERT_FALSE(r.ok());
    for (const auto& v : r.violations) EXPECT_EQ(v.code, "de-energized-demand");
}

TEST(Partition, Fig2NormalHasTwoIslands) {
    const auto net = fixtures::fig2().network;
    const auto p = energized_islands(net, normal_state(net));
    ASSERT_EQ(p.islands.size(), 2u);
    EXPECT_EQ(p.islands[0].infeeds, std::vector<std::string>{"SRC_A"});
    EXPECT_EQ(p.islands[1].infeeds, std::vector<std::string>{"SRC_B"});
    EXPECT_TRUE(p.islands[0].energized && p.islands[1].energized);
}

TEST(Partition, ClosedNcpJoinsTwoBuses) {
    const auto net = two_bus_ncp();
    EXPECT_EQ(energized_islands(net, normal_state(net)).islands.size(), 1u);
}

TEST(Partition, Fig4NormalHasThreeIslands) {
    const auto net = fixtures::fig4().network;
    EXPECT_EQ(energized_islands(net, normal_state(net)).islands.size(), 3u);
}

TEST(Radiality, Examples) {
    auto net = fixtures::fig2().network;
    EXPECT_TRUE(is_radial(net, normal_state(net)));
    auto state = normal_state(net);
    state.switches["NOP_AB"] = SwitchPosition::closed;
    EXPECT_FALSE(is_radial(net, state));

    Network single;
    single.buses = {{"a", BusKind::substation_busbar, std::nullopt, {}}};
    single.sources = {{"s", "a", 5.0, 1, 10.0, SourceKind::grid_infeed, {}}};
    EXPECT_TRUE(is_radial(single, normal_state(single)));
}

TEST(FaultLevel, Examples) {
    const auto net = fixtures::fig3().network;
    auto state = normal_state(net);
    const auto p = energized_islands(net, state);
    EXPECT_NEAR(island_fault_level(net, state, p.island_of.at("SUB_A")), 260.0, 1e-12);

    state.switches["NCP_A"] = SwitchPosition::open;
    state.switches["NCP_DG"] = SwitchPosition::open;
    state.switches["NOP"] = SwitchPosition::closed;
    const auto q = energized_islands(net, state);
    EXPECT_NEAR(island_fault_level(net, state, q.island_of.at("SUB_B")), 200.0, 1e-12);
    EXPECT_NEAR(island_fault_level(net, state, q.island_of.at("MID")), 200.0, 1e-12);
    EXPECT_NEAR(island_fault_level(net, state, q.island_of.at("SUB_A")), 200.0, 1e-12);

    Network empty = two_bus_ncp();
    empty.sources.clear();
    EXPECT_EQ(island_fault_level(empty, normal_state(empty), 0), 0.0);
}

TEST(Properties, PartitionMatchesDepthFirstSearch) {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 300; ++trial) {
        const auto net = oracle::random_network(rng, {12, 8, true, true});
        const auto state = random_state(net, rng);
        const auto p = energized_islands(net, state);
        const auto t = oracle::topology(net, closed_ids(net, state));
        std::size_t covered = 0;
        for (const auto& isl : p.islands) covered += isl.buses.size();
        ASSERT_EQ(covered, net.buses.size());
        ASSERT_EQ(p.islands.size(), static_cast<std::size_t>(t.components));
        for (std::size_t i = 0; i < net.buses.size(); ++i)
            for (std::size_t j = 0; j < net.buses.size(); ++j)
                ASSERT_EQ(p.island_of.at(net.buses[i].id) == p.island_of.at(net.buses[j].id),
                          t.component[i] == t.component[j]);
    }
}

TEST(Properties, RadialityFormulationsAgree) {
    std::mt19937_64 rng(12);
    int radial = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const auto net = oracle::random_network(rng, {12, 8, true, true});
        const auto state = random_state(net, rng);
        const bool expected = oracle::radial(net, oracle::topology(net, closed_ids(net, state)));
        ASSERT_EQ(is_radial(net, state), expected) << "trial " << trial;
        radial += expected;
    }
    EXPECT_GT(radial, 50);
    EXPECT_LT(radial, 450);
}

TEST(Properties, ConverterSetPointsDoNotPropagate) {
    std::mt19937_64 rng(13);
    for (int trial = 0; trial < 200; ++trial) {
        const auto net = oracle::random_network(rng);
        const auto state = random_state(net, rng);
        auto injected = state;
        for (const auto& d : net.devices) {
            if (!d.has_converter()) continue;
            std::vector<double> inj(d.terminals.size(), 0.0);
            inj[0] = -d.converter_rating;
            inj[1] = d.converter_rating;
            injected.injections[d.id] = inj;
        }
        const auto p = energized_islands(net, state);
        const auto q = energized_islands(net, injected);
        ASSERT_EQ(p.island_of, q.island_of);
        ASSERT_EQ(is_radial(net, state), is_radial(net, injected));
        for (std::size_t i = 0; i < p.islands.size(); ++i)
            ASSERT_EQ(island_fault_level(net, p.islands[i]), island_fault_level(net, q.islands[i]));
    }
}

TEST(Properties, ClosingASwitchNeverLowersFaultLevel) {
    std::mt19937_64 rng(14);
    for (int trial = 0; trial < 200; ++trial) {
        const auto net = oracle::random_network(rng);
        auto state = random_state(net, rng);
        for (const auto& d : net.devices) {
            if (!d.has_switch() || state.closed(d)) continue;
            auto closed = state;
            closed.switches[d.id] = SwitchPosition::closed;
            const auto before = energized_islands(net, state);
            const auto after = energized_islands(net, closed);
            for (const auto& bus : net.buses) {
                ASSERT_GE(island_fault_level(net, after.islands[after.island_of.at(bus.id)]) + 1e-12,
                          island_fault_level(net, before.islands[before.island_of.at(bus.id)]));
            }
        }
    }
}
