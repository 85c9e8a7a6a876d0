#pragma once

// Bundled study networks. Values labelled "reported" come from the Haxby
// Road / Huntington New Lane planning study; everything else is synthetic
// and labelled as such in the emitted files.

#include <string>
#include <utility>
#include <vector>

#include "gridhop/document.hpp"

namespace gridhop::fixtures {

inline constexpr const char* kSynthetic = "synthetic";

namespace detail {

inline Bus bus(std::string id, BusKind kind, std::string provenance = kSynthetic) {
    return {std::move(id), kind, std::nullopt, std::move(provenance)};
}

inline Source infeed(std::string id, std::string bus, double per_circuit, int circuits, double fault,
                     std::string provenance = kSynthetic) {
    return {std::move(id), std::move(bus), per_circuit, circuits, fault, SourceKind::grid_infeed, std::move(provenance)};
}

inline Branch branch(std::string id, std::string from, std::string to, double rating,
                     std::string provenance = kSynthetic) {
    return {std::move(id), std::move(from), std::move(to), rating, true, false, std::move(provenance)};
}

inline Demand demand(std::string id, std::string bus, double mva, std::string provenance = kSynthetic) {
    return {std::move(id), std::move(bus), mva, std::move(provenance)};
}

inline SwitchableDevice nop(std::string id, std::string from, std::string to) {
    return {std::move(id), DeviceKind::nop, {std::move(from), std::move(to)}, SwitchPosition::open, 0.0, kSynthetic};
}

inline SwitchableDevice ncp(std::string id, std::string from, std::string to) {
    return {std::move(id), DeviceKind::ncp, {std::move(from), std::move(to)}, SwitchPosition::closed, 0.0, kSynthetic};
}

} // namespace detail

/// Haxby Road (A) interconnected to Huntington New Lane (B) through feeder
/// B3. Base demands are the 2030 figures; scenario "2033" raises the lumped
/// Haxby Road load so the substation total reaches 16.7 MVA.
inline NetworkDocument haxby() {
    using namespace detail;
    NetworkDocument doc;
    doc.name = "haxby";
    doc.description =
        "Haxby Road (15 MVA circuits) interconnected with Huntington New Lane (24 MVA circuits) via feeder B3. "
        "Unmodelled Haxby Road feeders are lumped into D_A12 = substation total - D_A0.";
    auto& net = doc.network;
    net.buses = {bus("HAXBY_RD", BusKind::substation_busbar), bus("B3_HEAD", BusKind::feeder_node),
                 bus("B3_END", BusKind::feeder_node), bus("HNL_FDR", BusKind::feeder_node),
                 bus("HUNTINGTON_NL", BusKind::substation_busbar)};
    net.sources = {infeed("SRC_HAXBY", "HAXBY_RD", 15.0, 2, 250.0, "reported capacity; synthetic fault_contribution"),
                   infeed("SRC_HNL", "HUNTINGTON_NL", 24.0, 2, 250.0, "reported capacity; synthetic fault_contribution")};
    net.branches = {branch("B3", "B3_HEAD", "B3_END", 5.5),
                    branch("C_AB", "HNL_FDR", "HUNTINGTON_NL", 5.5, "reported")};
    net.demands = {demand("D_A12", "HAXBY_RD", 12.5, "derived-from-totals"), demand("D_A0", "B3_END", 0.8, "reported"),
                   demand("D_B0", "HNL_FDR", 0.6, "reported"), demand("D_HNL", "HUNTINGTON_NL", 20.0)};
    net.devices = {ncp("NCP_A", "HAXBY_RD", "B3_HEAD"), nop("NOP_AB", "B3_END", "HNL_FDR")};
    doc.demand_scenarios = {{"2030", {{"D_A12", 12.5}}}, {"2033", {{"D_A12", 15.9}}}};
    doc.econ = econ::EconParams{0.0325, 10, 19272.0, 5, "$"};
    doc.options = {{"Option 1", DeviceKind::sop, {"NOP_AB"}}, {"Option 2", DeviceKind::hop2, {"NCP_A"}}};
    return doc;
}

/// Two substations joined by circuit C_AB: NCP A at the head of the feeder
/// carrying D_A0, the NOP at its far end. D_A1 and D_A2 cannot be
/// transferred.
inline NetworkDocument fig2() {
    using namespace detail;
    NetworkDocument doc;
    doc.name = "fig2";
    doc.description = "Simple interconnection between two substations; lumped loads D_A1, D_A2 stay on substation A.";
    auto& net = doc.network;
    net.buses = {bus("SUB_A", BusKind::substation_busbar), bus("A_F2", BusKind::feeder_node),
                 bus("A_F0", BusKind::feeder_node), bus("B_F0", BusKind::feeder_node),
                 bus("SUB_B", BusKind::substation_busbar)};
    net.sources = {infeed("SRC_A", "SUB_A", 10.0, 2, 250.0), infeed("SRC_B", "SUB_B", 12.0, 2, 250.0)};
    net.branches = {branch("FDR_A2", "SUB_A", "A_F2", 6.0), branch("C_AB", "B_F0", "SUB_B", 3.0)};
    net.demands = {demand("D_A1", "SUB_A", 6.0), demand("D_A2", "A_F2", 4.5), demand("D_A0", "A_F0", 1.0),
                   demand("D_B0", "B_F0", 1.0), demand("D_B", "SUB_B", 8.0)};
    net.devices = {ncp("NCP_A", "SUB_A", "A_F0"), nop("NOP_AB", "A_F0", "B_F0")};
    doc.options = {{"Option 1", DeviceKind::sop, {"NOP_AB"}}, {"Option 2", DeviceKind::hop2, {"NCP_A"}}};
    return doc;
}

/// DG on substation A's feeder raises fault level at substation B beyond its
/// switchgear limit if the DG section is transferred, so NCP DG must open
/// whenever the NOP closes.
inline NetworkDocument fig3() {
    using namespace detail;
    NetworkDocument doc;
    doc.name = "fig3";
    doc.description = "Simple interconnection with a DG fault-level constraint at substation B.";
    auto& net = doc.network;
    net.buses = {bus("SUB_A", BusKind::substation_busbar), bus("DG_NODE", BusKind::feeder_node),
                 bus("MID", BusKind::feeder_node), bus("B_F", BusKind::feeder_node),
                 bus("SUB_B", BusKind::substation_busbar)};
    net.buses.back().fault_level_limit = 220.0;
    net.sources = {infeed("SRC_A", "SUB_A", 10.0, 2, 200.0), infeed("SRC_B", "SUB_B", 20.0, 2, 200.0),
                   Source{"DG", "DG_NODE", 2.0, 1, 60.0, SourceKind::dg, kSynthetic}};
    net.branches = {branch("FDR_B", "B_F", "SUB_B", 5.0)};
    net.demands = {demand("D_A1", "SUB_A", 9.0), demand("D_A0", "DG_NODE", 1.5), demand("D_mid", "MID", 1.0),
                   demand("D_B", "SUB_B", 15.0)};
    net.devices = {ncp("NCP_A", "SUB_A", "DG_NODE"), ncp("NCP_DG", "DG_NODE", "MID"), nop("NOP", "MID", "B_F")};
    doc.options = {{"Option 3", DeviceKind::hop2, {"NCP_DG"}}, {"Option 4", DeviceKind::sop, {"NOP"}}};
    return doc;
}

/// Teed interconnection: the section behind NCP I (loads D_I and D_h) is fed
/// from substation I, itself supplied over one incoming HV circuit from
/// substation C's busbar. Tee point T meets substations C, D and E through
/// NOP C, NOP D and NOP E; the feeder cables limit what each can pick up.
inline NetworkDocument fig4() {
    using namespace detail;
    NetworkDocument doc;
    doc.name = "fig4";
    doc.description = "Teed interconnection of substations C, D and E around tee point T.";
    auto& net = doc.network;
    net.buses = {bus("SUB_C", BusKind::substation_busbar), bus("SUB_D", BusKind::substation_busbar),
                 bus("SUB_E", BusKind::substation_busbar), bus("SUB_I", BusKind::substation_busbar),
                 bus("X", BusKind::feeder_node),           bus("T", BusKind::tee_point),
                 bus("Y", BusKind::feeder_node),           bus("C_F", BusKind::feeder_node),
                 bus("D_F", BusKind::feeder_node),         bus("E_F", BusKind::feeder_node)};
    net.sources = {infeed("SRC_C", "SUB_C", 15.0, 2, 200.0), infeed("SRC_D", "SUB_D", 10.0, 2, 200.0),
                   infeed("SRC_E", "SUB_E", 10.0, 2, 200.0)};
    Branch hv = branch("HV_I", "SUB_C", "SUB_I", 10.0);
    hv.incoming = true;
    net.branches = {hv,
                    branch("FDR_X", "X", "T", 5.0),
                    branch("FDR_Y", "T", "Y", 5.0),
                    branch("FDR_C", "C_F", "SUB_C", 1.0),
                    branch("FDR_D", "D_F", "SUB_D", 2.0),
                    branch("FDR_E", "E_F", "SUB_E", 1.5)};
    net.demands = {demand("D_C", "SUB_C", 10.0), demand("D_D", "SUB_D", 8.0), demand("D_E", "SUB_E", 8.0),
                   demand("D_I", "X", 2.0), demand("D_h", "Y", 1.0)};
    net.devices = {ncp("NCP_I", "SUB_I", "X"), nop("NOP_C", "T", "C_F"), nop("NOP_D", "T", "D_F"),
                   nop("NOP_E", "T", "E_F")};
    doc.options = {{"Option 5", DeviceKind::hop1, {"NOP_E"}},
                   {"Option 6", DeviceKind::sop, {"NOP_C", "NOP_D", "NOP_E"}}};
    return doc;
}

inline std::vector<std::pair<std::string, NetworkDocument>> all() {
    return {{"fig2", fig2()}, {"fig3", fig3()}, {"fig4", fig4()}, {"haxby", haxby()}};
}

} // namespace gridhop::fixtures
