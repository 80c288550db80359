#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace arpsentinel {

enum class Label : std::uint8_t { benign = 0, attack = 1 };

inline const char* label_name(Label l) { return l == Label::attack ? "attack" : "benign"; }
Label parse_label(std::string_view s);

enum class ArpOp : std::uint8_t { request, reply, gratuitous_reply };

const char* arp_op_name(ArpOp op);
ArpOp parse_arp_op(std::string_view s);

// One simulated link-layer ARP message. MACs live in the low 48 bits.
struct ArpFrame {
    std::int64_t tick = 0;
    std::uint32_t src_node = 0;
    ArpOp op = ArpOp::request;
    std::uint32_t sender_ip = 0;
    std::uint64_t sender_mac = 0;
    std::uint32_t target_ip = 0;
    std::uint64_t target_mac = 0;
    Label label = Label::benign;

    bool operator==(const ArpFrame&) const = default;
};

// Simulation parameters. Rates are per 100 ticks (100 ticks is one logical
// second). An empty topology means "generate a star around node 0".
struct SimConfig {
    std::uint32_t node_count = 20;
    std::vector<std::uint32_t> attacker_ids;
    std::int64_t duration_ticks = 10000;
    double benign_request_rate = 50.0;  // mean ARP requests per node per 100 ticks
    double attack_rate = 0.0;           // forged replies per attacker per 100 ticks
    std::int64_t attack_start_tick = 0;
    std::int64_t attack_stop_tick = 0;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> topology;
    std::uint64_t rng_seed = 0;
};

// Throws ConfigError when any field violates its invariants.
void validate_sim_config(const SimConfig& cfg);

// The legitimate ip/mac binding of every node, fixed for a run. Node i owns
// ip 10.0.0.0+i+1 and mac 02:00:00:00:00:00+i+1, so the table is injective
// in both directions and reconstructible from the node count alone.
class GroundTruthTable {
public:
    static GroundTruthTable for_nodes(std::uint32_t node_count);

    std::uint32_t node_count() const { return node_count_; }
    std::uint32_t ip_of(std::uint32_t node) const;
    std::uint64_t mac_of(std::uint32_t node) const;

    // Mac legitimately bound to `ip`, or nullopt for an ip outside the table.
    std::optional<std::uint64_t> mac_for_ip(std::uint32_t ip) const;

    // A frame is an attack iff its sender mac is not the one bound to its
    // sender ip (unknown sender ips count as attacks too).
    Label label_of(std::uint32_t sender_ip, std::uint64_t sender_mac) const;

private:
    std::uint32_t node_count_ = 0;
};

struct Topology {
    std::uint32_t node_count = 0;
    std::vector<std::vector<std::uint32_t>> adjacency;  // sorted, deduplicated
};

// Builds the adjacency structure, generating a star around node 0 when the
// config gives no explicit edges. Explicit edge lists must be connected.
Topology build_topology(const SimConfig& cfg);

// Deterministic in the config (including seed): same config, same frames.
std::vector<ArpFrame> run_simulation(const SimConfig& cfg);

std::string format_ip(std::uint32_t ip);
std::uint32_t parse_ip(std::string_view s);
std::string format_mac(std::uint64_t mac);
std::uint64_t parse_mac(std::string_view s);

// Trace file: `#arp-trace v1` header then one tab-separated record per
// frame. `header_extra` is appended to the header line (e.g. a config hash).
void write_trace(const std::vector<ArpFrame>& frames, const std::filesystem::path& path,
                 std::string_view header_extra = {});
std::vector<ArpFrame> read_trace(const std::filesystem::path& path);

}  // namespace arpsentinel
