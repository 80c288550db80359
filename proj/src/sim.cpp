#include "arpsentinel/sim.hpp"

#include <algorithm>
#include <cstdio>
#include <deque>
#include <fstream>
#include <sstream>

#include "arpsentinel/errors.hpp"
#include "arpsentinel/rng.hpp"
#include "arpsentinel/textio.hpp"

namespace arpsentinel {

namespace {

constexpr std::uint32_t kIpBase = 0x0A000000;        // 10.0.0.0
constexpr std::uint64_t kMacBase = 0x020000000000;   // locally administered
constexpr std::uint64_t kBroadcastMac = 0xFFFFFFFFFFFF;

}  // namespace

Label parse_label(std::string_view s) {
    if (s == "benign") return Label::benign;
    if (s == "attack") return Label::attack;
    throw DataError("unknown label '" + std::string(s) + "'");
}

const char* arp_op_name(ArpOp op) {
    switch (op) {
        case ArpOp::request: return "request";
        case ArpOp::reply: return "reply";
        case ArpOp::gratuitous_reply: return "gratuitous_reply";
    }
    throw InternalError("unhandled ArpOp");
}

ArpOp parse_arp_op(std::string_view s) {
    if (s == "request") return ArpOp::request;
    if (s == "reply") return ArpOp::reply;
    if (s == "gratuitous_reply") return ArpOp::gratuitous_reply;
    throw DataError("unknown ARP op '" + std::string(s) + "'");
}

void validate_sim_config(const SimConfig& cfg) {
    if (cfg.node_count < 2) {
        throw ConfigError("sim.node_count must be >= 2, got " + std::to_string(cfg.node_count));
    }
    for (std::uint32_t id : cfg.attacker_ids) {
        if (id >= cfg.node_count) {
            throw ConfigError("sim.attacker_ids entry " + std::to_string(id) +
                              " is outside 0.." + std::to_string(cfg.node_count - 1));
        }
    }
    if (cfg.duration_ticks < 0) {
        throw ConfigError("sim.duration_ticks must be >= 0");
    }
    if (!(cfg.benign_request_rate > 0.0)) {
        throw ConfigError("sim.benign_request_rate must be > 0");
    }
    if (cfg.attack_rate < 0.0) {
        throw ConfigError("sim.attack_rate must be >= 0");
    }
    if (cfg.attack_start_tick < 0 || cfg.attack_start_tick > cfg.attack_stop_tick ||
        cfg.attack_stop_tick > cfg.duration_ticks) {
        throw ConfigError("sim attack window must satisfy 0 <= start <= stop <= duration");
    }
    for (const auto& [a, b] : cfg.topology) {
        if (a >= cfg.node_count || b >= cfg.node_count) {
            throw ConfigError("sim.topology edge (" + std::to_string(a) + "," + std::to_string(b) +
                              ") references a node outside 0.." + std::to_string(cfg.node_count - 1));
        }
        if (a == b) {
            throw ConfigError("sim.topology contains self loop at node " + std::to_string(a));
        }
    }
}

GroundTruthTable GroundTruthTable::for_nodes(std::uint32_t node_count) {
    GroundTruthTable t;
    t.node_count_ = node_count;
    return t;
}

std::uint32_t GroundTruthTable::ip_of(std::uint32_t node) const {
    if (node >= node_count_) throw DataError("node index " + std::to_string(node) + " out of range");
    return kIpBase + node + 1;
}

std::uint64_t GroundTruthTable::mac_of(std::uint32_t node) const {
    if (node >= node_count_) throw DataError("node index " + std::to_string(node) + " out of range");
    return kMacBase + node + 1;
}

std::optional<std::uint64_t> GroundTruthTable::mac_for_ip(std::uint32_t ip) const {
    if (ip <= kIpBase || ip > kIpBase + node_count_) return std::nullopt;
    return kMacBase + (ip - kIpBase);
}

Label GroundTruthTable::label_of(std::uint32_t sender_ip, std::uint64_t sender_mac) const {
    auto legit = mac_for_ip(sender_ip);
    return (legit && *legit == sender_mac) ? Label::benign : Label::attack;
}

Topology build_topology(const SimConfig& cfg) {
    validate_sim_config(cfg);
    Topology topo;
    topo.node_count = cfg.node_count;
    topo.adjacency.resize(cfg.node_count);

    if (cfg.topology.empty()) {
        // Star: node 0 plays gateway.
        for (std::uint32_t i = 1; i < cfg.node_count; ++i) {
            topo.adjacency[0].push_back(i);
            topo.adjacency[i].push_back(0);
        }
        return topo;
    }

    for (const auto& [a, b] : cfg.topology) {
        topo.adjacency[a].push_back(b);
        topo.adjacency[b].push_back(a);
    }
    for (auto& neighbors : topo.adjacency) {
        std::sort(neighbors.begin(), neighbors.end());
        neighbors.erase(std::unique(neighbors.begin(), neighbors.end()), neighbors.end());
    }

    // Reject disconnected explicit topologies.
    std::vector<bool> seen(cfg.node_count, false);
    std::deque<std::uint32_t> queue{0};
    seen[0] = true;
    std::uint32_t visited = 1;
    while (!queue.empty()) {
        std::uint32_t node = queue.front();
        queue.pop_front();
        for (std::uint32_t next : topo.adjacency[node]) {
            if (!seen[next]) {
                seen[next] = true;
                ++visited;
                queue.push_back(next);
            }
        }
    }
    if (visited != cfg.node_count) {
        throw ConfigError("sim.topology is disconnected: reached " + std::to_string(visited) +
                          " of " + std::to_string(cfg.node_count) + " nodes");
    }
    return topo;
}

std::vector<ArpFrame> run_simulation(const SimConfig& cfg) {
    const Topology topo = build_topology(cfg);
    const auto truth = GroundTruthTable::for_nodes(cfg.node_count);

    std::vector<bool> is_attacker(cfg.node_count, false);
    std::vector<std::uint32_t> attackers(cfg.attacker_ids);
    std::sort(attackers.begin(), attackers.end());
    attackers.erase(std::unique(attackers.begin(), attackers.end()), attackers.end());
    for (std::uint32_t id : attackers) is_attacker[id] = true;

    const double request_mean = cfg.benign_request_rate / 100.0;
    const double attack_mean = cfg.attack_rate / 100.0;

    Rng rng(cfg.rng_seed);
    std::vector<ArpFrame> frames;

    auto emit = [&](std::int64_t tick, std::uint32_t src, ArpOp op, std::uint32_t sender_ip,
                    std::uint64_t sender_mac, std::uint32_t target_ip, std::uint64_t target_mac) {
        frames.push_back({tick, src, op, sender_ip, sender_mac, target_ip, target_mac,
                          truth.label_of(sender_ip, sender_mac)});
    };

    // Replies answering requests from the previous tick, in request order.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pending;  // (replier, requester)
    std::vector<std::pair<std::uint32_t, std::uint32_t>> next_pending;

    for (std::int64_t tick = 0; tick < cfg.duration_ticks; ++tick) {
        next_pending.clear();

        for (const auto& [replier, requester] : pending) {
            emit(tick, replier, ArpOp::reply, truth.ip_of(replier), truth.mac_of(replier),
                 truth.ip_of(requester), truth.mac_of(requester));
        }

        for (std::uint32_t node = 0; node < cfg.node_count; ++node) {
            if (is_attacker[node]) continue;
            const std::uint64_t count = rng.next_poisson(request_mean);
            for (std::uint64_t i = 0; i < count; ++i) {
                const auto& neighbors = topo.adjacency[node];
                const std::uint32_t peer = neighbors[rng.next_below(neighbors.size())];
                emit(tick, node, ArpOp::request, truth.ip_of(node), truth.mac_of(node),
                     truth.ip_of(peer), 0);
                if (tick + 1 < cfg.duration_ticks) {
                    next_pending.emplace_back(peer, node);
                }
            }
        }

        if (tick >= cfg.attack_start_tick && tick < cfg.attack_stop_tick) {
            for (std::uint32_t attacker : attackers) {
                const std::uint64_t count = rng.next_poisson(attack_mean);
                for (std::uint64_t i = 0; i < count; ++i) {
                    // Claim a victim's ip with the attacker's own mac.
                    std::uint32_t victim = static_cast<std::uint32_t>(rng.next_below(cfg.node_count - 1));
                    if (victim >= attacker) ++victim;
                    emit(tick, attacker, ArpOp::gratuitous_reply, truth.ip_of(victim),
                         truth.mac_of(attacker), truth.ip_of(victim), kBroadcastMac);
                }
            }
        }

        pending.swap(next_pending);
    }
    return frames;
}

std::string format_ip(std::uint32_t ip) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%u.%u.%u.%u", ip >> 24, (ip >> 16) & 0xFF, (ip >> 8) & 0xFF,
                  ip & 0xFF);
    return buf;
}

std::uint32_t parse_ip(std::string_view s) {
    auto parts = split(s, '.');
    if (parts.size() != 4) throw DataError("malformed ip '" + std::string(s) + "'");
    std::uint32_t ip = 0;
    for (auto part : parts) {
        auto octet = parse_int<std::uint32_t>(part, "ip octet");
        if (octet > 255) throw DataError("malformed ip '" + std::string(s) + "'");
        ip = (ip << 8) | octet;
    }
    return ip;
}

std::string format_mac(std::uint64_t mac) {
    char buf[18];
    std::snprintf(buf, sizeof(buf), "%02x:%02x:%02x:%02x:%02x:%02x",
                  static_cast<unsigned>((mac >> 40) & 0xFF), static_cast<unsigned>((mac >> 32) & 0xFF),
                  static_cast<unsigned>((mac >> 24) & 0xFF), static_cast<unsigned>((mac >> 16) & 0xFF),
                  static_cast<unsigned>((mac >> 8) & 0xFF), static_cast<unsigned>(mac & 0xFF));
    return buf;
}

std::uint64_t parse_mac(std::string_view s) {
    auto parts = split(s, ':');
    if (parts.size() != 6) throw DataError("malformed mac '" + std::string(s) + "'");
    std::uint64_t mac = 0;
    for (auto part : parts) {
        if (part.size() != 2) throw DataError("malformed mac '" + std::string(s) + "'");
        unsigned byte = 0;
        for (char c : part) {
            unsigned digit;
            if (c >= '0' && c <= '9') digit = static_cast<unsigned>(c - '0');
            else if (c >= 'a' && c <= 'f') digit = static_cast<unsigned>(c - 'a') + 10;
            else if (c >= 'A' && c <= 'F') digit = static_cast<unsigned>(c - 'A') + 10;
            else throw DataError("malformed mac '" + std::string(s) + "'");
            byte = byte * 16 + digit;
        }
        mac = (mac << 8) | byte;
    }
    return mac;
}

void write_trace(const std::vector<ArpFrame>& frames, const std::filesystem::path& path,
                 std::string_view header_extra) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open '" + path.string() + "' for writing");

    out << "#arp-trace v1";
    if (!header_extra.empty()) out << ' ' << header_extra;
    out << '\n';
    for (const ArpFrame& f : frames) {
        out << f.tick << '\t' << f.src_node << '\t' << arp_op_name(f.op) << '\t'
            << format_ip(f.sender_ip) << '\t' << format_mac(f.sender_mac) << '\t'
            << format_ip(f.target_ip) << '\t' << format_mac(f.target_mac) << '\t'
            << label_name(f.label) << '\n';
    }
    if (!out.flush()) throw DataError("write failed for '" + path.string() + "'");
}

std::vector<ArpFrame> read_trace(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open '" + path.string() + "' for reading");

    std::string line;
    if (!std::getline(in, line)) {
        throw DataError(path.string() + ":1: missing #arp-trace v1 header");
    }
    if (!line.starts_with("#arp-trace v1")) {
        throw DataError(path.string() + ":1: expected #arp-trace v1 header, got '" + line + "'");
    }

    std::vector<ArpFrame> frames;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        const std::string where = path.string() + ":" + std::to_string(line_no) + ": ";
        auto fields = split(line, '\t');
        if (fields.size() != 8) {
            throw DataError(where + "expected 8 tab-separated fields, got " +
                            std::to_string(fields.size()));
        }
        try {
            ArpFrame f;
            f.tick = parse_int<std::int64_t>(fields[0], "tick");
            f.src_node = parse_int<std::uint32_t>(fields[1], "src_node");
            f.op = parse_arp_op(fields[2]);
            f.sender_ip = parse_ip(fields[3]);
            f.sender_mac = parse_mac(fields[4]);
            f.target_ip = parse_ip(fields[5]);
            f.target_mac = parse_mac(fields[6]);
            f.label = parse_label(fields[7]);
            frames.push_back(f);
        } catch (const DataError& e) {
            throw DataError(where + e.what());
        }
    }
    return frames;
}

}  // namespace arpsentinel
