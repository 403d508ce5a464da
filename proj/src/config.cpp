#include "anct/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace anct {

std::int64_t trust_units(double v) {
    return static_cast<std::int64_t>(std::llround(v * 1e6));
}

namespace {

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

bool parse_u32(const std::string& v, std::uint32_t& out) {
    try {
        std::size_t pos = 0;
        unsigned long long x = std::stoull(v, &pos);
        if (pos != v.size() || x > 0xffffffffULL) return false;
        out = static_cast<std::uint32_t>(x);
        return true;
    } catch (...) { return false; }
}

bool parse_u64(const std::string& v, std::uint64_t& out) {
    try {
        std::size_t pos = 0;
        out = std::stoull(v, &pos);
        return pos == v.size();
    } catch (...) { return false; }
}

bool parse_f64(const std::string& v, double& out) {
    try {
        std::size_t pos = 0;
        out = std::stod(v, &pos);
        return pos == v.size() && std::isfinite(out);
    } catch (...) { return false; }
}

// flow_pairs value: "auto" or comma-separated "src-dst" entries.
bool parse_flows(const std::string& v, std::vector<FlowKey>& out) {
    out.clear();
    if (v == "auto") return true;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        std::size_t dash = item.find('-');
        if (dash == std::string::npos) return false;
        std::uint32_t a = 0, b = 0;
        if (!parse_u32(trim(item.substr(0, dash)), a)) return false;
        if (!parse_u32(trim(item.substr(dash + 1)), b)) return false;
        out.push_back(FlowKey{a, b});
    }
    return !out.empty();
}

std::string flows_to_string(const std::vector<FlowKey>& flows) {
    if (flows.empty()) return "auto";
    std::string s;
    for (std::size_t i = 0; i < flows.size(); ++i) {
        if (i) s += ",";
        s += std::to_string(flows[i].source) + "-" + std::to_string(flows[i].destination);
    }
    return s;
}

std::string fmt_f64(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::optional<ConfigError> check_config(const ScenarioConfig& c) {
    auto err = [](const std::string& m) { return std::optional<ConfigError>{ConfigError{m}}; };

    if (c.node_count < 2) return err("node_count must be >= 2");
    if (!(c.area_width > 0.0)) return err("area_width must be > 0");
    if (!(c.area_height > 0.0)) return err("area_height must be > 0");
    if (!(c.radio_range > 0.0)) return err("radio_range must be > 0");
    if (!(c.sim_duration > 0.0)) return err("sim_duration must be > 0");
    if (c.channel_capacity == 0) return err("channel_capacity must be > 0");
    if (c.packet_size == 0) return err("packet_size must be > 0");
    if (!(c.cbr_rate > 0.0)) return err("cbr_rate must be > 0");
    if (c.speed < 0.0) return err("speed must be >= 0");
    if (c.pause_time < 0.0) return err("pause_time must be >= 0");
    if (!(c.delta1 > 0.0)) return err("delta1 must be > 0");
    if (!(c.delta2 > 0.0)) return err("delta2 must be > 0");
    if (!(c.delta2 < c.delta1)) return err("delta2 must be < delta1");
    if (!(c.s_min > 0.0 && c.s_min <= 1.0)) return err("s_min must be in (0, 1]");
    if (!(c.rrep_timeout > 0.0)) return err("rrep_timeout must be > 0");
    if (c.attacker_count >= c.node_count) return err("attacker_count must be < node_count");
    if (c.attack_kind == AttackKind::none && c.attacker_count > 0)
        return err("attacker_count requires an attack_kind");
    if (c.attack_kind == AttackKind::wormhole && c.attacker_count % 2 != 0)
        return err("wormhole attackers must come in pairs");
    if (c.attack_kind == AttackKind::flooding && c.attacker_count > 0 && !(c.flood_rate > 0.0))
        return err("flood_rate must be > 0");
    if (!(c.loss_probability >= 0.0 && c.loss_probability <= 1.0))
        return err("loss_probability must be in [0, 1]");
    if (c.contention_mean_ms < 0.0) return err("contention_mean_ms must be >= 0");
    if (c.contention_cap_ms < 0.0) return err("contention_cap_ms must be >= 0");
    if (c.queue_cap == 0) return err("queue_cap must be >= 1");
    if (!(c.mobility_tick > 0.0)) return err("mobility_tick must be > 0");
    if (!(c.retry_backoff > 0.0)) return err("retry_backoff must be > 0");
    if (c.rrep_collect_window < 0.0) return err("rrep_collect_window must be >= 0");
    if (c.flow_start < 0.0) return err("flow_start must be >= 0");

    std::set<NodeId> endpoints;
    for (const auto& f : c.flow_pairs) {
        if (f.source >= c.node_count || f.destination >= c.node_count)
            return err("flow endpoint out of range");
        if (f.source == f.destination) return err("flow source equals destination");
        endpoints.insert(f.source);
        endpoints.insert(f.destination);
    }
    if (!c.flow_pairs.empty() &&
        c.attacker_count > c.node_count - static_cast<std::uint32_t>(endpoints.size()))
        return err("attacker_count leaves no non-endpoint nodes");

    return std::nullopt;
}

bool validate_config(const ScenarioConfig& cfg, ValidatedConfig& out, std::string& err) {
    if (auto e = check_config(cfg)) {
        err = e->message;
        return false;
    }
    out.cfg = cfg;
    out.delta1_units = trust_units(cfg.delta1);
    out.delta2_units = trust_units(cfg.delta2);
    out.t_trust_units = trust_units(cfg.t_trust);
    out.tc_initial_units = trust_units(cfg.tc_initial);
    return true;
}

bool apply_override(ScenarioConfig& c, const std::string& key, const std::string& value,
                    std::string& err) {
    auto bad = [&](const char* what) {
        err = "invalid value for '" + key + "': expected " + what;
        return false;
    };

    if (key == "node_count") return parse_u32(value, c.node_count) || bad("integer");
    if (key == "area_width") return parse_f64(value, c.area_width) || bad("number");
    if (key == "area_height") return parse_f64(value, c.area_height) || bad("number");
    if (key == "radio_range") return parse_f64(value, c.radio_range) || bad("number");
    if (key == "sim_duration") return parse_f64(value, c.sim_duration) || bad("number");
    if (key == "channel_capacity") return parse_u64(value, c.channel_capacity) || bad("integer");
    if (key == "packet_size") return parse_u32(value, c.packet_size) || bad("integer");
    if (key == "cbr_rate") return parse_f64(value, c.cbr_rate) || bad("number");
    if (key == "flow_pairs") return parse_flows(value, c.flow_pairs) || bad("'auto' or src-dst list");
    if (key == "speed") return parse_f64(value, c.speed) || bad("number");
    if (key == "pause_time") return parse_f64(value, c.pause_time) || bad("number");
    if (key == "rng_seed") return parse_u64(value, c.rng_seed) || bad("integer");
    if (key == "delta1") return parse_f64(value, c.delta1) || bad("number");
    if (key == "delta2") return parse_f64(value, c.delta2) || bad("number");
    if (key == "s_min") return parse_f64(value, c.s_min) || bad("number");
    if (key == "t_trust") return parse_f64(value, c.t_trust) || bad("number");
    if (key == "tc_initial") return parse_f64(value, c.tc_initial) || bad("number");
    if (key == "rrep_timeout") return parse_f64(value, c.rrep_timeout) || bad("number");
    if (key == "attacker_count") return parse_u32(value, c.attacker_count) || bad("integer");
    if (key == "attack_kind")
        return attack_kind_from_string(value, c.attack_kind) || bad("none|blackhole|flooding|wormhole");
    if (key == "protocol")
        return protocol_from_string(value, c.protocol) || bad("anct|baseline_aodv");
    if (key == "loss_probability") return parse_f64(value, c.loss_probability) || bad("number");
    if (key == "contention_mean_ms") return parse_f64(value, c.contention_mean_ms) || bad("number");
    if (key == "contention_cap_ms") return parse_f64(value, c.contention_cap_ms) || bad("number");
    if (key == "queue_cap") return parse_u32(value, c.queue_cap) || bad("integer");
    if (key == "mobility_tick") return parse_f64(value, c.mobility_tick) || bad("number");
    if (key == "max_retries") return parse_u32(value, c.max_retries) || bad("integer");
    if (key == "retry_backoff") return parse_f64(value, c.retry_backoff) || bad("number");
    if (key == "rrep_collect_window") return parse_f64(value, c.rrep_collect_window) || bad("number");
    if (key == "flow_start") return parse_f64(value, c.flow_start) || bad("number");
    if (key == "flood_rate") return parse_f64(value, c.flood_rate) || bad("number");

    err = "unknown key '" + key + "'";
    return false;
}

bool parse_config_text(const std::string& text, ScenarioConfig& out, std::string& err) {
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        std::size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            err = "line " + std::to_string(lineno) + ": expected 'key = value'";
            return false;
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (!apply_override(out, key, value, err)) {
            err = "line " + std::to_string(lineno) + ": " + err;
            return false;
        }
    }
    return true;
}

bool load_config_file(const std::string& path, ScenarioConfig& out, std::string& err) {
    std::ifstream f(path);
    if (!f) {
        err = "cannot open config file '" + path + "'";
        return false;
    }
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config_text(buf.str(), out, err);
}

std::string serialize_config(const ScenarioConfig& c) {
    std::string s;
    auto kv = [&](const char* k, const std::string& v) { s += k; s += " = "; s += v; s += "\n"; };
    kv("node_count", std::to_string(c.node_count));
    kv("area_width", fmt_f64(c.area_width));
    kv("area_height", fmt_f64(c.area_height));
    kv("radio_range", fmt_f64(c.radio_range));
    kv("sim_duration", fmt_f64(c.sim_duration));
    kv("channel_capacity", std::to_string(c.channel_capacity));
    kv("packet_size", std::to_string(c.packet_size));
    kv("cbr_rate", fmt_f64(c.cbr_rate));
    kv("flow_pairs", flows_to_string(c.flow_pairs));
    kv("speed", fmt_f64(c.speed));
    kv("pause_time", fmt_f64(c.pause_time));
    kv("rng_seed", std::to_string(c.rng_seed));
    kv("delta1", fmt_f64(c.delta1));
    kv("delta2", fmt_f64(c.delta2));
    kv("s_min", fmt_f64(c.s_min));
    kv("t_trust", fmt_f64(c.t_trust));
    kv("tc_initial", fmt_f64(c.tc_initial));
    kv("rrep_timeout", fmt_f64(c.rrep_timeout));
    kv("attacker_count", std::to_string(c.attacker_count));
    kv("attack_kind", to_string(c.attack_kind));
    kv("protocol", to_string(c.protocol));
    kv("loss_probability", fmt_f64(c.loss_probability));
    kv("contention_mean_ms", fmt_f64(c.contention_mean_ms));
    kv("contention_cap_ms", fmt_f64(c.contention_cap_ms));
    kv("queue_cap", std::to_string(c.queue_cap));
    kv("mobility_tick", fmt_f64(c.mobility_tick));
    kv("max_retries", std::to_string(c.max_retries));
    kv("retry_backoff", fmt_f64(c.retry_backoff));
    kv("rrep_collect_window", fmt_f64(c.rrep_collect_window));
    kv("flow_start", fmt_f64(c.flow_start));
    kv("flood_rate", fmt_f64(c.flood_rate));
    return s;
}

} // namespace anct
