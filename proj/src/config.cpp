#include "p2psim/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace p2psim {

std::string_view to_string(Strategy s)
{
    switch (s) {
    case Strategy::normal: return "normal";
    case Strategy::random: return "random";
    case Strategy::mixed: return "mixed";
    }
    return "?";
}

Strategy parse_strategy(std::string_view s)
{
    if (s == "normal" || s == "distance") return Strategy::normal;
    if (s == "random") return Strategy::random;
    if (s == "mixed") return Strategy::mixed;
    throw ConfigError("unknown strategy '" + std::string(s) + "' (expected normal, random or mixed)");
}

std::string_view to_string(LinkDelayModel m)
{
    return m == LinkDelayModel::exponential ? "exponential" : "fixed";
}

LinkDelayModel parse_link_delay_model(std::string_view s)
{
    if (s == "exponential") return LinkDelayModel::exponential;
    if (s == "fixed") return LinkDelayModel::fixed;
    throw ConfigError("unknown link_delay_model '" + std::string(s) + "'");
}

namespace {

std::string_view trim(std::string_view s)
{
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

template <typename Int>
Int parse_int(std::string_view key, std::string_view v)
{
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc{} || ptr != v.data() + v.size()) {
        throw ConfigError("config key '" + std::string(key) + "': expected an integer, got '" + std::string(v) + "'");
    }
    return out;
}

double parse_double(std::string_view key, std::string_view v)
{
    std::string s(v);
    std::size_t used = 0;
    double out = 0;
    try {
        out = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size() || std::isnan(out)) {
        throw ConfigError("config key '" + std::string(key) + "': expected a number, got '" + s + "'");
    }
    return out;
}

bool parse_bool(std::string_view key, std::string_view v)
{
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError("config key '" + std::string(key) + "': expected a boolean, got '" + std::string(v) + "'");
}

std::string num(double v)
{
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

}  // namespace

void Config::set(std::string_view key, std::string_view raw)
{
    const std::string_view v = trim(raw);
    if (key == "node_count") node_count = parse_int<int>(key, v);
    else if (key == "peer_count") peer_count = parse_int<int>(key, v);
    else if (key == "strategy") strategy = parse_strategy(v);
    else if (key == "tx_rate") tx_rate = parse_double(key, v);
    else if (key == "block_interval") block_interval = parse_double(key, v);
    else if (key == "mean_link_delay") mean_link_delay = parse_double(key, v);
    else if (key == "bandwidth") bandwidth = parse_double(key, v);
    else if (key == "tx_validation_delay") tx_validation_delay = parse_double(key, v);
    else if (key == "block_validation_delay") block_validation_delay = parse_double(key, v);
    else if (key == "tx_size") tx_size = parse_int<int>(key, v);
    else if (key == "block_capacity") block_capacity = parse_int<int>(key, v);
    else if (key == "confirmation_depth") confirmation_depth = parse_int<int>(key, v);
    else if (key == "duration") duration = parse_double(key, v);
    else if (key == "master_seed") master_seed = parse_int<std::uint64_t>(key, v);
    else if (key == "replications") replications = parse_int<int>(key, v);
    else if (key == "link_delay_model") link_delay_model = parse_link_delay_model(v);
    else if (key == "oracle_mode") {
        if (parse_bool(key, v)) enable_oracle_mode(mean_link_delay);
        else oracle_mode = false;
    }
    else if (key == "msg_header_size") msg_header_size = parse_int<int>(key, v);
    else if (key == "inv_item_size") inv_item_size = parse_int<int>(key, v);
    else if (key == "block_header_size") block_header_size = parse_int<int>(key, v);
    else throw ConfigError("unknown config key '" + std::string(key) + "'");
}

std::map<std::string, std::string> Config::to_map() const
{
    return {
        {"node_count", std::to_string(node_count)},
        {"peer_count", std::to_string(peer_count)},
        {"strategy", std::string(to_string(strategy))},
        {"tx_rate", num(tx_rate)},
        {"block_interval", num(block_interval)},
        {"mean_link_delay", num(mean_link_delay)},
        {"bandwidth", num(bandwidth)},
        {"tx_validation_delay", num(tx_validation_delay)},
        {"block_validation_delay", num(block_validation_delay)},
        {"tx_size", std::to_string(tx_size)},
        {"block_capacity", std::to_string(block_capacity)},
        {"confirmation_depth", std::to_string(confirmation_depth)},
        {"duration", num(duration)},
        {"master_seed", std::to_string(master_seed)},
        {"replications", std::to_string(replications)},
        {"link_delay_model", std::string(to_string(link_delay_model))},
        {"oracle_mode", oracle_mode ? "true" : "false"},
        {"msg_header_size", std::to_string(msg_header_size)},
        {"inv_item_size", std::to_string(inv_item_size)},
        {"block_header_size", std::to_string(block_header_size)},
    };
}

void Config::enable_oracle_mode(double hop_delay_seconds)
{
    oracle_mode = true;
    link_delay_model = LinkDelayModel::fixed;
    mean_link_delay = hop_delay_seconds;
    bandwidth = std::numeric_limits<double>::infinity();
    tx_validation_delay = 0.0;
    block_validation_delay = 0.0;
}

void Config::validate() const
{
    auto fail = [](const std::string& key, const std::string& why) { throw ConfigError(key + ": " + why); };
    if (node_count < 3) fail("node_count", "must be at least 3");
    if (peer_count < 1 || peer_count > node_count - 2) fail("peer_count", "must lie in [1, node_count-2]");
    if (strategy == Strategy::mixed && peer_count < 2) fail("peer_count", "mixed strategy needs at least 2 peers");
    if (!(tx_rate > 0) || !std::isfinite(tx_rate)) fail("tx_rate", "must be positive");
    if (!(block_interval > 0) || !std::isfinite(block_interval)) fail("block_interval", "must be positive");
    if (!(duration > 0) || !std::isfinite(duration)) fail("duration", "must be positive");
    if (!(bandwidth > 0)) fail("bandwidth", "must be positive (inf disables serialization)");
    if (!(mean_link_delay >= 0) || !std::isfinite(mean_link_delay)) fail("mean_link_delay", "must be non-negative");
    if (link_delay_model == LinkDelayModel::exponential && !(mean_link_delay > 0))
        fail("mean_link_delay", "exponential link delay needs a positive mean");
    if (!(tx_validation_delay >= 0) || !std::isfinite(tx_validation_delay))
        fail("tx_validation_delay", "must be non-negative");
    if (!(block_validation_delay >= 0) || !std::isfinite(block_validation_delay))
        fail("block_validation_delay", "must be non-negative");
    if (tx_size <= 0) fail("tx_size", "must be positive");
    if (block_capacity <= 0) fail("block_capacity", "must be positive");
    if (confirmation_depth != 6) fail("confirmation_depth", "is fixed at 6");
    if (replications < 1) fail("replications", "must be at least 1");
    if (msg_header_size <= 0 || inv_item_size <= 0 || block_header_size <= 0)
        fail("msg_header_size", "message size constants must be positive");
}

Config parse_config_text(std::string_view text, Config base)
{
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find_first_of("=:");
        if (eq == std::string_view::npos) {
            throw ConfigError("line " + std::to_string(line_no) + ": expected 'key = value'");
        }
        base.set(trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return base;
}

Config load_config(const std::filesystem::path& path, Config base)
{
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), base);
}

}  // namespace p2psim
