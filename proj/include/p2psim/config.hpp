#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>

namespace p2psim {

enum class Strategy { normal, random, mixed };

std::string_view to_string(Strategy s);
Strategy parse_strategy(std::string_view s);

//! How the per-message link delay is drawn.
enum class LinkDelayModel { exponential, fixed };

std::string_view to_string(LinkDelayModel m);
LinkDelayModel parse_link_delay_model(std::string_view s);

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Config {
    int node_count = 104;
    int peer_count = 8;
    Strategy strategy = Strategy::normal;
    //! Transactions per minute per generating node.
    double tx_rate = 3.0;
    //! Network-wide mean seconds between blocks.
    double block_interval = 600.0;
    double mean_link_delay = 0.011;
    //! Bits per second per directed link; +inf disables serialization delay.
    double bandwidth = 10'000'000.0;
    double tx_validation_delay = 0.080;
    double block_validation_delay = 0.080;
    int tx_size = 500;
    int block_capacity = 2000;
    int confirmation_depth = 6;
    double duration = 7200.0;
    std::uint64_t master_seed = 1;
    int replications = 10;

    LinkDelayModel link_delay_model = LinkDelayModel::exponential;
    //! Degenerate mode: Inv/GetData cost nothing, payloads take exactly
    //! mean_link_delay, serialization and validation are free.
    bool oracle_mode = false;

    int msg_header_size = 24;
    int inv_item_size = 61;
    int block_header_size = 80;

    //! Throws ConfigError naming the offending key.
    void validate() const;

    //! Set one field from its textual key/value; throws ConfigError on unknown key or bad value.
    void set(std::string_view key, std::string_view value);

    //! All keys with their current values rendered as text, in a stable order.
    std::map<std::string, std::string> to_map() const;

    //! Switch to the zero-cost degenerate configuration (per-hop delay kept in mean_link_delay).
    void enable_oracle_mode(double hop_delay_seconds = 0.0);
};

//! Parse "key = value" lines ('#' starts a comment) on top of `base`.
Config load_config(const std::filesystem::path& path, Config base = {});
Config parse_config_text(std::string_view text, Config base = {});

}  // namespace p2psim
