#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltcoin/delta_bound.hpp"
#include "ltcoin/keyrate.hpp"
#include "ltcoin/phase_error.hpp"
#include "ltcoin/source_model.hpp"

namespace ltcoin::cli {

struct RunConfig {
    Protocol protocol = Protocol::BB84;
    double delta = 0.063;
    double epsilon = 1e-6;
    std::vector<double> epsilon_components;
    double dist_min = 0.0;
    double dist_max = 200.0;
    double dist_step = 5.0;
    DeltaMethod delta_method = DeltaMethod::Sdp;
    RateInputs rates;
    double dark_count = 1e-8;
    double det_efficiency = 0.73;
    std::optional<double> receiver_delta;
    double p_zc = 0.5;
    double tol = 1e-9;
    ZTermWeight z_weight = ZTermWeight::Full;
    // fmax
    double l_fib_km = 100.0;
    double l_act_km = 0.0;
    double refractive_index = 1.5;
    double speed_of_light = kSpeedOfLight;
    // delta
    int oracle_iters = 10000;
    // simulate
    std::uint64_t seed = 42;
    int seeds = 1;
    std::uint64_t rounds = 1000000;
    double sim_distance_km = 20.0;
    double corrupt_ref = 1.0;
    std::string output;

    double effective_epsilon() const;
    std::vector<double> grid() const;
    void validate() const;
};

struct KeyInfo {
    std::string key;
    std::string help;
};

const std::vector<KeyInfo>& config_keys();

// flat "key = value" lines; '#' starts a comment
std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin);
std::map<std::string, std::string> read_config_file(const std::string& path);

void apply(RunConfig& cfg, const std::string& key, const std::string& value);
void apply_all(RunConfig& cfg, const std::map<std::string, std::string>& values);

}  // namespace ltcoin::cli
