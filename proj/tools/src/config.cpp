#include "config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ltcoin/errors.hpp"

namespace ltcoin::cli {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    double out = 0.0;
    const char* first = v.data();
    const char* last = v.data() + v.size();
    const auto [ptr, ec] = std::from_chars(first, last, out);
    if (ec != std::errc() || ptr != last || !std::isfinite(out)) {
        throw InvalidArgument("invalid number for " + key + ": '" + v + "'");
    }
    return out;
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw InvalidArgument("invalid integer for " + key + ": '" + v + "'");
    }
    return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_double(key, trim(item)));
    if (out.empty()) throw InvalidArgument("empty list for " + key);
    return out;
}

}  // namespace

const std::vector<KeyInfo>& config_keys() {
    static const std::vector<KeyInfo> keys = {
        {"protocol", "three-state or bb84"},
        {"delta", "qubit flaw in radians"},
        {"epsilon", "side-channel fidelity deficit"},
        {"epsilon_components", "comma-separated component deficits, combined into epsilon"},
        {"dist_min", "first distance in km"},
        {"dist_max", "last distance in km"},
        {"dist_step", "grid step in km"},
        {"delta_method", "sdp or analytic"},
        {"p_za", "Alice Z-basis probability"},
        {"p_zb", "Bob Z-basis probability"},
        {"f_ec", "error-correction efficiency"},
        {"rep_rate_hz", "source repetition rate"},
        {"dark_count", "dark-count probability per detector"},
        {"det_efficiency", "detector efficiency"},
        {"receiver_delta", "receiver modulator flaw in radians (defaults to delta)"},
        {"p_zc", "probability of marking a coin round Z_C"},
        {"tol", "SDP tolerance"},
        {"z_weight", "three-state reference Z-term weight: full or half"},
        {"l_fib_km", "fibre length in km"},
        {"l_act_km", "straight-line distance in km"},
        {"refractive_index", "fibre refractive index"},
        {"speed_of_light", "speed of light in m/s"},
        {"oracle_iters", "primal oracle iterations"},
        {"seed", "first simulation seed"},
        {"seeds", "number of simulation seeds"},
        {"rounds", "simulated rounds per seed"},
        {"sim_distance_km", "simulated channel length in km"},
        {"corrupt_ref", "factor applied to p(REF|l) in the simulated plan"},
        {"output", "output path (standard output when empty)"},
    };
    return keys;
}

double RunConfig::effective_epsilon() const {
    return epsilon_components.empty() ? epsilon : combine_epsilons(epsilon_components);
}

std::vector<double> RunConfig::grid() const {
    std::vector<double> g;
    const auto n = static_cast<long long>(std::floor((dist_max - dist_min) / dist_step + 1e-9));
    for (long long i = 0; i <= n; ++i) g.push_back(dist_min + static_cast<double>(i) * dist_step);
    return g;
}

void RunConfig::validate() const {
    if (!(delta >= 0.0 && delta < 3.141592653589793)) throw InvalidArgument("delta must lie in [0, pi)");
    if (!(effective_epsilon() >= 0.0 && effective_epsilon() <= 1.0)) throw InvalidArgument("epsilon must lie in [0, 1]");
    if (!(dist_min >= 0.0 && dist_max >= dist_min)) throw InvalidArgument("invalid distance range");
    if (!(dist_step > 0.0)) throw InvalidArgument("dist_step must be positive");
    if (delta_method == DeltaMethod::Analytic && protocol != Protocol::ThreeState) {
        throw InvalidArgument("the analytic method requires the three-state protocol");
    }
    if (!(p_zc > 0.0 && p_zc < 1.0)) throw InvalidArgument("p_zc must lie in (0, 1)");
    if (!(tol > 0.0)) throw InvalidArgument("tol must be positive");
    if (seeds < 1) throw InvalidArgument("seeds must be at least 1");
    if (rounds < 1) throw InvalidArgument("rounds must be at least 1");
    if (!(corrupt_ref >= 0.0 && corrupt_ref <= 1.0)) throw InvalidArgument("corrupt_ref must lie in [0, 1]");
    if (oracle_iters < 1) throw InvalidArgument("oracle_iters must be at least 1");
    rates.validate();
}

std::map<std::string, std::string> parse_config_text(const std::string& text, const std::string& origin) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string line;
    int lineno = 0;
    while (std::getline(ss, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        bool known = false;
        for (const auto& k : config_keys()) known = known || k.key == key;
        if (!known) throw InvalidArgument(origin + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
        out[key] = value;
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InvalidArgument("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), path);
}

void apply(RunConfig& c, const std::string& key, const std::string& v) {
    if (key == "protocol") {
        c.protocol = parse_protocol(v);
    } else if (key == "delta") {
        c.delta = to_double(key, v);
    } else if (key == "epsilon") {
        c.epsilon = to_double(key, v);
    } else if (key == "epsilon_components") {
        c.epsilon_components = to_list(key, v);
    } else if (key == "dist_min") {
        c.dist_min = to_double(key, v);
    } else if (key == "dist_max") {
        c.dist_max = to_double(key, v);
    } else if (key == "dist_step") {
        c.dist_step = to_double(key, v);
    } else if (key == "delta_method") {
        c.delta_method = parse_delta_method(v);
        if (c.delta_method == DeltaMethod::GllpSdp) throw InvalidArgument("use the gllp-curve command for GLLP");
    } else if (key == "p_za") {
        c.rates.p_za = to_double(key, v);
        c.rates.p_xa = 1.0 - c.rates.p_za;
    } else if (key == "p_zb") {
        c.rates.p_zb = to_double(key, v);
        c.rates.p_xb = 1.0 - c.rates.p_zb;
    } else if (key == "f_ec") {
        c.rates.f_ec = to_double(key, v);
    } else if (key == "rep_rate_hz") {
        c.rates.rep_rate_hz = to_double(key, v);
    } else if (key == "dark_count") {
        c.dark_count = to_double(key, v);
    } else if (key == "det_efficiency") {
        c.det_efficiency = to_double(key, v);
    } else if (key == "receiver_delta") {
        c.receiver_delta = to_double(key, v);
    } else if (key == "p_zc") {
        c.p_zc = to_double(key, v);
    } else if (key == "tol") {
        c.tol = to_double(key, v);
    } else if (key == "z_weight") {
        if (v == "full") {
            c.z_weight = ZTermWeight::Full;
        } else if (v == "half") {
            c.z_weight = ZTermWeight::Half;
        } else {
            throw InvalidArgument("z_weight must be full or half");
        }
    } else if (key == "l_fib_km") {
        c.l_fib_km = to_double(key, v);
    } else if (key == "l_act_km") {
        c.l_act_km = to_double(key, v);
    } else if (key == "refractive_index") {
        c.refractive_index = to_double(key, v);
    } else if (key == "speed_of_light") {
        c.speed_of_light = to_double(key, v);
    } else if (key == "oracle_iters") {
        c.oracle_iters = static_cast<int>(to_uint(key, v));
    } else if (key == "seed") {
        c.seed = to_uint(key, v);
    } else if (key == "seeds") {
        c.seeds = static_cast<int>(to_uint(key, v));
    } else if (key == "rounds") {
        c.rounds = to_uint(key, v);
    } else if (key == "sim_distance_km") {
        c.sim_distance_km = to_double(key, v);
    } else if (key == "corrupt_ref") {
        c.corrupt_ref = to_double(key, v);
    } else if (key == "output") {
        c.output = v;
    } else {
        throw InvalidArgument("unknown key '" + key + "'");
    }
}

void apply_all(RunConfig& cfg, const std::map<std::string, std::string>& values) {
    for (const auto& [k, v] : values) apply(cfg, k, v);
}

}  // namespace ltcoin::cli
