#include "ltcoin/source_model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ltcoin/errors.hpp"

namespace ltcoin {

namespace {

constexpr double kPi = std::numbers::pi;

int quarter_multiple(Setting j) {
    switch (j) {
        case Setting::Z0: return 0;
        case Setting::Z1: return 2;
        case Setting::X0: return 1;
        case Setting::X1: return 3;
    }
    throw InvalidArgument("unknown setting");
}

}  // namespace

std::string_view to_string(Protocol p) {
    return p == Protocol::ThreeState ? "three-state" : "bb84";
}

std::string_view to_string(Setting s) {
    switch (s) {
        case Setting::Z0: return "0Z";
        case Setting::Z1: return "1Z";
        case Setting::X0: return "0X";
        case Setting::X1: return "1X";
    }
    return "?";
}

Protocol parse_protocol(std::string_view text) {
    if (text == "three-state" || text == "three_state" || text == "3state") return Protocol::ThreeState;
    if (text == "bb84" || text == "BB84") return Protocol::BB84;
    throw InvalidArgument("unknown protocol '" + std::string(text) + "'");
}

Setting parse_setting(std::string_view text) {
    if (text == "0Z") return Setting::Z0;
    if (text == "1Z") return Setting::Z1;
    if (text == "0X") return Setting::X0;
    if (text == "1X") return Setting::X1;
    throw InvalidArgument("unknown setting '" + std::string(text) + "'");
}

std::vector<Setting> settings(Protocol p) {
    if (p == Protocol::ThreeState) return {Setting::Z0, Setting::Z1, Setting::X0};
    return {Setting::Z0, Setting::Z1, Setting::X0, Setting::X1};
}

int setting_count(Protocol p) { return p == Protocol::ThreeState ? 3 : 4; }

FlawModel::FlawModel(double delta_rad, Protocol proto) : delta(delta_rad), protocol(proto) {
    if (!(delta_rad >= 0.0 && delta_rad < kPi)) {
        throw InvalidArgument("delta must lie in [0, pi)");
    }
}

double FlawModel::kappa() const { return 1.0 + delta / kPi; }

bool FlawModel::has(Setting s) const {
    return protocol == Protocol::BB84 || s != Setting::X1;
}

SideChannelBudget::SideChannelBudget(double eps) : epsilon(eps) {
    if (!(eps >= 0.0 && eps <= 1.0)) throw InvalidArgument("epsilon must lie in [0, 1]");
}

SideChannelBudget SideChannelBudget::from_components(std::vector<std::pair<std::string, double>> parts) {
    std::vector<double> values;
    values.reserve(parts.size());
    for (const auto& [label, v] : parts) values.push_back(v);
    SideChannelBudget b(combine_epsilons(values));
    b.components = std::move(parts);
    return b;
}

double cos_quarter(int m, double delta) {
    const int a = m < 0 ? -m : m;
    switch (a) {
        case 0: return 1.0;
        case 1: return std::cos(kPi / 4 + delta / 4);
        case 2: return -std::sin(delta / 2);
        case 3: return -std::sin(kPi / 4 + 3 * delta / 4);
        default: return std::cos(a * (kPi / 4 + delta / 4));
    }
}

double sin_quarter(int m, double delta) {
    const int a = m < 0 ? -m : m;
    double s = 0.0;
    switch (a) {
        case 0: s = 0.0; break;
        case 1: s = std::sin(kPi / 4 + delta / 4); break;
        case 2: s = std::cos(delta / 2); break;
        case 3: s = std::cos(kPi / 4 + 3 * delta / 4); break;
        default: s = std::sin(a * (kPi / 4 + delta / 4)); break;
    }
    return m < 0 ? -s : s;
}

double theta_for(Setting j, const FlawModel& model) {
    if (!model.has(j)) throw InvalidArgument("setting not used by protocol");
    return quarter_multiple(j) * model.kappa() * kPi / 4;
}

QubitState qubit_state(Setting j, const FlawModel& model) {
    if (!model.has(j)) throw InvalidArgument("setting not used by protocol");
    const int m = quarter_multiple(j);
    return QubitState(cos_quarter(m, model.delta), sin_quarter(m, model.delta));
}

double q0(const FlawModel& model) { return 0.5 * (1.0 + std::sin(model.delta / 2)); }

double overlap(Setting i, Setting j, const FlawModel& model) {
    if (!model.has(i) || !model.has(j)) throw InvalidArgument("setting not used by protocol");
    if (i == j) return 1.0;
    return cos_quarter(quarter_multiple(i) - quarter_multiple(j), model.delta);
}

Eigen::MatrixXd pairwise_overlaps(const FlawModel& model) {
    const auto s = settings(model.protocol);
    const int k = static_cast<int>(s.size());
    Eigen::MatrixXd t(k, k);
    for (int a = 0; a < k; ++a)
        for (int b = 0; b < k; ++b) t(a, b) = overlap(s[a], s[b], model);
    return t;
}

double combine_epsilons(const std::vector<double>& components) {
    double keep = 1.0;
    for (double e : components) {
        if (!(e >= 0.0 && e <= 1.0)) throw InvalidArgument("epsilon component outside [0, 1]");
        keep *= 1.0 - e;
    }
    return 1.0 - keep;
}

double tha_epsilon(double gamma, double mu_in_upper) {
    if (!(gamma >= 0.0) || !(mu_in_upper >= 0.0)) {
        throw InvalidArgument("isolation and input intensity must be nonnegative");
    }
    return std::min(1.0, gamma * mu_in_upper);
}

}  // namespace ltcoin
