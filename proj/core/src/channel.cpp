#include "ltcoin/channel.hpp"

#include <cmath>
#include <numbers>

#include "ltcoin/errors.hpp"

namespace ltcoin {

namespace {

constexpr double kPi = std::numbers::pi;

double nominal_phase(Setting j) {
    switch (j) {
        case Setting::Z0: return 0.0;
        case Setting::Z1: return kPi;
        case Setting::X0: return kPi / 2;
        case Setting::X1: return 3 * kPi / 2;
    }
    return 0.0;
}

// first outcome gets the (1 + v) interference term
double yield_plus(double eta, double pd, double v) {
    return (1 - eta / 2) * pd + eta / 4 * (1 + v) * (1 - pd / 2) + eta / 4 * (1 - v) * pd / 2;
}

double yield_minus(double eta, double pd, double v) {
    return (1 - eta / 2) * pd + eta / 4 * (1 + v) * pd / 2 + eta / 4 * (1 - v) * (1 - pd / 2);
}

}  // namespace

double ChannelParams::channel_transmission() const {
    return std::pow(10.0, -kAttenuationDbPerKm / 10.0 * distance_km);
}

double ChannelParams::eta() const { return channel_transmission() * det_efficiency; }

YieldTable channel_yields(Protocol protocol, const FlawModel& model, const ChannelParams& params) {
    if (!(params.distance_km >= 0.0)) throw InvalidArgument("distance must be nonnegative");
    if (!(params.dark_count >= 0.0 && params.dark_count <= 1.0)) throw InvalidArgument("dark count outside [0, 1]");
    if (!(params.det_efficiency >= 0.0 && params.det_efficiency <= 1.0)) {
        throw InvalidArgument("detector efficiency outside [0, 1]");
    }
    (void)protocol;
    const double eta = params.eta();
    const double pd = params.dark_count;
    const double d = model.delta;
    const double db = params.receiver_delta.value_or(d);

    YieldTable t;
    t.distance_km = params.distance_km;
    t.eta = eta;
    for (Setting j : {Setting::Z0, Setting::Z1, Setting::X0, Setting::X1}) {
        const double phase = nominal_phase(j) + d * nominal_phase(j) / kPi;
        const double sx = std::sin(phase + db / 2);
        const double cz = std::cos(phase);
        auto& row = t.y[index(j)];
        row[index(Outcome::X0)] = yield_plus(eta, pd, sx);
        row[index(Outcome::X1)] = yield_minus(eta, pd, sx);
        row[index(Outcome::Z0)] = yield_plus(eta, pd, cz);
        row[index(Outcome::Z1)] = yield_minus(eta, pd, cz);
    }
    const double z00 = t.at(Setting::Z0, Outcome::Z0);
    const double z10 = t.at(Setting::Z1, Outcome::Z0);
    const double z01 = t.at(Setting::Z0, Outcome::Z1);
    const double z11 = t.at(Setting::Z1, Outcome::Z1);
    const double total = z00 + z10 + z01 + z11;
    t.y_z = total / 2;
    t.e_z = total > 0.0 ? (z10 + z01) / total : 0.0;
    return t;
}

}  // namespace ltcoin
