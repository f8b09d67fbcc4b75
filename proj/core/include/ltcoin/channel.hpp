#pragma once

#include <array>
#include <optional>

#include "ltcoin/source_model.hpp"

namespace ltcoin {

enum class Outcome : int { X0 = 0, X1 = 1, Z0 = 2, Z1 = 3 };
inline int index(Outcome o) { return static_cast<int>(o); }

inline constexpr double kAttenuationDbPerKm = 0.2;

struct ChannelParams {
    double distance_km = 0.0;
    double dark_count = 1e-8;
    double det_efficiency = 0.73;
    // Bob's modulator flaw; defaults to the source delta
    std::optional<double> receiver_delta;

    double channel_transmission() const;
    double eta() const;
};

struct YieldTable {
    double distance_km = 0.0;
    double eta = 0.0;
    // y[setting][outcome]
    std::array<std::array<double, 4>, 4> y{};
    double y_z = 0.0;
    double e_z = 0.0;

    double at(Setting j, Outcome o) const { return y[index(j)][index(o)]; }
    double detect_x(Setting j) const { return at(j, Outcome::X0) + at(j, Outcome::X1); }
    double detect_z(Setting j) const { return at(j, Outcome::Z0) + at(j, Outcome::Z1); }
};

YieldTable channel_yields(Protocol protocol, const FlawModel& model, const ChannelParams& params);

}  // namespace ltcoin
