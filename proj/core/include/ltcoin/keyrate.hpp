#pragma once

#include <optional>
#include <vector>

#include "ltcoin/channel.hpp"
#include "ltcoin/delta_bound.hpp"
#include "ltcoin/phase_error.hpp"
#include "ltcoin/source_model.hpp"

namespace ltcoin {

inline constexpr double kSpeedOfLight = 299792458.0;

struct RateInputs {
    double p_za = 0.9;
    double p_zb = 0.9;
    double p_xa = 0.1;
    double p_xb = 0.1;
    double f_ec = 1.16;
    double rep_rate_hz = 2.5e9;

    void validate() const;
};

struct KeyRate {
    double raw = 0.0;
    double r_per_pulse = 0.0;
    double r_bps = 0.0;
};

double binary_entropy(double x);

KeyRate key_rate(double e_ph_u, const YieldTable& yields, const RateInputs& rates);

struct SequentialLimit {
    double l_fib_km = 0.0;
    double l_act_km = 0.0;
    double refractive_index = 1.5;
    double speed_of_light = kSpeedOfLight;
};

double sequential_fmax(const SequentialLimit& limit);
double sequential_fmax_relativistic(const SequentialLimit& limit);

struct ScanOptions {
    double dark_count = 1e-8;
    double det_efficiency = 0.73;
    std::optional<double> receiver_delta;
    double p_zc = 0.5;
    double tol = 1e-9;
    ZTermWeight z_weight = ZTermWeight::Full;
};

struct ScanRow {
    double distance_km = 0.0;
    double eta = 0.0;
    double y_z = 0.0;
    double e_z = 0.0;
    double delta_bound = 0.0;
    double e_ph_u = 0.0;
    double r_raw = 0.0;
    double r_per_pulse = 0.0;
    double r_bps = 0.0;
};

struct ScanResult {
    DeltaBound delta;
    std::vector<ScanRow> rows;
};

// DeltaMethod::GllpSdp evaluates the GLLP bound (BB84 only); the other methods evaluate the LT coin bound.
ScanResult scan(Protocol protocol, const FlawModel& model, const SideChannelBudget& budget, const RateInputs& rates,
                const std::vector<double>& distances_km, DeltaMethod method, const ScanOptions& options = {});

// One grid point with a precomputed Delta.
ScanRow evaluate_point(const FlawModel& model, const DeltaBound& delta, const RateInputs& rates, double distance_km,
                       const ScanOptions& options);

}  // namespace ltcoin
