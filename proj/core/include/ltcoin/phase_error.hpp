#pragma once

#include "ltcoin/channel.hpp"
#include "ltcoin/coin.hpp"
#include "ltcoin/delta_bound.hpp"
#include "ltcoin/lt_decomposition.hpp"
#include "ltcoin/source_model.hpp"

namespace ltcoin {

// Upper and lower estimates of y' subject to z <= sqrt(y y') + sqrt((1 - y)(1 - y')).
double g_plus(double y, double z);
double g_minus(double y, double z);

// Weight of the Z-setting terms on the reference side of the three-state bound.
// Full sums both Z settings; Half keeps a single Y_Z and is retained for comparison only.
enum class ZTermWeight { Full, Half };

struct EphInputs {
    YieldTable yields;
    FlawModel model;
    LtCoefficients coeffs;
    DeltaBound delta_bound;
    TagPlan plan;
};

// Asymptotic rates of the coin-round counters, per round and per Z_C mark.
struct CoinRates {
    double odd_tar_known = 0.0;  // target odd rate excluding the phase-error term
    double det_tar = 0.0;
    double odd_ref = 0.0;
    double det_ref = 0.0;
    double vir_weight = 0.0;     // multiplies Y_Z * e_ph in the target odd rate
    double y = 0.0;
    double z = 0.0;
};

CoinRates coin_rates(const EphInputs& inputs);

// Phase-error bound obtained by isolating e_ph from the coin inequality.
double eph_upper(const EphInputs& inputs);

// Closed forms in terms of the yields alone.
double eph_closed_form_bb84(const YieldTable& yields, const LtCoefficients& coeffs, double q0, double delta);
double eph_closed_form_three_state(const YieldTable& yields, const LtCoefficients& coeffs, double q0, double delta,
                                   ZTermWeight weight = ZTermWeight::Full);

double eph_gllp(const YieldTable& yields, const DeltaBound& delta_bound);

}  // namespace ltcoin
