#include "ltcoin/keyrate.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ltcoin/coin.hpp"
#include "ltcoin/errors.hpp"
#include "ltcoin/lt_decomposition.hpp"

namespace ltcoin {

namespace {

std::string at_distance(double km) { return " (distance " + std::to_string(km) + " km)"; }

}  // namespace

void RateInputs::validate() const {
    for (double p : {p_za, p_zb, p_xa, p_xb}) {
        if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("basis probabilities must lie in (0, 1)");
    }
    if (std::abs(p_za + p_xa - 1.0) > 1e-12 || std::abs(p_zb + p_xb - 1.0) > 1e-12) {
        throw InvalidArgument("basis probabilities must sum to one");
    }
    if (!(f_ec >= 1.0)) throw InvalidArgument("f_ec must be at least 1");
    if (!(rep_rate_hz > 0.0)) throw InvalidArgument("repetition rate must be positive");
}

double binary_entropy(double x) {
    if (!(x >= 0.0 && x <= 1.0)) throw InvalidArgument("binary entropy argument outside [0, 1]");
    if (x == 0.0 || x == 1.0) return 0.0;
    return -x * std::log2(x) - (1.0 - x) * std::log2(1.0 - x);
}

KeyRate key_rate(double e_ph_u, const YieldTable& yields, const RateInputs& rates) {
    if (!(e_ph_u >= 0.0 && e_ph_u <= 1.0)) throw InvalidArgument("phase-error rate outside [0, 1]");
    if (!(yields.e_z >= 0.0 && yields.e_z <= 1.0)) throw InvalidArgument("bit-error rate outside [0, 1]");
    KeyRate k;
    k.raw = rates.p_za * rates.p_zb * yields.y_z *
            (1.0 - binary_entropy(std::min(e_ph_u, 0.5)) - rates.f_ec * binary_entropy(std::min(yields.e_z, 0.5)));
    k.r_per_pulse = std::max(k.raw, 0.0);
    k.r_bps = k.r_per_pulse * rates.rep_rate_hz;
    return k;
}

double sequential_fmax(const SequentialLimit& s) {
    const double path_m = s.refractive_index * s.l_fib_km * 1000.0;
    if (!(s.l_fib_km > 0.0) || !(path_m > 0.0)) throw InvalidArgument("fibre length must be positive");
    return s.speed_of_light / path_m;
}

double sequential_fmax_relativistic(const SequentialLimit& s) {
    if (!(s.l_fib_km > 0.0)) throw InvalidArgument("fibre length must be positive");
    if (!(s.l_act_km >= 0.0 && s.l_act_km <= s.l_fib_km)) throw InvalidArgument("l_act must lie in [0, l_fib]");
    const double path_m = (s.refractive_index * s.l_fib_km - s.l_act_km) * 1000.0;
    if (!(path_m > 0.0)) throw InvalidArgument("r * l_fib must exceed l_act");
    return s.speed_of_light / path_m;
}

ScanRow evaluate_point(const FlawModel& model, const DeltaBound& delta, const RateInputs& rates, double distance_km,
                       const ScanOptions& options) {
    ChannelParams ch;
    ch.distance_km = distance_km;
    ch.dark_count = options.dark_count;
    ch.det_efficiency = options.det_efficiency;
    ch.receiver_delta = options.receiver_delta;
    const YieldTable yt = channel_yields(model.protocol, model, ch);

    double eph = 0.0;
    try {
        if (delta.method == DeltaMethod::GllpSdp) {
            eph = eph_gllp(yt, delta);
        } else {
            EphInputs in;
            in.yields = yt;
            in.model = model;
            in.coeffs = lt_coeffs(model);
            in.delta_bound = delta;
            in.plan = tag_plan(model, in.coeffs, rates.p_za, rates.p_xa, rates.p_zb, rates.p_xb, options.p_zc);
            if (model.protocol == Protocol::ThreeState && options.z_weight == ZTermWeight::Half) {
                eph = eph_closed_form_three_state(yt, in.coeffs, in.plan.q0, delta.delta, ZTermWeight::Half);
            } else {
                eph = eph_upper(in);
            }
        }
    } catch (const UndefinedRate& e) {
        throw UndefinedRate(e.what() + at_distance(distance_km));
    }
    const KeyRate k = key_rate(eph, yt, rates);
    ScanRow row;
    row.distance_km = distance_km;
    row.eta = yt.eta;
    row.y_z = yt.y_z;
    row.e_z = yt.e_z;
    row.delta_bound = delta.delta;
    row.e_ph_u = eph;
    row.r_raw = k.raw;
    row.r_per_pulse = k.r_per_pulse;
    row.r_bps = k.r_bps;
    return row;
}

ScanResult scan(Protocol protocol, const FlawModel& model_in, const SideChannelBudget& budget, const RateInputs& rates,
                const std::vector<double>& distances_km, DeltaMethod method, const ScanOptions& options) {
    if (distances_km.empty()) throw InvalidArgument("distance grid is empty");
    for (std::size_t i = 1; i < distances_km.size(); ++i) {
        if (!(distances_km[i] > distances_km[i - 1])) throw InvalidArgument("distance grid must be increasing");
    }
    rates.validate();
    const FlawModel model(model_in.delta, protocol);
    ScanResult out;
    try {
        out.delta = compute_delta(model, budget, method, options.tol);
    } catch (const SolverFailure& e) {
        throw SolverFailure(std::string(e.what()) + at_distance(distances_km.front()));
    }
    out.rows.reserve(distances_km.size());
    for (double l : distances_km) out.rows.push_back(evaluate_point(model, out.delta, rates, l, options));
    return out;
}

}  // namespace ltcoin
