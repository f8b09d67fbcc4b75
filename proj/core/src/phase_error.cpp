#include "ltcoin/phase_error.hpp"

#include <algorithm>
#include <cmath>

#include "ltcoin/errors.hpp"

namespace ltcoin {

namespace {

constexpr double kGuard = 1e-300;

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

double g_formula(double y, double z, double sign) {
    const double z2 = z * z;
    const double root = std::sqrt(std::max(0.0, z2 * (1.0 - z2) * y * (1.0 - y)));
    return y + (1.0 - z2) * (1.0 - 2.0 * y) + sign * 2.0 * root;
}

void require_unit(double y) {
    if (!(y >= 0.0 && y <= 1.0)) throw InvalidArgument("g: y must lie in [0, 1]");
}

Outcome odd_outcome(int d) { return d == 0 ? Outcome::X1 : Outcome::X0; }

double solve_for_eph(double det_tar, double g, double odd_known, double vir_weight, double y_z) {
    if (!(vir_weight * y_z > kGuard)) throw UndefinedRate("no sifted-key detections");
    return clamp01((det_tar * g - odd_known) / (vir_weight * y_z));
}

}  // namespace

double g_plus(double y, double z) {
    require_unit(y);
    if (std::isnan(z)) throw InvalidArgument("g: z is NaN");
    if (z <= 0.0) return 1.0;
    z = std::min(z, 1.0);
    if (y >= z * z) return 1.0;
    return std::clamp(g_formula(y, z, 1.0), y, 1.0);
}

double g_minus(double y, double z) {
    require_unit(y);
    if (std::isnan(z)) throw InvalidArgument("g: z is NaN");
    if (z <= 0.0) return 0.0;
    z = std::min(z, 1.0);
    if (y <= 1.0 - z * z) return 0.0;
    return std::clamp(g_formula(y, z, -1.0), 0.0, y);
}

CoinRates coin_rates(const EphInputs& in) {
    const TagPlan& plan = in.plan;
    const YieldTable& yt = in.yields;
    if (plan.protocol != in.model.protocol || yt.y_z < 0.0) throw InvalidArgument("inconsistent phase-error inputs");
    CoinRates r;
    double odd[2] = {0.0, 0.0};
    double det[2] = {0.0, 0.0};
    for (int t = 0; t < 2; ++t) {
        const Tag tag = static_cast<Tag>(t);
        for (Event l : kAllEvents) {
            const int d = plan.d_value(tag, l);
            if (d < 0) continue;
            const double weight = plan.p_zc * plan.tag_given(tag, l) * plan.event(l);
            if (is_virtual(l)) {
                // vir0 + vir1 detections form the sifted key
                det[t] += weight * yt.y_z;
                continue;
            }
            const Setting j = *setting_of(l);
            odd[t] += weight * yt.at(j, odd_outcome(d));
            det[t] += weight * yt.detect_x(j);
        }
    }
    r.vir_weight = plan.p_zc * plan.tag_given(Tag::Tar, Event::Vir0) * plan.p_za * plan.p_zb;
    r.odd_tar_known = odd[0];
    r.det_tar = det[0];
    r.odd_ref = odd[1];
    r.det_ref = det[1];
    if (!(r.det_ref > kGuard) || !(r.det_tar + r.det_ref > kGuard)) {
        throw UndefinedRate("no detections in the reference rounds");
    }
    r.y = clamp01(r.odd_ref / r.det_ref);
    const double delta = in.delta_bound.delta;
    r.z = 1.0 - 2.0 * plan.p_zc * plan.p_tar * delta / (r.det_tar + r.det_ref);
    return r;
}

double eph_upper(const EphInputs& in) {
    const CoinRates r = coin_rates(in);
    return solve_for_eph(r.det_tar, g_plus(r.y, r.z), r.odd_tar_known, r.vir_weight, in.yields.y_z);
}

double eph_closed_form_bb84(const YieldTable& yt, const LtCoefficients& c, double q, double delta) {
    const double y_z = yt.y_z;
    if (!(y_z > kGuard)) throw UndefinedRate("no sifted-key detections");
    const double y0z = yt.detect_x(Setting::Z0);
    const double y1z = yt.detect_x(Setting::Z1);
    const double y0x = yt.detect_x(Setting::X0);
    const double y1x = yt.detect_x(Setting::X1);
    const double num = (1 - q) * yt.at(Setting::X0, Outcome::X1) +
                       q * (c.c2 * yt.at(Setting::Z1, Outcome::X0) + c.c3 * yt.at(Setting::X1, Outcome::X0));
    const double den = (1 - q) * y0x + q * (c.c2 * y1z + c.c3 * y1x);
    if (!(den > kGuard)) throw UndefinedRate("no detections in the reference rounds");
    const double z =
        1.0 - 2.0 * delta * (1 + c.c1 * q) / (y_z + (1 - q) * y0x + q * (c.c1 * y0z + c.c2 * y1z + c.c3 * y1x));
    const double g = g_plus(clamp01(num / den), z);
    return clamp01((1 + c.c1 * q * y0z / y_z) * g - c.c1 * q * yt.at(Setting::Z0, Outcome::X0) / y_z);
}

double eph_closed_form_three_state(const YieldTable& yt, const LtCoefficients& c, double q, double delta,
                                   ZTermWeight weight) {
    const double y_z = yt.y_z;
    if (!(y_z > kGuard)) throw UndefinedRate("no sifted-key detections");
    const double y0x = yt.detect_x(Setting::X0);
    const double z_det = weight == ZTermWeight::Full ? yt.detect_x(Setting::Z0) + yt.detect_x(Setting::Z1) : y_z;
    const double num =
        (1 - q) * yt.at(Setting::X0, Outcome::X1) + c.c1 * q * (yt.at(Setting::Z0, Outcome::X0) + yt.at(Setting::Z1, Outcome::X0));
    const double den = (1 - q) * y0x + c.c1 * q * z_det;
    if (!(den > kGuard)) throw UndefinedRate("no detections in the reference rounds");
    const double z = 1.0 - 2.0 * delta * (1 + c.c2 * q) / (y_z + (1 - q) * y0x + q * (c.c2 * y0x + c.c1 * z_det));
    const double g = g_plus(clamp01(num / den), z);
    return clamp01((1 + c.c2 * q * y0x / y_z) * g - c.c2 * q * yt.at(Setting::X0, Outcome::X0) / y_z);
}

double eph_gllp(const YieldTable& yt, const DeltaBound& delta_bound) {
    const double y0x = yt.detect_x(Setting::X0);
    const double y1x = yt.detect_x(Setting::X1);
    if (!(y0x + y1x > kGuard)) throw UndefinedRate("no X-basis detections");
    const double e_x = clamp01((yt.at(Setting::X0, Outcome::X1) + yt.at(Setting::X1, Outcome::X0)) / (y0x + y1x));
    const double y_x = (y0x + y1x) / 2.0;
    const double delta_prime = delta_bound.delta / (yt.y_z + y_x);
    return g_plus(e_x, 1.0 - 2.0 * delta_prime);
}

}  // namespace ltcoin
