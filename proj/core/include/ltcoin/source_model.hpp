#pragma once

#include <array>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace ltcoin {

enum class Protocol { ThreeState, BB84 };

// Setting indices double as Gram-matrix indices.
enum class Setting : int { Z0 = 0, Z1 = 1, X0 = 2, X1 = 3 };

std::string_view to_string(Protocol p);
std::string_view to_string(Setting s);
Protocol parse_protocol(std::string_view text);
Setting parse_setting(std::string_view text);

// {0Z, 1Z, 0X} or {0Z, 1Z, 0X, 1X}
std::vector<Setting> settings(Protocol p);
int setting_count(Protocol p);
inline int index(Setting s) { return static_cast<int>(s); }

struct FlawModel {
    double delta = 0.0;
    Protocol protocol = Protocol::ThreeState;

    FlawModel() = default;
    FlawModel(double delta_rad, Protocol proto);

    double kappa() const;
    bool has(Setting s) const;
};

struct SideChannelBudget {
    double epsilon = 0.0;
    std::vector<std::pair<std::string, double>> components;

    SideChannelBudget() = default;
    explicit SideChannelBudget(double eps);
    static SideChannelBudget from_components(std::vector<std::pair<std::string, double>> parts);
};

using QubitState = Eigen::Vector2d;

double theta_for(Setting j, const FlawModel& model);
QubitState qubit_state(Setting j, const FlawModel& model);
double q0(const FlawModel& model);

// cos(m*kappa*pi/4) and sin(m*kappa*pi/4) for m in 0..3, exact at delta = 0
double cos_quarter(int m, double delta);
double sin_quarter(int m, double delta);

// k x k table of <phi_i|phi_j>, rows ordered as settings(model.protocol)
Eigen::MatrixXd pairwise_overlaps(const FlawModel& model);
double overlap(Setting i, Setting j, const FlawModel& model);

double combine_epsilons(const std::vector<double>& components);
double tha_epsilon(double gamma, double mu_in_upper);

}  // namespace ltcoin
