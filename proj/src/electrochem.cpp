#include "hess/electrochem.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/tools/roots.hpp>
#include <boost/math/tools/toms748_solve.hpp>

#include "hess/error.hpp"

namespace hess::electrochem {

namespace {

constexpr double kMaxExponent = 700.0;  // exp() stays finite below ~709.78
constexpr std::uintmax_t kMaxIterations = 200;

double thermal_voltage_inverse(double temperature) {
  return PhysicalConstants::faraday / (PhysicalConstants::gas_constant * temperature);
}

void require_temperature(double temperature, const char* who) {
  if (!(temperature > 0.0) || !std::isfinite(temperature)) {
    throw ValidationError(std::string(who) + ": temperature must be > 0 K");
  }
}

// Current density magnitude produced by a cathodic overpotential of magnitude eta >= 0.
double cathodic_current(double eta, double temperature, const PemSourceParams& p) {
  return -butler_volmer_current(-eta, temperature, p);
}

}  // namespace

void BatterySourceParams::validate() const {
  if (!(nominal_capacity > 0.0)) throw ValidationError("battery_params: nominal_capacity must be > 0");
  if (!(reference_resistance > 0.0)) {
    throw ValidationError("battery_params: reference_resistance must be > 0");
  }
  if (!(reference_temperature > 0.0)) {
    throw ValidationError("battery_params: reference_temperature must be > 0");
  }
  if (!(activation_energy >= 0.0)) throw ValidationError("battery_params: activation_energy must be >= 0");
  if (!std::isfinite(entropic_coefficient)) {
    throw ValidationError("battery_params: entropic_coefficient must be finite");
  }
}

void PemSourceParams::validate() const {
  if (!(anodic_coefficient > 0.0 && anodic_coefficient <= 1.0) ||
      !(cathodic_coefficient > 0.0 && cathodic_coefficient <= 1.0)) {
    throw ValidationError("pem_params: transfer coefficients must lie in (0, 1]");
  }
  if (!(exchange_current_density > 0.0)) {
    throw ValidationError("pem_params: exchange_current_density must be > 0");
  }
  if (!(equilibrium_potential > 0.0) || !(thermoneutral_potential >= equilibrium_potential)) {
    throw ValidationError("pem_params: require thermoneutral >= equilibrium > 0");
  }
  if (!(active_area > 0.0)) throw ValidationError("pem_params: active_area must be > 0");
  if (!(area_specific_resistance >= 0.0)) {
    throw ValidationError("pem_params: area_specific_resistance must be >= 0");
  }
  if (!(cathode_heat_fraction >= 0.0 && cathode_heat_fraction <= 1.0)) {
    throw ValidationError("pem_params: cathode_heat_fraction must lie in [0, 1]");
  }
}

double c_rate_to_current(double c_rate, double capacity_ah) {
  if (!(c_rate >= 0.0)) throw ValidationError("c_rate_to_current: c_rate must be >= 0");
  return c_rate * capacity_ah;
}

double arrhenius_factor(double temperature, const BatterySourceParams& params) {
  require_temperature(temperature, "arrhenius_factor");
  const double slope = params.activation_energy / PhysicalConstants::gas_constant;
  return std::exp(-slope * (1.0 / temperature - 1.0 / params.reference_temperature));
}

double battery_heat_rate(double current, double temperature, const BatterySourceParams& params) {
  require_temperature(temperature, "battery_heat_rate");
  const double resistance = params.reference_resistance / arrhenius_factor(temperature, params);
  return current * current * resistance + current * temperature * params.entropic_coefficient;
}

double overpotential(double electrode_potential, double equilibrium_potential) {
  return electrode_potential - equilibrium_potential;
}

double butler_volmer_current(double eta, double temperature, const PemSourceParams& params) {
  require_temperature(temperature, "butler_volmer_current");
  const double x = thermal_voltage_inverse(temperature) * eta;
  const double i0 = params.exchange_current_density;
  const double beta = params.anodic_coefficient;
  const double alpha = params.cathodic_coefficient;
  if (std::abs(x) <= kExponentClamp) {
    return i0 * (std::exp(beta * x) - std::exp(-alpha * x));
  }
  // Tafel limit: only the dominant exponential survives.
  if (x > 0.0) return i0 * std::exp(std::min(beta * x, kMaxExponent));
  return -i0 * std::exp(std::min(-alpha * x, kMaxExponent));
}

double activation_overpotential(double current_density, double temperature,
                                const PemSourceParams& params) {
  require_temperature(temperature, "activation_overpotential");
  if (!(current_density >= 0.0)) {
    throw ValidationError("activation_overpotential: current density must be >= 0");
  }
  if (current_density == 0.0) return 0.0;
  const double f = thermal_voltage_inverse(temperature);
  if (params.anodic_coefficient == params.cathodic_coefficient) {
    return std::asinh(current_density / (2.0 * params.exchange_current_density)) /
           (params.cathodic_coefficient * f);
  }
  double upper = 1.0 / f;
  while (cathodic_current(upper, temperature, params) < current_density) {
    upper *= 2.0;
    if (upper > 1e3) throw SolverError("activation_overpotential: current density out of range");
  }
  std::uintmax_t iterations = kMaxIterations;
  const auto [lo, hi] = boost::math::tools::toms748_solve(
      [&](double eta) { return cathodic_current(eta, temperature, params) - current_density; }, 0.0,
      upper, boost::math::tools::eps_tolerance<double>(), iterations);
  return 0.5 * (lo + hi);
}

double pem_voltage_residual(double v_cell, double current_density, double temperature,
                            const PemSourceParams& params) {
  return params.equilibrium_potential -
         activation_overpotential(current_density, temperature, params) -
         current_density * params.area_specific_resistance - v_cell;
}

double pem_operating_point(double v_cell, double temperature, const PemSourceParams& params) {
  require_temperature(temperature, "pem_operating_point");
  if (!(v_cell > 0.0)) throw ValidationError("pem_operating_point: v_cell must be > 0");
  const double driving = params.equilibrium_potential - v_cell;
  if (driving < 0.0) {
    throw ValidationError("pem_operating_point: v_cell exceeds the equilibrium potential; "
                          "no operating point with positive current");
  }
  if (driving == 0.0) return 0.0;

  // The balance E_eq - v = eta + i(eta) ASR is solved for the activation
  // overpotential; the bracket [0, E_eq - v] always changes sign.
  auto balance = [&](double eta) {
    return driving - eta - cathodic_current(eta, temperature, params) *
                               params.area_specific_resistance;
  };
  double eta = driving;
  if (balance(driving) < 0.0) {
    std::uintmax_t iterations = kMaxIterations;
    const auto [lo, hi] = boost::math::tools::toms748_solve(
        balance, 0.0, driving, driving, balance(driving), boost::math::tools::eps_tolerance<double>(),
        iterations);
    if (iterations >= kMaxIterations) {
      throw SolverError("pem_operating_point: root finder did not converge");
    }
    eta = 0.5 * (lo + hi);
  }
  const double i = cathodic_current(eta, temperature, params);
  if (std::abs(balance(eta)) >= 1e-10) {
    throw SolverError("pem_operating_point: residual above 1e-10 V at v_cell = " +
                      std::to_string(v_cell));
  }
  return i;
}

double pem_heat_rate(double v_cell, double current_density, const PemSourceParams& params) {
  if (!(current_density >= 0.0)) throw ValidationError("pem_heat_rate: current density must be >= 0");
  return (params.thermoneutral_potential - v_cell) * current_density * params.active_area;
}

}  // namespace hess::electrochem
