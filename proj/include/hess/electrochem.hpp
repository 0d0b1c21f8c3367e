#pragma once

// Heat-source models: Arrhenius-scaled Joule heating for the battery cells and
// Butler-Volmer kinetics for the PEM fuel cell.

namespace hess::electrochem {

struct PhysicalConstants {
  static constexpr double faraday = 96485.0;     // C/mol
  static constexpr double gas_constant = 8.314;  // J/(mol K)
};

// Internal resistance calibrated against a 0.94 K center-cell rise of the
// six-cell pack at 4C after 360 s (see `hess_thermal calibrate`).
inline constexpr double kCalibratedResistance = 6.16e-4;  // ohm

struct BatterySourceParams {
  double nominal_capacity = 4.0;        // A h
  double activation_energy = 20000.0;   // J/mol
  // Resistance at the reference temperature. The Arrhenius pre-exponential
  // factor cancels in k(T)/k(T_ref) and is folded in here.
  double reference_resistance = kCalibratedResistance;  // ohm
  double reference_temperature = 298.15;                // K
  double entropic_coefficient = 0.0;                    // dU/dT, V/K

  void validate() const;
  friend bool operator==(const BatterySourceParams&, const BatterySourceParams&) = default;
};

struct PemSourceParams {
  double equilibrium_potential = 1.23;     // V
  double thermoneutral_potential = 1.48;   // V
  double exchange_current_density = 3.0;   // A/m^2
  double anodic_coefficient = 0.5;         // beta
  double cathodic_coefficient = 0.5;       // alpha
  double area_specific_resistance = 3.0e-4;  // ohm m^2
  double active_area = 0.002;              // m^2 (10 cm x 2 cm)
  double cathode_heat_fraction = 0.7;      // share of heat released on the cathode side

  void validate() const;
  friend bool operator==(const PemSourceParams&, const PemSourceParams&) = default;
};

// Exponent magnitude |F eta / (R T)| beyond which the Tafel single-exponential
// limit replaces the two-term expression.
inline constexpr double kExponentClamp = 60.0;

double c_rate_to_current(double c_rate, double capacity_ah);

// k(T)/k(T_ref) = exp(-(Ea/R) (1/T - 1/T_ref)).
double arrhenius_factor(double temperature, const BatterySourceParams& params);

// Per-cell heat: I^2 R(T) + I T dU/dT with R(T) = R_ref / arrhenius_factor(T).
double battery_heat_rate(double current, double temperature, const BatterySourceParams& params);

double overpotential(double electrode_potential, double equilibrium_potential);

// Faradaic current density i0 (exp(beta f eta) - exp(-alpha f eta)), f = F/(R T).
double butler_volmer_current(double eta, double temperature, const PemSourceParams& params);

// Cathodic activation overpotential magnitude that drives current density i >= 0.
double activation_overpotential(double current_density, double temperature,
                                const PemSourceParams& params);

// Current density i >= 0 such that E_eq - eta_act(i) - i ASR = v_cell.
double pem_operating_point(double v_cell, double temperature, const PemSourceParams& params);

// Residual E_eq - eta_act(i) - i ASR - v_cell of a candidate operating point.
double pem_voltage_residual(double v_cell, double current_density, double temperature,
                            const PemSourceParams& params);

// Total PEM heat (E_tn - v_cell) i A, in W.
double pem_heat_rate(double v_cell, double current_density, const PemSourceParams& params);

}  // namespace hess::electrochem
