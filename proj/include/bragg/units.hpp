#pragma once

#include <string>
#include <string_view>

namespace bragg {

namespace constants {
inline constexpr double hbar = 1.054571817e-34;           // J s
inline constexpr double atomic_mass_unit = 1.660539067e-27;  // kg
inline constexpr double rb87_mass_u = 86.90918053;
inline constexpr double rb87_d2_wavelength = 780.226e-9;  // m
}  // namespace constants

/// Atom and laser constants. k_eff and the two-photon recoil frequency are
/// derived on construction; the object is immutable afterwards.
class PhysicalConfig {
 public:
  PhysicalConfig(double atom_mass, double wavelength, std::string label);

  double atom_mass() const { return atom_mass_; }
  double wavelength() const { return wavelength_; }
  double k_eff() const { return k_eff_; }
  /// omega_k = hbar k_eff^2 / (2 m)
  double recoil_angular_frequency() const { return recoil_; }
  const std::string& label() const { return label_; }

 private:
  double atom_mass_;
  double wavelength_;
  double k_eff_;
  double recoil_;
  std::string label_;
};

PhysicalConfig default_rb87();

enum class QuantityKind { time, momentum, frequency, length, energy };

QuantityKind parse_quantity_kind(std::string_view name);

/// Internal units: hbar = 1, momentum in hbar k_eff, time in 1/omega_k.
class UnitSystem {
 public:
  explicit UnitSystem(const PhysicalConfig& config);

  double momentum_unit() const { return momentum_; }
  double time_unit() const { return time_; }
  double frequency_unit() const { return frequency_; }
  double length_unit() const { return length_; }
  double energy_unit() const { return energy_; }

  double unit(QuantityKind kind) const;
  double to_dimensionless(double value_si, QuantityKind kind) const;
  double to_si(double value, QuantityKind kind) const;

 private:
  double momentum_;
  double time_;
  double frequency_;
  double length_;
  double energy_;
};

}  // namespace bragg
