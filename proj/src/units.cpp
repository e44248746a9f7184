#include "bragg/units.hpp"

#include <cmath>
#include <numbers>

#include "bragg/errors.hpp"

namespace bragg {

PhysicalConfig::PhysicalConfig(double atom_mass, double wavelength, std::string label)
    : atom_mass_(atom_mass), wavelength_(wavelength), label_(std::move(label)) {
  if (!(atom_mass > 0.0) || !std::isfinite(atom_mass))
    throw ParameterError("atom_mass must be positive and finite (kg)");
  if (!(wavelength > 0.0) || !std::isfinite(wavelength))
    throw ParameterError("wavelength must be positive and finite (m)");
  // Counterpropagating beams, frequency difference neglected.
  k_eff_ = 2.0 * (2.0 * std::numbers::pi / wavelength_);
  recoil_ = constants::hbar * k_eff_ * k_eff_ / (2.0 * atom_mass_);
}

PhysicalConfig default_rb87() {
  return PhysicalConfig(constants::rb87_mass_u * constants::atomic_mass_unit,
                        constants::rb87_d2_wavelength, "Rb-87 D2");
}

QuantityKind parse_quantity_kind(std::string_view name) {
  if (name == "time") return QuantityKind::time;
  if (name == "momentum") return QuantityKind::momentum;
  if (name == "frequency") return QuantityKind::frequency;
  if (name == "length") return QuantityKind::length;
  if (name == "energy") return QuantityKind::energy;
  throw ConfigError("unknown quantity kind '" + std::string(name) +
                    "' (expected time|momentum|frequency|length|energy)");
}

UnitSystem::UnitSystem(const PhysicalConfig& config) {
  const double wk = config.recoil_angular_frequency();
  momentum_ = constants::hbar * config.k_eff();
  time_ = 1.0 / wk;
  frequency_ = wk;
  length_ = 1.0 / config.k_eff();
  energy_ = constants::hbar * wk;
}

double UnitSystem::unit(QuantityKind kind) const {
  switch (kind) {
    case QuantityKind::time: return time_;
    case QuantityKind::momentum: return momentum_;
    case QuantityKind::frequency: return frequency_;
    case QuantityKind::length: return length_;
    case QuantityKind::energy: return energy_;
  }
  throw ConfigError("unknown quantity kind");
}

double UnitSystem::to_dimensionless(double value_si, QuantityKind kind) const {
  return value_si / unit(kind);
}

double UnitSystem::to_si(double value, QuantityKind kind) const {
  return value * unit(kind);
}

}  // namespace bragg
