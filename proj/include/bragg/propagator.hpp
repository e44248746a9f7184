#pragma once

#include <memory>
#include <span>
#include <string>

#include "bragg/grid.hpp"
#include "bragg/ladder.hpp"
#include "bragg/pulses.hpp"
#include "bragg/units.hpp"

namespace bragg {

enum class BackendKind { ladder, grid };

BackendKind parse_backend(const std::string& name);
std::string to_string(BackendKind kind);

struct BackendOptions {
  BackendKind kind = BackendKind::ladder;
  LadderOptions ladder;
  GridOptions grid;
};

/// Propagates momentum-ladder states through pulses. Both backends consume
/// and produce LadderState; the grid backend embeds the state on its
/// real-space grid for the duration of the pulse.
class Propagator {
 public:
  virtual ~Propagator() = default;
  virtual void apply_pulse(LadderState& state, const PulseParams& pulse) = 0;
  virtual BackendKind kind() const = 0;
};

std::unique_ptr<Propagator> make_propagator(const BackendOptions& options);

/// Pulses through the backend, free evolution analytically.
void run_sequence(LadderState& state, std::span<const DimensionlessItem> items, Propagator& propagator);

/// Everything a simulation needs besides the pulse: constants, unit system
/// and backend choice. Cheap to copy; shared read-only between workers.
struct SimulationContext {
  PhysicalConfig physics = default_rb87();
  BackendOptions backend;

  UnitSystem units() const { return UnitSystem(physics); }
  std::unique_ptr<Propagator> make_propagator() const { return bragg::make_propagator(backend); }
};

}  // namespace bragg
