#include "bragg/propagator.hpp"

#include <variant>

#include "bragg/errors.hpp"

namespace bragg {

BackendKind parse_backend(const std::string& name) {
  if (name == "ladder") return BackendKind::ladder;
  if (name == "grid") return BackendKind::grid;
  throw ConfigError("unknown propagator backend '" + name + "' (expected ladder|grid)");
}

std::string to_string(BackendKind kind) { return kind == BackendKind::ladder ? "ladder" : "grid"; }

namespace {

class LadderPropagator final : public Propagator {
 public:
  explicit LadderPropagator(LadderOptions options) : options_(options) {}
  void apply_pulse(LadderState& state, const PulseParams& pulse) override {
    integrate_ladder(state, pulse, options_);
  }
  BackendKind kind() const override { return BackendKind::ladder; }

 private:
  LadderOptions options_;
};

class GridBackend final : public Propagator {
 public:
  explicit GridBackend(GridOptions options) : propagator_(std::move(options)) {}
  void apply_pulse(LadderState& state, const PulseParams& pulse) override {
    const auto& opt = propagator_.options();
    Grid(opt.num_points, opt.periods).require_nyquist(pulse.order);
    GridState grid_state = GridState::from_ladder(state, opt.num_points, opt.periods);
    propagator_.propagate_pulse(grid_state, pulse);
    state = grid_state.to_ladder(state.j_min, state.j_max());
  }
  BackendKind kind() const override { return BackendKind::grid; }

 private:
  GridPropagator propagator_;
};

}  // namespace

std::unique_ptr<Propagator> make_propagator(const BackendOptions& options) {
  if (options.kind == BackendKind::ladder) return std::make_unique<LadderPropagator>(options.ladder);
  return std::make_unique<GridBackend>(options.grid);
}

void run_sequence(LadderState& state, std::span<const DimensionlessItem> items, Propagator& propagator) {
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (const auto* pulse = std::get_if<PulseParams>(&items[i])) {
      try {
        propagator.apply_pulse(state, *pulse);
      } catch (const StiffnessError& e) {
        throw StiffnessError(std::string(e.what()) + " [sequence item " + std::to_string(i) + "]");
      } catch (const PropagationError& e) {
        throw PropagationError(std::string(e.what()) + " [sequence item " + std::to_string(i) + "]");
      }
    } else {
      free_evolve(state, std::get<FreeEvolution>(items[i]).duration);
    }
  }
}

}  // namespace bragg
