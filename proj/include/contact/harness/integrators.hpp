#pragma once

#include <functional>
#include <string>
#include <vector>

#include "contact/systems/models.hpp"

namespace contact::harness {

using systems::State;
using systems::System;

/// One step of a fixed-step integrator. Steppers built for the variational
/// integrators carry their own predictor state; build a fresh one per run.
using Stepper = std::function<State(const State&)>;

struct IntegratorInfo {
  std::string name;
  int order = 0;
  bool contact = true;  // preserves the contact structure
  std::string summary;
};

/// Registered integrators. contact-yoshida-exact-<2k> is listed once as a
/// pattern and accepts any even order >= 2.
const std::vector<IntegratorInfo>& integrator_catalogue();

/// Resolves a name (including contact-yoshida-exact-<2k>); throws
/// InvalidArgument for unknown names.
IntegratorInfo integrator_info(const std::string& name);
bool is_known_integrator(const std::string& name);

Stepper make_stepper(const std::string& name, const System& sys, double tau);

}  // namespace contact::harness
