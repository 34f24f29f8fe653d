#pragma once

#include "contact/diagnostics.hpp"
#include "contact/error_analysis.hpp"
#include "contact/hamiltonian.hpp"
#include "contact/splitting.hpp"
#include "contact/state.hpp"
#include "contact/trajectory.hpp"
#include "contact/variational.hpp"
