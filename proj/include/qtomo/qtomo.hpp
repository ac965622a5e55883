#pragma once

#include "qtomo/apparatus.hpp"
#include "qtomo/design.hpp"
#include "qtomo/io.hpp"
#include "qtomo/likelihood.hpp"
#include "qtomo/measurement.hpp"
#include "qtomo/particle_filter.hpp"
#include "qtomo/priors.hpp"
#include "qtomo/qubit.hpp"
#include "qtomo/rng.hpp"
#include "qtomo/runner.hpp"
#include "qtomo/snapshot.hpp"
#include "qtomo/version.hpp"
