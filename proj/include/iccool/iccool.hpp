#pragma once

#include "iccool/config.hpp"
#include "iccool/constants.hpp"
#include "iccool/cooling.hpp"
#include "iccool/coupling.hpp"
#include "iccool/defaults.hpp"
#include "iccool/errors.hpp"
#include "iccool/fit.hpp"
#include "iccool/io.hpp"
#include "iccool/optimize.hpp"
#include "iccool/phonon.hpp"
#include "iccool/rng.hpp"
#include "iccool/scenarios.hpp"
#include "iccool/spectrum.hpp"
#include "iccool/trap.hpp"
#include "iccool/twoion.hpp"
#include "iccool/version.hpp"
