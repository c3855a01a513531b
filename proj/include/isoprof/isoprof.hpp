#pragma once

// Umbrella header.

#include "isoprof/errors.hpp"
#include "isoprof/numerics.hpp"
#include "isoprof/potential.hpp"
#include "isoprof/radial.hpp"
#include "isoprof/profile.hpp"
#include "isoprof/witness.hpp"
#include "isoprof/ledger.hpp"
#include "isoprof/bounds.hpp"
#include "isoprof/config.hpp"
#include "isoprof/experiment.hpp"
