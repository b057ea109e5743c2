#pragma once

#include "walkindex/core.hpp"
#include "walkindex/laurent.hpp"
#include "walkindex/polynomial.hpp"
#include "walkindex/pfaffian.hpp"
#include "walkindex/symmetry.hpp"
#include "walkindex/spectral.hpp"
#include "walkindex/invariants.hpp"
#include "walkindex/boundary.hpp"
#include "walkindex/models.hpp"
