#pragma once

// Umbrella header for the whole library: generalized totients over a
// coprimality class, certified enumeration of the sparse values, the
// explicit member construction, and the verification/report toolkit.

#include "analysis.hpp"
#include "arith.hpp"
#include "certify.hpp"
#include "checked.hpp"
#include "construct.hpp"
#include "jacobsthal.hpp"
#include "primes.hpp"
#include "srcache.hpp"
#include "version.hpp"
