#pragma once

// Umbrella header: exact singularity invariants for A-type phases, the
// Legendre-transformed reduced phase, Newton-Puiseux resolution, exponent
// bookkeeping, and the desk-scale numeric verification harness.

#include "analyze.hpp"
#include "classify.hpp"
#include "exponents.hpp"
#include "legendre.hpp"
#include "newton.hpp"
#include "parse.hpp"
#include "poly.hpp"
#include "puiseux.hpp"
#include "rational.hpp"
#include "report.hpp"
#include "resolve.hpp"
#include "series.hpp"
#include "upoly.hpp"
#include "verify.hpp"
