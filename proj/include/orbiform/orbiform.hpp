#pragma once

#include "orbiform/error.hpp"
#include "orbiform/parallel.hpp"
#include "orbiform/quadrature.hpp"
#include "orbiform/afunc.hpp"
#include "orbiform/shift.hpp"
#include "orbiform/surface.hpp"
#include "orbiform/feasibility.hpp"
#include "orbiform/verify.hpp"
#include "orbiform/shadow.hpp"
#include "orbiform/io.hpp"
#include "orbiform/cli.hpp"
