#pragma once

#include "error.hpp"
#include "gauss_legendre.hpp"
#include "splines.hpp"
#include "geometry.hpp"
#include "moments.hpp"
#include "quadrature.hpp"
#include "assembly.hpp"
#include "solver.hpp"
#include "problems.hpp"
#include "bench.hpp"
#include "io.hpp"
