#pragma once

#include "polarint/analysis.hpp"
#include "polarint/generate.hpp"
#include "polarint/hamiltonian.hpp"
#include "polarint/io.hpp"
#include "polarint/linalg.hpp"
#include "polarint/polarize.hpp"
#include "polarint/polarmap.hpp"
#include "polarint/polyfield.hpp"
#include "polarint/scalar.hpp"
#include "polarint/verify.hpp"
