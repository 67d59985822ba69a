#pragma once

#include "ktk/rational.hpp"
#include "ktk/poly.hpp"
#include "ktk/linalg.hpp"
#include "ktk/tensors.hpp"
#include "ktk/equations.hpp"
#include "ktk/solver.hpp"
#include "ktk/constructors.hpp"
#include "ktk/operators.hpp"
#include "ktk/serialize.hpp"
