#pragma once

#include "qtc/arith.hpp"
#include "qtc/census.hpp"
#include "qtc/discriminant.hpp"
#include "qtc/parallel.hpp"
#include "qtc/quadforms.hpp"
#include "qtc/shimura.hpp"
#include "qtc/twistsets.hpp"
