#pragma once

#include "laserdip/error.hpp"
#include "laserdip/potential.hpp"
#include "laserdip/tridiagonal.hpp"
#include "laserdip/schrodinger.hpp"
#include "laserdip/twomode.hpp"
#include "laserdip/junction.hpp"
#include "laserdip/config.hpp"
#include "laserdip/io.hpp"
#include "laserdip/commands.hpp"
