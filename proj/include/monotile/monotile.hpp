#pragma once

#include "monotile/error.hpp"
#include "monotile/group.hpp"
#include "monotile/boundary.hpp"
#include "monotile/swinger.hpp"
#include "monotile/tiler.hpp"
#include "monotile/oracle.hpp"
