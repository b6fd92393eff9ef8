#pragma once

#include "rfh/analytic/capacity.hpp"
#include "rfh/analytic/delivery.hpp"
#include "rfh/analytic/energy.hpp"
#include "rfh/analytic/fit.hpp"
#include "rfh/analytic/geometry.hpp"
#include "rfh/analytic/throughput.hpp"
