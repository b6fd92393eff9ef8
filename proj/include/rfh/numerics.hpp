#pragma once

#include "rfh/numerics/minimize.hpp"
#include "rfh/numerics/quadrature.hpp"
#include "rfh/numerics/special.hpp"
