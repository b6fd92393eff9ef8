#pragma once

#include "rfh/mcsim/estimate.hpp"
#include "rfh/mcsim/field.hpp"
#include "rfh/mcsim/replication.hpp"
