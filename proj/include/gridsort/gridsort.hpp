#pragma once

#include "core.hpp"
#include "lap.hpp"
#include "filter.hpp"
#include "metrics.hpp"
#include "sorters.hpp"
#include "constraints.hpp"
#include "io.hpp"
