#pragma once

#include "arimacast/accuracy.hpp"
#include "arimacast/core.hpp"
#include "arimacast/diagnostics.hpp"
#include "arimacast/error.hpp"
#include "arimacast/estimation.hpp"
#include "arimacast/evaluation.hpp"
#include "arimacast/forecast.hpp"
#include "arimacast/io.hpp"
#include "arimacast/selection.hpp"
#include "arimacast/stationarity.hpp"

namespace arimacast {

inline constexpr const char *kVersion = "0.1.0";

} // namespace arimacast
