#pragma once

#include <cstdint>

#include "macrostate/panel.hpp"

namespace macrostate {

/// Deterministic synthetic monthly panel, 1960-01 through 2021-12: eight
/// countries with cpi/gdp/equity plus GOLD, CRB and an OIL price that only
/// starts in 1980. The RNG is self-contained so the bytes do not depend on
/// the standard library's distributions.
TimeSeriesPanel synthetic_six_decade_panel(std::uint64_t seed);

}  // namespace macrostate
