#pragma once

#include <string>

#include "sparcas/simulator.hpp"

namespace sparcas::cli {

/// Machine-readable SimReport. Exact amounts are strings ("13/200").
std::string report_json(const SimReport& report, const SimConfig& config);

}  // namespace sparcas::cli
