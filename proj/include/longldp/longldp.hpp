// SPDX-License-Identifier: Apache-2.0
//
// Umbrella header for the longldp library.

#pragma once

#include "longldp/analysis.hpp"
#include "longldp/core.hpp"
#include "longldp/csv.hpp"
#include "longldp/harness.hpp"
#include "longldp/longitudinal.hpp"
#include "longldp/rng.hpp"
#include "longldp/serialize.hpp"
#include "longldp/server.hpp"
