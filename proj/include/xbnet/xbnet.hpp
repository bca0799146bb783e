#pragma once

// Cross-border exposure network analysis: quarterly claims/liabilities panels
// to correlation-distance matrices, single-link trees and threshold topology.

#include "cluster.hpp"    // IWYU pragma: export
#include "errors.hpp"     // IWYU pragma: export
#include "ingest.hpp"     // IWYU pragma: export
#include "metric.hpp"     // IWYU pragma: export
#include "quarter.hpp"    // IWYU pragma: export
#include "topology.hpp"   // IWYU pragma: export
