#pragma once

// Umbrella header.
#include "mifo/baselines.hpp"
#include "mifo/benchmark.hpp"
#include "mifo/csv.hpp"
#include "mifo/error.hpp"
#include "mifo/forest.hpp"
#include "mifo/impute.hpp"
#include "mifo/linalg.hpp"
#include "mifo/matrix.hpp"
#include "mifo/methods.hpp"
#include "mifo/metrics.hpp"
#include "mifo/missing.hpp"
#include "mifo/report.hpp"
#include "mifo/synthetic.hpp"
