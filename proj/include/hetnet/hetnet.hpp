#pragma once

// Two-tier heterogeneous-network downlink analysis: biased association,
// macro-tier resource partitioning, SINR/rate coverage, an independent
// Monte Carlo validator, and joint operating-point search.

#include "hetnet/association.hpp"
#include "hetnet/ccdf.hpp"
#include "hetnet/common.hpp"
#include "hetnet/config.hpp"
#include "hetnet/distance.hpp"
#include "hetnet/io.hpp"
#include "hetnet/kernels.hpp"
#include "hetnet/load.hpp"
#include "hetnet/mc.hpp"
#include "hetnet/optimize.hpp"
#include "hetnet/quadrature.hpp"
#include "hetnet/rate.hpp"
#include "hetnet/sinr.hpp"
