#pragma once

#include "threshnet/dist.hpp"
#include "threshnet/error.hpp"
#include "threshnet/graph.hpp"
#include "threshnet/limits.hpp"
#include "threshnet/motifs.hpp"
#include "threshnet/quadrature.hpp"
#include "threshnet/random.hpp"
#include "threshnet/runner.hpp"
#include "threshnet/spatial.hpp"
#include "threshnet/stats.hpp"
